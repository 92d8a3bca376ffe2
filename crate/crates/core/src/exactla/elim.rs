//! Incremental Gaussian elimination on sparse rows.
//!
//! Matrices arising from simplicial bundles are overwhelmingly zero, so the
//! elimination state keeps each pivot row as a sorted list of `(column, value)`
//! pairs. Every inserted row is reduced against all existing pivots before it
//! becomes a pivot itself, which keeps the state in row-echelon form at all times.

use super::matrix::RatMat;
use super::q::Q;
use super::subspace::Subspace;

pub(crate) type SparseRow = Vec<(usize, Q)>;

pub(crate) fn sparse_from_dense(v: &[Q]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, q)| !q.is_zero())
        .map(|(i, q)| (i, q.clone()))
        .collect()
}

/// `a + c·b` for sorted sparse rows.
fn axpy(a: &SparseRow, c: &Q, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub(crate) struct Echelon {
    cols: usize,
    rows: Vec<SparseRow>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub(crate) fn new(cols: usize) -> Echelon {
        Echelon {
            cols,
            rows: Vec::new(),
            pivot_row: vec![None; cols],
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `row` against every pivot (all pivot columns are cleared).
    pub(crate) fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let mut idx = 0;
        while idx < row.len() {
            let (c, v) = (row[idx].0, row[idx].1.clone());
            match self.pivot_row[c] {
                Some(p) => row = axpy(&row, &-v, &self.rows[p]),
                None => idx += 1,
            }
        }
        row
    }

    /// Insert a row; returns `true` if it was independent of the previous rows.
    pub(crate) fn insert(&mut self, row: SparseRow) -> bool {
        let row = self.reduce(row);
        let Some((lead, lv)) = row.first().cloned() else {
            return false;
        };
        let inv = lv.recip();
        let row: SparseRow = row.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
        self.pivot_row[lead] = Some(self.rows.len());
        self.rows.push(row);
        true
    }

    pub(crate) fn insert_dense(&mut self, v: &[Q]) -> bool {
        debug_assert_eq!(v.len(), self.cols);
        self.insert(sparse_from_dense(v))
    }

    pub(crate) fn contains_dense(&self, v: &[Q]) -> bool {
        self.reduce(sparse_from_dense(v)).is_empty()
    }

    /// Fully reduced pivot rows sorted by leading column.
    fn reduced_rows(&self) -> Vec<SparseRow> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| self.rows[r][0].0);
        let mut done: Vec<SparseRow> = vec![Vec::new(); self.rows.len()];
        // Rows with later leads are finished first; each earlier row is then
        // cleared of every later pivot column.
        for &r in order.iter().rev() {
            let row = &self.rows[r];
            let lead = row[0].0;
            let mut cur = row.clone();
            let mut idx = 1;
            while idx < cur.len() {
                let (c, v) = (cur[idx].0, cur[idx].1.clone());
                match self.pivot_row[c] {
                    Some(p) if c != lead => cur = axpy(&cur, &-v, &done[p]),
                    _ => idx += 1,
                }
            }
            done[r] = cur;
        }
        order
            .into_iter()
            .map(|r| std::mem::take(&mut done[r]))
            .collect()
    }

    pub(crate) fn into_rref(self) -> RatMat {
        let cols = self.cols;
        let rows = self.reduced_rows();
        let mut m = RatMat::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row {
                m.set(r, *c, v.clone());
            }
        }
        m
    }

    pub(crate) fn kernel(&self) -> Subspace {
        let rows = self.reduced_rows();
        let pivots: Vec<usize> = rows.iter().map(|r| r[0].0).collect();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = RatMat::zeros(free.len(), self.cols);
        let free_pos: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (k, &f) in free.iter().enumerate() {
                v[f] = Some(k);
            }
            v
        };
        for (k, &f) in free.iter().enumerate() {
            basis.set(k, f, Q::int(1));
        }
        for (row, &p) in rows.iter().zip(&pivots) {
            for (c, v) in row.iter().skip(1) {
                if let Some(k) = free_pos[*c] {
                    basis.set(k, p, -v);
                }
            }
        }
        Subspace::from_spanning_rows(basis)
    }
}
