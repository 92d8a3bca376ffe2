//! Dense rational matrices.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::elim::Echelon;
use super::q::Q;
use super::subspace::Subspace;
use super::LinAlgError;

/// A dense `rows × cols` matrix over ℚ in row-major order.
///
/// Matrices act on column vectors: a map `ℚ^a -> ℚ^b` is a `b × a` matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatDoc", into = "MatDoc")]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct MatDoc {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Q>>,
}

impl From<RatMat> for MatDoc {
    fn from(m: RatMat) -> MatDoc {
        MatDoc {
            rows: m.rows,
            cols: m.cols,
            entries: m.row_vecs(),
        }
    }
}

impl TryFrom<MatDoc> for RatMat {
    type Error = LinAlgError;
    fn try_from(d: MatDoc) -> Result<RatMat, LinAlgError> {
        if d.entries.len() != d.rows || d.entries.iter().any(|r| r.len() != d.cols) {
            return Err(LinAlgError::Shape {
                expected: (d.rows, d.cols),
                got: (d.entries.len(), d.entries.first().map_or(0, Vec::len)),
            });
        }
        Ok(RatMat {
            rows: d.rows,
            cols: d.cols,
            data: d.entries.into_iter().flatten().collect(),
        })
    }
}

impl fmt::Debug for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMat {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|q| q.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> RatMat {
        RatMat {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> RatMat {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    pub fn scalar(n: usize, c: &Q) -> RatMat {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>, cols: usize) -> RatMat {
        let r = rows.len();
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        RatMat {
            rows: r,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Integer entries, for tests and fixtures.
    pub fn from_ints(rows: &[&[i64]]) -> RatMat {
        let cols = rows.first().map_or(0, |r| r.len());
        RatMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Q::int(x)).collect())
                .collect(),
            cols,
        )
    }

    pub fn from_cols(cols: &[Vec<Q>], rows: usize) -> RatMat {
        let mut m = RatMat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Q::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    if r == c {
                        self.get(r, c).is_one()
                    } else {
                        self.get(r, c).is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> RatMat {
        let mut t = RatMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if !v.is_zero() {
                    t.data[c * self.rows + r] = v.clone();
                }
            }
        }
        t
    }

    /// Matrix product `self · rhs`, skipping zero entries on both sides.
    pub fn mul(&self, rhs: &RatMat) -> RatMat {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} · {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = RatMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let brow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    if !b.is_zero() {
                        *o = &*o + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(
            self.cols,
            v.len(),
            "vector length {} does not match {} columns",
            v.len(),
            self.cols
        );
        (0..self.rows)
            .map(|r| {
                let mut acc = Q::zero();
                for (a, x) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &RatMat) -> RatMat {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix sum shape mismatch"
        );
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &RatMat) -> RatMat {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix difference shape mismatch"
        );
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add_assign(&mut self, rhs: &RatMat) {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix sum shape mismatch"
        );
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a = &*a + b;
            }
        }
    }

    pub fn scale(&self, c: &Q) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> RatMat {
        self.scale(&-Q::one())
    }

    /// Write `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &RatMat) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block does not fit"
        );
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.data[(r0 + r) * self.cols + c0 + c] = block.get(r, c).clone();
            }
        }
    }

    /// Add `block` into `self` at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &RatMat) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block does not fit"
        );
        for r in 0..block.rows {
            for c in 0..block.cols {
                let b = block.get(r, c);
                if !b.is_zero() {
                    let slot = &mut self.data[(r0 + r) * self.cols + c0 + c];
                    *slot = &*slot + b;
                }
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> RatMat {
        let mut m = RatMat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = self.get(r0 + r, c0 + c).clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMat {
        RatMat::from_rows(
            idx.iter().map(|&r| self.row(r).to_vec()).collect(),
            self.cols,
        )
    }

    pub fn select_cols(&self, idx: &[usize]) -> RatMat {
        let mut m = RatMat::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m.data[r * idx.len() + j] = self.get(r, c).clone();
            }
        }
        m
    }

    /// Stack vertically; all parts must have the same number of columns.
    pub fn vstack(parts: &[&RatMat], cols: usize) -> RatMat {
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            data.extend_from_slice(&p.data);
            rows += p.rows;
        }
        RatMat { rows, cols, data }
    }

    /// Place side by side; all parts must have the same number of rows.
    pub fn hstack(parts: &[&RatMat], rows: usize) -> RatMat {
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut m = RatMat::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            m.set_block(0, c0, p);
            c0 += p.cols;
        }
        m
    }

    /// Block-diagonal sum.
    pub fn direct_sum(parts: &[&RatMat]) -> RatMat {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut m = RatMat::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            m.set_block(r0, c0, p);
            r0 += p.rows;
            c0 += p.cols;
        }
        m
    }

    fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.cols);
        for r in 0..self.rows {
            e.insert_dense(self.row(r));
        }
        e
    }

    pub fn rank(&self) -> usize {
        if self.rows <= self.cols {
            self.echelon().rank()
        } else {
            self.transpose().echelon().rank()
        }
    }

    /// Reduced row-echelon form with zero rows removed.
    pub fn rref(&self) -> RatMat {
        self.echelon().into_rref()
    }

    /// Null space `{x : self · x = 0}`.
    pub fn kernel(&self) -> Subspace {
        self.echelon().kernel()
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::from_spanning_rows(self.transpose())
    }

    /// The row space, as a subspace of `ℚ^cols`.
    pub fn row_space(&self) -> Subspace {
        Subspace::from_spanning_rows(self.clone())
    }

    /// The unique solution of `self · x = b`.
    pub fn solve_unique(&self, b: &[Q]) -> Result<Vec<Q>, LinAlgError> {
        assert_eq!(b.len(), self.rows, "right-hand side has wrong length");
        let mut aug = RatMat::zeros(self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (r, v) in b.iter().enumerate() {
            aug.set(r, self.cols, v.clone());
        }
        let red = aug.rref();
        let pivots = pivot_columns(&red);
        if pivots.contains(&self.cols) {
            return Err(LinAlgError::NoSolution);
        }
        if pivots.len() < self.cols {
            return Err(LinAlgError::NotUnique {
                kernel_dim: self.cols - pivots.len(),
            });
        }
        Ok((0..self.cols)
            .map(|r| red.get(r, self.cols).clone())
            .collect())
    }

    /// Some solution of `self · x = b`, free variables set to zero.
    pub fn solve_any(&self, b: &[Q]) -> Result<Vec<Q>, LinAlgError> {
        let mut aug = RatMat::zeros(self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (r, v) in b.iter().enumerate() {
            aug.set(r, self.cols, v.clone());
        }
        let red = aug.rref();
        let pivots = pivot_columns(&red);
        if pivots.contains(&self.cols) {
            return Err(LinAlgError::NoSolution);
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = red.get(r, self.cols).clone();
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<RatMat, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::Shape {
                expected: (self.rows, self.rows),
                got: (self.rows, self.cols),
            });
        }
        let n = self.rows;
        let aug = RatMat::hstack(&[self, &RatMat::identity(n)], n);
        let red = aug.rref();
        if red.rows < n
            || (0..n).any(|i| !red.get(i, i).is_one())
            || pivot_columns(&red)
                .iter()
                .take(n)
                .enumerate()
                .any(|(i, &p)| i != p)
        {
            return Err(LinAlgError::Singular);
        }
        Ok(red.block(0, n, n, n))
    }
}

/// Leading column of each row of a matrix already in row-echelon form.
pub fn pivot_columns(rref: &RatMat) -> Vec<usize> {
    (0..rref.rows)
        .filter_map(|r| rref.row(r).iter().position(|q| !q.is_zero()))
        .collect()
}

pub fn zero_vec(n: usize) -> Vec<Q> {
    vec![Q::zero(); n]
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Q::is_zero)
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Q> {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

pub fn add_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(a: &[Q], c: &Q) -> Vec<Q> {
    a.iter().map(|x| x * c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = RatMat::from_ints(&[&[1, 2], &[0, 1], &[3, 0]]);
        let b = RatMat::from_ints(&[&[1, 0, 2], &[0, 1, 1]]);
        let ab = a.mul(&b);
        assert_eq!(ab, RatMat::from_ints(&[&[1, 2, 4], &[0, 1, 1], &[3, 0, 6]]));
        assert_eq!(ab.transpose(), b.transpose().mul(&a.transpose()));
    }

    #[test]
    fn kernel_examples() {
        let z = RatMat::zeros(2, 3);
        assert_eq!(z.kernel().dim(), 3);
        assert_eq!(RatMat::identity(4).kernel().dim(), 0);
        let a = RatMat::from_ints(&[&[1, 1], &[2, 2]]);
        let k = a.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[Q::int(1), Q::int(-1)]));
    }

    #[test]
    fn solve_examples() {
        let v = vec![Q::int(4), Q::frac(-1, 3)];
        assert_eq!(RatMat::identity(2).solve_unique(&v).unwrap(), v);
        assert_eq!(
            RatMat::from_ints(&[&[2]])
                .solve_unique(&[Q::int(3)])
                .unwrap(),
            vec![Q::frac(3, 2)]
        );
        let sing = RatMat::from_ints(&[&[1, 1], &[1, 1]]);
        assert_eq!(
            sing.solve_unique(&[Q::int(1), Q::int(2)]),
            Err(LinAlgError::NoSolution)
        );
        assert_eq!(
            sing.solve_unique(&[Q::int(1), Q::int(1)]),
            Err(LinAlgError::NotUnique { kernel_dim: 1 })
        );
    }

    #[test]
    fn inverse_roundtrip() {
        let a = RatMat::from_ints(&[&[2, 1, 0], &[1, 1, 0], &[0, 5, 3]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert_eq!(
            RatMat::from_ints(&[&[1, 2], &[2, 4]]).inverse(),
            Err(LinAlgError::Singular)
        );
    }

    #[test]
    fn rank_of_tall_and_wide() {
        let a = RatMat::from_ints(&[&[1, 2], &[2, 4], &[0, 1]]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.transpose().rank(), 2);
    }

    #[test]
    fn json_roundtrip() {
        let a = RatMat::from_rows(vec![vec![Q::frac(1, 2), Q::int(-3)]], 2);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":[["1/2","-3"]]}"#);
        let b: RatMat = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
