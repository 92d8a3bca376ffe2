//! Rank over the prime field `𝔽_p`, `p = 2^61 - 1`.
//!
//! Reducing a rational matrix mod `p` can only lose rank, so `rank_p ≤ rank_ℚ`. Callers use
//! this as a one-sided bound and certify equality by other means.

use super::matrix::RatMat;

pub const P: u64 = (1 << 61) - 1;

fn mul(a: u64, b: u64) -> u64 {
    let t = a as u128 * b as u128;
    let lo = (t as u64) & P;
    let hi = (t >> 61) as u64;
    let s = lo + hi;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

pub(crate) fn inv(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, P - 2, 1);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

pub(crate) fn reduce_i128(x: i128) -> u64 {
    x.rem_euclid(P as i128) as u64
}

pub type Row = Vec<(usize, u64)>;

/// `a - c·b` for sorted sparse rows.
fn sub_scaled(a: &Row, c: u64, b: &Row) -> Row {
    let neg = P - c;
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, mul(neg, b[j].1)));
            j += 1;
        } else {
            let v = add(a[i].1, mul(neg, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Nonzero residues of each row of `m`, shifted right by `offset` and optionally negated.
pub fn residue_rows(m: &RatMat, offset: usize, negate: bool) -> Option<Vec<Row>> {
    (0..m.rows())
        .map(|r| {
            let mut row = Row::new();
            for (c, q) in m.row(r).iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let v = q.residue()?;
                if v != 0 {
                    row.push((offset + c, if negate { P - v } else { v }));
                }
            }
            Some(row)
        })
        .collect()
}

/// Rank mod `p` of sparse rows with sorted, nonzero entries.
pub fn rank_rows(rows: impl IntoIterator<Item = Row>, cols: usize) -> usize {
    let mut pivots: Vec<Option<Row>> = vec![None; cols];
    let mut rank = 0;
    for mut row in rows {
        while let Some(&(lead, lv)) = row.first() {
            match &pivots[lead] {
                Some(p) => row = sub_scaled(&row, lv, p),
                None => {
                    let li = inv(lv);
                    pivots[lead] = Some(row.into_iter().map(|(c, v)| (c, mul(v, li))).collect());
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// The product of sparse row matrices `a · b`, where `b` has `cols` columns.
pub fn mul_rows(a: &[Row], b: &[Row], cols: usize) -> Vec<Row> {
    let mut acc = vec![0u64; cols];
    a.iter()
        .map(|row| {
            for &(j, v) in row {
                for &(c, w) in &b[j] {
                    acc[c] = add(acc[c], mul(v, w));
                }
            }
            let out: Row = acc.iter().enumerate().filter(|(_, &x)| x != 0).map(|(c, &x)| (c, x)).collect();
            acc.iter_mut().for_each(|x| *x = 0);
            out
        })
        .collect()
}

/// Rank of `m` mod `p`, or `None` if some denominator vanishes mod `p`.
pub fn rank_mod_p(m: &RatMat) -> Option<usize> {
    Some(rank_rows(residue_rows(m, 0, false)?, m.cols()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_p() {
        for a in [1u64, 2, 3, 12345, P - 1] {
            assert_eq!(mul(a, inv(a)), 1);
        }
    }

    #[test]
    fn agrees_with_exact_rank_on_small_matrices() {
        let m = RatMat::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, -1]]);
        assert_eq!(rank_mod_p(&m), Some(m.rank()));
    }
}
