//! Linear subspaces of `ℚ^n` in canonical (RREF) form.

use serde::{Deserialize, Serialize};

use super::elim::Echelon;
use super::matrix::RatMat;
use super::q::Q;
use super::LinAlgError;

/// A subspace of `ℚ^ambient`, represented by the RREF of any spanning set.
///
/// Because the RREF is unique, two subspaces are equal iff their
/// representations are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    basis: RatMat,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: RatMat::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: RatMat::identity(ambient),
        }
    }

    /// Span of the rows of `m`.
    pub fn from_spanning_rows(m: RatMat) -> Subspace {
        let ambient = m.cols();
        Subspace {
            ambient,
            basis: m.rref(),
        }
    }

    pub fn from_vectors(vs: &[Vec<Q>], ambient: usize) -> Subspace {
        Subspace::from_spanning_rows(RatMat::from_rows(vs.to_vec(), ambient))
    }

    /// Span of the columns of `m`.
    pub fn from_spanning_cols(m: &RatMat) -> Subspace {
        Subspace::from_spanning_rows(m.transpose())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Basis vectors as rows, in RREF.
    pub fn basis(&self) -> &RatMat {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient × dim` matrix: the inclusion map.
    pub fn inclusion(&self) -> RatMat {
        self.basis.transpose()
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Q>> {
        self.basis.row_vecs()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn check(&self, other: &Subspace) -> Result<(), LinAlgError> {
        if self.ambient != other.ambient {
            return Err(LinAlgError::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        assert_eq!(
            v.len(),
            self.ambient,
            "vector does not live in the ambient space"
        );
        let mut e = Echelon::new(self.ambient);
        for r in 0..self.dim() {
            e.insert_dense(self.basis.row(r));
        }
        e.contains_dense(v)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool, LinAlgError> {
        self.check(other)?;
        Ok(self.sum(other)?.dim() == self.dim())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check(other)?;
        Ok(Subspace::from_spanning_rows(RatMat::vstack(
            &[&self.basis, &other.basis],
            self.ambient,
        )))
    }

    /// The annihilator, identifying `(ℚ^n)^*` with `ℚ^n` through the dot product.
    pub fn annihilator(&self) -> Subspace {
        self.basis.kernel()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check(other)?;
        if self.is_full() {
            return Ok(other.clone());
        }
        if other.is_full() {
            return Ok(self.clone());
        }
        let ann = self.annihilator().sum(&other.annihilator())?;
        Ok(ann.annihilator())
    }

    /// `S ∩ T = 0` and `dim S + dim T = ambient`.
    pub fn is_complement(&self, other: &Subspace, ambient: usize) -> Result<bool, LinAlgError> {
        self.check(other)?;
        if self.ambient != ambient {
            return Err(LinAlgError::AmbientMismatch {
                left: self.ambient,
                right: ambient,
            });
        }
        Ok(self.dim() + other.dim() == ambient && self.sum(other)?.dim() == ambient)
    }

    /// `{x : A x ∈ S}`.
    pub fn preimage(a: &RatMat, s: &Subspace) -> Result<Subspace, LinAlgError> {
        if a.rows() != s.ambient {
            return Err(LinAlgError::AmbientMismatch {
                left: a.rows(),
                right: s.ambient,
            });
        }
        let constraints = s.annihilator();
        if constraints.is_zero() {
            return Ok(Subspace::full(a.cols()));
        }
        Ok(constraints.basis.mul(a).kernel())
    }

    /// `A(S)`.
    pub fn image(a: &RatMat, s: &Subspace) -> Result<Subspace, LinAlgError> {
        if a.cols() != s.ambient {
            return Err(LinAlgError::AmbientMismatch {
                left: a.cols(),
                right: s.ambient,
            });
        }
        Ok(Subspace::from_spanning_cols(&a.mul(&s.inclusion())))
    }

    /// Coordinates of `v ∈ S` in the RREF basis: read off at the pivot columns.
    pub fn coordinates(&self, v: &[Q]) -> Result<Vec<Q>, LinAlgError> {
        if !self.contains(v) {
            return Err(LinAlgError::NotInSubspace);
        }
        Ok(self.pivots().iter().map(|&p| v[p].clone()).collect())
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|r| {
                self.basis
                    .row(r)
                    .iter()
                    .position(|q| !q.is_zero())
                    .expect("zero row in basis")
            })
            .collect()
    }

    /// A matrix `P` (`dim × ambient`) with `P v = coordinates(v)` for `v ∈ S`, namely
    /// restriction to the pivot columns.
    pub fn pivot_readout(&self) -> RatMat {
        let mut m = RatMat::zeros(self.dim(), self.ambient);
        for (r, p) in self.pivots().into_iter().enumerate() {
            m.set(r, p, Q::from(1));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| Q::int(x)).collect()
    }

    #[test]
    fn canonical_representation() {
        let a = Subspace::from_vectors(&[v(&[1, 1, 0]), v(&[0, 1, 1])], 3);
        let b = Subspace::from_vectors(&[v(&[1, 2, 1]), v(&[1, 0, -1])], 3);
        assert_eq!(a, b);
    }

    #[test]
    fn axes_are_complements() {
        let x = Subspace::from_vectors(&[v(&[1, 0])], 2);
        let y = Subspace::from_vectors(&[v(&[0, 1])], 2);
        assert!(x.is_complement(&y, 2).unwrap());
        assert!(!x.is_complement(&x, 2).unwrap());
        assert_eq!(x.intersect(&x).unwrap(), x);
        assert!(x.intersect(&y).unwrap().is_zero());
    }

    #[test]
    fn preimage_of_zero_under_projection() {
        let proj = RatMat::from_ints(&[&[1, 0]]);
        let pre = Subspace::preimage(&proj, &Subspace::zero(1)).unwrap();
        assert_eq!(pre, Subspace::from_vectors(&[v(&[0, 1])], 2));
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::zero(2);
        let b = Subspace::zero(3);
        assert_eq!(
            a.sum(&b),
            Err(LinAlgError::AmbientMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn coordinates_at_pivots() {
        let s = Subspace::from_vectors(&[v(&[1, 0, 2]), v(&[0, 1, 3])], 3);
        let w = v(&[2, -1, 1]);
        assert_eq!(s.coordinates(&w).unwrap(), v(&[2, -1]));
        assert_eq!(s.inclusion().apply(&s.coordinates(&w).unwrap()), w);
        assert_eq!(
            s.coordinates(&v(&[1, 0, 0])),
            Err(LinAlgError::NotInSubspace)
        );
    }
}
