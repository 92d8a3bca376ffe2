//! Exact linear algebra over ℚ.

mod elim;
mod matrix;
pub mod modp;
mod q;
mod subspace;

use thiserror::Error;

pub use matrix::{
    add_vec, is_zero_vec, pivot_columns, scale_vec, sub_vec, unit_vec, zero_vec, RatMat,
};
pub use q::{ParseQError, Q};
pub use subspace::Subspace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("linear system has no solution")]
    NoSolution,
    #[error("linear system has a {kernel_dim}-dimensional family of solutions")]
    NotUnique { kernel_dim: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("expected a {}x{} matrix, got {}x{}", expected.0, expected.1, got.0, got.1)]
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("vector is not in the subspace")]
    NotInSubspace,
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn small_q() -> impl Strategy<Value = Q> {
        (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Q::frac(n, d))
    }

    fn mat(rows: usize, cols: usize) -> impl Strategy<Value = RatMat> {
        // Bias towards zeros so that rank deficiency actually shows up.
        prop::collection::vec(
            prop_oneof![3 => Just(Q::int(0)), 2 => small_q()],
            rows * cols,
        )
        .prop_map(move |d| RatMat::from_rows(d.chunks(cols).map(|c| c.to_vec()).collect(), cols))
    }

    proptest! {
        #[test]
        fn rank_nullity(a in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| mat(r, c))) {
            let k = a.kernel();
            prop_assert_eq!(k.dim() + a.rank(), a.cols());
            for x in k.basis_vectors() {
                prop_assert!(is_zero_vec(&a.apply(&x)));
            }
        }

        #[test]
        fn rref_is_canonical(a in mat(4, 5), p in mat(4, 4)) {
            // Rows of p·a span a subspace of rowspace(a), equal to it when p is invertible.
            let s = a.row_space();
            let t = p.mul(&a).row_space();
            prop_assert!(s.contains_subspace(&t).unwrap());
            if p.rank() == 4 {
                prop_assert_eq!(s, t);
            }
        }

        #[test]
        fn image_preimage_adjunction(a in mat(5, 5), b in mat(2, 5)) {
            let s = b.row_space();
            let pre = Subspace::preimage(&a, &s).unwrap();
            let back = Subspace::image(&a, &pre).unwrap();
            prop_assert!(s.contains_subspace(&back).unwrap());
        }

        #[test]
        fn intersection_dimension_formula(a in mat(3, 5), b in mat(3, 5)) {
            let s = a.row_space();
            let t = b.row_space();
            let i = s.intersect(&t).unwrap();
            prop_assert_eq!(i.dim() + s.sum(&t).unwrap().dim(), s.dim() + t.dim());
            prop_assert!(s.contains_subspace(&i).unwrap() && t.contains_subspace(&i).unwrap());
        }

        #[test]
        fn solve_recovers_solution(a in mat(4, 4), x in prop::collection::vec(small_q(), 4)) {
            let b = a.apply(&x);
            match a.solve_unique(&b) {
                Ok(y) => prop_assert_eq!(y, x),
                Err(LinAlgError::NotUnique { kernel_dim }) => prop_assert_eq!(kernel_dim, 4 - a.rank()),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }
}
