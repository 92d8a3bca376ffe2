//! Monotone maps between finite ordinals `[n] = {0, ..., n}`.
//!
//! Every index in the library is one of these maps: face and degeneracy
//! generators, the first/last inclusions, vertex inclusions, and the
//! 0-preserving injections that label the summands of a Dold–Kan style
//! decomposition.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrdMapError {
    #[error(
        "cannot compose: inner codomain [{inner_cod}] differs from outer domain [{outer_dom}]"
    )]
    Incompatible { outer_dom: usize, inner_cod: usize },
    #[error("images must be weakly increasing and lie in 0..={cod}")]
    NotMonotone { cod: usize },
    #[error("a map out of [{dom}] needs {expected} images, got {got}")]
    WrongLength {
        dom: usize,
        expected: usize,
        got: usize,
    },
}

/// A weakly monotone map `[dom] -> [cod]`, stored as its list of images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrdMap {
    dom: usize,
    cod: usize,
    images: Vec<usize>,
}

impl fmt::Debug for OrdMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]->[{}]{:?}", self.dom, self.cod, self.images)
    }
}

impl OrdMap {
    pub fn new(cod: usize, images: Vec<usize>) -> Result<Self, OrdMapError> {
        if images.is_empty() {
            return Err(OrdMapError::WrongLength {
                dom: 0,
                expected: 1,
                got: 0,
            });
        }
        let monotone = images.windows(2).all(|w| w[0] <= w[1]);
        if !monotone || images.iter().any(|&i| i > cod) {
            return Err(OrdMapError::NotMonotone { cod });
        }
        Ok(OrdMap {
            dom: images.len() - 1,
            cod,
            images,
        })
    }

    pub fn identity(n: usize) -> Self {
        OrdMap {
            dom: n,
            cod: n,
            images: (0..=n).collect(),
        }
    }

    /// `δ_i : [n-1] -> [n]`, the injection that skips `i`.
    pub fn delta(n: usize, i: usize) -> Self {
        assert!(n >= 1 && i <= n, "delta_{i} into [{n}] is undefined");
        let images = (0..n).map(|a| if a < i { a } else { a + 1 }).collect();
        OrdMap {
            dom: n - 1,
            cod: n,
            images,
        }
    }

    /// `υ_j : [n+1] -> [n]`, the surjection that hits `j` twice.
    pub fn upsilon(n: usize, j: usize) -> Self {
        assert!(j <= n, "upsilon_{j} onto [{n}] is undefined");
        let images = (0..=n + 1)
            .map(|a| if a <= j { a } else { a - 1 })
            .collect();
        OrdMap {
            dom: n + 1,
            cod: n,
            images,
        }
    }

    /// `σ_k : [k] -> [n]`, the first inclusion `i ↦ i`.
    pub fn sigma(k: usize, n: usize) -> Self {
        assert!(k <= n);
        OrdMap {
            dom: k,
            cod: n,
            images: (0..=k).collect(),
        }
    }

    /// `τ_k : [k] -> [n]`, the last inclusion `i ↦ i + n - k`.
    pub fn tau(k: usize, n: usize) -> Self {
        assert!(k <= n);
        OrdMap {
            dom: k,
            cod: n,
            images: (0..=k).map(|i| i + n - k).collect(),
        }
    }

    /// `χ_i : [0] -> [n]`, the inclusion of the `i`-th vertex.
    pub fn chi(i: usize, n: usize) -> Self {
        assert!(i <= n);
        OrdMap {
            dom: 0,
            cod: n,
            images: vec![i],
        }
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_injective(&self) -> bool {
        self.images.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        self.images[0] == 0
            && self.images[self.dom] == self.cod
            && self.images.windows(2).all(|w| w[1] - w[0] <= 1)
    }

    pub fn preserves_zero(&self) -> bool {
        self.images[0] == 0
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.images.iter().enumerate().all(|(a, &b)| a == b)
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &OrdMap, inner: &OrdMap) -> Result<OrdMap, OrdMapError> {
        if inner.cod != outer.dom {
            return Err(OrdMapError::Incompatible {
                outer_dom: outer.dom,
                inner_cod: inner.cod,
            });
        }
        Ok(OrdMap {
            dom: inner.dom,
            cod: outer.cod,
            images: inner.images.iter().map(|&i| outer.images[i]).collect(),
        })
    }

    /// Composition that panics on mismatched ends; for internal index arithmetic.
    pub fn then(&self, inner: &OrdMap) -> OrdMap {
        OrdMap::compose(self, inner).expect("incompatible order maps")
    }

    /// `θ′ : [m+1] -> [n+1]` with `θ′(0) = 0` and `θ′(i+1) = θ(i) + 1`.
    pub fn prime(&self) -> OrdMap {
        let mut images = Vec::with_capacity(self.dom + 2);
        images.push(0);
        images.extend(self.images.iter().map(|&i| i + 1));
        OrdMap {
            dom: self.dom + 1,
            cod: self.cod + 1,
            images,
        }
    }

    /// Image set as a bitmask (bit `i` set iff `i` is hit).
    pub fn mask(&self) -> u64 {
        self.images.iter().fold(0u64, |m, &i| m | (1 << i))
    }

    /// The injection `[k] -> [n]` whose image is the given bitmask.
    pub fn from_mask(mask: u64, n: usize) -> OrdMap {
        assert!(
            mask != 0 && mask >> (n + 1) == 0,
            "mask {mask:#b} is not a nonempty subset of [{n}]"
        );
        let images: Vec<usize> = (0..=n).filter(|&i| mask & (1 << i) != 0).collect();
        OrdMap {
            dom: images.len() - 1,
            cod: n,
            images,
        }
    }

    /// Unique factorization `self = mono ∘ epi` with `epi` surjective and `mono` injective.
    pub fn epi_mono(&self) -> (OrdMap, OrdMap) {
        let mut distinct: Vec<usize> = self.images.clone();
        distinct.dedup();
        let k = distinct.len() - 1;
        let epi_images = self
            .images
            .iter()
            .map(|v| distinct.iter().position(|d| d == v).unwrap())
            .collect();
        let epi = OrdMap {
            dom: self.dom,
            cod: k,
            images: epi_images,
        };
        let mono = OrdMap {
            dom: k,
            cod: self.cod,
            images: distinct,
        };
        (epi, mono)
    }
}

/// Number of injective 0-preserving maps into `[n]`, i.e. `2^n`.
pub fn zero_mono_count(n: usize) -> usize {
    1usize << n
}

/// Position of a 0-preserving injection in the canonical enumeration.
///
/// The enumeration orders maps by ascending image bitmask; since bit 0 is
/// always set the position is simply `mask >> 1`.
pub fn zero_mono_index(alpha: &OrdMap) -> usize {
    debug_assert!(alpha.preserves_zero() && alpha.is_injective());
    (alpha.mask() >> 1) as usize
}

/// Position of a 0-preserving image set given directly as a bitmask.
pub fn zero_mono_index_of_mask(mask: u64) -> usize {
    debug_assert!(mask & 1 == 1);
    (mask >> 1) as usize
}

/// Inverse of [`zero_mono_index`].
pub fn zero_mono_mask(index: usize) -> u64 {
    ((index as u64) << 1) | 1
}

/// All injective `α : [k] -> [n]` with `α(0) = 0`, `0 ≤ k ≤ n`, by ascending image bitmask.
pub fn enumerate_zero_monos(n: usize) -> Vec<OrdMap> {
    (0..zero_mono_count(n))
        .map(|idx| OrdMap::from_mask(zero_mono_mask(idx), n))
        .collect()
}

/// All surjections `[n] -> [k]`, `0 ≤ k ≤ n`, ordered by the bitmask of their jump positions.
///
/// A surjection `β` is determined by the set `{j ≥ 1 : β(j) > β(j-1)}`; together with `0`
/// this set is the image of the dual 0-preserving injection, so both enumerations share
/// the same positions.
pub fn enumerate_surjections(n: usize) -> Vec<OrdMap> {
    (0..zero_mono_count(n))
        .map(|idx| surjection_dual_to(&OrdMap::from_mask(zero_mono_mask(idx), n)))
        .collect()
}

/// The surjection `[n] -> [k]` dual to a 0-preserving injection `[k] -> [n]`:
/// it jumps exactly at the points of the image other than `0`.
pub fn surjection_dual_to(alpha: &OrdMap) -> OrdMap {
    debug_assert!(alpha.preserves_zero() && alpha.is_injective());
    let n = alpha.cod();
    let mut images = Vec::with_capacity(n + 1);
    let mut level = 0;
    for j in 0..=n {
        if j > 0 && alpha.images().contains(&j) {
            level += 1;
        }
        images.push(level);
    }
    OrdMap {
        dom: n,
        cod: alpha.dom(),
        images,
    }
}

/// The 0-preserving injection dual to a surjection (inverse of [`surjection_dual_to`]).
pub fn injection_dual_to(beta: &OrdMap) -> OrdMap {
    debug_assert!(beta.is_surjective());
    let mut images = vec![0];
    for j in 1..=beta.dom() {
        if beta.apply(j) > beta.apply(j - 1) {
            images.push(j);
        }
    }
    OrdMap {
        dom: beta.cod(),
        cod: beta.dom(),
        images,
    }
}

/// How a summand `α` of level `n` feeds the summand `β` of level `n-1` under `d_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum D0Case {
    /// `α = β′ ∘ σ_k`, `0 ≤ k ≤ l+1`.
    CaseI(usize),
    /// `α = β′ ∘ δ_i`, `1 ≤ i ≤ l`.
    CaseII(usize),
    None,
}

/// Classify the pair `(β, α)` for the `d_0` matrix of a semi-direct product.
///
/// `β : [l] -> [n-1]` and `α : [k] -> [n]` must both be injective and 0-preserving.
pub fn classify_d0(beta: &OrdMap, alpha: &OrdMap) -> D0Case {
    assert!(
        beta.is_injective()
            && beta.preserves_zero()
            && alpha.is_injective()
            && alpha.preserves_zero(),
        "classify_d0 expects 0-preserving injections"
    );
    assert_eq!(
        beta.cod() + 1,
        alpha.cod(),
        "classify_d0: beta must map into [n-1] when alpha maps into [n]"
    );
    classify_d0_masks(beta.mask(), alpha.mask(), beta.dom())
}

/// Bitmask version of [`classify_d0`]: `bm` is the image of `β` (of dimension `l`),
/// `am` the image of `α`.
pub fn classify_d0_masks(bm: u64, am: u64, l: usize) -> D0Case {
    let bp = (bm << 1) | 1; // image of β′
    if am & !bp != 0 {
        return D0Case::None;
    }
    let missing = bp & !am;
    if missing == 0 {
        return D0Case::CaseI(l + 1);
    }
    // `α` is an initial segment of β′ iff every missing point lies above every kept point.
    let top_kept = 63 - am.leading_zeros() as u64;
    let low_missing = missing.trailing_zeros() as u64;
    if low_missing > top_kept {
        let k = am.count_ones() as usize - 1;
        return D0Case::CaseI(k);
    }
    if missing.count_ones() == 1 {
        // position of the missing point inside β′
        let i = (bp & (missing - 1)).count_ones() as usize;
        if (1..=l).contains(&i) {
            return D0Case::CaseII(i);
        }
    }
    D0Case::None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(cod: usize, v: &[usize]) -> OrdMap {
        OrdMap::new(cod, v.to_vec()).unwrap()
    }

    #[test]
    fn delta_then_upsilon_pointwise() {
        let d1 = OrdMap::delta(2, 1);
        let u0 = OrdMap::upsilon(1, 0);
        assert_eq!(d1.images(), &[0, 2]);
        assert_eq!(u0.images(), &[0, 0, 1]);
        let c = OrdMap::compose(&d1, &u0).unwrap();
        assert_eq!(c, im(2, &[0, 0, 2]));
    }

    #[test]
    fn identity_is_neutral() {
        let t = im(4, &[0, 2, 2, 4]);
        assert_eq!(OrdMap::identity(4).then(&t), t);
        assert_eq!(t.then(&OrdMap::identity(3)), t);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let err = OrdMap::compose(&OrdMap::delta(3, 0), &OrdMap::delta(3, 0)).unwrap_err();
        assert_eq!(
            err,
            OrdMapError::Incompatible {
                outer_dom: 2,
                inner_cod: 3
            }
        );
    }

    #[test]
    fn cosimplicial_identities() {
        for n in 2..7 {
            for j in 0..=n {
                for i in 0..j {
                    // δ_j δ_i = δ_i δ_{j-1}
                    assert_eq!(
                        OrdMap::delta(n, j).then(&OrdMap::delta(n - 1, i)),
                        OrdMap::delta(n, i).then(&OrdMap::delta(n - 1, j - 1))
                    );
                }
            }
            for j in 0..n {
                for i in 0..=j {
                    // υ_j υ_i = υ_i υ_{j+1}
                    assert_eq!(
                        OrdMap::upsilon(n - 1, j).then(&OrdMap::upsilon(n, i)),
                        OrdMap::upsilon(n - 1, i).then(&OrdMap::upsilon(n, j + 1))
                    );
                }
            }
            for j in 0..n {
                for i in 0..=n {
                    let lhs = OrdMap::upsilon(n - 1, j).then(&OrdMap::delta(n, i));
                    if i == j || i == j + 1 {
                        assert!(lhs.is_identity());
                    } else if i < j {
                        assert_eq!(
                            lhs,
                            OrdMap::delta(n - 1, i).then(&OrdMap::upsilon(n - 2, j - 1))
                        );
                    } else {
                        assert_eq!(
                            lhs,
                            OrdMap::delta(n - 1, i - 1).then(&OrdMap::upsilon(n - 2, j))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn prime_examples() {
        for n in 1..6 {
            for i in 0..=n {
                assert_eq!(OrdMap::delta(n, i).prime(), OrdMap::delta(n + 1, i + 1));
                assert_eq!(OrdMap::upsilon(n, i).prime(), OrdMap::upsilon(n + 1, i + 1));
            }
            assert_eq!(OrdMap::identity(n).prime(), OrdMap::identity(n + 1));
        }
    }

    #[test]
    fn zero_mono_counts() {
        assert_eq!(enumerate_zero_monos(0), vec![OrdMap::identity(0)]);
        let two = enumerate_zero_monos(2);
        let sets: Vec<Vec<usize>> = two.iter().map(|a| a.images().to_vec()).collect();
        assert_eq!(sets, vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 1, 2]]);
        assert_eq!(enumerate_zero_monos(5).len(), 32);
        for (idx, a) in enumerate_zero_monos(5).iter().enumerate() {
            assert_eq!(zero_mono_index(a), idx);
        }
    }

    #[test]
    fn classify_first_and_skip() {
        for n in 1..6 {
            let beta = OrdMap::identity(n - 1);
            for k in 0..=n {
                assert_eq!(classify_d0(&beta, &OrdMap::sigma(k, n)), D0Case::CaseI(k));
            }
            for i in 1..n {
                assert_eq!(classify_d0(&beta, &OrdMap::delta(n, i)), D0Case::CaseII(i));
            }
        }
    }

    #[test]
    fn classify_spec_pair_is_a_skip() {
        // β′ = {0,1,2} and β′δ_1 = {0,2}
        let beta = im(2, &[0, 1]);
        assert_eq!(classify_d0(&beta, &im(3, &[0, 2])), D0Case::CaseII(1));
        assert_eq!(classify_d0(&beta, &im(3, &[0, 3])), D0Case::None);
    }

    #[test]
    fn surjection_duality_roundtrip() {
        for n in 0..6 {
            for a in enumerate_zero_monos(n) {
                let b = surjection_dual_to(&a);
                assert!(b.is_surjective());
                assert_eq!(injection_dual_to(&b), a);
            }
            assert_eq!(enumerate_surjections(n).len(), 1 << n);
        }
    }

    #[test]
    fn epi_mono_factorization() {
        let t = im(5, &[1, 1, 3, 4, 4]);
        let (e, m) = t.epi_mono();
        assert!(e.is_surjective() && m.is_injective());
        assert_eq!(m.then(&e), t);
    }
}
