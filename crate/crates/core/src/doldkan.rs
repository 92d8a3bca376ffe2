//! Chain complexes, simplicial vector spaces and the Dold–Kan correspondence.
//!
//! Two inverses of the normalization are provided. [`dk`] is indexed by
//! 0-preserving injections `α : [k] -> [n]`, with faces and degeneracies given
//! by index transport and a two-case formula for `d_0`. [`dk_classic`] is the
//! textbook construction indexed by surjections `[n] -> [k]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{LinAlgError, RatMat, Subspace, Q};
use crate::ordmaps::{
    classify_d0_masks, enumerate_surjections, zero_mono_count, zero_mono_mask, D0Case, OrdMap,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DoldKanError {
    #[error("boundary ∂_{degree} has shape {got:?}, expected {expected:?}")]
    Shape {
        degree: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("∂_{0} ∘ ∂_{1} is not zero", degree - 1, degree)]
    NotAComplex { degree: usize },
    #[error("simplicial identity {name} fails at level {level}")]
    Identity { name: String, level: usize },
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// A bounded chain complex `Y_top -> ... -> Y_1 -> Y_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChainDoc", into = "ChainDoc")]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// `boundaries[n - 1] = ∂_n : Y_n -> Y_{n-1}`.
    boundaries: Vec<RatMat>,
}

#[derive(Serialize, Deserialize)]
struct ChainDoc {
    dims: Vec<usize>,
    boundaries: Vec<RatMat>,
}

impl From<ChainComplex> for ChainDoc {
    fn from(c: ChainComplex) -> ChainDoc {
        ChainDoc {
            dims: c.dims,
            boundaries: c.boundaries,
        }
    }
}

impl TryFrom<ChainDoc> for ChainComplex {
    type Error = DoldKanError;
    fn try_from(d: ChainDoc) -> Result<ChainComplex, DoldKanError> {
        ChainComplex::new(d.dims, d.boundaries)
    }
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<RatMat>) -> Result<ChainComplex, DoldKanError> {
        let top = dims.len().saturating_sub(1);
        if boundaries.len() != top {
            return Err(DoldKanError::Shape {
                degree: boundaries.len(),
                expected: (0, 0),
                got: (boundaries.len(), top),
            });
        }
        for n in 1..=top {
            let b = &boundaries[n - 1];
            if (b.rows(), b.cols()) != (dims[n - 1], dims[n]) {
                return Err(DoldKanError::Shape {
                    degree: n,
                    expected: (dims[n - 1], dims[n]),
                    got: (b.rows(), b.cols()),
                });
            }
        }
        for n in 2..=top {
            if !boundaries[n - 2].mul(&boundaries[n - 1]).is_zero() {
                return Err(DoldKanError::NotAComplex { degree: n });
            }
        }
        Ok(ChainComplex { dims, boundaries })
    }

    /// A single vector space in degree 0.
    pub fn concentrated(dim: usize) -> ChainComplex {
        ChainComplex {
            dims: vec![dim],
            boundaries: Vec::new(),
        }
    }

    pub fn zero() -> ChainComplex {
        ChainComplex::concentrated(0)
    }

    /// Highest degree carried (possibly with dimension 0).
    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `∂_n : Y_n -> Y_{n-1}`, zero outside the stored range.
    pub fn boundary(&self, n: usize) -> RatMat {
        if n >= 1 && n <= self.top() {
            self.boundaries[n - 1].clone()
        } else {
            RatMat::zeros(self.dim(n.saturating_sub(1)), self.dim(n))
        }
    }

    /// Largest degree with a nonzero space.
    pub fn max_supported_degree(&self) -> Option<usize> {
        (0..self.dims.len()).rev().find(|&n| self.dims[n] > 0)
    }

    pub fn homology_dims(&self) -> Vec<usize> {
        (0..=self.top())
            .map(|n| {
                let z = self.dim(n) - self.boundary(n).rank();
                z - self.boundary(n + 1).rank()
            })
            .collect()
    }

    /// Multiply `∂_n` by `sign(n)`.
    pub fn with_signed_boundary(&self, sign: impl Fn(usize) -> Q) -> ChainComplex {
        let boundaries = (1..=self.top())
            .map(|n| self.boundaries[n - 1].scale(&sign(n)))
            .collect();
        ChainComplex {
            dims: self.dims.clone(),
            boundaries,
        }
    }

    /// Verify that `maps[n] : self_n -> other_n` commute with the boundaries.
    pub fn is_chain_map(&self, other: &ChainComplex, maps: &[RatMat]) -> bool {
        let top = self.top().max(other.top());
        (1..=top).all(|n| {
            let f = |k: usize| {
                maps.get(k)
                    .cloned()
                    .unwrap_or_else(|| RatMat::zeros(other.dim(k), self.dim(k)))
            };
            f(n - 1).mul(&self.boundary(n)) == other.boundary(n).mul(&f(n))
        })
    }
}

/// An explicit chain isomorphism `a -> b`, if one exists.
///
/// Both complexes are brought to a standard basis `[∂w_{n+1} | h_n | w_n]`, where `w_n`
/// spans a complement of the cycles, `∂w_{n+1}` is then a basis of the boundaries and
/// `h_n` completes it to a basis of the cycles. In these bases the differential only
/// depends on the ranks, so equal ranks give `P_n = S^b_n (S^a_n)^{-1}`.
pub fn chain_isomorphism(a: &ChainComplex, b: &ChainComplex) -> Option<Vec<RatMat>> {
    let top = a.top().max(b.top());
    if (0..=top).any(|n| a.dim(n) != b.dim(n)) {
        return None;
    }
    let sa = standard_basis(a, top);
    let sb = standard_basis(b, top);
    let mut maps = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let (ma, ra) = &sa[n];
        let (mb, rb) = &sb[n];
        if ra != rb {
            return None;
        }
        maps.push(mb.mul(&ma.inverse().ok()?));
    }
    Some(maps)
}

/// Standard basis per degree plus the rank signature `(dim B_n, dim H_n)`.
fn standard_basis(c: &ChainComplex, top: usize) -> Vec<(RatMat, (usize, usize))> {
    let complements: Vec<Vec<Vec<Q>>> = (0..=top + 1)
        .map(|n| {
            let z = c.boundary(n).kernel();
            let pivots = z.pivots();
            (0..c.dim(n))
                .filter(|j| !pivots.contains(j))
                .map(|j| crate::exactla::unit_vec(c.dim(n), j))
                .collect()
        })
        .collect();
    (0..=top)
        .map(|n| {
            let d = c.dim(n);
            let borders: Vec<Vec<Q>> = complements[n + 1]
                .iter()
                .map(|w| c.boundary(n + 1).apply(w))
                .collect();
            let z = c.boundary(n).kernel();
            let mut span = Subspace::from_vectors(&borders, d);
            let mut homology = Vec::new();
            for v in z.basis_vectors() {
                if !span.contains(&v) {
                    span = span
                        .sum(&Subspace::from_vectors(&[v.clone()], d))
                        .expect("same ambient");
                    homology.push(v);
                }
            }
            let sig = (borders.len(), homology.len());
            let cols: Vec<Vec<Q>> = borders
                .into_iter()
                .chain(homology)
                .chain(complements[n].iter().cloned())
                .collect();
            (RatMat::from_cols(&cols, d), sig)
        })
        .collect()
}

/// A simplicial vector space truncated at `max_level`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpVS {
    dims: Vec<usize>,
    /// `faces[n][i] : X_n -> X_{n-1}` for `1 ≤ n ≤ L`.
    faces: Vec<Vec<RatMat>>,
    /// `degens[n][j] : X_n -> X_{n+1}` for `0 ≤ n < L`.
    degens: Vec<Vec<RatMat>>,
}

impl SimpVS {
    pub fn new(dims: Vec<usize>, faces: Vec<Vec<RatMat>>, degens: Vec<Vec<RatMat>>) -> SimpVS {
        assert!(!dims.is_empty());
        assert_eq!(faces.len(), dims.len());
        assert_eq!(degens.len(), dims.len());
        SimpVS {
            dims,
            faces,
            degens,
        }
    }

    pub fn max_level(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.dims[n]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn face(&self, n: usize, i: usize) -> &RatMat {
        &self.faces[n][i]
    }

    pub fn degen(&self, n: usize, j: usize) -> &RatMat {
        &self.degens[n][j]
    }

    /// The constant simplicial vector space on `ℚ^dim`.
    pub fn constant(dim: usize, max_level: usize) -> SimpVS {
        let id = RatMat::identity(dim);
        let faces = (0..=max_level)
            .map(|n| {
                if n == 0 {
                    Vec::new()
                } else {
                    vec![id.clone(); n + 1]
                }
            })
            .collect();
        let degens = (0..=max_level)
            .map(|n| {
                if n == max_level {
                    Vec::new()
                } else {
                    vec![id.clone(); n + 1]
                }
            })
            .collect();
        SimpVS::new(vec![dim; max_level + 1], faces, degens)
    }

    /// Check every simplicial identity whose terms live at levels `≤ L`.
    pub fn check_identities(&self) -> Result<(), DoldKanError> {
        let l = self.max_level();
        let fail = |name: String, level: usize| Err(DoldKanError::Identity { name, level });
        for n in 2..=l {
            for j in 1..=n {
                for i in 0..j {
                    if self.face(n - 1, i).mul(self.face(n, j))
                        != self.face(n - 1, j - 1).mul(self.face(n, i))
                    {
                        return fail(format!("d_{i} d_{j} = d_{} d_{i}", j - 1), n);
                    }
                }
            }
        }
        for n in 0..l {
            // u_j : X_n -> X_{n+1}
            for j in 0..=n {
                for i in 0..=n + 1 {
                    let lhs = self.face(n + 1, i).mul(self.degen(n, j));
                    let rhs = if i == j || i == j + 1 {
                        RatMat::identity(self.dim(n))
                    } else if i < j {
                        self.degen(n - 1, j - 1).mul(self.face(n, i))
                    } else {
                        self.degen(n - 1, j).mul(self.face(n, i - 1))
                    };
                    if lhs != rhs {
                        return fail(format!("d_{i} u_{j}"), n + 1);
                    }
                }
            }
        }
        for n in 0..l.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    if self.degen(n + 1, i).mul(self.degen(n, j))
                        != self.degen(n + 1, j + 1).mul(self.degen(n, i))
                    {
                        return fail(format!("u_{i} u_{j} = u_{} u_{i}", j + 1), n + 2);
                    }
                }
            }
        }
        Ok(())
    }

    /// `∩_{i>0} ker d_i` at level `n` (everything at level 0).
    pub fn normalized_subspace(&self, n: usize) -> Subspace {
        if n == 0 {
            return Subspace::full(self.dim(0));
        }
        let stacked = RatMat::vstack(
            &(1..=n).map(|i| self.face(n, i)).collect::<Vec<_>>(),
            self.dim(n),
        );
        stacked.kernel()
    }

    /// Span of all degenerate simplices at level `n`.
    pub fn degenerate_span(&self, n: usize) -> Subspace {
        if n == 0 {
            return Subspace::zero(self.dim(0));
        }
        let parts: Vec<&RatMat> = (0..n).map(|j| self.degen(n - 1, j)).collect();
        Subspace::from_spanning_cols(&RatMat::hstack(&parts, self.dim(n)))
    }
}

/// The normalization together with the inclusions `NX_n -> X_n`.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub complex: ChainComplex,
    /// Columns are the RREF basis of `NX_n` inside `X_n`.
    pub inclusions: Vec<RatMat>,
}

/// `NX_n = ∩_{i>0} ker d_i` with `∂ = d_0`, in the RREF coordinates of each `NX_n`.
pub fn normalize(x: &SimpVS) -> Result<Normalization, DoldKanError> {
    x.check_identities()?;
    let subs: Vec<Subspace> = (0..=x.max_level())
        .map(|n| x.normalized_subspace(n))
        .collect();
    let dims = subs.iter().map(Subspace::dim).collect();
    let boundaries = (1..=x.max_level())
        .map(|n| {
            subs[n - 1]
                .pivot_readout()
                .mul(x.face(n, 0))
                .mul(&subs[n].inclusion())
        })
        .collect();
    let complex = ChainComplex::new(dims, boundaries)?;
    Ok(Normalization {
        complex,
        inclusions: subs.iter().map(Subspace::inclusion).collect(),
    })
}

/// Block layout of `DK(Y)_n`: one block per 0-preserving injection, by ascending image bitmask.
#[derive(Clone, Debug)]
pub struct BlockLayout {
    /// `offsets[idx]` is the first coordinate of block `idx`; the last entry is the total dimension.
    pub offsets: Vec<usize>,
    pub block_dims: Vec<usize>,
}

impl BlockLayout {
    /// Uniform layout: a block of dimension `k` has size `dim_of(k)`.
    pub fn new(n: usize, dim_of: impl Fn(usize) -> usize) -> BlockLayout {
        BlockLayout::per_block(n, |mask| dim_of(mask.count_ones() as usize - 1))
    }

    /// Layout with block sizes depending on the image bitmask of each injection.
    pub fn per_block(n: usize, dim_of: impl Fn(u64) -> usize) -> BlockLayout {
        let count = zero_mono_count(n);
        let mut offsets = Vec::with_capacity(count + 1);
        let mut block_dims = Vec::with_capacity(count);
        let mut acc = 0;
        for idx in 0..count {
            offsets.push(acc);
            let d = dim_of(zero_mono_mask(idx));
            block_dims.push(d);
            acc += d;
        }
        offsets.push(acc);
        BlockLayout {
            offsets,
            block_dims,
        }
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn range(&self, idx: usize) -> std::ops::Range<usize> {
        self.offsets[idx]..self.offsets[idx] + self.block_dims[idx]
    }
}

/// Image bitmask of `υ_j ∘ β` for an image set `bm ⊆ [n+1]`, or `None` if not injective.
pub(crate) fn mask_upsilon(bm: u64, j: usize) -> Option<u64> {
    if bm & (1 << j) != 0 && bm & (1 << (j + 1)) != 0 {
        return None;
    }
    let low = bm & ((1u64 << (j + 1)) - 1);
    let high = (bm >> (j + 1)) << j;
    Some(low | high)
}

/// Image bitmask of `β` such that `δ_i ∘ β = α`, for `i > 0`, or `None` if `i ∈ α`.
pub(crate) fn mask_face(am: u64, i: usize) -> Option<u64> {
    if am & (1 << i) != 0 {
        return None;
    }
    let low = am & ((1u64 << i) - 1);
    let high = (am >> (i + 1)) << i;
    Some(low | high)
}

/// The index-transport part shared with the semi-direct product: `d_i` for `i > 0` and `u_j`.
///
/// `dim_of(k)` is the block dimension for blocks of dimension `k`, possibly per fiber.
pub(crate) fn transport_face(src: &BlockLayout, dst: &BlockLayout, n: usize, i: usize) -> RatMat {
    assert!(i > 0);
    let mut m = RatMat::zeros(dst.total(), src.total());
    for idx in 0..zero_mono_count(n) {
        if let Some(bm) = mask_face(zero_mono_mask(idx), i) {
            let b = crate::ordmaps::zero_mono_index_of_mask(bm);
            let r = dst.range(b);
            let c = src.range(idx);
            for t in 0..r.len() {
                m.set(r.start + t, c.start + t, Q::int(1));
            }
        }
    }
    m
}

/// `u_j : level n -> level n+1`: `π_β u_j = π_{υ_j β}`.
pub(crate) fn transport_degen(src: &BlockLayout, dst: &BlockLayout, n: usize, j: usize) -> RatMat {
    let mut m = RatMat::zeros(dst.total(), src.total());
    for b in 0..zero_mono_count(n + 1) {
        if let Some(am) = mask_upsilon(zero_mono_mask(b), j) {
            let a = crate::ordmaps::zero_mono_index_of_mask(am);
            let r = dst.range(b);
            let c = src.range(a);
            for t in 0..r.len() {
                m.set(r.start + t, c.start + t, Q::int(1));
            }
        }
    }
    m
}

/// `DK(Y)` up to level `max_level`.
pub fn dk(y: &ChainComplex, max_level: usize) -> SimpVS {
    let layouts: Vec<BlockLayout> = (0..=max_level)
        .map(|n| BlockLayout::new(n, |k| y.dim(k)))
        .collect();
    let mut faces = vec![Vec::new()];
    for n in 1..=max_level {
        let (src, dst) = (&layouts[n], &layouts[n - 1]);
        let mut level = vec![dk_d0(y, src, dst, n)];
        level.extend((1..=n).map(|i| transport_face(src, dst, n, i)));
        faces.push(level);
    }
    let degens = (0..=max_level)
        .map(|n| {
            if n == max_level {
                Vec::new()
            } else {
                (0..=n)
                    .map(|j| transport_degen(&layouts[n], &layouts[n + 1], n, j))
                    .collect()
            }
        })
        .collect();
    SimpVS::new(
        layouts.iter().map(BlockLayout::total).collect(),
        faces,
        degens,
    )
}

/// `π_β d_0 = ∂ π_{β′} - Σ_{i=1}^{l+1} (-1)^i π_{β′ δ_i}`.
fn dk_d0(y: &ChainComplex, src: &BlockLayout, dst: &BlockLayout, n: usize) -> RatMat {
    let mut m = RatMat::zeros(dst.total(), src.total());
    for b in 0..zero_mono_count(n - 1) {
        let bm = zero_mono_mask(b);
        let l = bm.count_ones() as usize - 1;
        for a in 0..zero_mono_count(n) {
            let am = zero_mono_mask(a);
            let block = match classify_d0_masks(bm, am, l) {
                D0Case::CaseI(k) if k == l + 1 => y.boundary(l + 1),
                // β′δ_{l+1} = β′σ_l
                D0Case::CaseI(k) if k == l => RatMat::scalar(y.dim(l), &Q::pow_neg_one(l)),
                D0Case::CaseII(i) => RatMat::scalar(y.dim(l), &Q::pow_neg_one(i + 1)),
                _ => continue,
            };
            m.set_block(dst.offsets[b], src.offsets[a], &block);
        }
    }
    m
}

/// The textbook inverse `DK′(Y)_n = ⊕_{β : [n] ↠ [k]} Y_k`.
///
/// Blocks are ordered like [`enumerate_surjections`], so that level dimensions line
/// up with [`dk`] block by block.
pub fn dk_classic(y: &ChainComplex, max_level: usize) -> SimpVS {
    let surj: Vec<Vec<OrdMap>> = (0..=max_level).map(enumerate_surjections).collect();
    let layouts: Vec<BlockLayout> = (0..=max_level)
        .map(|n| BlockLayout::new(n, |k| y.dim(k)))
        .collect();
    let find = |n: usize, b: &OrdMap| {
        surj[n]
            .iter()
            .position(|s| s == b)
            .expect("surjection is enumerated")
    };
    let mut faces = vec![Vec::new()];
    for n in 1..=max_level {
        let mut level = Vec::new();
        for i in 0..=n {
            let mut m = RatMat::zeros(layouts[n - 1].total(), layouts[n].total());
            for (a, alpha) in surj[n].iter().enumerate() {
                let k = alpha.cod();
                let comp = alpha.then(&OrdMap::delta(n, i));
                if comp.is_surjective() {
                    let b = find(n - 1, &comp);
                    m.set_block(
                        layouts[n - 1].offsets[b],
                        layouts[n].offsets[a],
                        &RatMat::identity(y.dim(k)),
                    );
                } else if i == n && k > 0 && comp.images().iter().all(|&v| v < k) {
                    // αδ_n = δ_k β with β : [n-1] ↠ [k-1]
                    let beta = OrdMap::new(k - 1, comp.images().to_vec()).expect("monotone");
                    if beta.is_surjective() {
                        let b = find(n - 1, &beta);
                        m.set_block(
                            layouts[n - 1].offsets[b],
                            layouts[n].offsets[a],
                            &y.boundary(k),
                        );
                    }
                }
            }
            level.push(m);
        }
        faces.push(level);
    }
    let mut degens = Vec::new();
    for n in 0..=max_level {
        if n == max_level {
            degens.push(Vec::new());
            continue;
        }
        let mut level = Vec::new();
        for j in 0..=n {
            let mut m = RatMat::zeros(layouts[n + 1].total(), layouts[n].total());
            for (a, alpha) in surj[n].iter().enumerate() {
                let b = find(n + 1, &alpha.then(&OrdMap::upsilon(n, j)));
                m.set_block(
                    layouts[n + 1].offsets[b],
                    layouts[n].offsets[a],
                    &RatMat::identity(y.dim(alpha.cod())),
                );
            }
            level.push(m);
        }
        degens.push(level);
    }
    SimpVS::new(
        layouts.iter().map(BlockLayout::total).collect(),
        faces,
        degens,
    )
}

/// The level-wise identification `DK(Y)_n -> DK′(Y)_n` by mono/epi duality.
///
/// Both constructions use the same block order, so this is the identity matrix; it is
/// exposed to make the comparison of structure maps explicit.
pub fn levelwise_duality(y: &ChainComplex, n: usize) -> RatMat {
    RatMat::identity(BlockLayout::new(n, |k| y.dim(k)).total())
}

/// A degeneracy `u_j` at level `n` that the level-wise duality fails to intertwine.
pub fn duality_failure(y: &ChainComplex, max_level: usize) -> Option<(usize, usize)> {
    let a = dk(y, max_level);
    let b = dk_classic(y, max_level);
    for n in 0..max_level {
        for j in 0..=n {
            let lhs = levelwise_duality(y, n + 1).mul(a.degen(n, j));
            let rhs = b.degen(n, j).mul(&levelwise_duality(y, n));
            if lhs != rhs {
                return Some((n, j));
            }
        }
    }
    None
}

/// The sign change `ε_n` on `DK(E)_n`: a block of dimension `k` is multiplied by `(-1)^{k(k-1)/2}`.
///
/// It intertwines `DK(E, ∂)` with `DK(E, ∂̃)` where `∂̃_n = (-1)^{n-1} ∂_n`, which is what
/// the semi-direct product over a unit groupoid produces.
pub fn epsilon(y: &ChainComplex, n: usize) -> RatMat {
    let layout = BlockLayout::new(n, |k| y.dim(k));
    let mut m = RatMat::zeros(layout.total(), layout.total());
    for idx in 0..zero_mono_count(n) {
        let k = zero_mono_mask(idx).count_ones() as usize - 1;
        let s = Q::pow_neg_one(k * k.saturating_sub(1) / 2);
        for c in layout.range(idx) {
            m.set(c, c, s.clone());
        }
    }
    m
}

/// The complex `(E, (-1)^{n-1} ∂)`.
pub fn sign_twisted(y: &ChainComplex) -> ChainComplex {
    y.with_signed_boundary(|n| Q::pow_neg_one(n + 1))
}

/// `π_ι` at level `n`: projection onto the last block.
pub fn iota_projection(y: &ChainComplex, n: usize) -> RatMat {
    let layout = BlockLayout::new(n, |k| y.dim(k));
    let last = zero_mono_count(n) - 1;
    let mut m = RatMat::zeros(y.dim(n), layout.total());
    for (t, c) in layout.range(last).enumerate() {
        m.set(t, c, Q::int(1));
    }
    m
}

/// The natural isomorphism `N(DK(Y)) -> Y`: read off the `ι`-block of each normalized vector.
pub fn dk_unit_iso(y: &ChainComplex, norm: &Normalization) -> Vec<RatMat> {
    norm.inclusions
        .iter()
        .enumerate()
        .map(|(n, inc)| iota_projection(y, n).mul(inc))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acyclic_21() -> ChainComplex {
        ChainComplex::new(
            vec![0, 1, 1],
            vec![RatMat::zeros(0, 1), RatMat::identity(1)],
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_complex() {
        let b1 = RatMat::from_ints(&[&[1]]);
        let b2 = RatMat::from_ints(&[&[1]]);
        assert_eq!(
            ChainComplex::new(vec![1, 1, 1], vec![b1, b2]),
            Err(DoldKanError::NotAComplex { degree: 2 })
        );
    }

    #[test]
    fn constant_normalizes_to_degree_zero() {
        let x = SimpVS::constant(1, 4);
        let n = normalize(&x).unwrap();
        assert_eq!(n.complex.dims(), &[1, 0, 0, 0, 0]);
    }

    #[test]
    fn dk_dims_of_acyclic_pair() {
        let x = dk(&acyclic_21(), 4);
        assert_eq!(x.dim(2), 3);
        x.check_identities().unwrap();
    }

    #[test]
    fn dk_of_degree_zero_is_constant() {
        let y = ChainComplex::concentrated(2);
        assert_eq!(dk(&y, 4), SimpVS::constant(2, 4));
        assert_eq!(dk_classic(&y, 4), SimpVS::constant(2, 4));
    }

    #[test]
    fn normalization_of_dk_is_the_iota_block() {
        let y = acyclic_21();
        let x = dk(&y, 5);
        let norm = normalize(&x).unwrap();
        let iso = dk_unit_iso(&y, &norm);
        for (n, p) in iso.iter().enumerate() {
            assert!(p.is_identity() || y.dim(n) == 0, "level {n}");
        }
        assert!(norm.complex.is_chain_map(&y, &iso));
    }

    #[test]
    fn d0_blocks_match_cases() {
        let y = acyclic_21();
        let x = dk(&y, 3);
        // level 2 -> 1, β = ι_1 is block 1 (mask 0b11); α = ι_2 is block 3 (mask 0b111)
        let l1 = BlockLayout::new(1, |k| y.dim(k));
        let l2 = BlockLayout::new(2, |k| y.dim(k));
        let d0 = x.face(2, 0);
        let case_i = d0.block(l1.offsets[1], l2.offsets[3], 1, 1);
        assert_eq!(case_i, y.boundary(2));
        // α = β′δ_1 = {0,2} is block 2
        let case_ii = d0.block(l1.offsets[1], l2.offsets[2], 1, 1);
        assert_eq!(case_ii, RatMat::scalar(1, &Q::int(1)));
    }

    #[test]
    fn degenerate_span_is_kernel_of_iota() {
        let y = ChainComplex::new(
            vec![1, 2, 1],
            vec![
                RatMat::from_ints(&[&[1, 0]]),
                RatMat::from_ints(&[&[0], &[1]]),
            ],
        )
        .unwrap();
        let x = dk(&y, 5);
        assert!(x.degenerate_span(0).is_zero());
        for n in 1..=5 {
            let d = x.degenerate_span(n);
            assert_eq!(d, iota_projection(&y, n).kernel());
            assert_eq!(d.dim() + y.dim(n), x.dim(n));
        }
    }

    #[test]
    fn classic_degeneracy_is_not_intertwined() {
        let y = ChainComplex::new(vec![0, 1], vec![RatMat::zeros(0, 1)]).unwrap();
        assert_eq!(duality_failure(&y, 3), Some((1, 1)));
        let a = dk(&y, 2);
        let b = dk_classic(&y, 2);
        // u_1 of the ι_1-block has two components in DK and one in DK′.
        let e = crate::exactla::unit_vec(a.dim(1), a.dim(1) - 1);
        let nz = |v: Vec<Q>| v.iter().filter(|q| !q.is_zero()).count();
        assert_eq!(nz(a.degen(1, 1).apply(&e)), 2);
        assert_eq!(nz(b.degen(1, 1).apply(&e)), 1);
    }

    #[test]
    fn classic_is_simplicial_and_normalizes_back() {
        let y = ChainComplex::new(
            vec![1, 2, 1],
            vec![
                RatMat::from_ints(&[&[1, 0]]),
                RatMat::from_ints(&[&[0], &[1]]),
            ],
        )
        .unwrap();
        let x = dk_classic(&y, 5);
        x.check_identities().unwrap();
        let norm = normalize(&x).unwrap();
        let iso = chain_isomorphism(&norm.complex, &y).unwrap();
        assert!(norm.complex.is_chain_map(&y, &iso));
    }

    #[test]
    fn chain_isomorphism_for_conjugate_complexes() {
        let y =
            ChainComplex::new(vec![2, 2], vec![RatMat::from_ints(&[&[1, 0], &[0, 0]])]).unwrap();
        let p1 = RatMat::from_ints(&[&[1, 1], &[0, 1]]);
        let p0 = RatMat::from_ints(&[&[2, 0], &[1, 1]]);
        let z = ChainComplex::new(
            vec![2, 2],
            vec![p0.mul(&y.boundary(1)).mul(&p1.inverse().unwrap())],
        )
        .unwrap();
        let iso = chain_isomorphism(&y, &z).unwrap();
        assert!(y.is_chain_map(&z, &iso));
        let other = ChainComplex::new(vec![2, 2], vec![RatMat::zeros(2, 2)]).unwrap();
        assert!(chain_isomorphism(&y, &other).is_none());
    }

    #[test]
    fn epsilon_intertwines_sign_twist() {
        let y = ChainComplex::new(
            vec![1, 2, 1],
            vec![
                RatMat::from_ints(&[&[1, 0]]),
                RatMat::from_ints(&[&[0], &[1]]),
            ],
        )
        .unwrap();
        let a = dk(&y, 4);
        let b = dk(&sign_twisted(&y), 4);
        for n in 1..=4 {
            for i in 0..=n {
                assert_eq!(
                    epsilon(&y, n - 1).mul(a.face(n, i)),
                    b.face(n, i).mul(&epsilon(&y, n)),
                    "d_{i} at {n}"
                );
            }
        }
    }
}
