//! The semi-direct product `G ⋉_R E` of a representation up to homotopy.
//!
//! The fiber over `g ∈ G_n` is `⊕_α E_{dim α}` at the vertex `x_{α(k)}`, one block per
//! 0-preserving injection `α : [k] → [n]`, laid out by ascending image bitmask exactly as
//! in [`crate::doldkan::dk`]. Positive faces and all degeneracies move blocks around; only
//! `d_0` involves the operators `R_m`.

use thiserror::Error;

use crate::doldkan::{dk, epsilon, sign_twisted, transport_degen, transport_face, BlockLayout, ChainComplex};
use crate::exactla::{RatMat, Subspace, Q};
use crate::groupoid::{FinGroupoid, Nerve};
use crate::ordmaps::{classify_d0_masks, zero_mono_count, zero_mono_index_of_mask, zero_mono_mask, D0Case, OrdMap};
use crate::report::{CheckReport, Violation};
use crate::ruth::{check_morphism, check_rh1, check_rh2, GrArrow, Grothendieck, Ruth, RuthError, RuthMorphism};
use crate::svb::{BundleMap, Cleavage, SimpVB, SvbError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SdpError {
    #[error("invalid representation: {0}")]
    Ruth(#[from] RuthError),
    #[error(transparent)]
    Svb(#[from] SvbError),
    #[error("invalid morphism: {0}")]
    Morphism(String),
    #[error("{0}")]
    Unsupported(String),
}

/// `2N + 3`.
pub fn default_level(r: &Ruth) -> usize {
    2 * r.order() + 3
}

fn top_bit(mask: u64) -> usize {
    63 - mask.leading_zeros() as usize
}

/// Drop the lowest `k` points of an image set.
fn drop_lowest(mut mask: u64, k: usize) -> u64 {
    for _ in 0..k {
        mask &= mask - 1;
    }
    mask
}

/// Index of the restriction of `s` to the points of `mask`.
fn restrict_mask(nerve: &Nerve, n: usize, s: usize, mask: u64) -> usize {
    nerve.restrict_index(n, s, &OrdMap::from_mask(mask, n))
}

/// Block layout of the fiber over simplex `s ∈ G_n`.
pub fn fiber_layout(r: &Ruth, nerve: &Nerve, n: usize, s: usize) -> BlockLayout {
    BlockLayout::per_block(n, |mask| r.bundle().dim(nerve.vertex(n, s, top_bit(mask)), mask.count_ones() as usize - 1))
}

/// `R_m^h` on degree `k`, or `None` when it is zero for degree reasons.
fn op_block(r: &Ruth, m: usize, h: usize, k: usize) -> Option<&RatMat> {
    (m <= r.order() + 1 && k <= r.order()).then(|| r.block(m, h, k))
}

/// `π_β d_0 = Σ_k (-1)^l R_{l+1-k}^{gβ′τ} π_{β′σ_k} − Σ_i (-1)^i π_{β′δ_i}`, block by block.
fn sdp_d0(r: &Ruth, nerve: &Nerve, n: usize, s: usize, src: &BlockLayout, dst: &BlockLayout) -> RatMat {
    let mut out = RatMat::zeros(dst.total(), src.total());
    for b in 0..zero_mono_count(n - 1) {
        let bm = zero_mono_mask(b);
        let l = bm.count_ones() as usize - 1;
        let bp = (bm << 1) | 1;
        for a in 0..zero_mono_count(n) {
            let am = zero_mono_mask(a);
            let block = match classify_d0_masks(bm, am, l) {
                D0Case::CaseI(k) => {
                    let m = l + 1 - k;
                    let h = restrict_mask(nerve, n, s, drop_lowest(bp, k));
                    match op_block(r, m, h, k) {
                        Some(op) => op.scale(&Q::pow_neg_one(l)),
                        None => continue,
                    }
                }
                D0Case::CaseII(i) => RatMat::scalar(src.block_dims[a], &Q::pow_neg_one(i + 1)),
                D0Case::None => continue,
            };
            out.set_block(dst.offsets[b], src.offsets[a], &block);
        }
    }
    out
}

/// The semi-direct product up to level `level` without validating `r`.
///
/// Used to observe what goes wrong when the axioms fail.
pub fn build_sdp_raw(r: &Ruth, level: usize) -> SimpVB {
    let nerve = Nerve::new(r.groupoid(), level);
    let layouts: Vec<Vec<BlockLayout>> = (0..=level).map(|n| (0..nerve.size(n)).map(|s| fiber_layout(r, &nerve, n, s)).collect()).collect();
    let dims = layouts.iter().map(|l| l.iter().map(BlockLayout::total).collect()).collect();
    let faces = (0..=level)
        .map(|n| {
            if n == 0 {
                return Vec::new();
            }
            (0..=n)
                .map(|i| {
                    (0..nerve.size(n))
                        .map(|s| {
                            let (src, dst) = (&layouts[n][s], &layouts[n - 1][nerve.face(n, i, s)]);
                            if i == 0 {
                                sdp_d0(r, &nerve, n, s, src, dst)
                            } else {
                                transport_face(src, dst, n, i)
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let degens = (0..=level)
        .map(|n| {
            if n == level {
                return Vec::new();
            }
            (0..=n)
                .map(|j| (0..nerve.size(n)).map(|s| transport_degen(&layouts[n][s], &layouts[n + 1][nerve.degen(n, j, s)], n, j)).collect())
                .collect()
        })
        .collect();
    SimpVB::new(nerve, dims, faces, degens).expect("block shapes are consistent by construction")
}

/// `C^{can}_n = ker π_ι` in every fiber.
pub fn canonical_cleavage(r: &Ruth, v: &SimpVB) -> Cleavage {
    Cleavage::from_fn(v, |n, s| {
        let layout = fiber_layout(r, v.nerve(), n, s);
        let iota = layout.range(zero_mono_count(n) - 1);
        let keep: Vec<Vec<Q>> = (0..layout.total()).filter(|c| !iota.contains(c)).map(|c| crate::exactla::unit_vec(layout.total(), c)).collect();
        Subspace::from_vectors(&keep, layout.total())
    })
    .expect("one subspace per fiber")
}

/// Validate `r` (RH1, RH2 up to `2N + 2`) and build `G ⋉_R E` with its canonical cleavage.
pub fn build_sdp(r: &Ruth, level: usize) -> Result<(SimpVB, Cleavage), SdpError> {
    r.validate(None)?;
    if level == 0 {
        return Err(SdpError::Unsupported("the semi-direct product needs level at least 1".into()));
    }
    let v = build_sdp_raw(r, level);
    let c = canonical_cleavage(r, &v);
    Ok((v, c))
}

/// Image bitmask of `δ_i ∘ α` for `α ⊆ [n-1]`.
fn shift_up(mask: u64, i: usize) -> u64 {
    let low = mask & ((1u64 << i) - 1);
    low | ((mask >> i) << (i + 1))
}

/// The same bundle assembled from the homogeneous-element formulas: each `(e, α, g)` is
/// pushed to the blocks it reaches, rather than each target block pulling from its sources.
///
/// `d_0` enumerates the supersets `β′ ⊇ α` directly: tails above `α(k)` (operator terms)
/// and single insertions below `α(k)` (sign terms), keeping those with `{0, 1} ⊆ β′`.
pub fn build_sdp_homogeneous(r: &Ruth, level: usize) -> SimpVB {
    let nerve = Nerve::new(r.groupoid(), level);
    let layout = |n: usize, s: usize| fiber_layout(r, &nerve, n, s);
    let put = |m: &mut RatMat, dst: &BlockLayout, bm: u64, src: &BlockLayout, am: u64, block: &RatMat| {
        m.add_block(dst.offsets[zero_mono_index_of_mask(bm)], src.offsets[zero_mono_index_of_mask(am)], block);
    };
    let ident = |d: usize| RatMat::identity(d);
    let face = |n: usize, i: usize, s: usize| {
        let (src, dst) = (layout(n, s), layout(n - 1, nerve.face(n, i, s)));
        let mut m = RatMat::zeros(dst.total(), src.total());
        for a in 0..zero_mono_count(n) {
            let am = zero_mono_mask(a);
            let k = am.count_ones() as usize - 1;
            let d = src.block_dims[a];
            if i > 0 {
                if am & (1 << i) == 0 {
                    let low = am & ((1u64 << i) - 1);
                    let bm = low | ((am >> (i + 1)) << i);
                    put(&mut m, &dst, bm, &src, am, &ident(d));
                }
                continue;
            }
            let top = top_bit(am);
            // tails: β′ = α ∪ X with X above α(k)
            let above: Vec<usize> = (top + 1..=n).collect();
            for sel in 0u64..(1 << above.len()) {
                let mut bp = am;
                for (t, &p) in above.iter().enumerate() {
                    if sel & (1 << t) != 0 {
                        bp |= 1 << p;
                    }
                }
                if bp & 2 == 0 || bp.count_ones() < 2 {
                    continue;
                }
                let l = bp.count_ones() as usize - 2;
                let mop = l + 1 - k;
                let h = restrict_mask(&nerve, n, s, drop_lowest(bp, k));
                if let Some(op) = op_block(r, mop, h, k) {
                    put(&mut m, &dst, bp >> 1, &src, am, &op.scale(&Q::pow_neg_one(l)));
                }
            }
            // insertions: β′ = α ∪ {p} with α(i-1) < p < α(i)
            let points: Vec<usize> = (0..=n).filter(|&p| am & (1 << p) != 0).collect();
            for i in 1..=k {
                for p in points[i - 1] + 1..points[i] {
                    let bp = am | (1 << p);
                    if bp & 2 == 0 {
                        continue;
                    }
                    put(&mut m, &dst, bp >> 1, &src, am, &RatMat::scalar(d, &Q::pow_neg_one(i + 1)));
                }
            }
        }
        m
    };
    let degen = |n: usize, j: usize, s: usize| {
        let (src, dst) = (layout(n, s), layout(n + 1, nerve.degen(n, j, s)));
        let mut m = RatMat::zeros(dst.total(), src.total());
        for a in 0..zero_mono_count(n) {
            let am = zero_mono_mask(a);
            let d = src.block_dims[a];
            let targets = if am & (1 << j) == 0 {
                vec![shift_up(am, j)]
            } else if j == 0 {
                vec![shift_up(am, 1)]
            } else {
                vec![shift_up(am, j), shift_up(am, j + 1)]
            };
            for bm in targets {
                put(&mut m, &dst, bm, &src, am, &ident(d));
            }
        }
        m
    };
    let nerve2 = nerve.clone();
    SimpVB::from_fn(nerve2, |n, s| layout(n, s).total(), face, degen).expect("consistent shapes")
}

/// `ψ^∧` with `π_β ψ^∧ = Σ_r ψ_{l-r}^{gβτ_{l-r}} π_{βσ_r}`, between the two semi-direct products.
pub fn lift_morphism(psi: &RuthMorphism, level: usize) -> Result<BundleMap, SdpError> {
    let (rh3, rh4) = check_morphism(psi, 2 * psi.source().order().max(psi.target().order()) + 2);
    if let Some(v) = rh3.first().or(rh4.first()) {
        return Err(SdpError::Morphism(format!("{} fails at level {} simplex {}", v.rule, v.level, v.simplex)));
    }
    Ok(lift_morphism_raw(psi, level))
}

/// [`lift_morphism`] without validating `ψ`.
pub fn lift_morphism_raw(psi: &RuthMorphism, level: usize) -> BundleMap {
    let (r, rp) = (psi.source(), psi.target());
    let nerve = Nerve::new(r.groupoid(), level);
    let maps = (0..=level)
        .map(|n| {
            (0..nerve.size(n))
                .map(|s| {
                    let (src, dst) = (fiber_layout(r, &nerve, n, s), fiber_layout(rp, &nerve, n, s));
                    let mut out = RatMat::zeros(dst.total(), src.total());
                    for b in 0..zero_mono_count(n) {
                        let bm = zero_mono_mask(b);
                        let l = bm.count_ones() as usize - 1;
                        for rr in 0..=l.min(r.order()) {
                            let m = l - rr;
                            if m > psi.top() {
                                continue;
                            }
                            let am = bm & !drop_lowest(bm, rr + 1);
                            let h = restrict_mask(&nerve, n, s, drop_lowest(bm, rr));
                            out.set_block(dst.offsets[b], src.offsets[zero_mono_index_of_mask(am)], psi.block(m, h, rr));
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    BundleMap::new(maps)
}

/// The bundle, flat cleavage `C` and non-flat `C′` separating the two flatness notions.
#[derive(Clone, Debug)]
pub struct NotFull {
    pub v: SimpVB,
    pub c: Cleavage,
    pub c_prime: Cleavage,
    /// Indices of the 2-simplices where `C′` differs from `C`, with vertex strings `x_2 x_1 x_0`.
    pub modified: Vec<(String, usize)>,
}

/// `E_1 = E_2 = ℚ`, `∂ = id`, pulled back to the pair groupoid on `{x, y}` (`x = x0`, `y = x1`).
///
/// Fibers at level 2 have coordinates `(v_10, v_20, v_210)`. `C = ker π_ι`; `C′` agrees
/// with `C` except over the 2-simplices `xxy`, `xyx`, `yxy`, where it is spanned by the
/// triangle families `v_210 = −λ+μ`, `−2μ`, `2λ` in the parameters `(λ, μ) = (v_10, v_20)`.
///
/// With these families `C′` is not 3-flat over the zero section; see [`example_not_full_repaired`].
pub fn example_not_full() -> NotFull {
    not_full_with([-1, 1])
}

/// The same construction with `v_210 = 2λ − 2μ` over `xxy`, which makes `C′` weakly flat.
///
/// Among integer families `v_210 = aλ + bμ` with `|a|, |b| ≤ 3` over the three modified
/// simplices (normality forces `a = −b` over `xxy`), this and `C` itself are the only
/// normal weakly flat choices.
pub fn example_not_full_repaired() -> NotFull {
    not_full_with([2, -2])
}

fn not_full_with(xxy: [i64; 2]) -> NotFull {
    let e = ChainComplex::new(vec![0, 1, 1], vec![RatMat::zeros(0, 1), RatMat::identity(1)]).expect("two-term complex");
    let g = FinGroupoid::pair(2);
    let v = SimpVB::pullback(&dk(&e, 4), &g);
    let iota_kernel = |n: usize| crate::doldkan::iota_projection(&e, n).kernel();
    let c = Cleavage::from_fn(&v, |n, _| iota_kernel(n)).expect("one subspace per fiber");
    // vertices (x_0, x_1, x_2) and the rows of the λ- and μ-directions
    let families: [([usize; 3], [[i64; 3]; 2]); 3] = [
        ([1, 0, 0], [[1, 0, xxy[0]], [0, 1, xxy[1]]]),
        ([0, 1, 0], [[1, 0, 0], [0, 1, -2]]),
        ([1, 0, 1], [[1, 0, 2], [0, 1, 0]]),
    ];
    let nerve = v.nerve();
    let verts = |s: usize| [nerve.vertex(2, s, 0), nerve.vertex(2, s, 1), nerve.vertex(2, s, 2)];
    let c_prime = Cleavage::from_fn(&v, |n, s| {
        if n == 2 {
            if let Some((_, rows)) = families.iter().find(|(vs, _)| *vs == verts(s)) {
                return Subspace::from_spanning_rows(RatMat::from_ints(&[&rows[0], &rows[1]]));
            }
        }
        iota_kernel(n)
    })
    .expect("one subspace per fiber");
    let modified = (0..nerve.size(2))
        .filter(|&s| families.iter().any(|(vs, _)| *vs == verts(s)))
        .map(|s| (verts(s).iter().rev().map(|&x| if x == 0 { 'x' } else { 'y' }).collect(), s))
        .collect();
    NotFull { v, c, c_prime, modified }
}

/// Add `delta` to one block `R_m^s` on degree `degree`.
#[derive(Clone, Debug)]
pub struct Perturbation {
    pub m: usize,
    pub simplex: usize,
    pub degree: usize,
    pub delta: RatMat,
}

pub fn perturb(r: &Ruth, p: &Perturbation) -> Result<Ruth, RuthError> {
    let mut out = r.clone();
    let shifted = r.block(p.m, p.simplex, p.degree).add(&p.delta);
    out.set_block(p.m, p.simplex, p.degree, shifted)?;
    Ok(out)
}

/// The axioms of the perturbed representation against the identities of its raw semi-direct product.
#[derive(Clone, Debug)]
pub struct Sensitivity {
    pub perturbed: Ruth,
    pub rh1: CheckReport,
    pub rh2: CheckReport,
    /// `d_0 d_1 = d_0 d_0`.
    pub d0d0: CheckReport,
    /// `d_0 u_0 = id`.
    pub d0u0: CheckReport,
}

impl Sensitivity {
    /// `RH2 fails ⟺ d_0 d_0 = d_0 d_1 fails`.
    pub fn converse_holds(&self) -> bool {
        self.rh2.passed() == self.d0d0.passed()
    }

    /// Every RH2 violation at `(g ∈ G_m, degree n)` with `n + m ≤ L` shows up at the fiber `u_0^n g`.
    pub fn witnesses_match(&self, v: &SimpVB) -> bool {
        self.rh2.violations.iter().all(|w| {
            let n = w.degree.unwrap_or(0);
            if n + w.level > v.max_level() {
                return true;
            }
            let fiber = v.nerve().prepend_units(w.level, w.simplex, n);
            self.d0d0.violations.iter().any(|x| x.level == n + w.level && x.simplex == fiber)
        })
    }
}

/// Perturb one block and compare the axioms with the simplicial identities they encode.
pub fn rh2_sensitivity(r: &Ruth, p: &Perturbation, level: usize) -> Result<(Sensitivity, SimpVB), SdpError> {
    let perturbed = perturb(r, p)?;
    let v = build_sdp_raw(&perturbed, level);
    let ids = v.check_identities();
    let filter = |rule: &str, name: &str| {
        let mut rep = CheckReport::new(name);
        rep.checked = ids.checked;
        rep.violations = ids.violations.iter().filter(|x| x.rule == rule).cloned().collect();
        rep
    };
    let s = Sensitivity {
        rh1: check_rh1(&perturbed),
        rh2: check_rh2(&perturbed, perturbed.default_mcap()),
        d0d0: filter("d_0 d_1 = d_0 d_0", "d_0 d_0 = d_0 d_1"),
        d0u0: filter("d_0 u_0 = id", "d_0 u_0 = id"),
        perturbed,
    };
    Ok((s, v))
}

/// The nerve of the translation groupoid of an order-0 representation: `(e, g_1, …, g_n)`
/// with `d_0 = R_1^{g_1}` and every other face and degeneracy the identity on `e`.
pub fn translation_nerve(r: &Ruth, level: usize) -> Result<SimpVB, SdpError> {
    if r.order() != 0 {
        return Err(SdpError::Unsupported(format!("translation groupoid needs order 0, got {}", r.order())));
    }
    let nerve = Nerve::new(r.groupoid(), level);
    let dim = |n: usize, s: usize| r.bundle().dim(nerve.vertex(n, s, 0), 0);
    let v = SimpVB::from_fn(
        nerve.clone(),
        dim,
        |n, i, s| if i == 0 { r.block(1, nerve.simplex(n, s)[0], 0).clone() } else { RatMat::identity(dim(n, s)) },
        |n, _, s| RatMat::identity(dim(n, s)),
    )?;
    Ok(v)
}

/// On every 2-simplex of an order-1 semi-direct product, `d_0 v` is the displayed
/// Grothendieck arrow and `d_1 v = d_0 v · d_2 v`, for `v` running over a basis.
pub fn check_grothendieck(r: &Ruth, v: &SimpVB) -> Result<CheckReport, SdpError> {
    if r.order() != 1 {
        return Err(SdpError::Unsupported(format!("the Grothendieck comparison needs order 1, got {}", r.order())));
    }
    let gr = Grothendieck::new(r)?;
    let nerve = v.nerve();
    let mut rep = CheckReport::new("faces of 2-simplices are Grothendieck products");
    let arrow = |a: usize, w: &[Q]| {
        let l = fiber_layout(r, nerve, 1, a);
        GrArrow { c: w[l.range(1)].to_vec(), g: a, e: w[l.range(0)].to_vec() }
    };
    for s in 0..nerve.size(2) {
        let (g1, g2) = (nerve.simplex(2, s)[0], nerve.simplex(2, s)[1]);
        let x1 = nerve.vertex(2, s, 1);
        let l = fiber_layout(r, nerve, 2, s);
        for b in 0..v.dim(2, s) {
            let w = crate::exactla::unit_vec(v.dim(2, s), b);
            let (e, c1, c2) = (&w[l.range(0)], &w[l.range(1)], &w[l.range(2)]);
            let d = |i: usize| arrow(nerve.face(2, i, s), &v.face(2, i, s).apply(&w));
            let (d0, d1, d2) = (d(0), d(1), d(2));
            let c = crate::exactla::sub_vec(&crate::exactla::sub_vec(c2, &r.block(1, g2, 1).apply(c1)), &r.block(2, s, 0).apply(e));
            let tail = crate::exactla::add_vec(&r.block(1, g1, 0).apply(e), &r.block(0, x1, 1).apply(c1));
            let expected = GrArrow { c, g: g2, e: tail };
            rep.record((d0 != expected).then(|| Violation::new("d_0 v = (c_2 - R_1 c_1 - R_2 e, g_2, R_1 e + R_0 c_1)", 2, s).witness(w.clone())));
            let product = gr.multiply(&d0, &d2);
            rep.record((product.as_ref() != Some(&d1)).then(|| Violation::new("d_1 v = d_0 v · d_2 v", 2, s).witness(w.clone())));
        }
    }
    Ok(rep)
}

/// Degree-0 coboundary of an order-0 representation from the groupoid formula
/// `D(ξ)(g) = R*^g ξ(x) − ξ(y)` for `g : x → y`, with `R*^g = (R_1^g)^{-T}`.
///
/// `D(ξ)(g)` lives in `(E^y)^*`; it is carried to the fiber `E^x` over `g` by `−(R_1^g)^T`,
/// so the result is in the coordinates of [`crate::svb::linear_coboundary`] at `p = 0`.
pub fn order_zero_coboundary(r: &Ruth) -> Result<RatMat, SdpError> {
    if r.order() != 0 {
        return Err(SdpError::Unsupported(format!("the groupoid coboundary needs order 0, got {}", r.order())));
    }
    let g = r.groupoid();
    let dim = |x: usize| r.bundle().dim(x, 0);
    let mut cols = Vec::with_capacity(g.num_objects());
    let mut acc = 0;
    for x in 0..g.num_objects() {
        cols.push(acc);
        acc += dim(x);
    }
    let rows: usize = (0..g.num_arrows()).map(|a| dim(g.src(a))).sum();
    let mut m = RatMat::zeros(rows, acc);
    let mut row = 0;
    for a in 0..g.num_arrows() {
        let (x, y) = (g.src(a), g.tgt(a));
        let rt = r.block(1, a, 0).transpose();
        let dual = r
            .block(1, a, 0)
            .inverse()
            .map_err(|_| SdpError::Unsupported(format!("R_1 is singular on arrow {}", g.arrow(a).name)))?
            .transpose();
        m.add_block(row, cols[x], &rt.mul(&dual).neg());
        m.add_block(row, cols[y], &rt);
        row += dim(x);
    }
    Ok(m)
}

/// `(E^x, R_0)` as a chain complex.
pub fn chain_at(r: &Ruth, x: usize) -> ChainComplex {
    let dims = r.bundle().dims_at(x).to_vec();
    let boundaries = (1..dims.len()).map(|n| r.block(0, x, n).clone()).collect();
    ChainComplex::new(dims, boundaries).expect("R_0 squares to zero on a valid representation")
}

/// Over a unit groupoid the fiber over `u_0^n(x)` is `DK(E^x, (-1)^{n-1} ∂)`, and `ε` intertwines it with `DK(E^x, ∂)`.
pub fn check_unit_base(r: &Ruth, v: &SimpVB) -> Result<CheckReport, SdpError> {
    if !(0..r.groupoid().num_arrows()).all(|a| r.groupoid().is_unit(a)) {
        return Err(SdpError::Unsupported("the base is not a unit groupoid".into()));
    }
    let mut rep = CheckReport::new("unit base is Dold-Kan up to the sign change ε");
    let l = v.max_level();
    for x in 0..r.groupoid().num_objects() {
        let y = chain_at(r, x);
        let (plain, twisted) = (dk(&y, l), dk(&sign_twisted(&y), l));
        for n in 0..=l {
            let s = v.unit_simplex(n, x);
            if n > 0 {
                for i in 0..=n {
                    let f = v.face(n, i, s);
                    rep.record((f != twisted.face(n, i)).then(|| Violation::new(format!("d_{i} is the twisted Dold-Kan face"), n, s)));
                    let ok = epsilon(&y, n - 1).mul(plain.face(n, i)) == f.mul(&epsilon(&y, n));
                    rep.record((!ok).then(|| Violation::new(format!("ε d_{i} = d_{i} ε"), n, s)));
                }
            }
            if n < l {
                for j in 0..=n {
                    let u = v.degen(n, j, s);
                    rep.record((u != twisted.degen(n, j)).then(|| Violation::new(format!("u_{j} is the Dold-Kan degeneracy"), n, s)));
                    let ok = epsilon(&y, n + 1).mul(plain.degen(n, j)) == u.mul(&epsilon(&y, n));
                    rep.record((!ok).then(|| Violation::new(format!("ε u_{j} = u_{j} ε"), n, s)));
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruth::GradedBundle;
    use crate::svb::{check_bundle_map, check_cleavage, check_fibration, check_flat_morphism, check_weakly_flat_morphism, core};

    /// Order 1 over pair(2): `R_0 = 1`, `R_1` the identity, `R_2` a chosen homotopy fixed by RH2.
    fn order_one() -> Ruth {
        let g = FinGroupoid::pair(2);
        let mut r = Ruth::zero(&g, GradedBundle::uniform(2, &[1, 1])).unwrap();
        for x in 0..2 {
            r.set_block(0, x, 1, RatMat::from_ints(&[&[1]])).unwrap();
        }
        for a in 0..4 {
            r.set_block(1, a, 0, RatMat::identity(1)).unwrap();
            r.set_block(1, a, 1, RatMat::identity(1)).unwrap();
        }
        r
    }

    #[test]
    fn strict_order_one_is_a_fibration_of_order_one() {
        let r = order_one();
        let (v, c) = build_sdp(&r, default_level(&r)).unwrap();
        assert!(v.check_identities().passed());
        let fib = check_fibration(&v);
        assert_eq!(fib.order, Some(1));
        assert_eq!(&core(&v), r.bundle());
        let rep = check_cleavage(&v, &c);
        assert!(rep.bijective.passed() && rep.normal.passed() && rep.weakly_flat.passed());
    }

    #[test]
    fn homogeneous_path_agrees() {
        let r = order_one();
        assert_eq!(build_sdp_homogeneous(&r, 4), build_sdp_raw(&r, 4));
    }

    #[test]
    fn grothendieck_faces() {
        let r = order_one();
        let (v, _) = build_sdp(&r, 3).unwrap();
        assert!(check_grothendieck(&r, &v).unwrap().passed());
    }

    #[test]
    fn groupoid_coboundary_of_the_sign_line() {
        let g = FinGroupoid::cyclic(2);
        let mut r = Ruth::zero(&g, GradedBundle::uniform(1, &[1])).unwrap();
        r.set_block(1, 1, 0, RatMat::from_ints(&[&[-1]])).unwrap();
        // ξ ↦ (ξ − ξ, −ξ − ξ)
        assert_eq!(order_zero_coboundary(&r).unwrap(), RatMat::from_ints(&[&[0], &[-2]]));
        let (v, _) = build_sdp(&r, 2).unwrap();
        assert_eq!(order_zero_coboundary(&r).unwrap(), crate::svb::linear_coboundary(&v, 0).unwrap());
    }

    #[test]
    fn sign_representation_is_its_translation_nerve() {
        let g = FinGroupoid::cyclic(2);
        let mut r = Ruth::zero(&g, GradedBundle::uniform(1, &[1])).unwrap();
        r.set_block(1, 1, 0, RatMat::from_ints(&[&[-1]])).unwrap();
        let (v, _) = build_sdp(&r, 3).unwrap();
        assert_eq!(v, translation_nerve(&r, 3).unwrap());
    }

    #[test]
    fn unit_base_matches_dold_kan() {
        let g = FinGroupoid::unit(1);
        let mut r = Ruth::zero(&g, GradedBundle::uniform(1, &[1, 2, 1])).unwrap();
        r.set_block(0, 0, 1, RatMat::from_ints(&[&[1, 0]])).unwrap();
        r.set_block(0, 0, 2, RatMat::from_ints(&[&[0], &[1]])).unwrap();
        let (v, _) = build_sdp(&r, 5).unwrap();
        assert!(check_unit_base(&r, &v).unwrap().passed());
    }

    #[test]
    fn example_not_full_as_printed() {
        let ex = example_not_full();
        assert_eq!(ex.modified.len(), 3);
        let a = check_cleavage(&ex.v, &ex.c);
        assert!(a.bijective.passed() && a.normal.passed() && a.flat.passed());
        let b = check_cleavage(&ex.v, &ex.c_prime);
        assert!(b.bijective.passed() && b.normal.passed());
        let bad: Vec<(usize, usize)> = b.weakly_flat.violations.iter().map(|v| (v.level, v.simplex)).collect();
        assert_eq!(bad, vec![(3, 4), (3, 9), (3, 10)]);
        let id = BundleMap::identity(&ex.v);
        let wf = check_weakly_flat_morphism(&id, &ex.v, &ex.c_prime, &ex.c);
        let (_, xxy) = ex.modified.iter().find(|(n, _)| n == "xxy").unwrap();
        let v = wf.violations.iter().find(|v| v.simplex == *xxy).unwrap();
        assert_eq!(v.witness.as_ref().unwrap(), &vec![Q::int(0), Q::int(1), Q::int(1)]);
    }

    #[test]
    fn repaired_example_separates_flatness() {
        let ex = example_not_full_repaired();
        let b = check_cleavage(&ex.v, &ex.c_prime);
        assert!(b.bijective.passed() && b.normal.passed() && b.weakly_flat.passed());
        let id = BundleMap::identity(&ex.v);
        assert!(!check_weakly_flat_morphism(&id, &ex.v, &ex.c_prime, &ex.c).passed());
        assert!(!check_flat_morphism(&id, &ex.v, &ex.c_prime, &ex.c).passed());
    }

    #[test]
    fn identity_lifts_to_identity() {
        let r = order_one();
        let phi = lift_morphism(&RuthMorphism::identity(&r), 4).unwrap();
        let v = build_sdp_raw(&r, 4);
        assert_eq!(phi, BundleMap::identity(&v));
        assert!(check_bundle_map(&phi, &v, &v).passed());
    }

    #[test]
    fn perturbing_r2_breaks_both_sides() {
        let r = order_one();
        let nerve = r.nerve();
        let s = nerve.index_of(2, &[1, 2]).unwrap();
        let p = Perturbation { m: 2, simplex: s, degree: 0, delta: RatMat::from_ints(&[&[1]]) };
        let (sens, v) = rh2_sensitivity(&r, &p, default_level(&r)).unwrap();
        assert!(!sens.rh2.passed() && !sens.d0d0.passed());
        assert!(sens.converse_holds());
        assert!(sens.witnesses_match(&v));
        let zero = Perturbation { delta: RatMat::zeros(1, 1), ..p };
        let (back, _) = rh2_sensitivity(&r, &zero, default_level(&r)).unwrap();
        assert!(back.rh2.passed() && back.d0d0.passed());
    }

    #[test]
    fn perturbing_a_unit_breaks_degeneracy() {
        let r = order_one();
        let p = Perturbation { m: 1, simplex: 0, degree: 0, delta: RatMat::from_ints(&[&[2]]) };
        let (sens, _) = rh2_sensitivity(&r, &p, 3).unwrap();
        assert!(!sens.rh1.passed());
        assert!(!sens.d0u0.passed());
    }
}
