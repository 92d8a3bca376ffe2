//! Splitting a higher vector bundle along a normal weakly flat cleavage.
//!
//! Everything here is linear, so push-forwards, retractions and the splitting map are
//! assembled as matrices per fiber. Horn fillers inside the cleavage come from a left
//! inverse of the restricted horn map, which is injective on `C` by bijectivity.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::exactla::{RatMat, Subspace, Q};
use crate::ordmaps::{zero_mono_count, zero_mono_index_of_mask, zero_mono_mask};
use crate::report::{CheckReport, Violation};
use crate::ruth::{check_rh1, check_rh2, gauge_transform, GaugeData, GradedBundle, Ruth, RuthError, RuthMorphism};
use crate::sdp::{build_sdp, build_sdp_raw, canonical_cleavage, fiber_layout, lift_morphism, SdpError};
use crate::svb::{check_bundle_map, check_cleavage_basic, check_fibration, check_flat_morphism, check_weakly_flat_morphism, BundleMap, Cleavage, SimpVB, SvbError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("not a fibration: {0}")]
    NotFibration(String),
    #[error("cleavage is not {property}: {detail}")]
    Cleavage { property: &'static str, detail: String },
    #[error("splitting an order-{order} bundle needs level {needed}, have {level}")]
    Truncation { order: usize, needed: usize, level: usize },
    #[error("horn at level {level}, k = {k}, simplex {simplex} is not compatible")]
    Horn { level: usize, k: usize, simplex: usize },
    #[error("splitting map is singular at level {level}, simplex {simplex}")]
    Singular { level: usize, simplex: usize },
    #[error("morphism is not weakly flat at level {level}, simplex {simplex}")]
    NotWeaklyFlat { level: usize, simplex: usize },
    #[error(transparent)]
    Ruth(#[from] RuthError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Svb(#[from] SvbError),
}

/// `h_i(x)` over `u_{i+1} g` and `p_i(x) = d_i h_i(x)` over `d_i u_{i+1} g`, as matrices.
#[derive(Clone, Debug)]
pub struct PushForward {
    pub h: RatMat,
    pub h_simplex: usize,
    pub p: RatMat,
    pub p_simplex: usize,
}

/// A fibration with a validated cleavage, and the data derived from `V_n = K_n ⊕ C_n`.
#[derive(Clone, Debug)]
pub struct SplitContext {
    v: SimpVB,
    c: Cleavage,
    order: usize,
    core: GradedBundle,
    /// `π_K` along `C`, levels `0..=N`.
    proj_k: Vec<Vec<RatMat>>,
    /// `readout[x][n]`: coordinates of `E_n^x` inside the fiber over `u_0^n(x)`.
    readout: Vec<Vec<RatMat>>,
}

fn left_inverse(a: &RatMat) -> RatMat {
    if a.cols() == 0 {
        return RatMat::zeros(0, a.rows());
    }
    let at = a.transpose();
    at.mul(a).inverse().expect("full column rank").mul(&at)
}

impl SplitContext {
    /// Requires a fibration of some order `N` truncated at `L ≥ N + 1` and a bijective, normal, weakly flat cleavage.
    pub fn new(v: SimpVB, c: Cleavage) -> Result<SplitContext, SplitError> {
        let fib = check_fibration(&v);
        let order = match fib.order {
            Some(o) => o,
            None => {
                let w = fib.surjectivity.first().expect("a failure is recorded");
                return Err(SplitError::NotFibration(format!("{} at level {}, simplex {}", w.rule, w.level, w.simplex)));
            }
        };
        let rep = check_cleavage_basic(&v, &c);
        for (property, r) in [("bijective", &rep.bijective), ("normal", &rep.normal), ("weakly flat", &rep.weakly_flat)] {
            if let Some(w) = r.first() {
                return Err(SplitError::Cleavage { property, detail: format!("level {}, simplex {}", w.level, w.simplex) });
            }
        }
        SplitContext::new_unchecked(v, c, order)
    }

    /// Skips the fibration and cleavage checks; `order` is trusted.
    pub fn new_unchecked(v: SimpVB, c: Cleavage, order: usize) -> Result<SplitContext, SplitError> {
        if v.max_level() < order + 1 {
            return Err(SplitError::Truncation { order, needed: order + 1, level: v.max_level() });
        }
        let g = v.base().clone();
        let kernels: Vec<Vec<Subspace>> = (0..=order).map(|n| (0..g.num_objects()).map(|x| v.positive_kernel(n, v.unit_simplex(n, x))).collect()).collect();
        let dims = (0..g.num_objects()).map(|x| (0..=order).map(|n| kernels[n][x].dim()).collect()).collect();
        let core = GradedBundle::new(dims)?;
        let readout = (0..g.num_objects()).map(|x| (0..=order).map(|n| kernels[n][x].pivot_readout()).collect()).collect();
        let mut proj_k = vec![(0..v.nerve().size(0)).map(|x| RatMat::identity(v.dim(0, x))).collect::<Vec<_>>()];
        for n in 1..=order {
            let mut level = Vec::new();
            for s in 0..v.nerve().size(n) {
                let k = v.positive_kernel(n, s).inclusion();
                let ci = c.space(n, s).inclusion();
                let basis = RatMat::hstack(&[&k, &ci], v.dim(n, s));
                let inv = basis.inverse().map_err(|_| SplitError::Cleavage { property: "a complement of K", detail: format!("level {n}, simplex {s}") })?;
                let keep = RatMat::hstack(&[&k, &RatMat::zeros(v.dim(n, s), ci.cols())], v.dim(n, s));
                level.push(keep.mul(&inv));
            }
            proj_k.push(level);
        }
        Ok(SplitContext { v, c, order, core, proj_k, readout })
    }

    pub fn bundle(&self) -> &SimpVB {
        &self.v
    }

    pub fn cleavage(&self) -> &Cleavage {
        &self.c
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn core(&self) -> &GradedBundle {
        &self.core
    }

    /// `π_K` at level `n ≤ N`.
    pub fn projection(&self, n: usize, s: usize) -> &RatMat {
        &self.proj_k[n][s]
    }

    /// The linear map from horn tuples `(v_j)_{j ≠ k}` to their filler in `C_n^s`, `k < n`.
    pub fn fill_matrix(&self, n: usize, k: usize, s: usize) -> RatMat {
        let inc = self.c.space(n, s).inclusion();
        let a = self.v.horn_map(n, k, s).mul(&inc);
        inc.mul(&left_inverse(&a))
    }

    /// The unique `c ∈ C_n^s` with the given `(n, k)`-horn.
    pub fn horn_fill(&self, n: usize, k: usize, s: usize, horn: &[Q]) -> Result<Vec<Q>, SplitError> {
        if !self.v.horn_space(n, k, s).contains(horn) {
            return Err(SplitError::Horn { level: n, k, simplex: s });
        }
        Ok(self.fill_matrix(n, k, s).apply(horn))
    }

    /// Push-forward of the `i`-th vertex, `i < n`; needs level `n + 1`.
    ///
    /// The sub-simplices `α ⊇ {i, i+1}` of `h_i(x)` are filled in `C` by increasing
    /// dimension; faces missing `i + 1` are faces of `x` itself.
    pub fn push_forward(&self, i: usize, n: usize, s: usize) -> PushForward {
        assert!(i < n && n < self.v.max_level());
        let (v, nerve) = (&self.v, self.v.nerve());
        let y = nerve.degen(n, i + 1, s);
        let need = (1u64 << i) | (1u64 << (i + 1));
        let mut masks: Vec<u64> = (0..1u64 << (n + 2)).filter(|m| m & need == need).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        let squeeze = |m: u64| {
            let low = m & ((1u64 << (i + 1)) - 1);
            low | ((m >> (i + 2)) << (i + 1))
        };
        let mut memo: HashMap<u64, RatMat> = HashMap::new();
        for &alpha in &masks {
            let d = alpha.count_ones() as usize - 1;
            let ip = (alpha & ((1u64 << i) - 1)).count_ones() as usize;
            let points: Vec<usize> = (0..=n + 1).filter(|&p| alpha & (1 << p) != 0).collect();
            let mut parts = Vec::with_capacity(d);
            for j in (0..=d).filter(|&j| j != ip) {
                let face = alpha & !(1u64 << points[j]);
                if face & need == need {
                    parts.push(memo[&face].clone());
                } else {
                    parts.push(v.restriction(n, s, squeeze(face)).0);
                }
            }
            let refs: Vec<&RatMat> = parts.iter().collect();
            let horn = RatMat::vstack(&refs, v.dim(n, s));
            let t = if d == n + 1 { y } else { nerve.restrict_index(n + 1, y, &crate::ordmaps::OrdMap::from_mask(alpha, n + 1)) };
            memo.insert(alpha, self.fill_matrix(d, ip, t).mul(&horn));
        }
        let h = memo.remove(&((1u64 << (n + 2)) - 1)).expect("the full simplex is filled last");
        let p = v.face(n + 1, i, y).mul(&h);
        PushForward { h, h_simplex: y, p, p_simplex: nerve.face(n + 1, i, y) }
    }

    /// `r_a = (p_0 ⋯ p_{a-1}) ⋯ (p_0 p_1)(p_0)`, rightmost factor first, with its target simplex.
    pub fn intermediate(&self, n: usize, s: usize, a: usize) -> (RatMat, usize) {
        let mut m = RatMat::identity(self.v.dim(n, s));
        let mut cur = s;
        for group in 1..=a {
            for i in (0..group).rev() {
                let pf = self.push_forward(i, n, cur);
                m = pf.p.mul(&m);
                cur = pf.p_simplex;
            }
        }
        (m, cur)
    }

    /// `r = r_n`, landing over the unit simplex at the last vertex.
    pub fn retraction(&self, n: usize, s: usize) -> (RatMat, usize) {
        self.intermediate(n, s, n)
    }

    /// `e ↦ E`-coordinates of `r π_K (v)` at level `n ≤ N`.
    fn iota_rows(&self, n: usize, s: usize) -> RatMat {
        let x = self.v.nerve().vertex(n, s, n);
        let (r, _) = self.retraction(n, s);
        self.readout[x][n].mul(&r).mul(&self.proj_k[n][s])
    }

    /// `φ_n` for all `n ≤ top`: `π_α φ(v) = r π_K (v|_α)` in `E`-coordinates.
    pub fn phi_up_to(&self, top: usize) -> BundleMap {
        let (v, nerve) = (&self.v, self.v.nerve());
        let top = top.min(v.max_level());
        let r = Ruth::zero(v.base(), self.core.clone()).expect("matching object count");
        let mut maps: Vec<Vec<RatMat>> = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let mut level = Vec::with_capacity(nerve.size(n));
            for s in 0..nerve.size(n) {
                let lay = fiber_layout(&r, nerve, n, s);
                let mut m = RatMat::zeros(lay.total(), v.dim(n, s));
                let mut through: HashMap<usize, RatMat> = HashMap::new();
                for b in 0..zero_mono_count(n) {
                    if lay.block_dims[b] == 0 {
                        continue;
                    }
                    let am = zero_mono_mask(b);
                    if b == zero_mono_count(n) - 1 {
                        m.set_block(lay.offsets[b], 0, &self.iota_rows(n, s));
                        continue;
                    }
                    let j = (1..=n).rev().find(|&j| am & (1 << j) == 0).expect("α ≠ ι misses a positive vertex");
                    let prev = through.entry(j).or_insert_with(|| maps[n - 1][nerve.face(n, j, s)].mul(v.face(n, j, s)));
                    let low = am & ((1u64 << j) - 1);
                    let am2 = low | ((am >> (j + 1)) << j);
                    let lay2 = fiber_layout(&r, nerve, n - 1, nerve.face(n, j, s));
                    let b2 = zero_mono_index_of_mask(am2);
                    m.set_block(lay.offsets[b], 0, &prev.block(lay2.offsets[b2], 0, lay2.block_dims[b2], v.dim(n, s)));
                }
                level.push(m);
            }
            maps.push(level);
        }
        BundleMap::new(maps)
    }

    /// The representation up to homotopy read off from `d_0` in split coordinates:
    /// `R_m^g(e) = (-1)^{m+n-1} π_ι d_0 φ^{-1}(e, σ_n, u_0^n g)`.
    pub fn extract_ruth(&self) -> Result<Ruth, SplitError> {
        let n_top = self.order;
        let phi = self.phi_up_to(n_top + 1);
        self.extract_with(&phi)
    }

    fn extract_with(&self, phi: &BundleMap) -> Result<Ruth, SplitError> {
        let (v, nerve) = (&self.v, self.v.nerve());
        let big_n = self.order;
        let mut out = Ruth::zero(v.base(), self.core.clone())?;
        let shape = out.clone();
        for m in 0..=big_n + 1 {
            for g in 0..nerve.size(m) {
                for n in 0..=big_n {
                    if n + m == 0 || n + m - 1 > big_n {
                        continue;
                    }
                    let lvl = n + m;
                    let w = nerve.prepend_units(m, g, n);
                    let inv = phi.at(lvl, w).inverse().map_err(|_| SplitError::Singular { level: lvl, simplex: w })?;
                    let lay = fiber_layout(&shape, nerve, lvl, w);
                    let sigma = zero_mono_index_of_mask((1u64 << (n + 1)) - 1);
                    let embed = inv.block(0, lay.offsets[sigma], inv.rows(), lay.block_dims[sigma]);
                    let f = nerve.face(lvl, 0, w);
                    let lay2 = fiber_layout(&shape, nerve, lvl - 1, f);
                    let iota = zero_mono_count(lvl - 1) - 1;
                    let rows = phi.at(lvl - 1, f);
                    let pi = rows.block(lay2.offsets[iota], 0, lay2.block_dims[iota], rows.cols());
                    let block = pi.mul(v.face(lvl, 0, w)).mul(&embed).scale(&Q::pow_neg_one(m + n + 1));
                    out.set_block(m, g, n, block)?;
                }
            }
        }
        Ok(out)
    }

    /// Extract `R`, rebuild `G ⋉_R E`, and certify that `φ` is a simplicial isomorphism carrying `C` onto `C^{can}`.
    pub fn roundtrip_bundle(&self) -> Result<(Ruth, RoundTrip), SplitError> {
        let phi = self.phi_up_to(self.v.max_level());
        let r = self.extract_with(&phi)?;
        let w = build_sdp_raw(&r, self.v.max_level());
        let can = canonical_cleavage(&r, &w);
        let mut invertible = CheckReport::new("φ is invertible");
        let mut onto = CheckReport::new("dim φ(C) = dim C^can");
        for n in 0..=self.v.max_level() {
            for s in 0..self.v.nerve().size(n) {
                let m = phi.at(n, s);
                invertible.record((m.rows() != m.cols() || m.rank() != m.cols()).then(|| Violation::new("φ invertible", n, s)));
                if n > 0 {
                    let bad = self.c.space(n, s).dim() != can.space(n, s).dim();
                    onto.record(bad.then(|| Violation::new("dim C = dim C^can", n, s)));
                }
            }
        }
        let report = RoundTrip {
            rh1: check_rh1(&r),
            rh2: check_rh2(&r, r.default_mcap()),
            invertible,
            intertwines: check_bundle_map(&phi, &self.v, &w),
            flat: check_flat_morphism(&phi, &self.v, &self.c, &can),
            onto,
        };
        Ok((r, report))
    }
}

/// Certificate produced by [`SplitContext::roundtrip_bundle`].
#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    pub rh1: CheckReport,
    pub rh2: CheckReport,
    pub invertible: CheckReport,
    pub intertwines: CheckReport,
    /// `φ(C) ⊆ C^can`; with `onto` this is `φ(C) = C^can`.
    pub flat: CheckReport,
    pub onto: CheckReport,
}

impl RoundTrip {
    pub fn passed(&self) -> bool {
        [&self.rh1, &self.rh2, &self.invertible, &self.intertwines, &self.flat, &self.onto].iter().all(|c| c.passed())
    }
}

/// `(φ^∨)_m^g(e) = π_ι φ(e, σ_n, u_0^n g)` for a weakly flat `φ : G ⋉_R E → G ⋉_{R′} E′`.
pub fn lower_morphism(phi: &BundleMap, source: &Ruth, target: &Ruth) -> Result<RuthMorphism, SplitError> {
    let level = phi.max_level();
    let (v, w) = (build_sdp_raw(source, level), build_sdp_raw(target, level));
    let (c, cw) = (canonical_cleavage(source, &v), canonical_cleavage(target, &w));
    if let Some(x) = check_weakly_flat_morphism(phi, &v, &c, &cw).first() {
        return Err(SplitError::NotWeaklyFlat { level: x.level, simplex: x.simplex });
    }
    let mut psi = RuthMorphism::zero(source, target)?;
    let nerve = v.nerve();
    for m in 0..=psi.top() {
        for g in 0..nerve.size(m) {
            for n in 0..=source.order() {
                if n + m > target.order() || n + m > level {
                    continue;
                }
                let lvl = n + m;
                let s = nerve.prepend_units(m, g, n);
                let (ls, lt) = (fiber_layout(source, nerve, lvl, s), fiber_layout(target, nerve, lvl, s));
                let sigma = zero_mono_index_of_mask((1u64 << (n + 1)) - 1);
                let iota = zero_mono_count(lvl) - 1;
                let block = phi.at(lvl, s).block(lt.offsets[iota], ls.offsets[sigma], lt.block_dims[iota], ls.block_dims[sigma]);
                psi.set_block(m, g, n, block)?;
            }
        }
    }
    Ok(psi)
}

/// A gauge equivalence `ψ : R → R′` with its lift and the twisted cleavage `C^ψ = (ψ^∧)^{-1} C′^{can}` on `G ⋉_R E`.
#[derive(Clone, Debug)]
pub struct GaugeTwist {
    pub target: Ruth,
    pub psi: RuthMorphism,
    pub lift: BundleMap,
    pub v: SimpVB,
    pub c_psi: Cleavage,
}

pub fn gauge_twist(r: &Ruth, gauge: &GaugeData, level: usize) -> Result<GaugeTwist, SplitError> {
    let (target, psi) = gauge_transform(r, gauge)?;
    let (v, _) = build_sdp(r, level)?;
    let w = build_sdp_raw(&target, level);
    let can = canonical_cleavage(&target, &w);
    let lift = lift_morphism(&psi, level)?;
    let c_psi = Cleavage::from_fn(&v, |n, s| Subspace::preimage(lift.at(n, s), can.space(n, s)).expect("fiber shapes agree"))?;
    Ok(GaugeTwist { target, psi, lift, v, c_psi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::FinGroupoid;
    use crate::sdp::default_level;

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

    fn gauge(r: &Ruth) -> GaugeData {
        let nerve = r.nerve();
        let comps = (0..nerve.size(1))
            .map(|a| {
                let mut m = RatMat::zeros(2, 2);
                if !r.groupoid().is_unit(a) {
                    m.set(1, 0, Q::int(a as i64 + 2));
                }
                m
            })
            .collect();
        GaugeData { components: vec![comps] }
    }

    #[test]
    fn canonical_split_recovers_the_operators() {
        let r = order_one();
        let (v, c) = build_sdp(&r, default_level(&r)).unwrap();
        let ctx = SplitContext::new(v.clone(), c).unwrap();
        assert_eq!(ctx.extract_ruth().unwrap(), r);
        let phi = ctx.phi_up_to(v.max_level());
        assert_eq!(phi, BundleMap::identity(&v));
    }

    #[test]
    fn push_forward_is_identity_over_degenerate_base() {
        let r = order_one();
        let (v, c) = build_sdp(&r, 4).unwrap();
        let ctx = SplitContext::new(v.clone(), c).unwrap();
        let nerve = v.nerve();
        let mut seen = 0;
        for i in 0..2 {
            for s in 0..nerve.size(2) {
                if r.groupoid().is_unit(nerve.simplex(2, s)[i]) {
                    let pf = ctx.push_forward(i, 2, s);
                    assert_eq!(pf.p_simplex, s);
                    assert!(pf.p.is_identity());
                    seen += 1;
                }
            }
        }
        assert!(seen > 0);
        let (r0, s0) = ctx.intermediate(2, 5, 0);
        assert!(r0.is_identity() && s0 == 5);
    }

    #[test]
    fn twisted_split_is_the_gauge_transform() {
        let r = order_one();
        let tw = gauge_twist(&r, &gauge(&r), default_level(&r)).unwrap();
        let ctx = SplitContext::new(tw.v.clone(), tw.c_psi.clone()).unwrap();
        let (extracted, rt) = ctx.roundtrip_bundle().unwrap();
        assert!(rt.passed(), "{rt:?}");
        assert_eq!(extracted, tw.target);
        assert_eq!(ctx.phi_up_to(tw.v.max_level()), tw.lift);
    }

    #[test]
    fn lowering_a_lift_gives_back_the_morphism() {
        let r = order_one();
        let (_, psi) = gauge_transform(&r, &gauge(&r)).unwrap();
        let lift = lift_morphism(&psi, default_level(&r)).unwrap();
        assert_eq!(lower_morphism(&lift, psi.source(), psi.target()).unwrap(), psi);
    }
}
