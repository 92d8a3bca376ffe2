//! Representations up to homotopy of finite groupoids and their morphisms.
//!
//! A representation `R` on a graded bundle `E = E_0 ⊕ ... ⊕ E_N` assigns to every
//! `m`-simplex `g = (x_0 → ... → x_m)` of the nerve an operator
//! `R_m^g : E^{x_0} → E^{x_m}` of degree `m - 1`. Operators are stored per source
//! degree; `R_m` vanishes identically for `m > N + 1` since its target degree would
//! exceed `N`, so only `m ≤ N + 1` is stored.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{RatMat, Subspace, Q};
use crate::groupoid::{FinGroupoid, GroupoidDoc, GroupoidError, Nerve};
use crate::ordmaps::OrdMap;
use crate::report::{CheckReport, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuthError {
    #[error("graded bundle must list the same number of degrees for every object")]
    RaggedBundle,
    #[error("bundle has {got} objects, groupoid has {expected}")]
    ObjectCount { expected: usize, got: usize },
    #[error(
        "block R_{m} at simplex {simplex}, degree {degree}: expected {expected:?}, got {got:?}"
    )]
    BlockShape {
        m: usize,
        simplex: usize,
        degree: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("operator index out of range: m = {m}, simplex {simplex}, degree {degree}")]
    OutOfRange {
        m: usize,
        simplex: usize,
        degree: usize,
    },
    #[error("source and target live over different groupoids")]
    DifferentBase,
    #[error("order {0} exceeds 1; the Grothendieck construction needs a two-term representation")]
    OrderTooLarge(usize),
    #[error("representation fails {0}")]
    Invalid(String),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

/// A graded vector bundle over the objects: `dims[x][n] = dim E_n^x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedBundle {
    dims: Vec<Vec<usize>>,
}

impl GradedBundle {
    pub fn new(dims: Vec<Vec<usize>>) -> Result<GradedBundle, RuthError> {
        let len = dims.first().map_or(1, Vec::len);
        if len == 0 || dims.iter().any(|d| d.len() != len) {
            return Err(RuthError::RaggedBundle);
        }
        Ok(GradedBundle { dims })
    }

    /// The same dimensions over every object.
    pub fn uniform(objects: usize, dims: &[usize]) -> GradedBundle {
        GradedBundle {
            dims: vec![dims.to_vec(); objects],
        }
    }

    pub fn num_objects(&self) -> usize {
        self.dims.len()
    }

    /// The declared order `N` (highest listed degree).
    pub fn order(&self) -> usize {
        self.dims[0].len() - 1
    }

    pub fn dim(&self, x: usize, n: usize) -> usize {
        self.dims[x].get(n).copied().unwrap_or(0)
    }

    pub fn dims_at(&self, x: usize) -> &[usize] {
        &self.dims[x]
    }

    pub fn total(&self, x: usize) -> usize {
        self.dims[x].iter().sum()
    }

    pub fn offset(&self, x: usize, n: usize) -> usize {
        self.dims[x].iter().take(n).sum()
    }

    /// Degree of a coordinate in the stacked fiber at `x`.
    pub fn degree_of(&self, x: usize, coord: usize) -> usize {
        let mut acc = 0;
        for (n, &d) in self.dims[x].iter().enumerate() {
            acc += d;
            if coord < acc {
                return n;
            }
        }
        panic!("coordinate {coord} outside the fiber at object {x}")
    }
}

/// Zero blocks indexed `[m][simplex][source degree]`, shifting degree by `shift_of(m)`.
fn zero_blocks(
    nerve: &Nerve,
    src: &GradedBundle,
    tgt: &GradedBundle,
    levels: usize,
    shift_of: impl Fn(usize) -> isize,
) -> Vec<Vec<Vec<RatMat>>> {
    (0..levels)
        .map(|m| {
            let shift = shift_of(m);
            (0..nerve.size(m))
                .map(|s| {
                    let (x0, xm) = (nerve.vertex(m, s, 0), nerve.vertex(m, s, m));
                    (0..=src.order())
                        .map(|n| {
                            let t = n as isize + shift;
                            let rows = if t < 0 { 0 } else { tgt.dim(xm, t as usize) };
                            RatMat::zeros(rows, src.dim(x0, n))
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// A representation up to homotopy.
#[derive(Clone, Debug)]
pub struct Ruth {
    groupoid: FinGroupoid,
    bundle: GradedBundle,
    nerve: Nerve,
    /// `ops[m][s][n]`: the block `E_n^{x_0} → E_{n+m-1}^{x_m}` of `R_m` at simplex `s`.
    ops: Vec<Vec<Vec<RatMat>>>,
}

impl PartialEq for Ruth {
    fn eq(&self, other: &Ruth) -> bool {
        self.groupoid == other.groupoid && self.bundle == other.bundle && self.ops == other.ops
    }
}

impl Eq for Ruth {}

impl Ruth {
    /// All operators zero except `R_1 = id` over units; fill in with [`Ruth::set_block`].
    pub fn zero(groupoid: &FinGroupoid, bundle: GradedBundle) -> Result<Ruth, RuthError> {
        if bundle.num_objects() != groupoid.num_objects() {
            return Err(RuthError::ObjectCount {
                expected: groupoid.num_objects(),
                got: bundle.num_objects(),
            });
        }
        let order = bundle.order();
        let nerve = Nerve::new(groupoid, order + 1);
        let ops = zero_blocks(&nerve, &bundle, &bundle, order + 2, |m| m as isize - 1);
        let mut r = Ruth {
            groupoid: groupoid.clone(),
            bundle,
            nerve,
            ops,
        };
        for x in 0..groupoid.num_objects() {
            let u = r
                .nerve
                .index_of(1, &[groupoid.identity(x)])
                .expect("units are arrows");
            for n in 0..=order {
                r.ops[1][u][n] = RatMat::identity(r.bundle.dim(x, n));
            }
        }
        Ok(r)
    }

    pub fn set_block(
        &mut self,
        m: usize,
        simplex: usize,
        degree: usize,
        block: RatMat,
    ) -> Result<(), RuthError> {
        let slot = self
            .ops
            .get_mut(m)
            .and_then(|l| l.get_mut(simplex))
            .and_then(|l| l.get_mut(degree))
            .ok_or(RuthError::OutOfRange { m, simplex, degree })?;
        if (slot.rows(), slot.cols()) != (block.rows(), block.cols()) {
            return Err(RuthError::BlockShape {
                m,
                simplex,
                degree,
                expected: (slot.rows(), slot.cols()),
                got: (block.rows(), block.cols()),
            });
        }
        *slot = block;
        Ok(())
    }

    /// Set `R_m^s` from a full matrix `E^{x_0} → E^{x_m}`; entries outside degree `m-1` are ignored.
    pub fn set_full(&mut self, m: usize, simplex: usize, full: &RatMat) -> Result<(), RuthError> {
        let (x0, xm) = (
            self.nerve.vertex(m, simplex, 0),
            self.nerve.vertex(m, simplex, m),
        );
        for n in 0..=self.order() {
            let t = n + m;
            if t == 0 || t - 1 > self.order() {
                continue;
            }
            let b = full.block(
                self.bundle.offset(xm, t - 1),
                self.bundle.offset(x0, n),
                self.bundle.dim(xm, t - 1),
                self.bundle.dim(x0, n),
            );
            self.set_block(m, simplex, n, b)?;
        }
        Ok(())
    }

    pub fn groupoid(&self) -> &FinGroupoid {
        &self.groupoid
    }

    pub fn bundle(&self) -> &GradedBundle {
        &self.bundle
    }

    /// The nerve up to level `N + 1`, whose enumeration indexes the operators.
    pub fn nerve(&self) -> &Nerve {
        &self.nerve
    }

    pub fn order(&self) -> usize {
        self.bundle.order()
    }

    /// Smallest cap making [`check_rh2`] complete.
    pub fn default_mcap(&self) -> usize {
        2 * self.order() + 2
    }

    /// Block of `R_m^s` on source degree `n` (`m ≤ N + 1`).
    pub fn block(&self, m: usize, s: usize, n: usize) -> &RatMat {
        &self.ops[m][s][n]
    }

    /// `R_m^s` as a matrix `E^{x_0} → E^{x_m}`; `nerve` supplies the simplex (any level).
    pub fn full(&self, nerve: &Nerve, m: usize, s: usize) -> RatMat {
        let (x0, xm) = (nerve.vertex(m, s, 0), nerve.vertex(m, s, m));
        let mut out = RatMat::zeros(self.bundle.total(xm), self.bundle.total(x0));
        if m > self.order() + 1 {
            return out;
        }
        for n in 0..=self.order() {
            let t = n + m;
            if t == 0 || t - 1 > self.order() {
                continue;
            }
            out.set_block(
                self.bundle.offset(xm, t - 1),
                self.bundle.offset(x0, n),
                &self.ops[m][s][n],
            );
        }
        out
    }

    /// Whether `R_m = 0` for all `m > 1`.
    pub fn is_strict(&self) -> bool {
        self.ops
            .iter()
            .skip(2)
            .all(|l| l.iter().all(|s| s.iter().all(RatMat::is_zero)))
    }

    /// Full check of RH1 and RH2 up to `mcap` (default `2N + 2`).
    pub fn validate(&self, mcap: Option<usize>) -> Result<(), RuthError> {
        let r1 = check_rh1(self);
        if let Some(v) = r1.first() {
            return Err(RuthError::Invalid(format!(
                "RH1 at level {} simplex {}",
                v.level, v.simplex
            )));
        }
        let r2 = check_rh2(self, mcap.unwrap_or(self.default_mcap()));
        if let Some(v) = r2.first() {
            return Err(RuthError::Invalid(format!(
                "RH2 at level {} simplex {}",
                v.level, v.simplex
            )));
        }
        Ok(())
    }

    pub fn to_doc(&self) -> RuthDoc {
        let mut operators = Vec::new();
        for (m, level) in self.ops.iter().enumerate() {
            for (s, blocks) in level.iter().enumerate() {
                for (n, b) in blocks.iter().enumerate() {
                    let structural = m == 1
                        && self.groupoid.is_unit(self.nerve.simplex(1, s)[0])
                        && b.is_identity();
                    if !b.is_zero() && !structural && b.rows() * b.cols() > 0 {
                        operators.push(OperatorDoc {
                            m,
                            simplex: s,
                            degree: n,
                            matrix: b.clone(),
                        });
                    }
                }
            }
        }
        RuthDoc {
            groupoid: GroupoidRef::Inline(self.groupoid.to_doc()),
            dims: self.bundle.dims.clone(),
            operators,
        }
    }

    pub fn from_doc(doc: &RuthDoc) -> Result<Ruth, RuthError> {
        let g = doc.groupoid.resolve()?;
        let mut r = Ruth::zero(&g, GradedBundle::new(doc.dims.clone())?)?;
        for op in &doc.operators {
            r.set_block(op.m, op.simplex, op.degree, op.matrix.clone())?;
        }
        Ok(r)
    }
}

/// A groupoid given inline or by builtin name (`"pair(2)"`, `"Z/2"`, ...).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum GroupoidRef {
    Builtin(String),
    Inline(GroupoidDoc),
}

impl GroupoidRef {
    pub fn resolve(&self) -> Result<FinGroupoid, GroupoidError> {
        match self {
            GroupoidRef::Builtin(name) => {
                FinGroupoid::builtin(name).ok_or_else(|| GroupoidError::UnknownObject(name.clone()))
            }
            GroupoidRef::Inline(doc) => FinGroupoid::from_doc(doc),
        }
    }
}

/// JSON form of a representation. Missing blocks are zero; `R_1` over units defaults to the identity.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RuthDoc {
    pub groupoid: GroupoidRef,
    pub dims: Vec<Vec<usize>>,
    pub operators: Vec<OperatorDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OperatorDoc {
    pub m: usize,
    pub simplex: usize,
    pub degree: usize,
    pub matrix: RatMat,
}

/// First source degree on which two operators `E^{x} → E'^{y}` differ.
fn first_bad_degree(bundle: &GradedBundle, x: usize, lhs: &RatMat, rhs: &RatMat) -> Option<usize> {
    (0..lhs.cols())
        .find(|&c| lhs.col(c) != rhs.col(c))
        .map(|c| bundle.degree_of(x, c))
}

/// RH1: `R_1` is the identity over units and `R_m` vanishes on degenerate simplices for `m > 1`.
pub fn check_rh1(r: &Ruth) -> CheckReport {
    let mut rep = CheckReport::new("RH1");
    let g = &r.groupoid;
    for x in 0..g.num_objects() {
        let u = r.nerve.index_of(1, &[g.identity(x)]).expect("unit arrow");
        let full = r.full(&r.nerve, 1, u);
        let fail = (!full.is_identity()).then(|| {
            Violation::new("R_1 over a unit is the identity", 1, u)
                .detail(format!("object {}", g.object_name(x)))
        });
        rep.record(fail);
    }
    for m in 2..=r.order() + 1 {
        for s in 0..r.nerve.size(m) {
            if !r.nerve.is_degenerate(m, s) {
                continue;
            }
            let bad = (0..=r.order()).find(|&n| !r.ops[m][s][n].is_zero());
            rep.record(
                bad.map(|n| Violation::new("R_m vanishes on degenerate simplices", m, s).degree(n)),
            );
        }
    }
    rep
}

/// RH2 for every `g ∈ G_m`, `m ≤ mcap`:
/// `Σ_{i=1}^{m-1} (-1)^i R_{m-1}^{d_i g} = Σ_{r=0}^m (-1)^r R_{m-r}^{t_{m-r} g} R_r^{s_r g}`.
pub fn check_rh2(r: &Ruth, mcap: usize) -> CheckReport {
    let mut rep = CheckReport::new("RH2");
    let nerve = Nerve::new(&r.groupoid, mcap.max(1));
    for m in 0..=mcap {
        for s in 0..nerve.size(m) {
            let (lhs, rhs) = rh2_sides(r, &nerve, m, s);
            let x0 = nerve.vertex(m, s, 0);
            rep.record(
                first_bad_degree(&r.bundle, x0, &lhs, &rhs)
                    .map(|n| Violation::new("RH2", m, s).degree(n)),
            );
        }
    }
    rep
}

/// Both sides of RH2 at `g = s ∈ G_m`.
pub fn rh2_sides(r: &Ruth, nerve: &Nerve, m: usize, s: usize) -> (RatMat, RatMat) {
    let (x0, xm) = (nerve.vertex(m, s, 0), nerve.vertex(m, s, m));
    let mut lhs = RatMat::zeros(r.bundle.total(xm), r.bundle.total(x0));
    for i in 1..m {
        let f = nerve.face(m, i, s);
        lhs.add_assign(&r.full(nerve, m - 1, f).scale(&Q::pow_neg_one(i)));
    }
    let mut rhs = RatMat::zeros(r.bundle.total(xm), r.bundle.total(x0));
    for k in 0..=m {
        if k > r.order() + 1 || m - k > r.order() + 1 {
            continue;
        }
        let head = nerve.restrict_index(m, s, &OrdMap::sigma(k, m));
        let tail = nerve.restrict_index(m, s, &OrdMap::tau(m - k, m));
        let term = r.full(nerve, m - k, tail).mul(&r.full(nerve, k, head));
        rhs.add_assign(&term.scale(&Q::pow_neg_one(k)));
    }
    (lhs, rhs)
}

/// Pointwise cycles, boundaries and homology dimensions of `(E^x, R_0^x)`, per degree.
pub fn cycles_borders(r: &Ruth, x: usize) -> Vec<(usize, usize, usize)> {
    let bundle = &r.bundle;
    (0..=r.order())
        .map(|n| {
            let d_n = r.ops[0][x][n].clone();
            let z = bundle.dim(x, n) - d_n.rank();
            let b = if n < r.order() {
                r.ops[0][x][n + 1].rank()
            } else {
                0
            };
            (z, b, z - b)
        })
        .collect()
}

/// The pointwise complexes have the same cycle and boundary dimensions along every arrow.
pub fn check_orbit_constancy(r: &Ruth) -> CheckReport {
    let mut rep = CheckReport::new("cycles and borders constant along orbits");
    let g = &r.groupoid;
    for a in 0..g.num_arrows() {
        let (x, y) = (g.src(a), g.tgt(a));
        let (cx, cy) = (cycles_borders(r, x), cycles_borders(r, y));
        let bad = (0..cx.len()).find(|&n| cx[n].0 != cy[n].0 || cx[n].1 != cy[n].1);
        rep.record(bad.map(|n| Violation::new("Z and B dims agree", 1, a).degree(n)));
    }
    rep
}

/// A morphism of representations up to homotopy, `ψ_m^g : E^{x_0} → E'^{x_m}` of degree `m`.
#[derive(Clone, Debug)]
pub struct RuthMorphism {
    source: Ruth,
    target: Ruth,
    /// `ops[m][s][n]`: the block `E_n^{x_0} → E'_{n+m}^{x_m}`, for `m ≤ N'`.
    ops: Vec<Vec<Vec<RatMat>>>,
}

impl PartialEq for RuthMorphism {
    fn eq(&self, other: &RuthMorphism) -> bool {
        self.source == other.source && self.target == other.target && self.ops == other.ops
    }
}

impl RuthMorphism {
    /// All components zero; fill in with [`RuthMorphism::set_block`].
    pub fn zero(source: &Ruth, target: &Ruth) -> Result<RuthMorphism, RuthError> {
        if source.groupoid != target.groupoid {
            return Err(RuthError::DifferentBase);
        }
        let levels = target.order() + 1;
        let nerve = Nerve::new(&source.groupoid, levels.max(1));
        let ops = zero_blocks(&nerve, &source.bundle, &target.bundle, levels, |m| {
            m as isize
        });
        Ok(RuthMorphism {
            source: source.clone(),
            target: target.clone(),
            ops,
        })
    }

    /// `ψ_0 = id` and all higher components zero; requires equal bundles.
    pub fn identity(r: &Ruth) -> RuthMorphism {
        let mut psi = RuthMorphism::zero(r, r).expect("same base");
        for x in 0..r.groupoid.num_objects() {
            for n in 0..=r.order() {
                psi.ops[0][x][n] = RatMat::identity(r.bundle.dim(x, n));
            }
        }
        psi
    }

    pub fn source(&self) -> &Ruth {
        &self.source
    }

    pub fn target(&self) -> &Ruth {
        &self.target
    }

    /// Highest `m` with stored components.
    pub fn top(&self) -> usize {
        self.ops.len() - 1
    }

    pub fn block(&self, m: usize, s: usize, n: usize) -> &RatMat {
        &self.ops[m][s][n]
    }

    pub fn set_block(
        &mut self,
        m: usize,
        simplex: usize,
        degree: usize,
        block: RatMat,
    ) -> Result<(), RuthError> {
        let slot = self
            .ops
            .get_mut(m)
            .and_then(|l| l.get_mut(simplex))
            .and_then(|l| l.get_mut(degree))
            .ok_or(RuthError::OutOfRange { m, simplex, degree })?;
        if (slot.rows(), slot.cols()) != (block.rows(), block.cols()) {
            return Err(RuthError::BlockShape {
                m,
                simplex,
                degree,
                expected: (slot.rows(), slot.cols()),
                got: (block.rows(), block.cols()),
            });
        }
        *slot = block;
        Ok(())
    }

    /// Set `ψ_m^s` from a full matrix; entries outside degree `m` are ignored.
    pub fn set_full(
        &mut self,
        nerve: &Nerve,
        m: usize,
        simplex: usize,
        full: &RatMat,
    ) -> Result<(), RuthError> {
        let (x0, xm) = (nerve.vertex(m, simplex, 0), nerve.vertex(m, simplex, m));
        let (sb, tb) = (self.source.bundle.clone(), self.target.bundle.clone());
        for n in 0..=sb.order() {
            if n + m > tb.order() {
                continue;
            }
            let b = full.block(
                tb.offset(xm, n + m),
                sb.offset(x0, n),
                tb.dim(xm, n + m),
                sb.dim(x0, n),
            );
            self.set_block(m, simplex, n, b)?;
        }
        Ok(())
    }

    /// `ψ_m^s` as a matrix `E^{x_0} → E'^{x_m}`.
    pub fn full(&self, nerve: &Nerve, m: usize, s: usize) -> RatMat {
        let (x0, xm) = (nerve.vertex(m, s, 0), nerve.vertex(m, s, m));
        let (sb, tb) = (&self.source.bundle, &self.target.bundle);
        let mut out = RatMat::zeros(tb.total(xm), sb.total(x0));
        if m > self.top() {
            return out;
        }
        for n in 0..=sb.order() {
            if n + m > tb.order() {
                continue;
            }
            out.set_block(tb.offset(xm, n + m), sb.offset(x0, n), &self.ops[m][s][n]);
        }
        out
    }

    pub fn is_strict(&self) -> bool {
        self.ops
            .iter()
            .skip(1)
            .all(|l| l.iter().all(|s| s.iter().all(RatMat::is_zero)))
    }

    /// `ψ_0 = id` (same bundle on both ends).
    pub fn is_gauge(&self) -> bool {
        self.source.bundle == self.target.bundle
            && (0..self.source.groupoid.num_objects()).all(|x| {
                (0..=self.source.order())
                    .all(|n| self.ops[0][x][n].is_identity() || self.ops[0][x][n].cols() == 0)
            })
    }

    /// `(ψ′ ∘ ψ)_m^g = Σ_r ψ′_{m-r}^{t_{m-r} g} ψ_r^{s_r g}`.
    pub fn compose(outer: &RuthMorphism, inner: &RuthMorphism) -> Result<RuthMorphism, RuthError> {
        if inner.target != outer.source {
            return Err(RuthError::Invalid(
                "composition of morphisms with mismatched ends".into(),
            ));
        }
        let mut out = RuthMorphism::zero(&inner.source, &outer.target)?;
        let nerve = Nerve::new(&inner.source.groupoid, out.top().max(1));
        for m in 0..=out.top() {
            for s in 0..nerve.size(m) {
                let (x0, xm) = (nerve.vertex(m, s, 0), nerve.vertex(m, s, m));
                let mut acc =
                    RatMat::zeros(outer.target.bundle.total(xm), inner.source.bundle.total(x0));
                for k in 0..=m {
                    let head = nerve.restrict_index(m, s, &OrdMap::sigma(k, m));
                    let tail = nerve.restrict_index(m, s, &OrdMap::tau(m - k, m));
                    acc.add_assign(
                        &outer
                            .full(&nerve, m - k, tail)
                            .mul(&inner.full(&nerve, k, head)),
                    );
                }
                out.set_full(&nerve, m, s, &acc)?;
            }
        }
        Ok(out)
    }
}

/// RH3 (vanishing on degenerate simplices for `m > 0`) and RH4 up to `mcap`.
pub fn check_morphism(psi: &RuthMorphism, mcap: usize) -> (CheckReport, CheckReport) {
    let mut rh3 = CheckReport::new("RH3");
    let nerve = Nerve::new(&psi.source.groupoid, mcap.max(1));
    for m in 1..=psi.top() {
        for s in 0..nerve.size(m) {
            if nerve.is_degenerate(m, s) {
                let bad = psi.ops[m][s].iter().position(|b| !b.is_zero());
                rh3.record(bad.map(|n| Violation::new("RH3", m, s).degree(n)));
            }
        }
    }
    let mut rh4 = CheckReport::new("RH4");
    for m in 0..=mcap {
        for s in 0..nerve.size(m) {
            let (lhs, rhs) = rh4_sides(psi, &nerve, m, s);
            let x0 = nerve.vertex(m, s, 0);
            rh4.record(
                first_bad_degree(&psi.source.bundle, x0, &lhs, &rhs)
                    .map(|n| Violation::new("RH4", m, s).degree(n)),
            );
        }
    }
    (rh3, rh4)
}

/// Both sides of RH4 at `g = s ∈ G_m`:
/// `Σ_r (-1)^m R′_{m-r}^{t} ψ_r^{s} + Σ_{i=1}^{m-1} (-1)^i ψ_{m-1}^{d_i g} = Σ_r (-1)^r ψ_{m-r}^{t} R_r^{s}`.
pub fn rh4_sides(psi: &RuthMorphism, nerve: &Nerve, m: usize, s: usize) -> (RatMat, RatMat) {
    let (r, rp) = (&psi.source, &psi.target);
    let (x0, xm) = (nerve.vertex(m, s, 0), nerve.vertex(m, s, m));
    let mut lhs = RatMat::zeros(rp.bundle.total(xm), r.bundle.total(x0));
    let mut rhs = lhs.clone();
    for k in 0..=m {
        let head = nerve.restrict_index(m, s, &OrdMap::sigma(k, m));
        let tail = nerve.restrict_index(m, s, &OrdMap::tau(m - k, m));
        lhs.add_assign(
            &rp.full(nerve, m - k, tail)
                .mul(&psi.full(nerve, k, head))
                .scale(&Q::pow_neg_one(m)),
        );
        rhs.add_assign(
            &psi.full(nerve, m - k, tail)
                .mul(&r.full(nerve, k, head))
                .scale(&Q::pow_neg_one(k)),
        );
    }
    for i in 1..m {
        lhs.add_assign(
            &psi.full(nerve, m - 1, nerve.face(m, i, s))
                .scale(&Q::pow_neg_one(i)),
        );
    }
    (lhs, rhs)
}

/// Higher components `ψ_m`, `m ≥ 1`, of a gauge equivalence out of `r` (with `ψ_0 = id`).
#[derive(Clone, Debug)]
pub struct GaugeData {
    /// `components[m - 1][s]`: full matrix `E^{x_0} → E^{x_m}` of degree `m`.
    pub components: Vec<Vec<RatMat>>,
}

impl GaugeData {
    pub fn identity() -> GaugeData {
        GaugeData {
            components: Vec::new(),
        }
    }
}

/// The target `R′` of the gauge equivalence `ψ : R → R′`, solved degree by degree from RH4.
///
/// With `ψ_0 = id` the `r = 0` term on the left of RH4 is `(-1)^m R′_m^g`, and every other
/// term involves only `R′_k` with `k < m`, so RH4 determines `R′` recursively.
pub fn gauge_transform(r: &Ruth, gauge: &GaugeData) -> Result<(Ruth, RuthMorphism), RuthError> {
    let mut rp = Ruth::zero(&r.groupoid, r.bundle.clone())?;
    let mut psi = RuthMorphism::identity(r);
    let nerve = Nerve::new(&r.groupoid, r.order() + 1);
    for (mm, comps) in gauge.components.iter().enumerate() {
        let m = mm + 1;
        if m > psi.top() {
            break;
        }
        for (s, c) in comps.iter().enumerate() {
            psi.set_full(&nerve, m, s, c)?;
        }
    }
    let levels = r.order() + 1;
    for m in 0..=levels {
        for s in 0..nerve.size(m) {
            let (x0, xm) = (nerve.vertex(m, s, 0), nerve.vertex(m, s, m));
            let mut acc = RatMat::zeros(r.bundle.total(xm), r.bundle.total(x0));
            for k in 0..=m {
                let head = nerve.restrict_index(m, s, &OrdMap::sigma(k, m));
                let tail = nerve.restrict_index(m, s, &OrdMap::tau(m - k, m));
                acc.add_assign(
                    &psi.full(&nerve, m - k, tail)
                        .mul(&r.full(&nerve, k, head))
                        .scale(&Q::pow_neg_one(k)),
                );
                if k >= 1 {
                    acc.add_assign(
                        &rp.full(&nerve, m - k, tail)
                            .mul(&psi.full(&nerve, k, head))
                            .scale(&-Q::pow_neg_one(m)),
                    );
                }
            }
            for i in 1..m {
                acc.add_assign(
                    &psi.full(&nerve, m - 1, nerve.face(m, i, s))
                        .scale(&-Q::pow_neg_one(i)),
                );
            }
            rp.set_full(m, s, &acc.scale(&Q::pow_neg_one(m)))?;
        }
    }
    psi.target = rp.clone();
    Ok((rp, psi))
}

/// An arrow `(c, g, e)` of the Grothendieck construction: `c ∈ E_1^{t(g)}`, `e ∈ E_0^{s(g)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrArrow {
    pub c: Vec<Q>,
    pub g: usize,
    pub e: Vec<Q>,
}

/// The Grothendieck construction `t^*E_1 ⊕ s^*E_0 ⇉ E_0` of a representation of order ≤ 1.
pub struct Grothendieck<'a> {
    r: &'a Ruth,
}

impl<'a> Grothendieck<'a> {
    pub fn new(r: &'a Ruth) -> Result<Grothendieck<'a>, RuthError> {
        if r.order() > 1 {
            return Err(RuthError::OrderTooLarge(r.order()));
        }
        Ok(Grothendieck { r })
    }

    fn block_or_zero(&self, m: usize, s: usize, n: usize, rows: usize, cols: usize) -> RatMat {
        if m <= self.r.order() + 1
            && n <= self.r.order()
            && n + m >= 1
            && n + m - 1 <= self.r.order()
        {
            self.r.ops[m][s][n].clone()
        } else {
            RatMat::zeros(rows, cols)
        }
    }

    fn e1(&self, x: usize) -> usize {
        self.r.bundle.dim(x, 1)
    }

    fn e0(&self, x: usize) -> usize {
        self.r.bundle.dim(x, 0)
    }

    pub fn source(&self, a: &GrArrow) -> Vec<Q> {
        a.e.clone()
    }

    /// `t(c, g, e) = R_0^y c + R_1^g e`.
    pub fn target(&self, a: &GrArrow) -> Vec<Q> {
        let gpd = &self.r.groupoid;
        let (x, y) = (gpd.src(a.g), gpd.tgt(a.g));
        let r0 = self.block_or_zero(0, y, 1, self.e0(y), self.e1(y));
        let r1 = self.block_or_zero(1, a.g, 0, self.e0(y), self.e0(x));
        crate::exactla::add_vec(&r0.apply(&a.c), &r1.apply(&a.e))
    }

    /// `(c′, g′, e′)(c, g, e) = (c′ + R_1^{g′} c + R_2^{g′, g} e, g′g, e)`, defined when `e′ = t(c, g, e)`.
    pub fn multiply(&self, second: &GrArrow, first: &GrArrow) -> Option<GrArrow> {
        let gpd = &self.r.groupoid;
        if gpd.src(second.g) != gpd.tgt(first.g) || second.e != self.target(first) {
            return None;
        }
        let (x, y, z) = (gpd.src(first.g), gpd.tgt(first.g), gpd.tgt(second.g));
        let r1 = self.block_or_zero(1, second.g, 1, self.e1(z), self.e1(y));
        let two = self.r.nerve.index_of(2, &[first.g, second.g]);
        let r2 = match two {
            Some(s) => self.block_or_zero(2, s, 0, self.e1(z), self.e0(x)),
            None => RatMat::zeros(self.e1(z), self.e0(x)),
        };
        let c = crate::exactla::add_vec(
            &crate::exactla::add_vec(&second.c, &r1.apply(&first.c)),
            &r2.apply(&first.e),
        );
        Some(GrArrow {
            c,
            g: gpd.compose(second.g, first.g),
            e: first.e.clone(),
        })
    }

    pub fn unit(&self, x: usize, e: Vec<Q>) -> GrArrow {
        GrArrow {
            c: vec![Q::from(0); self.e1(x)],
            g: self.r.groupoid.identity(x),
            e,
        }
    }

    /// `(c, g, e)^{-1} = (-R_1^{g^{-1}} c - R_2^{g^{-1}, g} e, g^{-1}, t(c, g, e))`.
    pub fn inverse(&self, a: &GrArrow) -> GrArrow {
        let gpd = &self.r.groupoid;
        let (x, y) = (gpd.src(a.g), gpd.tgt(a.g));
        let gi = gpd.inverse(a.g);
        let r1 = self.block_or_zero(1, gi, 1, self.e1(x), self.e1(y));
        let s = self.r.nerve.index_of(2, &[a.g, gi]).expect("composable");
        let r2 = self.block_or_zero(2, s, 0, self.e1(x), self.e0(x));
        let c = crate::exactla::add_vec(&r1.apply(&a.c), &r2.apply(&a.e))
            .into_iter()
            .map(|q| -q)
            .collect();
        GrArrow {
            c,
            g: gi,
            e: self.target(a),
        }
    }
}

/// Does `R_1^{hg} = R_1^h R_1^g` hold for all composable pairs (strict, order 0 check)?
pub fn check_composability(r: &Ruth) -> CheckReport {
    let mut rep = CheckReport::new("R_1 is multiplicative");
    let nerve = Nerve::new(&r.groupoid, 2);
    for s in 0..nerve.size(2) {
        let (g1, g2) = (nerve.simplex(2, s)[0], nerve.simplex(2, s)[1]);
        let composite = r.full(&nerve, 1, r.groupoid.compose(g2, g1));
        let product = r.full(&nerve, 1, g2).mul(&r.full(&nerve, 1, g1));
        rep.record((composite != product).then(|| Violation::new("R_1^{hg} = R_1^h R_1^g", 2, s)));
    }
    rep
}

/// Kernel of `R_0^x` in degree `n`, as a subspace of `E_n^x`.
pub fn pointwise_cycles(r: &Ruth, x: usize, n: usize) -> Subspace {
    r.ops[0][x][n].kernel()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term_over_point() -> Ruth {
        let g = FinGroupoid::unit(1);
        let mut r = Ruth::zero(&g, GradedBundle::uniform(1, &[1, 1])).unwrap();
        r.set_block(0, 0, 1, RatMat::from_ints(&[&[1]])).unwrap();
        r
    }

    #[test]
    fn chain_complex_over_a_point() {
        let r = two_term_over_point();
        assert!(check_rh1(&r).passed());
        assert!(check_rh2(&r, r.default_mcap()).passed());
        assert!(r.full(r.nerve(), 1, 0).is_identity());
    }

    #[test]
    fn degenerate_r2_is_caught() {
        let mut r = two_term_over_point();
        r.set_block(2, 0, 0, RatMat::from_ints(&[&[3]])).unwrap();
        let rep = check_rh1(&r);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(
            (
                rep.violations[0].level,
                rep.violations[0].simplex,
                rep.violations[0].degree
            ),
            (2, 0, Some(0))
        );
    }

    #[test]
    fn rh2_at_level_zero_is_d_squared() {
        let g = FinGroupoid::unit(1);
        let mut r = Ruth::zero(&g, GradedBundle::uniform(1, &[1, 1, 1])).unwrap();
        r.set_block(0, 0, 1, RatMat::from_ints(&[&[1]])).unwrap();
        r.set_block(0, 0, 2, RatMat::from_ints(&[&[1]])).unwrap();
        let rep = check_rh2(&r, 0);
        assert_eq!(rep.first().map(|v| (v.level, v.degree)), Some((0, Some(2))));
    }

    #[test]
    fn sign_representation() {
        let g = FinGroupoid::cyclic(2);
        let mut r = Ruth::zero(&g, GradedBundle::uniform(1, &[1])).unwrap();
        r.set_block(1, 1, 0, RatMat::from_ints(&[&[-1]])).unwrap();
        r.validate(None).unwrap();
        assert!(check_composability(&r).passed());
        let mut bad = r.clone();
        bad.set_block(1, 1, 0, RatMat::from_ints(&[&[2]])).unwrap();
        assert!(!check_rh2(&bad, 2).passed());
    }

    #[test]
    fn cycles_and_borders() {
        let r = two_term_over_point();
        assert_eq!(cycles_borders(&r, 0), vec![(1, 1, 0), (0, 0, 0)]);
        let g = FinGroupoid::unit(1);
        let z = Ruth::zero(&g, GradedBundle::uniform(1, &[2, 3])).unwrap();
        assert_eq!(cycles_borders(&z, 0), vec![(2, 0, 2), (3, 0, 3)]);
    }

    #[test]
    fn identity_morphism_passes() {
        let r = two_term_over_point();
        let id = RuthMorphism::identity(&r);
        let (rh3, rh4) = check_morphism(&id, 4);
        assert!(rh3.passed() && rh4.passed());
        assert!(id.is_strict() && id.is_gauge());
    }

    #[test]
    fn chain_map_condition_at_level_zero() {
        let r = two_term_over_point();
        let mut psi = RuthMorphism::identity(&r);
        psi.set_block(0, 0, 0, RatMat::from_ints(&[&[2]])).unwrap();
        let (_, rh4) = check_morphism(&psi, 0);
        assert_eq!(rh4.first().map(|v| v.level), Some(0));
    }

    #[test]
    fn doc_roundtrip() {
        let r = two_term_over_point();
        let json = serde_json::to_string(&r.to_doc()).unwrap();
        let back = Ruth::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
