//! Simplicial vector bundles over the nerve of a finite groupoid.
//!
//! A bundle stores one fiber `ℚ^d` per simplex of the truncated nerve together with
//! the linear face and degeneracy maps between fibers. Every flatness notion for a
//! cleavage quantifies over infinitely many vectors but is linear in them, so each is
//! decided here as a containment of subspaces: the hypotheses cut out a subspace `W`
//! (an intersection of preimages) and the conclusion asks that `W` map into a target
//! subspace.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::doldkan::SimpVS;
use crate::exactla::modp::{mul_rows, rank_rows, residue_rows};
use crate::exactla::{RatMat, Subspace, Q};
use crate::groupoid::{FinGroupoid, GroupoidError, Nerve};
use crate::report::{CheckReport, Violation};
use crate::ruth::{GradedBundle, GroupoidRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SvbError {
    #[error("{what} at level {level}, simplex {simplex}: expected {expected:?}, got {got:?}")]
    Shape { what: String, level: usize, simplex: usize, expected: (usize, usize), got: (usize, usize) },
    #[error("expected {expected} entries for {what}, got {got}")]
    Count { what: String, expected: usize, got: usize },
    #[error("degree {degree} needs level {needed}, but the bundle stops at level {max_level}")]
    Truncation { degree: usize, needed: usize, max_level: usize },
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

/// A simplicial vector bundle over the nerve, truncated at `max_level`.
#[derive(Clone, Debug)]
pub struct SimpVB {
    nerve: Nerve,
    dims: Vec<Vec<usize>>,
    /// `faces[n][i][s] : V_n^s → V_{n-1}^{d_i s}`, `n ≥ 1`.
    faces: Vec<Vec<Vec<RatMat>>>,
    /// `degens[n][j][s] : V_n^s → V_{n+1}^{u_j s}`, `n < max_level`.
    degens: Vec<Vec<Vec<RatMat>>>,
    /// `(rk d_{n,k}, horn dimension)` per `[n][s][k]`, filled on first use.
    horns: OnceLock<Vec<Vec<Vec<(usize, usize)>>>>,
    simplicial: OnceLock<bool>,
}

impl PartialEq for SimpVB {
    fn eq(&self, other: &SimpVB) -> bool {
        self.nerve.groupoid() == other.nerve.groupoid()
            && self.dims == other.dims
            && self.faces == other.faces
            && self.degens == other.degens
    }
}

impl SimpVB {
    /// Shapes are validated; simplicial identities are checked separately by [`SimpVB::check_identities`].
    pub fn new(
        nerve: Nerve,
        dims: Vec<Vec<usize>>,
        faces: Vec<Vec<Vec<RatMat>>>,
        degens: Vec<Vec<Vec<RatMat>>>,
    ) -> Result<SimpVB, SvbError> {
        let l = nerve.max_level();
        let count = |what: &str, expected: usize, got: usize| {
            if expected == got {
                Ok(())
            } else {
                Err(SvbError::Count { what: what.to_string(), expected, got })
            }
        };
        count("levels of fiber dimensions", l + 1, dims.len())?;
        count("levels of faces", l + 1, faces.len())?;
        count("levels of degeneracies", l + 1, degens.len())?;
        for n in 0..=l {
            count(&format!("fibers at level {n}"), nerve.size(n), dims[n].len())?;
            count(&format!("faces at level {n}"), if n == 0 { 0 } else { n + 1 }, faces[n].len())?;
            count(&format!("degeneracies at level {n}"), if n == l { 0 } else { n + 1 }, degens[n].len())?;
        }
        for n in 1..=l {
            for (i, fs) in faces[n].iter().enumerate() {
                count(&format!("d_{i} matrices at level {n}"), nerve.size(n), fs.len())?;
                for (s, m) in fs.iter().enumerate() {
                    let expected = (dims[n - 1][nerve.face(n, i, s)], dims[n][s]);
                    if (m.rows(), m.cols()) != expected {
                        return Err(SvbError::Shape { what: format!("d_{i}"), level: n, simplex: s, expected, got: (m.rows(), m.cols()) });
                    }
                }
            }
        }
        for n in 0..l {
            for (j, us) in degens[n].iter().enumerate() {
                count(&format!("u_{j} matrices at level {n}"), nerve.size(n), us.len())?;
                for (s, m) in us.iter().enumerate() {
                    let expected = (dims[n + 1][nerve.degen(n, j, s)], dims[n][s]);
                    if (m.rows(), m.cols()) != expected {
                        return Err(SvbError::Shape { what: format!("u_{j}"), level: n, simplex: s, expected, got: (m.rows(), m.cols()) });
                    }
                }
            }
        }
        Ok(SimpVB { nerve, dims, faces, degens, horns: OnceLock::new(), simplicial: OnceLock::new() })
    }

    /// Build fiber by fiber from closures giving dimensions, faces and degeneracies.
    pub fn from_fn(
        nerve: Nerve,
        dim: impl Fn(usize, usize) -> usize,
        face: impl Fn(usize, usize, usize) -> RatMat,
        degen: impl Fn(usize, usize, usize) -> RatMat,
    ) -> Result<SimpVB, SvbError> {
        let l = nerve.max_level();
        let dims = (0..=l).map(|n| (0..nerve.size(n)).map(|s| dim(n, s)).collect()).collect();
        let faces = (0..=l)
            .map(|n| if n == 0 { Vec::new() } else { (0..=n).map(|i| (0..nerve.size(n)).map(|s| face(n, i, s)).collect()).collect() })
            .collect();
        let degens = (0..=l)
            .map(|n| if n == l { Vec::new() } else { (0..=n).map(|j| (0..nerve.size(n)).map(|s| degen(n, j, s)).collect()).collect() })
            .collect();
        SimpVB::new(nerve, dims, faces, degens)
    }

    /// The pullback of a simplicial vector space along `G → *`.
    pub fn pullback(y: &SimpVS, g: &FinGroupoid) -> SimpVB {
        let nerve = Nerve::new(g, y.max_level());
        SimpVB::from_fn(nerve, |n, _| y.dim(n), |n, i, _| y.face(n, i).clone(), |n, j, _| y.degen(n, j).clone())
            .expect("pullback shapes are consistent")
    }

    /// A simplicial vector space as a bundle over the one-point groupoid.
    pub fn from_simpvs(y: &SimpVS) -> SimpVB {
        SimpVB::pullback(y, &FinGroupoid::unit(1))
    }

    pub fn base(&self) -> &FinGroupoid {
        self.nerve.groupoid()
    }

    pub fn nerve(&self) -> &Nerve {
        &self.nerve
    }

    pub fn max_level(&self) -> usize {
        self.nerve.max_level()
    }

    pub fn dim(&self, n: usize, s: usize) -> usize {
        self.dims[n][s]
    }

    pub fn face(&self, n: usize, i: usize, s: usize) -> &RatMat {
        &self.faces[n][i][s]
    }

    pub fn degen(&self, n: usize, j: usize, s: usize) -> &RatMat {
        &self.degens[n][j][s]
    }

    /// Replace one face matrix (same shape), e.g. to build a broken fixture.
    pub fn set_face(&mut self, n: usize, i: usize, s: usize, m: RatMat) -> Result<(), SvbError> {
        let old = &self.faces[n][i][s];
        if (old.rows(), old.cols()) != (m.rows(), m.cols()) {
            return Err(SvbError::Shape { what: format!("d_{i}"), level: n, simplex: s, expected: (old.rows(), old.cols()), got: (m.rows(), m.cols()) });
        }
        self.faces[n][i][s] = m;
        self.horns = OnceLock::new();
        self.simplicial = OnceLock::new();
        Ok(())
    }

    /// Every simplicial identity whose terms live at levels `≤ L`, fiber by fiber.
    pub fn check_identities(&self) -> CheckReport {
        let mut rep = CheckReport::new("simplicial identities");
        let nv = &self.nerve;
        let l = self.max_level();
        for n in 2..=l {
            for s in 0..nv.size(n) {
                for j in 1..=n {
                    for i in 0..j {
                        let lhs = self.face(n - 1, i, nv.face(n, j, s)).mul(self.face(n, j, s));
                        let rhs = self.face(n - 1, j - 1, nv.face(n, i, s)).mul(self.face(n, i, s));
                        rep.record((lhs != rhs).then(|| Violation::new(format!("d_{i} d_{j} = d_{} d_{i}", j - 1), n, s)));
                    }
                }
            }
        }
        for n in 0..l {
            for s in 0..nv.size(n) {
                for j in 0..=n {
                    let us = nv.degen(n, j, s);
                    for i in 0..=n + 1 {
                        let lhs = self.face(n + 1, i, us).mul(self.degen(n, j, s));
                        let (rhs, rule) = if i == j || i == j + 1 {
                            (RatMat::identity(self.dim(n, s)), format!("d_{i} u_{j} = id"))
                        } else if i < j {
                            let f = nv.face(n, i, s);
                            (self.degen(n - 1, j - 1, f).mul(self.face(n, i, s)), format!("d_{i} u_{j} = u_{} d_{i}", j - 1))
                        } else {
                            let f = nv.face(n, i - 1, s);
                            (self.degen(n - 1, j, f).mul(self.face(n, i - 1, s)), format!("d_{i} u_{j} = u_{j} d_{}", i - 1))
                        };
                        rep.record((lhs != rhs).then(|| Violation::new(rule, n + 1, us)));
                    }
                }
            }
        }
        for n in 0..l.saturating_sub(1) {
            for s in 0..nv.size(n) {
                for j in 0..=n {
                    for i in 0..=j {
                        let lhs = self.degen(n + 1, i, nv.degen(n, j, s)).mul(self.degen(n, j, s));
                        let rhs = self.degen(n + 1, j + 1, nv.degen(n, i, s)).mul(self.degen(n, i, s));
                        rep.record((lhs != rhs).then(|| Violation::new(format!("u_{i} u_{j} = u_{} u_{i}", j + 1), n + 2, s)));
                    }
                }
            }
        }
        rep
    }

    /// `v ↦ v|_α` for the sub-simplex with image bitmask `mask ⊆ [n]`, with its simplex index.
    pub fn restriction(&self, n: usize, s: usize, mask: u64) -> (RatMat, usize) {
        let mut cur = RatMat::identity(self.dim(n, s));
        let (mut lvl, mut idx) = (n, s);
        for j in (0..=n).rev() {
            if mask & (1 << j) == 0 {
                cur = self.face(lvl, j, idx).mul(&cur);
                idx = self.nerve.face(lvl, j, idx);
                lvl -= 1;
            }
        }
        (cur, idx)
    }

    /// `s_k = σ_k^*`, the first `k`-dimensional face.
    pub fn front(&self, n: usize, s: usize, k: usize) -> (RatMat, usize) {
        self.restriction(n, s, (1u64 << (k + 1)) - 1)
    }

    /// The relative horn map `v ↦ (d_i v)_{i ≠ k}` as a stacked matrix.
    pub fn horn_map(&self, n: usize, k: usize, s: usize) -> RatMat {
        let parts: Vec<&RatMat> = (0..=n).filter(|&i| i != k).map(|i| self.face(n, i, s)).collect();
        RatMat::vstack(&parts, self.dim(n, s))
    }

    /// Compatible face tuples `(v_i)_{i ≠ k}` over the faces of `s`: `d_i v_j = d_{j-1} v_i` for `i < j`.
    pub fn horn_space(&self, n: usize, k: usize, s: usize) -> Subspace {
        self.horn_constraints(n, k, s).kernel()
    }

    /// The compatibility equations cutting out the horn space inside `⊕_{i ≠ k} V_{n-1}`.
    fn horn_constraints(&self, n: usize, k: usize, s: usize) -> RatMat {
        let nv = &self.nerve;
        let idx: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
        let mut offsets = Vec::with_capacity(idx.len());
        let mut total = 0;
        for &i in &idx {
            offsets.push(total);
            total += self.dim(n - 1, nv.face(n, i, s));
        }
        let mut blocks = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                if i >= j || n == 1 {
                    continue;
                }
                let (fi, fj) = (nv.face(n, i, s), nv.face(n, j, s));
                let di_vj = self.face(n - 1, i, fj);
                let dj_vi = self.face(n - 1, j - 1, fi);
                let mut row = RatMat::zeros(di_vj.rows(), total);
                row.set_block(0, offsets[b], di_vj);
                row.add_block(0, offsets[a], &dj_vi.neg());
                blocks.push(row);
            }
        }
        let refs: Vec<&RatMat> = blocks.iter().collect();
        RatMat::vstack(&refs, total)
    }

    /// `(rk d_{n,k}, dim of the horn space)`.
    ///
    /// When the face identities hold, the image of `d_{n,k}` lies in the horn space. Reduction
    /// mod `p` never raises a rank, so `rk_p d_{n,k} ≤ rk d_{n,k} ≤ dim ≤ total − rk_p(constraints)`;
    /// when the two ends meet both numbers are exact. Otherwise both are computed over ℚ.
    pub(crate) fn horn_ranks(&self, n: usize, k: usize, s: usize) -> (usize, usize) {
        let table = self.horns.get_or_init(|| {
            let simplicial = self.is_simplicial();
            (0..=self.max_level())
                .map(|n| (0..self.nerve.size(n)).map(|s| (0..=n).map(|k| if n == 0 { (0, 0) } else { self.compute_horn_ranks(n, k, s, simplicial) }).collect()).collect())
                .collect()
        });
        table[n][s][k]
    }

    /// All simplicial identities hold (cached).
    pub fn is_simplicial(&self) -> bool {
        *self.simplicial.get_or_init(|| self.check_identities().passed())
    }

    fn compute_horn_ranks(&self, n: usize, k: usize, s: usize, simplicial: bool) -> (usize, usize) {
        if simplicial {
            if let Some((lower, upper)) = self.horn_bounds_mod_p(n, k, s) {
                if lower == upper {
                    return (lower, upper);
                }
            }
        }
        let c = self.horn_constraints(n, k, s);
        (self.horn_map(n, k, s).rank(), c.cols() - c.rank())
    }

    fn horn_bounds_mod_p(&self, n: usize, k: usize, s: usize) -> Option<(usize, usize)> {
        let nv = &self.nerve;
        let idx: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
        let mut map_rows = Vec::new();
        for &i in &idx {
            map_rows.extend(residue_rows(self.face(n, i, s), 0, false)?);
        }
        let lower = rank_rows(map_rows, self.dim(n, s));
        let mut offsets = Vec::with_capacity(idx.len());
        let mut total = 0;
        for &i in &idx {
            offsets.push(total);
            total += self.dim(n - 1, nv.face(n, i, s));
        }
        let mut rows = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                if i >= j || n == 1 {
                    continue;
                }
                let (fi, fj) = (nv.face(n, i, s), nv.face(n, j, s));
                let left = residue_rows(self.face(n - 1, j - 1, fi), offsets[a], true)?;
                let right = residue_rows(self.face(n - 1, i, fj), offsets[b], false)?;
                rows.extend(left.into_iter().zip(right).map(|(mut l, r)| {
                    l.extend(r);
                    l
                }));
            }
        }
        Some((lower, total - rank_rows(rows, total)))
    }

    /// `K_n = ∩_{i>0} ker d_i` at simplex `s` (the whole fiber at level 0).
    pub fn positive_kernel(&self, n: usize, s: usize) -> Subspace {
        if n == 0 {
            return Subspace::full(self.dim(0, s));
        }
        let parts: Vec<&RatMat> = (1..=n).map(|i| self.face(n, i, s)).collect();
        RatMat::vstack(&parts, self.dim(n, s)).kernel()
    }

    /// Span of the images of all degeneracies landing in `V_n^s`.
    pub fn degenerate_span(&self, n: usize, s: usize) -> Subspace {
        if n == 0 {
            return Subspace::zero(self.dim(0, s));
        }
        let nv = &self.nerve;
        let mut cols = Vec::new();
        for j in 0..n {
            for t in 0..nv.size(n - 1) {
                if nv.degen(n - 1, j, t) == s {
                    cols.push(self.degen(n - 1, j, t));
                }
            }
        }
        if cols.is_empty() {
            return Subspace::zero(self.dim(n, s));
        }
        Subspace::from_spanning_cols(&RatMat::hstack(&cols, self.dim(n, s)))
    }

    /// Index of the totally degenerate simplex `u_0^n(x)`.
    pub fn unit_simplex(&self, n: usize, x: usize) -> usize {
        self.nerve.prepend_units(0, x, n)
    }

    pub fn to_doc(&self) -> SimpVBDoc {
        SimpVBDoc {
            groupoid: GroupoidRef::Inline(self.base().to_doc()),
            max_level: self.max_level(),
            dims: self.dims.clone(),
            faces: self.faces.clone(),
            degens: self.degens.clone(),
        }
    }

    pub fn from_doc(doc: &SimpVBDoc) -> Result<SimpVB, SvbError> {
        let g = doc.groupoid.resolve()?;
        SimpVB::new(Nerve::new(&g, doc.max_level), doc.dims.clone(), doc.faces.clone(), doc.degens.clone())
    }
}

/// JSON form of a bundle: fibers keyed by canonical simplex index, `faces[n][i][s]`, `degens[n][j][s]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimpVBDoc {
    pub groupoid: GroupoidRef,
    pub max_level: usize,
    pub dims: Vec<Vec<usize>>,
    pub faces: Vec<Vec<Vec<RatMat>>>,
    pub degens: Vec<Vec<Vec<RatMat>>>,
}

/// Outcome of the horn-filling analysis.
#[derive(Clone, Debug, Serialize)]
pub struct FibrationReport {
    /// Relative horn maps that fail to be onto their horn space.
    pub surjectivity: CheckReport,
    /// `unique[n]`: every relative horn at level `n` has exactly one filler.
    pub unique: Vec<bool>,
    /// Least `N` with unique fillers at every level `N < n ≤ L`; `None` if not a fibration.
    pub order: Option<usize>,
    /// The order is only certified when it is below this level.
    pub certified_below: usize,
}

impl FibrationReport {
    pub fn is_fibration(&self) -> bool {
        self.surjectivity.passed()
    }
}

/// Surjectivity and injectivity of every relative horn map `d_{n,k}`, `k ≤ n ≤ L`.
pub fn check_fibration(v: &SimpVB) -> FibrationReport {
    let mut surjectivity = CheckReport::new("relative horn maps are onto");
    let l = v.max_level();
    let mut unique = vec![true; l + 1];
    for n in 1..=l {
        for s in 0..v.nerve.size(n) {
            for k in 0..=n {
                let (rank, horn) = v.horn_ranks(n, k, s);
                let fail = (rank != horn).then(|| Violation::new(format!("d_{{{n},{k}}} onto horn space"), n, s).detail(format!("rank {rank}, horn space dimension {horn}")));
                surjectivity.record(fail);
                if rank != v.dim(n, s) {
                    unique[n] = false;
                }
            }
        }
    }
    let order = if surjectivity.passed() {
        let mut top = 0;
        for n in (1..=l).rev() {
            if !unique[n] {
                top = n;
                break;
            }
        }
        Some(top)
    } else {
        None
    };
    FibrationReport { surjectivity, unique, order, certified_below: l }
}

/// The two sides of the discrete fibration criterion, computed independently:
/// relative horn maps onto, versus `V` Kan with `d_0, d_1 : V_1 → V_0` fiberwise onto.
pub fn fibration_criterion(v: &SimpVB) -> (bool, bool) {
    let relative = check_fibration(v).is_fibration();
    let nv = &v.nerve;
    let g = v.base();
    let mut kan = true;
    for x in 0..g.num_objects() {
        // a vertex over x extends to an edge out of x exactly when some d_1 is onto
        let onto = g.arrows_from(x).any(|a| v.face(1, 1, a).rank() == v.dim(0, x));
        let into = (0..g.num_arrows()).filter(|&a| g.tgt(a) == x).any(|a| v.face(1, 0, a).rank() == v.dim(0, x));
        kan &= onto && into;
    }
    for n in 2..=v.max_level() {
        for s in 0..nv.size(n) {
            for k in 0..=n {
                // the base horn has the unique filler s, so a horn of V over it is a relative horn
                let (rank, horn) = v.horn_ranks(n, k, s);
                kan &= rank == horn;
            }
        }
    }
    let ends = (0..nv.size(1)).all(|a| v.face(1, 0, a).rank() == v.dim(0, nv.face(1, 0, a)) && v.face(1, 1, a).rank() == v.dim(0, nv.face(1, 1, a)));
    (relative, kan && ends)
}

/// The core: `E_n^x = K_n` over `u_0^n(x)`, for `n ≤ L`, truncated after the top nonzero degree.
pub fn core(v: &SimpVB) -> GradedBundle {
    let g = v.base();
    let mut dims: Vec<Vec<usize>> = (0..g.num_objects())
        .map(|x| (0..=v.max_level()).map(|n| v.positive_kernel(n, v.unit_simplex(n, x)).dim()).collect())
        .collect();
    let top = (0..=v.max_level()).rev().find(|&n| dims.iter().any(|d| d[n] > 0)).unwrap_or(0);
    for d in &mut dims {
        d.truncate(top + 1);
    }
    GradedBundle::new(dims).expect("rectangular by construction")
}

/// `E_n^x` as a subspace of the fiber over `u_0^n(x)`.
pub fn core_subspace(v: &SimpVB, n: usize, x: usize) -> Subspace {
    v.positive_kernel(n, v.unit_simplex(n, x))
}

/// Horn-space dimensions computed directly against the binomial count
/// `Σ_{j<n} C(n, j) λ_j = rk V_n − λ_n`, and `dim ker d_{n,k} = λ_n`, with `λ_j` the core ranks.
pub fn rank_identities(v: &SimpVB) -> CheckReport {
    let mut rep = CheckReport::new("rank identities");
    let nv = &v.nerve;
    let lambda: Vec<Vec<usize>> = (0..v.base().num_objects())
        .map(|x| (0..=v.max_level()).map(|n| core_subspace(v, n, x).dim()).collect())
        .collect();
    for n in 1..=v.max_level() {
        for s in 0..nv.size(n) {
            let lam = &lambda[nv.vertex(n, s, 0)];
            let binom: usize = (0..n).map(|j| binomial(n, j) * lam[j]).sum();
            for k in 0..=n {
                let (rank, horn) = v.horn_ranks(n, k, s);
                let kernel = v.dim(n, s) - rank;
                let bad = horn != binom || horn + lam[n] != v.dim(n, s) || kernel != lam[n];
                rep.record(bad.then(|| {
                    Violation::new(format!("horn rank at k = {k}"), n, s)
                        .detail(format!("horn {horn}, binomial {binom}, rk V_n {}, kernel {kernel}, rk E_n {}", v.dim(n, s), lam[n]))
                }));
            }
        }
    }
    rep
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// A subspace `C_n^s` of every fiber; level 0 is the whole fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cleavage {
    spaces: Vec<Vec<Subspace>>,
}

impl Cleavage {
    /// `levels[n - 1][s]` is `C_n^s` for `1 ≤ n ≤ L`.
    pub fn new(v: &SimpVB, levels: Vec<Vec<Subspace>>) -> Result<Cleavage, SvbError> {
        if levels.len() != v.max_level() {
            return Err(SvbError::Count { what: "cleavage levels".into(), expected: v.max_level(), got: levels.len() });
        }
        let mut spaces = vec![(0..v.nerve.size(0)).map(|x| Subspace::full(v.dim(0, x))).collect::<Vec<_>>()];
        for (idx, level) in levels.into_iter().enumerate() {
            let n = idx + 1;
            if level.len() != v.nerve.size(n) {
                return Err(SvbError::Count { what: format!("cleavage fibers at level {n}"), expected: v.nerve.size(n), got: level.len() });
            }
            for (s, c) in level.iter().enumerate() {
                if c.ambient() != v.dim(n, s) {
                    return Err(SvbError::Shape { what: "cleavage".into(), level: n, simplex: s, expected: (v.dim(n, s), 0), got: (c.ambient(), c.dim()) });
                }
            }
            spaces.push(level);
        }
        Ok(Cleavage { spaces })
    }

    pub fn from_fn(v: &SimpVB, f: impl Fn(usize, usize) -> Subspace) -> Result<Cleavage, SvbError> {
        let levels = (1..=v.max_level()).map(|n| (0..v.nerve.size(n)).map(|s| f(n, s)).collect()).collect();
        Cleavage::new(v, levels)
    }

    pub fn space(&self, n: usize, s: usize) -> &Subspace {
        &self.spaces[n][s]
    }

    pub fn max_level(&self) -> usize {
        self.spaces.len() - 1
    }

    pub fn to_doc(&self) -> CleavageDoc {
        CleavageDoc { spaces: self.spaces[1..].iter().map(|l| l.iter().map(|c| c.basis().clone()).collect()).collect() }
    }

    pub fn from_doc(v: &SimpVB, doc: &CleavageDoc) -> Result<Cleavage, SvbError> {
        let levels = doc
            .spaces
            .iter()
            .enumerate()
            .map(|(idx, l)| {
                l.iter()
                    .enumerate()
                    .map(|(s, b)| {
                        let ambient = v.dims.get(idx + 1).and_then(|d| d.get(s)).copied().unwrap_or(b.cols());
                        if b.rows() == 0 {
                            Subspace::zero(ambient)
                        } else {
                            Subspace::from_spanning_rows(b.clone())
                        }
                    })
                    .collect()
            })
            .collect();
        Cleavage::new(v, levels)
    }
}

/// JSON form of a cleavage: `spaces[n - 1][s]` holds basis rows of `C_n^s`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CleavageDoc {
    pub spaces: Vec<Vec<RatMat>>,
}

/// Results of [`check_cleavage`].
#[derive(Clone, Debug, Serialize)]
pub struct CleavageReport {
    /// `C_n ⊕ ker d_{n,k} = V_n` for every `k < n`.
    pub bijective: CheckReport,
    /// Degenerate simplices lie in `C`.
    pub normal: CheckReport,
    /// Flat over the zero section.
    pub weakly_flat: CheckReport,
    /// Flat over all of `V_0`.
    pub flat: CheckReport,
    /// Interior variant over the zero section: the face `d_{i_0}`, `0 < i_0 < n`, is forced into `C`.
    pub interior_weak: CheckReport,
    /// Interior variant over all of `V_0`.
    pub interior_flat: CheckReport,
}

impl CleavageReport {
    pub fn is_cleavage(&self) -> bool {
        self.bijective.passed()
    }

    /// `n`-flatness over the zero section at a single level.
    pub fn weakly_flat_at(&self, n: usize) -> bool {
        self.weakly_flat.violations.iter().all(|v| v.level != n)
    }
}

/// Subspace `{w ∈ C_n^s : hypotheses}` built from stacked linear constraints on `C`-coordinates.
struct FlatnessProbe<'a> {
    v: &'a SimpVB,
    c: &'a Cleavage,
    /// Annihilator rows of every `C_n^s`: `x ∈ C ⟺ A x = 0`.
    ann: Vec<Vec<RatMat>>,
}

impl FlatnessProbe<'_> {
    fn new<'a>(v: &'a SimpVB, c: &'a Cleavage) -> FlatnessProbe<'a> {
        let ann = (0..=v.max_level())
            .map(|n| (0..v.nerve.size(n)).map(|s| c.space(n, s).annihilator().basis().clone()).collect())
            .collect();
        FlatnessProbe { v, c, ann }
    }

    /// `s_k` for `k = 0..n`, each with its simplex, built by peeling off the top vertex.
    fn fronts(&self, n: usize, s: usize) -> Vec<(RatMat, usize)> {
        let v = self.v;
        let mut out = vec![(RatMat::identity(v.dim(n, s)), s)];
        for j in (1..=n).rev() {
            let (m, t) = out.last().expect("nonempty");
            let next = (v.face(j, j, *t).mul(m), v.nerve.face(j, j, *t));
            out.push(next);
        }
        out.reverse();
        out
    }

    /// `W = {w ∈ C_n^s : s_0 w ∈ S, s_k w ∈ C_k (0 < k < n), d_i w ∈ C_{n-1} for i ∈ faces}`,
    /// with `S = 0` when `zero_section`, else `S = V_0`.
    fn hypotheses(&self, n: usize, s: usize, fronts: &[(RatMat, usize)], zero_section: bool, faces: &[usize]) -> Subspace {
        let (v, c) = (self.v, self.c);
        let cs = c.space(n, s);
        let inc = cs.inclusion();
        let mut rows: Vec<RatMat> = Vec::new();
        if zero_section {
            rows.push(fronts[0].0.mul(&inc));
        }
        for (k, (m, t)) in fronts.iter().enumerate().take(n).skip(1) {
            rows.push(self.ann[k][*t].mul(m).mul(&inc));
        }
        for &i in faces {
            let t = v.nerve.face(n, i, s);
            rows.push(self.ann[n - 1][t].mul(v.face(n, i, s)).mul(&inc));
        }
        let refs: Vec<&RatMat> = rows.iter().collect();
        let kernel = RatMat::vstack(&refs, cs.dim()).kernel();
        Subspace::from_spanning_cols(&inc.mul(&kernel.inclusion()))
    }

    /// First basis vector of `w` whose image under `f` leaves `target`.
    fn escape(w: &Subspace, f: &RatMat, target: &Subspace) -> Option<Vec<Q>> {
        w.basis_vectors().into_iter().find(|b| !target.contains(&f.apply(b)))
    }
}

/// `h` is injective on `c`. A full rank mod `p` settles it; otherwise eliminate over ℚ.
fn injective_on(h: &RatMat, c: &Subspace) -> bool {
    let inc = c.inclusion();
    if let (Some(hr), Some(ir)) = (residue_rows(h, 0, false), residue_rows(&inc, 0, false)) {
        if rank_rows(mul_rows(&hr, &ir, c.dim()), c.dim()) == c.dim() {
            return true;
        }
    }
    h.mul(&inc).rank() == c.dim()
}

/// Bijectivity, normality, weak flatness, flatness, and the interior variants of the last two.
pub fn check_cleavage(v: &SimpVB, c: &Cleavage) -> CleavageReport {
    cleavage_report(v, c, true)
}

/// Only what a splitting needs: bijectivity, normality and weak flatness. The other three
/// reports are left empty.
pub fn check_cleavage_basic(v: &SimpVB, c: &Cleavage) -> CleavageReport {
    cleavage_report(v, c, false)
}

fn cleavage_report(v: &SimpVB, c: &Cleavage, full: bool) -> CleavageReport {
    let nv = &v.nerve;
    let mut bijective = CheckReport::new("cleavage complements every horn kernel");
    let mut normal = CheckReport::new("normal");
    let mut weakly_flat = CheckReport::new("weakly flat");
    let mut flat = CheckReport::new("flat");
    let mut interior_weak = CheckReport::new("interior faces over the zero section");
    let mut interior_flat = CheckReport::new("interior faces");
    let probe = FlatnessProbe::new(v, c);
    for n in 1..=v.max_level() {
        for s in 0..nv.size(n) {
            let cs = c.space(n, s);
            for k in 0..n {
                let (_, horn) = v.horn_ranks(n, k, s);
                let ok = cs.dim() == horn && injective_on(&v.horn_map(n, k, s), cs);
                bijective.record((!ok).then(|| Violation::new(format!("C_n onto the ({n},{k}) horn space"), n, s)));
            }
            let degenerate = v.degenerate_span(n, s);
            let missing = degenerate.basis_vectors().into_iter().find(|d| !cs.contains(d));
            normal.record(missing.map(|w| Violation::new("degenerate simplices in C", n, s).witness(w)));
            if n < 2 {
                continue;
            }
            let positive: Vec<usize> = (1..=n).collect();
            let fronts = probe.fronts(n, s);
            let d0_target = c.space(n - 1, nv.face(n, 0, s));
            for (zero, rep) in [(true, &mut weakly_flat), (false, &mut flat)] {
                if !zero && !full {
                    continue;
                }
                let w = probe.hypotheses(n, s, &fronts, zero, &positive);
                let esc = FlatnessProbe::escape(&w, v.face(n, 0, s), d0_target);
                rep.record(esc.map(|w| Violation::new("d_0 W ⊆ C", n, s).witness(w)));
            }
            if !full {
                continue;
            }
            for i0 in 1..n {
                let others: Vec<usize> = (0..=n).filter(|&i| i != i0).collect();
                let target = c.space(n - 1, nv.face(n, i0, s));
                for (zero, rep) in [(true, &mut interior_weak), (false, &mut interior_flat)] {
                    let w = probe.hypotheses(n, s, &fronts, zero, &others);
                    let esc = FlatnessProbe::escape(&w, v.face(n, i0, s), target);
                    rep.record(esc.map(|w| Violation::new(format!("d_{i0} W ⊆ C"), n, s).witness(w)));
                }
            }
        }
    }
    CleavageReport { bijective, normal, weakly_flat, flat, interior_weak, interior_flat }
}

/// A fiberwise linear map between bundles over the same nerve: `maps[n][s] : V_n^s → V′_n^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleMap {
    maps: Vec<Vec<RatMat>>,
}

impl BundleMap {
    pub fn new(maps: Vec<Vec<RatMat>>) -> BundleMap {
        BundleMap { maps }
    }

    pub fn identity(v: &SimpVB) -> BundleMap {
        BundleMap { maps: (0..=v.max_level()).map(|n| (0..v.nerve.size(n)).map(|s| RatMat::identity(v.dim(n, s))).collect()).collect() }
    }

    pub fn max_level(&self) -> usize {
        self.maps.len() - 1
    }

    pub fn at(&self, n: usize, s: usize) -> &RatMat {
        &self.maps[n][s]
    }

    /// `(self ∘ inner)` fiberwise.
    pub fn compose(&self, inner: &BundleMap) -> BundleMap {
        let maps = self.maps.iter().zip(&inner.maps).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.mul(y)).collect()).collect();
        BundleMap { maps }
    }

    /// Fiberwise inverse; fails if some fiber map is singular.
    pub fn inverse(&self) -> Option<BundleMap> {
        let maps = self.maps.iter().map(|l| l.iter().map(|m| m.inverse().ok()).collect::<Option<Vec<_>>>()).collect::<Option<Vec<_>>>()?;
        Some(BundleMap { maps })
    }
}

/// `φ` commutes with every face and degeneracy available up to `φ`'s top level.
pub fn check_bundle_map(phi: &BundleMap, v: &SimpVB, w: &SimpVB) -> CheckReport {
    let mut rep = CheckReport::new("bundle map commutes with faces and degeneracies");
    let nv = v.nerve();
    let top = phi.max_level().min(v.max_level()).min(w.max_level());
    for n in 0..=top {
        for s in 0..nv.size(n) {
            if n > 0 {
                for i in 0..=n {
                    let f = nv.face(n, i, s);
                    let ok = phi.at(n - 1, f).mul(v.face(n, i, s)) == w.face(n, i, s).mul(phi.at(n, s));
                    rep.record((!ok).then(|| Violation::new(format!("φ d_{i} = d_{i} φ"), n, s)));
                }
            }
            if n < top {
                for j in 0..=n {
                    let u = nv.degen(n, j, s);
                    let ok = phi.at(n + 1, u).mul(v.degen(n, j, s)) == w.degen(n, j, s).mul(phi.at(n, s));
                    rep.record((!ok).then(|| Violation::new(format!("φ u_{j} = u_{j} φ"), n, s)));
                }
            }
        }
    }
    rep
}

/// `φ(C) ⊆ C′`.
pub fn check_flat_morphism(phi: &BundleMap, v: &SimpVB, c: &Cleavage, c2: &Cleavage) -> CheckReport {
    let mut rep = CheckReport::new("flat morphism");
    for n in 1..=phi.max_level().min(v.max_level()) {
        for s in 0..v.nerve.size(n) {
            let esc = FlatnessProbe::escape(c.space(n, s), phi.at(n, s), c2.space(n, s));
            rep.record(esc.map(|w| Violation::new("φ(C) ⊆ C′", n, s).witness(w)));
        }
    }
    rep
}

/// If `w ∈ C`, `s_0 w = 0` and `s_k w ∈ C` for every `k > 0`, then `φ(w) ∈ C′`.
pub fn check_weakly_flat_morphism(phi: &BundleMap, v: &SimpVB, c: &Cleavage, c2: &Cleavage) -> CheckReport {
    let mut rep = CheckReport::new("weakly flat morphism");
    let probe = FlatnessProbe::new(v, c);
    for n in 1..=phi.max_level().min(v.max_level()) {
        for s in 0..v.nerve.size(n) {
            let w = probe.hypotheses(n, s, &probe.fronts(n, s), true, &[]);
            let esc = FlatnessProbe::escape(&w, phi.at(n, s), c2.space(n, s));
            rep.record(esc.map(|w| Violation::new("φ(W) ⊆ C′", n, s).witness(w)));
        }
    }
    rep
}

/// The coboundary `δ : C^p → C^{p+1}` on fiberwise-linear cochains, `δξ = Σ_i (-1)^i ξ ∘ d_i`.
///
/// A linear `p`-cochain is a family of functionals `ξ_s ∈ (V_p^s)^*`, stored as stacked
/// coordinate vectors in simplex order.
pub fn linear_coboundary(v: &SimpVB, p: usize) -> Result<RatMat, SvbError> {
    if p + 1 > v.max_level() {
        return Err(SvbError::Truncation { degree: p, needed: p + 1, max_level: v.max_level() });
    }
    let nv = &v.nerve;
    let offsets = |n: usize| -> Vec<usize> {
        let mut acc = 0;
        (0..nv.size(n))
            .map(|s| {
                let o = acc;
                acc += v.dim(n, s);
                o
            })
            .collect()
    };
    let (src, dst) = (offsets(p), offsets(p + 1));
    let rows: usize = (0..nv.size(p + 1)).map(|s| v.dim(p + 1, s)).sum();
    let cols: usize = (0..nv.size(p)).map(|s| v.dim(p, s)).sum();
    let mut m = RatMat::zeros(rows, cols);
    for s in 0..nv.size(p + 1) {
        for i in 0..=p + 1 {
            let f = nv.face(p + 1, i, s);
            m.add_block(dst[s], src[f], &v.face(p + 1, i, s).transpose().scale(&Q::pow_neg_one(i)));
        }
    }
    Ok(m)
}

/// Dimensions of `H^0 … H^p` of the linear cochain complex; needs `p + 1 ≤ L`.
pub fn linear_cochain_cohomology(v: &SimpVB, p: usize) -> Result<Vec<usize>, SvbError> {
    let deltas: Vec<RatMat> = (0..=p).map(|q| linear_coboundary(v, q)).collect::<Result<_, _>>()?;
    Ok((0..=p)
        .map(|q| {
            let kernel = deltas[q].cols() - deltas[q].rank();
            let image = if q == 0 { 0 } else { deltas[q - 1].rank() };
            kernel - image
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doldkan::{dk, ChainComplex};

    fn two_term() -> ChainComplex {
        ChainComplex::new(vec![1, 1], vec![RatMat::from_ints(&[&[1]])]).unwrap()
    }

    #[test]
    fn pullback_of_dold_kan_is_simplicial() {
        let v = SimpVB::pullback(&dk(&two_term(), 3), &FinGroupoid::pair(2));
        assert!(v.check_identities().passed());
        let rep = check_fibration(&v);
        assert!(rep.is_fibration());
        assert_eq!(rep.order, Some(1));
        assert_eq!(core(&v).dims_at(0), &[1, 1]);
    }

    #[test]
    fn broken_face_is_reported() {
        let mut v = SimpVB::from_simpvs(&dk(&two_term(), 3));
        let zero = RatMat::zeros(v.face(2, 1, 0).rows(), v.face(2, 1, 0).cols());
        v.set_face(2, 1, 0, zero).unwrap();
        let rep = v.check_identities();
        assert!(!rep.passed());
        assert!(rep.violations.iter().any(|x| x.level == 2 || x.level == 3));
    }

    #[test]
    fn degenerate_span_is_the_normal_flat_cleavage() {
        let v = SimpVB::from_simpvs(&dk(&two_term(), 4));
        let c = Cleavage::from_fn(&v, |n, s| v.degenerate_span(n, s)).unwrap();
        let rep = check_cleavage(&v, &c);
        assert!(rep.bijective.passed() && rep.normal.passed());
        assert!(rep.flat.passed() && rep.weakly_flat.passed());
        assert!(rep.interior_flat.passed() && rep.interior_weak.passed());
    }

    #[test]
    fn rank_law_on_dold_kan() {
        let y = ChainComplex::new(vec![1, 2, 1], vec![RatMat::from_ints(&[&[1, 0]]), RatMat::from_ints(&[&[0], &[0]])]).unwrap();
        let v = SimpVB::from_simpvs(&dk(&y, 4));
        assert!(rank_identities(&v).passed());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 3), 1);
    }

    #[test]
    fn trivial_line_over_a_point() {
        let v = SimpVB::from_simpvs(&SimpVS::constant(1, 3));
        assert_eq!(linear_cochain_cohomology(&v, 2).unwrap(), vec![1, 0, 0]);
        assert!(linear_cochain_cohomology(&v, 3).is_err());
    }

    #[test]
    fn identity_is_flat_and_weakly_flat() {
        let v = SimpVB::from_simpvs(&dk(&two_term(), 3));
        let c = Cleavage::from_fn(&v, |n, s| v.degenerate_span(n, s)).unwrap();
        let id = BundleMap::identity(&v);
        assert!(check_bundle_map(&id, &v, &v).passed());
        assert!(check_flat_morphism(&id, &v, &c, &c).passed());
        assert!(check_weakly_flat_morphism(&id, &v, &c, &c).passed());
    }

    #[test]
    fn criterion_sides_agree() {
        let v = SimpVB::pullback(&dk(&two_term(), 3), &FinGroupoid::cyclic(2));
        assert_eq!(fibration_criterion(&v), (true, true));
        let mut bad = v.clone();
        let zero = RatMat::zeros(bad.face(1, 1, 1).rows(), bad.face(1, 1, 1).cols());
        bad.set_face(1, 1, 1, zero.clone()).unwrap();
        bad.set_face(1, 1, 0, zero).unwrap();
        let (a, b) = fibration_criterion(&bad);
        assert_eq!(a, b);
        assert!(!a);
    }
}
