//! Finite groupoids and their nerves.
//!
//! A simplex of the nerve at level `n ≥ 1` is a chain of composable arrows
//! `x_0 --g_1--> x_1 --g_2--> ... --g_n--> x_n`, stored as the arrow ids
//! `[g_1, ..., g_n]`; a level-0 simplex is an object. Each level is enumerated
//! lexicographically in `(g_1, ..., g_n)` (objects by id at level 0). Every
//! fiber index of a bundle over the nerve refers to this enumeration.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordmaps::OrdMap;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("unknown arrow {0:?}")]
    UnknownArrow(String),
    #[error("duplicate name {0:?}")]
    Duplicate(String),
    #[error("composite {g2}∘{g1} is not defined in the table")]
    MissingComposite { g2: String, g1: String },
    #[error("composite {g2}∘{g1} = {got} has the wrong endpoints")]
    CompositeEndpoints { g2: String, g1: String, got: String },
    #[error("composite {g2}∘{g1} is listed although {g1} does not end where {g2} starts")]
    NotComposable { g2: String, g1: String },
    #[error("associativity fails for ({g3}∘{g2})∘{g1}")]
    Associativity { g3: String, g2: String, g1: String },
    #[error("object {0:?} has no unit")]
    MissingUnit(String),
    #[error("unit law fails at arrow {0:?}")]
    UnitLaw(String),
    #[error("inverse law fails at arrow {0:?}")]
    InverseLaw(String),
    #[error("arrow {0:?} has no inverse")]
    MissingInverse(String),
    #[error("product of groupoids with {0} arrows is too large")]
    TooLarge(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

/// A finite groupoid with a dense composition table.
///
/// Only validated groupoids can be constructed.
#[derive(Clone, PartialEq, Eq)]
pub struct FinGroupoid {
    name: String,
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    units: Vec<usize>,
    inverses: Vec<usize>,
    /// `comp[g2 * |arrows| + g1] = g2 ∘ g1` when `tgt(g1) = src(g2)`.
    comp: Vec<Option<usize>>,
}

impl fmt::Debug for FinGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinGroupoid({}: {} objects, {} arrows)",
            self.name,
            self.objects.len(),
            self.arrows.len()
        )
    }
}

/// JSON form of a groupoid. Composition triples are `[g2, g1, g2∘g1]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupoidDoc {
    #[serde(default)]
    pub name: String,
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowDoc>,
    pub composition: Vec<[String; 3]>,
    pub units: Vec<[String; 2]>,
    pub inverses: Vec<[String; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrowDoc {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

impl FinGroupoid {
    /// Build and validate. `comp` is a list of `(g2, g1, g2∘g1)` by arrow id.
    pub fn new(
        name: impl Into<String>,
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        units: Vec<usize>,
        inverses: Vec<usize>,
        comp: &[(usize, usize, usize)],
    ) -> Result<FinGroupoid, GroupoidError> {
        let na = arrows.len();
        let mut table = vec![None; na * na];
        for &(g2, g1, g) in comp {
            table[g2 * na + g1] = Some(g);
        }
        let g = FinGroupoid {
            name: name.into(),
            objects,
            arrows,
            units,
            inverses,
            comp: table,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GroupoidError> {
        let na = self.arrows.len();
        let an = |a: usize| self.arrows[a].name.clone();
        let mut seen = HashMap::new();
        for o in &self.objects {
            if seen.insert(o.clone(), ()).is_some() {
                return Err(GroupoidError::Duplicate(o.clone()));
            }
        }
        let mut seen = HashMap::new();
        for a in &self.arrows {
            if seen.insert(a.name.clone(), ()).is_some() {
                return Err(GroupoidError::Duplicate(a.name.clone()));
            }
        }
        if self.units.len() != self.objects.len() {
            return Err(GroupoidError::MissingUnit(
                self.objects[self.units.len().min(self.objects.len().saturating_sub(1))].clone(),
            ));
        }
        for g2 in 0..na {
            for g1 in 0..na {
                let composable = self.arrows[g1].tgt == self.arrows[g2].src;
                match (composable, self.comp[g2 * na + g1]) {
                    (true, None) => {
                        return Err(GroupoidError::MissingComposite {
                            g2: an(g2),
                            g1: an(g1),
                        })
                    }
                    (false, Some(_)) => {
                        return Err(GroupoidError::NotComposable {
                            g2: an(g2),
                            g1: an(g1),
                        })
                    }
                    (true, Some(g)) => {
                        if self.arrows[g].src != self.arrows[g1].src
                            || self.arrows[g].tgt != self.arrows[g2].tgt
                        {
                            return Err(GroupoidError::CompositeEndpoints {
                                g2: an(g2),
                                g1: an(g1),
                                got: an(g),
                            });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for (x, &u) in self.units.iter().enumerate() {
            if self.arrows[u].src != x || self.arrows[u].tgt != x {
                return Err(GroupoidError::MissingUnit(self.objects[x].clone()));
            }
        }
        for g in 0..na {
            let a = &self.arrows[g];
            if self.compose(self.units[a.tgt], g) != g || self.compose(g, self.units[a.src]) != g {
                return Err(GroupoidError::UnitLaw(an(g)));
            }
            let Some(&h) = self.inverses.get(g) else {
                return Err(GroupoidError::MissingInverse(an(g)));
            };
            if self.arrows[h].src != a.tgt
                || self.arrows[h].tgt != a.src
                || self.compose(h, g) != self.units[a.src]
                || self.compose(g, h) != self.units[a.tgt]
            {
                return Err(GroupoidError::InverseLaw(an(g)));
            }
        }
        for g1 in 0..na {
            for g2 in 0..na {
                if self.arrows[g1].tgt != self.arrows[g2].src {
                    continue;
                }
                for g3 in 0..na {
                    if self.arrows[g2].tgt != self.arrows[g3].src {
                        continue;
                    }
                    if self.compose(self.compose(g3, g2), g1)
                        != self.compose(g3, self.compose(g2, g1))
                    {
                        return Err(GroupoidError::Associativity {
                            g3: an(g3),
                            g2: an(g2),
                            g1: an(g1),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_name(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn arrow(&self, g: usize) -> &Arrow {
        &self.arrows[g]
    }

    pub fn src(&self, g: usize) -> usize {
        self.arrows[g].src
    }

    pub fn tgt(&self, g: usize) -> usize {
        self.arrows[g].tgt
    }

    /// The identity arrow at `x`.
    pub fn identity(&self, x: usize) -> usize {
        self.units[x]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn is_unit(&self, g: usize) -> bool {
        self.units[self.arrows[g].src] == g
    }

    /// `g2 ∘ g1`; panics if not composable.
    pub fn compose(&self, g2: usize, g1: usize) -> usize {
        self.comp[g2 * self.arrows.len() + g1].unwrap_or_else(|| {
            panic!(
                "{} ∘ {} is not composable",
                self.arrows[g2].name, self.arrows[g1].name
            )
        })
    }

    pub fn arrows_from(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&g| self.arrows[g].src == x)
    }

    pub fn arrow_id(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// Orbits (connected components) as sorted lists of objects.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.objects.len()];
        let mut out = Vec::new();
        for x in 0..self.objects.len() {
            if seen[x] {
                continue;
            }
            let orbit: Vec<usize> = (0..self.objects.len())
                .filter(|&y| self.arrows.iter().any(|a| a.src == x && a.tgt == y))
                .collect();
            for &y in &orbit {
                seen[y] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn to_doc(&self) -> GroupoidDoc {
        let na = self.arrows.len();
        let an = |a: usize| self.arrows[a].name.clone();
        let mut composition = Vec::new();
        for g2 in 0..na {
            for g1 in 0..na {
                if let Some(g) = self.comp[g2 * na + g1] {
                    composition.push([an(g2), an(g1), an(g)]);
                }
            }
        }
        GroupoidDoc {
            name: self.name.clone(),
            objects: self.objects.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowDoc {
                    name: a.name.clone(),
                    src: self.objects[a.src].clone(),
                    tgt: self.objects[a.tgt].clone(),
                })
                .collect(),
            composition,
            units: self
                .units
                .iter()
                .enumerate()
                .map(|(x, &u)| [self.objects[x].clone(), an(u)])
                .collect(),
            inverses: self
                .inverses
                .iter()
                .enumerate()
                .map(|(g, &h)| [an(g), an(h)])
                .collect(),
        }
    }

    pub fn from_doc(doc: &GroupoidDoc) -> Result<FinGroupoid, GroupoidError> {
        let obj: HashMap<&str, usize> = doc
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        let find_obj = |s: &str| {
            obj.get(s)
                .copied()
                .ok_or_else(|| GroupoidError::UnknownObject(s.to_string()))
        };
        let arr: HashMap<&str, usize> = doc
            .arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.as_str(), i))
            .collect();
        let find_arr = |s: &str| {
            arr.get(s)
                .copied()
                .ok_or_else(|| GroupoidError::UnknownArrow(s.to_string()))
        };
        let arrows = doc
            .arrows
            .iter()
            .map(|a| {
                Ok(Arrow {
                    name: a.name.clone(),
                    src: find_obj(&a.src)?,
                    tgt: find_obj(&a.tgt)?,
                })
            })
            .collect::<Result<Vec<_>, GroupoidError>>()?;
        let mut units = vec![usize::MAX; doc.objects.len()];
        for [o, u] in &doc.units {
            units[find_obj(o)?] = find_arr(u)?;
        }
        if let Some(x) = units.iter().position(|&u| u == usize::MAX) {
            return Err(GroupoidError::MissingUnit(doc.objects[x].clone()));
        }
        let mut inverses = vec![usize::MAX; arrows.len()];
        for [g, h] in &doc.inverses {
            inverses[find_arr(g)?] = find_arr(h)?;
        }
        if let Some(g) = inverses.iter().position(|&h| h == usize::MAX) {
            return Err(GroupoidError::MissingInverse(arrows[g].name.clone()));
        }
        let comp = doc
            .composition
            .iter()
            .map(|[a, b, c]| Ok((find_arr(a)?, find_arr(b)?, find_arr(c)?)))
            .collect::<Result<Vec<_>, GroupoidError>>()?;
        FinGroupoid::new(
            doc.name.clone(),
            doc.objects.clone(),
            arrows,
            units,
            inverses,
            &comp,
        )
    }

    /// `k` objects and only identity arrows.
    pub fn unit(k: usize) -> FinGroupoid {
        let objects: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
        let arrows = (0..k)
            .map(|i| Arrow {
                name: format!("1_x{i}"),
                src: i,
                tgt: i,
            })
            .collect();
        let comp: Vec<_> = (0..k).map(|i| (i, i, i)).collect();
        FinGroupoid::new(
            format!("unit({k})"),
            objects,
            arrows,
            (0..k).collect(),
            (0..k).collect(),
            &comp,
        )
        .expect("unit groupoid")
    }

    /// `k` objects with exactly one arrow between any two; arrow `src*k + tgt`.
    pub fn pair(k: usize) -> FinGroupoid {
        let objects: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
        let id = |s: usize, t: usize| s * k + t;
        let mut arrows = Vec::new();
        for s in 0..k {
            for t in 0..k {
                arrows.push(Arrow {
                    name: format!("x{t}<-x{s}"),
                    src: s,
                    tgt: t,
                });
            }
        }
        let mut comp = Vec::new();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    // (b -> c) ∘ (a -> b) = (a -> c)
                    comp.push((id(b, c), id(a, b), id(a, c)));
                }
            }
        }
        let units = (0..k).map(|i| id(i, i)).collect();
        let inverses = (0..k * k).map(|g| id(g % k, g / k)).collect();
        FinGroupoid::new(
            format!("pair({k})"),
            objects,
            arrows,
            units,
            inverses,
            &comp,
        )
        .expect("pair groupoid")
    }

    /// The cyclic group `ℤ/m` as a one-object groupoid; arrow `a` is the residue `a`.
    pub fn cyclic(m: usize) -> FinGroupoid {
        assert!(m >= 1);
        let arrows = (0..m)
            .map(|a| Arrow {
                name: format!("{a}"),
                src: 0,
                tgt: 0,
            })
            .collect();
        let mut comp = Vec::new();
        for a in 0..m {
            for b in 0..m {
                comp.push((a, b, (a + b) % m));
            }
        }
        let inverses = (0..m).map(|a| (m - a) % m).collect();
        FinGroupoid::new(
            format!("Z/{m}"),
            vec!["*".into()],
            arrows,
            vec![0],
            inverses,
            &comp,
        )
        .expect("cyclic group")
    }

    /// Cartesian product; arrow `(g, h)` has id `g * |H_1| + h`.
    pub fn product(a: &FinGroupoid, b: &FinGroupoid) -> Result<FinGroupoid, GroupoidError> {
        let (na, nb) = (a.num_arrows(), b.num_arrows());
        if na * nb > 4096 {
            return Err(GroupoidError::TooLarge(na * nb));
        }
        let (oa, ob) = (a.num_objects(), b.num_objects());
        let objects = (0..oa * ob)
            .map(|i| format!("({},{})", a.objects[i / ob], b.objects[i % ob]))
            .collect();
        let arrows = (0..na * nb)
            .map(|i| {
                let (g, h) = (i / nb, i % nb);
                Arrow {
                    name: format!("({},{})", a.arrows[g].name, b.arrows[h].name),
                    src: a.src(g) * ob + b.src(h),
                    tgt: a.tgt(g) * ob + b.tgt(h),
                }
            })
            .collect();
        let mut comp = Vec::new();
        for g2 in 0..na {
            for g1 in 0..na {
                let Some(g) = a.comp[g2 * na + g1] else {
                    continue;
                };
                for h2 in 0..nb {
                    for h1 in 0..nb {
                        if let Some(h) = b.comp[h2 * nb + h1] {
                            comp.push((g2 * nb + h2, g1 * nb + h1, g * nb + h));
                        }
                    }
                }
            }
        }
        let units = (0..oa * ob)
            .map(|x| a.units[x / ob] * nb + b.units[x % ob])
            .collect();
        let inverses = (0..na * nb)
            .map(|i| a.inverses[i / nb] * nb + b.inverses[i % nb])
            .collect();
        FinGroupoid::new(
            format!("{} x {}", a.name, b.name),
            objects,
            arrows,
            units,
            inverses,
            &comp,
        )
    }

    /// Look up a builtin by name: `unit(k)`, `pair(k)`, `Z/m`, or `A x B`.
    pub fn builtin(name: &str) -> Option<FinGroupoid> {
        let name = name.trim();
        if let Some((l, r)) = name.split_once(" x ") {
            return FinGroupoid::product(&FinGroupoid::builtin(l)?, &FinGroupoid::builtin(r)?).ok();
        }
        let arg = |p: &str| {
            name.strip_prefix(p)?
                .strip_suffix(')')?
                .parse::<usize>()
                .ok()
        };
        if let Some(k) = arg("unit(") {
            return (k >= 1).then(|| FinGroupoid::unit(k));
        }
        if let Some(k) = arg("pair(") {
            return (k >= 1).then(|| FinGroupoid::pair(k));
        }
        if let Some(m) = name
            .strip_prefix("Z/")
            .and_then(|m| m.parse::<usize>().ok())
        {
            return (m >= 1).then(|| FinGroupoid::cyclic(m));
        }
        None
    }
}

/// The catalog of named builtins used by fixtures and the CLI.
pub fn builtin_groupoids() -> Vec<FinGroupoid> {
    vec![
        FinGroupoid::unit(1),
        FinGroupoid::unit(2),
        FinGroupoid::pair(2),
        FinGroupoid::pair(3),
        FinGroupoid::cyclic(2),
        FinGroupoid::cyclic(3),
        FinGroupoid::product(&FinGroupoid::pair(2), &FinGroupoid::cyclic(2))
            .expect("small product"),
    ]
}

/// One level of a nerve.
#[derive(Clone, Debug)]
pub struct NerveLevel {
    /// Level 0: `[object]`; level `n ≥ 1`: `[g_1, ..., g_n]`.
    simplices: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    /// `faces[i][s]`: index of `d_i s` at the level below.
    faces: Vec<Vec<usize>>,
    /// `degens[j][s]`: index of `u_j s` at the level above (filled when that level exists).
    degens: Vec<Vec<usize>>,
    /// `vertices[s][i] = x_i`.
    vertices: Vec<Vec<usize>>,
}

/// The nerve of a finite groupoid truncated at a maximal level.
#[derive(Clone, Debug)]
pub struct Nerve {
    groupoid: FinGroupoid,
    levels: Vec<NerveLevel>,
}

impl Nerve {
    pub fn new(g: &FinGroupoid, max_level: usize) -> Nerve {
        let mut levels: Vec<NerveLevel> = Vec::with_capacity(max_level + 1);
        let level0: Vec<Vec<usize>> = (0..g.num_objects()).map(|x| vec![x]).collect();
        levels.push(Nerve::make_level(g, 0, level0));
        for n in 1..=max_level {
            let simplices: Vec<Vec<usize>> = if n == 1 {
                (0..g.num_arrows()).map(|a| vec![a]).collect()
            } else {
                let mut out = Vec::new();
                for s in &levels[n - 1].simplices {
                    let end = g.tgt(s[n - 2]);
                    for a in g.arrows_from(end) {
                        let mut t = s.clone();
                        t.push(a);
                        out.push(t);
                    }
                }
                out
            };
            levels.push(Nerve::make_level(g, n, simplices));
        }
        let mut nerve = Nerve {
            groupoid: g.clone(),
            levels,
        };
        for n in 1..=max_level {
            let faces = (0..=n)
                .map(|i| {
                    let d = OrdMap::delta(n, i);
                    (0..nerve.levels[n].simplices.len())
                        .map(|s| nerve.restrict_index(n, s, &d))
                        .collect()
                })
                .collect();
            nerve.levels[n].faces = faces;
        }
        for n in 0..max_level {
            let degens = (0..=n)
                .map(|j| {
                    let u = OrdMap::upsilon(n, j);
                    (0..nerve.levels[n].simplices.len())
                        .map(|s| nerve.restrict_index(n, s, &u))
                        .collect()
                })
                .collect();
            nerve.levels[n].degens = degens;
        }
        nerve
    }

    fn make_level(g: &FinGroupoid, n: usize, simplices: Vec<Vec<usize>>) -> NerveLevel {
        let index = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let vertices = simplices
            .iter()
            .map(|s| {
                if n == 0 {
                    vec![s[0]]
                } else {
                    std::iter::once(g.src(s[0]))
                        .chain(s.iter().map(|&a| g.tgt(a)))
                        .collect()
                }
            })
            .collect();
        NerveLevel {
            simplices,
            index,
            faces: Vec::new(),
            degens: Vec::new(),
            vertices,
        }
    }

    pub fn groupoid(&self) -> &FinGroupoid {
        &self.groupoid
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn size(&self, n: usize) -> usize {
        self.levels[n].simplices.len()
    }

    /// The stored form of simplex `s` at level `n` (see module docs).
    pub fn simplex(&self, n: usize, s: usize) -> &[usize] {
        &self.levels[n].simplices[s]
    }

    pub fn index_of(&self, n: usize, simplex: &[usize]) -> Option<usize> {
        self.levels[n].index.get(simplex).copied()
    }

    /// Vertex `x_i` of simplex `s` at level `n`.
    pub fn vertex(&self, n: usize, s: usize, i: usize) -> usize {
        self.levels[n].vertices[s][i]
    }

    pub fn face(&self, n: usize, i: usize, s: usize) -> usize {
        self.levels[n].faces[i][s]
    }

    /// `u_j s`; requires `n < max_level`.
    pub fn degen(&self, n: usize, j: usize, s: usize) -> usize {
        self.levels[n].degens[j][s]
    }

    /// The arrow from vertex `a` to vertex `b` (`a ≤ b`) of simplex `s`: `g_b ∘ ... ∘ g_{a+1}`.
    pub fn arrow_between(&self, n: usize, s: usize, a: usize, b: usize) -> usize {
        assert!(a <= b && b <= n);
        let g = &self.groupoid;
        if a == b {
            return g.identity(self.vertex(n, s, a));
        }
        let chain = &self.levels[n].simplices[s];
        let mut acc = chain[a];
        for &next in &chain[a + 1..b] {
            acc = g.compose(next, acc);
        }
        acc
    }

    /// Chain form of `θ^* s` for `θ : [m] -> [n]`.
    pub fn restrict_chain(&self, n: usize, s: usize, theta: &OrdMap) -> Vec<usize> {
        assert_eq!(theta.cod(), n, "restriction map must land in [{n}]");
        let m = theta.dom();
        if m == 0 {
            return vec![self.vertex(n, s, theta.apply(0))];
        }
        (0..m)
            .map(|a| self.arrow_between(n, s, theta.apply(a), theta.apply(a + 1)))
            .collect()
    }

    /// Index of `θ^* s` at level `dom θ`.
    pub fn restrict_index(&self, n: usize, s: usize, theta: &OrdMap) -> usize {
        let chain = self.restrict_chain(n, s, theta);
        self.index_of(theta.dom(), &chain)
            .expect("restriction stays inside the truncated nerve")
    }

    /// `u_0^k` applied to a level-`n` simplex: the simplex with `k` identity arrows prepended.
    pub fn prepend_units(&self, n: usize, s: usize, k: usize) -> usize {
        let mut cur = s;
        for level in n..n + k {
            cur = self.degen(level, 0, cur);
        }
        cur
    }

    /// Whether the simplex is in the image of some degeneracy.
    pub fn is_degenerate(&self, n: usize, s: usize) -> bool {
        n > 0
            && self.levels[n].simplices[s]
                .iter()
                .any(|&a| self.groupoid.is_unit(a))
    }

    /// Human-readable vertex string `x_n ... x_1 x_0`.
    pub fn vertex_string(&self, n: usize, s: usize) -> String {
        (0..=n)
            .rev()
            .map(|i| self.groupoid.object_name(self.vertex(n, s, i)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_sizes() {
        let u1 = FinGroupoid::unit(1);
        assert_eq!((u1.num_objects(), u1.num_arrows()), (1, 1));
        let p2 = FinGroupoid::pair(2);
        assert_eq!((p2.num_objects(), p2.num_arrows()), (2, 4));
        let z2 = FinGroupoid::cyclic(2);
        assert_eq!((z2.num_objects(), z2.num_arrows()), (1, 2));
        for g in builtin_groupoids() {
            assert_eq!(FinGroupoid::builtin(g.name()).unwrap(), g);
        }
    }

    #[test]
    fn nerve_level_sizes() {
        let n = Nerve::new(&FinGroupoid::unit(2), 3);
        assert_eq!(n.size(3), 2);
        let p = Nerve::new(&FinGroupoid::pair(2), 3);
        assert_eq!(p.size(1), 4);
        assert_eq!(p.size(2), 8);
        assert_eq!(p.size(3), 16);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let p = Nerve::new(&FinGroupoid::pair(3), 3);
        for n in 1..=3 {
            for s in 1..p.size(n) {
                assert!(p.simplex(n, s - 1) < p.simplex(n, s));
            }
        }
    }

    #[test]
    fn faces_drop_and_compose() {
        let g = FinGroupoid::pair(3);
        let nerve = Nerve::new(&g, 3);
        for s in 0..nerve.size(3) {
            let c = nerve.simplex(3, s).to_vec();
            assert_eq!(nerve.simplex(2, nerve.face(3, 0, s)), &c[1..]);
            assert_eq!(nerve.simplex(2, nerve.face(3, 3, s)), &c[..2]);
            assert_eq!(
                nerve.simplex(2, nerve.face(3, 1, s)),
                &[g.compose(c[1], c[0]), c[2]]
            );
            for j in 0..3 {
                let u = nerve.degen(2, j, nerve.face(3, j, s));
                assert_eq!(nerve.vertex(3, u, j + 1), nerve.vertex(3, s, j + 1));
            }
        }
    }

    #[test]
    fn vertex_via_chi() {
        let nerve = Nerve::new(&FinGroupoid::pair(3), 3);
        for s in 0..nerve.size(3) {
            for i in 0..=3 {
                assert_eq!(
                    nerve.restrict_index(3, s, &OrdMap::chi(i, 3)),
                    nerve.vertex(3, s, i)
                );
            }
        }
    }

    #[test]
    fn restriction_is_functorial() {
        let g = FinGroupoid::product(&FinGroupoid::pair(2), &FinGroupoid::cyclic(2)).unwrap();
        let nerve = Nerve::new(&g, 4);
        let maps: Vec<OrdMap> = (0..=4).flat_map(|i| [OrdMap::delta(4, i)]).collect();
        for s in (0..nerve.size(4)).step_by(7) {
            for t2 in &maps {
                let s2 = nerve.restrict_index(4, s, t2);
                for i in 0..=3 {
                    let t1 = OrdMap::delta(3, i);
                    let lhs = nerve.restrict_index(3, s2, &t1);
                    let rhs = nerve.restrict_index(4, s, &t2.then(&t1));
                    assert_eq!(lhs, rhs);
                }
                for j in 0..=3 {
                    let t1 = OrdMap::upsilon(3, j);
                    assert_eq!(
                        nerve.restrict_index(3, s2, &t1),
                        nerve.restrict_index(4, s, &t2.then(&t1))
                    );
                }
            }
        }
    }

    #[test]
    fn nerve_horns_fill_uniquely() {
        // Horns are enumerated by brute force over tuples of faces.
        for g in [FinGroupoid::pair(2), FinGroupoid::cyclic(3)] {
            let nerve = Nerve::new(&g, 3);
            for n in 2..=3 {
                for k in 0..=n {
                    let faces: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
                    let m = nerve.size(n - 1);
                    let mut horns = 0usize;
                    let mut tuple = vec![0usize; faces.len()];
                    loop {
                        let compatible = faces.iter().enumerate().all(|(a, &i)| {
                            faces.iter().enumerate().all(|(b, &j)| {
                                i >= j
                                    || nerve.face(n - 1, i, tuple[b])
                                        == nerve.face(n - 1, j - 1, tuple[a])
                            })
                        });
                        if compatible {
                            horns += 1;
                            let fillers = (0..nerve.size(n))
                                .filter(|&s| {
                                    faces
                                        .iter()
                                        .enumerate()
                                        .all(|(a, &i)| nerve.face(n, i, s) == tuple[a])
                                })
                                .count();
                            assert_eq!(fillers, 1, "{} horn ({n},{k})", g.name());
                        }
                        let mut p = 0;
                        while p < tuple.len() {
                            tuple[p] += 1;
                            if tuple[p] < m {
                                break;
                            }
                            tuple[p] = 0;
                            p += 1;
                        }
                        if p == tuple.len() {
                            break;
                        }
                    }
                    assert_eq!(horns, nerve.size(n));
                }
            }
        }
    }

    #[test]
    fn doc_roundtrip_and_validation() {
        let g = FinGroupoid::pair(2);
        let doc = g.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let back: GroupoidDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(FinGroupoid::from_doc(&back).unwrap(), g);

        let mut broken = doc.clone();
        let last = broken.composition.len() - 1;
        broken.composition[last][2] = broken.composition[0][2].clone();
        assert!(FinGroupoid::from_doc(&broken).is_err());

        let mut no_inv = doc;
        no_inv.inverses.pop();
        assert!(matches!(
            FinGroupoid::from_doc(&no_inv),
            Err(GroupoidError::MissingInverse(_))
        ));
    }

    #[test]
    fn orbits_of_products() {
        let g = FinGroupoid::product(&FinGroupoid::unit(2), &FinGroupoid::pair(2)).unwrap();
        assert_eq!(g.orbits(), vec![vec![0, 1], vec![2, 3]]);
    }
}
