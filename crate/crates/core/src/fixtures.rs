//! Seeded generators of chain complexes, representations and morphisms.
//!
//! Everything here is deterministic in the seed (ChaCha8), so fixture `k` of a sweep is
//! reproducible from `(seed, k)` alone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::doldkan::ChainComplex;
use crate::exactla::{RatMat, Q};
use crate::groupoid::{FinGroupoid, Nerve};
use crate::ruth::{gauge_transform, GaugeData, GradedBundle, Ruth, RuthError, RuthMorphism};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `p/q` with `|p| ≤ bound`, `1 ≤ q ≤ bound`.
pub fn random_q(rng: &mut FixtureRng, bound: i64) -> Q {
    Q::frac(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn random_int(rng: &mut FixtureRng, bound: i64) -> Q {
    Q::int(rng.gen_range(-bound..=bound))
}

pub fn random_matrix(rng: &mut FixtureRng, rows: usize, cols: usize, bound: i64) -> RatMat {
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| random_q(rng, bound)).collect())
        .collect();
    RatMat::from_rows(data, cols)
}

fn random_int_matrix(rng: &mut FixtureRng, rows: usize, cols: usize, bound: i64) -> RatMat {
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| random_int(rng, bound)).collect())
        .collect();
    RatMat::from_rows(data, cols)
}

/// A unimodular integer matrix: unit lower triangular times unit upper triangular.
pub fn random_invertible(rng: &mut FixtureRng, n: usize) -> RatMat {
    let mut lo = RatMat::identity(n);
    let mut up = RatMat::identity(n);
    for i in 0..n {
        for j in 0..i {
            lo.set(i, j, random_int(rng, 1));
            up.set(j, i, random_int(rng, 1));
        }
    }
    lo.mul(&up)
}

fn within_bound(m: &RatMat, bound: i64) -> bool {
    m.row_vecs().iter().flatten().all(|q| q.within(bound))
}

/// A chain complex in degrees `0..=top` with the given dimensions and a random rank profile,
/// conjugated by random frames. Entries keep numerators and denominators within `bound`
/// (resampled until they do).
pub fn random_chain_complex_with_dims(rng: &mut FixtureRng, dims: &[usize], bound: i64) -> ChainComplex {
    let top = dims.len() - 1;
    loop {
        let mut ranks = vec![0usize; top + 2];
        for n in (1..=top).rev() {
            let cap = (dims[n] - ranks[n + 1]).min(dims[n - 1]);
            ranks[n] = rng.gen_range(0..=cap);
        }
        let frames: Vec<RatMat> = dims.iter().map(|&d| random_invertible(rng, d)).collect();
        let scales: Vec<Q> = (0..=top)
            .map(|_| loop {
                let q = random_q(rng, 3);
                if !q.is_zero() {
                    break q;
                }
            })
            .collect();
        let mut boundaries = Vec::new();
        for n in 1..=top {
            // basis vector j < ranks[n] of E_n hits basis vector ranks[n-1] + j of E_{n-1}
            let mut d = RatMat::zeros(dims[n - 1], dims[n]);
            for j in 0..ranks[n] {
                d.set(ranks[n - 1] + j, j, scales[n].clone());
            }
            let inv = frames[n].inverse().expect("unimodular");
            boundaries.push(frames[n - 1].mul(&d).mul(&inv));
        }
        if boundaries.iter().all(|b| within_bound(b, bound)) {
            return ChainComplex::new(dims.to_vec(), boundaries).expect("d∘d = 0 by construction");
        }
    }
}

/// Degrees `≤ top`, dimensions `≤ max_dim`.
pub fn random_chain_complex(rng: &mut FixtureRng, top: usize, max_dim: usize, bound: i64) -> ChainComplex {
    let dims: Vec<usize> = (0..=top).map(|_| rng.gen_range(0..=max_dim)).collect();
    random_chain_complex_with_dims(rng, &dims, bound)
}

fn block_diag(blocks: &[RatMat]) -> RatMat {
    RatMat::direct_sum(&blocks.iter().collect::<Vec<_>>())
}

/// For each object, an arrow from the first object of its orbit.
fn transversal(g: &FinGroupoid) -> Vec<usize> {
    let mut t = vec![usize::MAX; g.num_objects()];
    for orbit in g.orbits() {
        let b = orbit[0];
        for a in g.arrows_from(b) {
            if t[g.tgt(a)] == usize::MAX {
                t[g.tgt(a)] = a;
            }
        }
        t[b] = g.identity(b);
    }
    t
}

/// The strict representation obtained by transporting one chain complex per orbit along
/// per-object frames, with isotropy acting through the scalar character `chi`.
///
/// `R_1^g = A_y χ(h) A_x^{-1}` for `g : x → y`, `h = t_y^{-1} g t_x`, and `R_0^x = A_x ∂ A_x^{-1}`.
pub fn strict_from_frames(
    g: &FinGroupoid,
    complexes: &[ChainComplex],
    frames: &[Vec<RatMat>],
    chi: impl Fn(usize) -> Q,
) -> Result<Ruth, RuthError> {
    let orbits = g.orbits();
    let mut orbit_of = vec![0; g.num_objects()];
    for (k, o) in orbits.iter().enumerate() {
        for &x in o {
            orbit_of[x] = k;
        }
    }
    let dims = (0..g.num_objects())
        .map(|x| complexes[orbit_of[x]].dims().to_vec())
        .collect();
    let mut r = Ruth::zero(g, GradedBundle::new(dims)?)?;
    let top = r.order();
    for x in 0..g.num_objects() {
        let e = &complexes[orbit_of[x]];
        for n in 1..=top {
            let inv = frames[x][n].inverse().expect("frames are invertible");
            r.set_block(0, x, n, frames[x][n - 1].mul(&e.boundary(n)).mul(&inv))?;
        }
    }
    let t = transversal(g);
    for a in 0..g.num_arrows() {
        let (x, y) = (g.src(a), g.tgt(a));
        let h = g.compose(g.inverse(t[y]), g.compose(a, t[x]));
        let c = chi(h);
        for n in 0..=top {
            let inv = frames[x][n].inverse().expect("frames are invertible");
            r.set_block(1, a, n, frames[y][n].mul(&inv).scale(&c))?;
        }
    }
    Ok(r)
}

/// The character of `ℤ/m` sending the generator to `-1` (trivial for odd `m`).
pub fn sign_character(g: &FinGroupoid) -> impl Fn(usize) -> Q + '_ {
    let even = g.num_objects() == 1 && g.num_arrows() % 2 == 0;
    move |h| {
        if even && h % 2 == 1 {
            Q::int(-1)
        } else {
            Q::int(1)
        }
    }
}

/// `E = E_0 = ℚ^dim` with `ℤ/2` acting by `-1`.
pub fn sign_rep(dim: usize) -> Ruth {
    let g = FinGroupoid::cyclic(2);
    let e = ChainComplex::concentrated(dim);
    let frames = vec![vec![RatMat::identity(dim)]];
    strict_from_frames(&g, &[e], &frames, sign_character(&g)).expect("sign representation")
}

/// The trivial representation on `ℚ^dim` in degree 0.
pub fn trivial_rep(g: &FinGroupoid, dim: usize) -> Ruth {
    let k = g.orbits().len();
    let complexes = vec![ChainComplex::concentrated(dim); k];
    let frames = vec![vec![RatMat::identity(dim)]; g.num_objects()];
    strict_from_frames(g, &complexes, &frames, |_| Q::int(1)).expect("trivial representation")
}

/// A random strict representation of order `order` with `dim E_order ≥ 1`.
pub fn random_strict(rng: &mut FixtureRng, g: &FinGroupoid, order: usize, sign: bool) -> Ruth {
    let orbits = g.orbits().len();
    let complexes: Vec<ChainComplex> = (0..orbits)
        .map(|_| {
            let dims: Vec<usize> = (0..=order)
                .map(|n| if n == order { rng.gen_range(1..=2) } else { rng.gen_range(0..=2) })
                .collect();
            random_chain_complex_with_dims(rng, &dims, 9)
        })
        .collect();
    let mut orbit_of = vec![0; g.num_objects()];
    for (k, o) in g.orbits().iter().enumerate() {
        for &x in o {
            orbit_of[x] = k;
        }
    }
    let frames: Vec<Vec<RatMat>> = (0..g.num_objects())
        .map(|x| {
            complexes[orbit_of[x]]
                .dims()
                .iter()
                .map(|&d| random_invertible(rng, d))
                .collect()
        })
        .collect();
    if sign {
        strict_from_frames(g, &complexes, &frames, sign_character(g))
    } else {
        strict_from_frames(g, &complexes, &frames, |_| Q::int(1))
    }
    .expect("frames give a representation")
}

/// Random higher components `ψ_1, ..., ψ_N` vanishing on degenerate simplices.
pub fn random_gauge(rng: &mut FixtureRng, r: &Ruth) -> GaugeData {
    let nerve = Nerve::new(r.groupoid(), r.order().max(1));
    let bundle = r.bundle();
    let components = (1..=r.order())
        .map(|m| {
            (0..nerve.size(m))
                .map(|s| {
                    let (x0, xm) = (nerve.vertex(m, s, 0), nerve.vertex(m, s, m));
                    if nerve.is_degenerate(m, s) {
                        RatMat::zeros(bundle.total(xm), bundle.total(x0))
                    } else {
                        random_int_matrix(rng, bundle.total(xm), bundle.total(x0), 2)
                    }
                })
                .collect()
        })
        .collect();
    GaugeData { components }
}

/// The strict isomorphism `ψ_0 = F` onto the conjugate `F R F^{-1}`, for random per-object,
/// per-degree frames `F`.
pub fn frame_change(rng: &mut FixtureRng, r: &Ruth) -> RuthMorphism {
    let g = r.groupoid();
    let bundle = r.bundle();
    let frames: Vec<Vec<RatMat>> = (0..g.num_objects())
        .map(|x| bundle.dims_at(x).iter().map(|&d| random_invertible(rng, d)).collect())
        .collect();
    let full: Vec<RatMat> = frames.iter().map(|f| block_diag(f)).collect();
    let inv: Vec<RatMat> = full.iter().map(|f| f.inverse().expect("invertible")).collect();
    let nerve = r.nerve();
    let mut target = Ruth::zero(g, bundle.clone()).expect("same bundle");
    for m in 0..=r.order() + 1 {
        for s in 0..nerve.size(m) {
            let (x0, xm) = (nerve.vertex(m, s, 0), nerve.vertex(m, s, m));
            let conj = full[xm].mul(&r.full(nerve, m, s)).mul(&inv[x0]);
            target.set_full(m, s, &conj).expect("shapes agree");
        }
    }
    let mut psi = RuthMorphism::zero(r, &target).expect("same base");
    for x in 0..g.num_objects() {
        for (n, f) in frames[x].iter().enumerate() {
            psi.set_block(0, x, n, f.clone()).expect("shapes agree");
        }
    }
    psi
}

/// A frame change followed by a random gauge equivalence.
pub fn random_morphism(rng: &mut FixtureRng, r: &Ruth) -> RuthMorphism {
    let f = frame_change(rng, r);
    let gauge = random_gauge(rng, f.target());
    let (_, psi) = gauge_transform(f.target(), &gauge).expect("gauge transform of a valid representation");
    RuthMorphism::compose(&psi, &f).expect("composable")
}

/// A named representation from the standard sweep, with the strict one it was twisted from.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub strict: Ruth,
    pub ruth: Ruth,
}

/// Bases and orders of the sweep. Order 2 is not paired with `pair(3)`.
pub fn sweep_specs() -> Vec<(FinGroupoid, usize)> {
    let mut out = Vec::new();
    for n in 0..=2 {
        for g in [FinGroupoid::unit(2), FinGroupoid::pair(2), FinGroupoid::pair(3), FinGroupoid::cyclic(2)] {
            if n == 2 && g.num_objects() == 3 {
                continue;
            }
            out.push((g, n));
        }
    }
    out
}

/// `count` fixtures cycling through [`sweep_specs`]; fixture `k` is seeded by `seed + k`.
pub fn sweep(seed: u64, count: usize) -> Vec<Fixture> {
    let specs = sweep_specs();
    (0..count)
        .map(|k| {
            let (g, n) = &specs[k % specs.len()];
            let mut rng = rng(seed.wrapping_add(k as u64));
            let sign = g.num_objects() == 1 && k % 2 == 0;
            let strict = random_strict(&mut rng, g, *n, sign);
            let gauge = random_gauge(&mut rng, &strict);
            let (ruth, _) = gauge_transform(&strict, &gauge).expect("gauge transform of a strict representation");
            Fixture {
                name: format!("{}#{k} N={n}{}", g.name(), if sign { " sign" } else { "" }),
                strict,
                ruth,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruth::check_morphism;

    #[test]
    fn chain_complexes_square_to_zero() {
        let mut r = rng(7);
        for _ in 0..50 {
            let c = random_chain_complex(&mut r, 4, 3, 9);
            for n in 2..=c.top() {
                assert!(c.boundary(n - 1).mul(&c.boundary(n)).is_zero());
            }
            for n in 1..=c.top() {
                assert!(within_bound(&c.boundary(n), 9));
            }
        }
    }

    #[test]
    fn sweep_fixtures_are_valid_and_twisted() {
        let fx = sweep(11, 11);
        for f in &fx {
            f.strict.validate(None).unwrap();
            f.ruth.validate(None).unwrap();
            assert!(f.strict.is_strict());
        }
        assert!(fx.iter().filter(|f| f.ruth.order() >= 1).any(|f| !f.ruth.is_strict()));
    }

    #[test]
    fn random_morphisms_satisfy_rh3_rh4() {
        for f in sweep(3, 11) {
            let mut r = rng(99);
            let psi = random_morphism(&mut r, &f.ruth);
            let (rh3, rh4) = check_morphism(&psi, f.ruth.order() + 2);
            assert!(rh3.passed() && rh4.passed(), "{}: {rh4:?}", f.name);
        }
    }

    #[test]
    fn sign_rep_acts_by_minus_one() {
        let r = sign_rep(1);
        r.validate(None).unwrap();
        assert_eq!(r.full(r.nerve(), 1, 1), RatMat::from_ints(&[&[-1]]));
    }
}
