use hvb::doldkan::{dk, dk_unit_iso, normalize};
use hvb::exactla::{modp, Q};
use hvb::fixtures;
use hvb::groupoid::{FinGroupoid, Nerve};
use hvb::ordmaps::{classify_d0, enumerate_zero_monos, zero_mono_index, D0Case, OrdMap};
use hvb::ruth::{check_rh2, gauge_transform, Ruth};
use hvb::sdp::build_sdp;
use hvb::split::SplitContext;
use proptest::prelude::*;

fn q() -> impl Strategy<Value = Q> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| Q::frac(n, d))
}

fn base() -> impl Strategy<Value = FinGroupoid> {
    prop_oneof![Just(FinGroupoid::unit(1)), Just(FinGroupoid::pair(2)), Just(FinGroupoid::cyclic(2)), Just(FinGroupoid::cyclic(3))]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn rationals_form_a_field(a in q(), b in q(), c in q()) {
        prop_assert_eq!((a.clone() + b.clone()) * c.clone(), a.clone() * c.clone() + b.clone() * c.clone());
        if !a.is_zero() {
            prop_assert_eq!(a.clone() * a.recip(), Q::int(1));
        }
        prop_assert_eq!(a.to_string().parse::<Q>().unwrap(), a);
    }

    #[test]
    fn residues_respect_products(a in q(), b in q()) {
        let (ra, rb) = (a.residue().unwrap(), b.residue().unwrap());
        let prod = (a * b).residue().unwrap();
        prop_assert_eq!(prod, ((ra as u128 * rb as u128) % modp::P as u128) as u64);
    }

    #[test]
    fn cosimplicial_identities(n in 1usize..7, i in 0usize..8, j in 0usize..8) {
        // δ_j δ_i = δ_i δ_{j-1} for i < j
        if i < j && j <= n + 1 {
            let lhs = OrdMap::delta(n + 1, j).then(&OrdMap::delta(n, i));
            let rhs = OrdMap::delta(n + 1, i).then(&OrdMap::delta(n, j - 1));
            prop_assert_eq!(lhs, rhs);
        }
        // υ_j δ_j = id = υ_j δ_{j+1}
        if j <= n - 1 {
            let u = OrdMap::upsilon(n - 1, j);
            prop_assert!(u.then(&OrdMap::delta(n, j)).is_identity());
            prop_assert!(u.then(&OrdMap::delta(n, j + 1)).is_identity());
        }
    }

    #[test]
    fn zero_monos_are_indexed_by_their_masks(n in 0usize..7) {
        for (k, a) in enumerate_zero_monos(n).iter().enumerate() {
            prop_assert_eq!(zero_mono_index(a), k);
            prop_assert_eq!(OrdMap::from_mask(a.mask(), n), a.clone());
        }
    }

    #[test]
    fn d0_case_two_is_a_factorization(n in 2usize..6, l in 1usize..5, a in any::<u64>(), b in any::<u64>()) {
        let pick = |ms: Vec<OrdMap>, k: u64| {
            let ms: Vec<OrdMap> = ms.into_iter().filter(|m| m.dom() == l).collect();
            (!ms.is_empty()).then(|| ms[(k % ms.len() as u64) as usize].clone())
        };
        if let (Some(alpha), Some(beta)) = (pick(enumerate_zero_monos(n), a), pick(enumerate_zero_monos(n - 1), b)) {
            if let D0Case::CaseII(i) = classify_d0(&beta, &alpha) {
                prop_assert!((1..=l).contains(&i));
                prop_assert_eq!(beta.prime().then(&OrdMap::delta(l + 1, i)), alpha);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn nerve_faces_commute(g in base(), n in 2usize..5) {
        let nerve = Nerve::new(&g, n);
        for s in 0..nerve.size(n) {
            for j in 1..=n {
                for i in 0..j {
                    let a = nerve.face(n - 1, i, nerve.face(n, j, s));
                    let b = nerve.face(n - 1, j - 1, nerve.face(n, i, s));
                    prop_assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn dold_kan_round_trip(seed in any::<u64>()) {
        let mut rng = fixtures::rng(seed);
        let y = fixtures::random_chain_complex(&mut rng, 3, 2, 9);
        let x = dk(&y, 5);
        prop_assert!(x.check_identities().is_ok());
        let norm = normalize(&x).unwrap();
        let iso = dk_unit_iso(&y, &norm);
        prop_assert!(norm.complex.is_chain_map(&y, &iso));
    }

    #[test]
    fn documents_round_trip(g in base(), order in 0usize..2, seed in any::<u64>()) {
        let mut rng = fixtures::rng(seed);
        let r = fixtures::random_strict(&mut rng, &g, order, false);
        let json = serde_json::to_string(&r.to_doc()).unwrap();
        let back = Ruth::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn gauge_transforms_preserve_rh2(g in base(), order in 0usize..2, seed in any::<u64>()) {
        let mut rng = fixtures::rng(seed);
        let r = fixtures::random_strict(&mut rng, &g, order, false);
        let gauge = fixtures::random_gauge(&mut rng, &r);
        let (t, _) = gauge_transform(&r, &gauge).unwrap();
        prop_assert!(check_rh2(&t, t.default_mcap()).passed());
    }

    #[test]
    fn canonical_split_recovers_the_representation(g in base(), order in 0usize..2, seed in any::<u64>()) {
        let mut rng = fixtures::rng(seed);
        let r = fixtures::random_strict(&mut rng, &g, order, false);
        let gauge = fixtures::random_gauge(&mut rng, &r);
        let (t, _) = gauge_transform(&r, &gauge).unwrap();
        let (v, c) = build_sdp(&t, 2 * order + 2).unwrap();
        let ctx = SplitContext::new(v, c).unwrap();
        prop_assert_eq!(ctx.extract_ruth().unwrap(), t);
    }
}
