use mmekit::algebra::{CycElement, MobiusMap, Polynomial, RationalMap};
use mmekit::families::{chebyshev_polynomial, make_map, ritt_pair, MapKind};
use mmekit::funceq::*;
use mmekit::Error;
use proptest::prelude::*;

const PREC: u32 = 256;

fn poly_map(m: u32, c: &[i64]) -> RationalMap {
    RationalMap::polynomial(Polynomial::from_ints(m, c))
}

fn map(num: &[i64], den: &[i64]) -> RationalMap {
    RationalMap::new(Polynomial::from_ints(1, num), Polynomial::from_ints(1, den)).unwrap()
}

fn z_pow(k: usize) -> RationalMap {
    RationalMap::monomial(CycElement::one(1), k)
}

fn rotation(n: u32, k: i64) -> RationalMap {
    RationalMap::monomial(CycElement::zeta_pow(n, k), 1)
}

#[test]
fn chain_examples() {
    assert!(verify_equal_chain(&z_pow(2), &[z_pow(1), poly_map(1, &[0, -1])]).unwrap());
    assert!(!verify_equal_chain(&z_pow(2), &[z_pow(1), poly_map(1, &[1, 1])]).unwrap());
    for n in 3..=6 {
        let p = ritt_pair(n).unwrap();
        assert!(verify_equal_chain(&p.a, &[p.x.clone(), p.y.clone()]).unwrap());
    }
}

#[test]
fn system_examples() {
    let r = verify_mme_system(&[z_pow(2), poly_map(1, &[0, 0, -1])]).unwrap();
    assert!(r.pass);
    let r = verify_mme_system(&[z_pow(2), z_pow(3)]).unwrap();
    assert!(!r.pass);
    assert_eq!(r.failing_pair, Some((1, 2)));

    let p = ritt_pair(2).unwrap();
    let fs = vec![p.x.compose(&p.a).unwrap(), p.y.compose(&p.a).unwrap()];
    assert!(verify_mme_system(&fs).unwrap().pass);
}

#[test]
fn build_examples() {
    let fs = build_from_decomposition(&z_pow(2), &[z_pow(1), poly_map(1, &[0, -1])]).unwrap();
    assert_eq!(fs, vec![z_pow(2), poly_map(1, &[0, 0, -1])]);

    let p = ritt_pair(3).unwrap();
    let fs = build_from_decomposition(&p.a, &[p.x.clone(), p.y.clone()]).unwrap();
    assert!(verify_mme_system(&fs).unwrap().pass);
    // ½(z+1/z)∘T₃
    assert_eq!(fs[0], make_map(MapKind::Zhukovsky, 1).unwrap().compose(&p.a).unwrap());

    // A∘(1/z) = A for A = (z²+1)/z
    let a = map(&[1, 0, 1], &[0, 1]);
    let inv = map(&[1], &[0, 1]);
    let fs = build_from_decomposition(&a, &[z_pow(1), inv.clone()]).unwrap();
    assert_eq!(fs[0], a);
    assert_eq!(fs[1], inv.compose(&a).unwrap());
    assert_eq!(fs[1], map(&[0, 1], &[1, 0, 1]));
    assert!(verify_mme_system(&fs).unwrap().pass);

    let e = build_from_decomposition(&z_pow(2), &[z_pow(1), poly_map(1, &[1, 1])]).unwrap_err();
    assert!(matches!(e, Error::Precondition(_)));
}

#[test]
fn lemma01_examples() {
    assert!(iterate_equalization(&z_pow(2), &poly_map(1, &[0, 0, -1]), 3).unwrap());
    let p = ritt_pair(2).unwrap();
    let f = p.x.compose(&p.a).unwrap();
    let g = p.y.compose(&p.a).unwrap();
    assert!(iterate_equalization(&f, &g, 2).unwrap());
    let e = iterate_equalization(&z_pow(2), &z_pow(3), 1).unwrap_err();
    assert!(matches!(e, Error::Precondition(_)));
}

#[test]
fn exponent_examples() {
    assert_eq!(common_power_exponents(&[4, 8]).unwrap(), Some(vec![3, 2]));
    assert_eq!(common_power_exponents(&[2, 2, 2]).unwrap(), Some(vec![1, 1, 1]));
    assert_eq!(common_power_exponents(&[2, 3]).unwrap(), None);
    assert_eq!(common_power_exponents(&[4, 2, 16]).unwrap(), Some(vec![2, 4, 1]));
    assert!(matches!(common_power_exponents(&[1, 4]), Err(Error::Domain(_))));
}

/// Smallest exponents by brute force over exponents ≤ 10.
fn brute_exponents(ds: &[u64]) -> Option<Vec<u128>> {
    let mut best: Option<(u128, Vec<u128>)> = None;
    let target_candidates: Vec<u128> = (1..=10).map(|l| (ds[0] as u128).pow(l)).collect();
    for t in target_candidates {
        let ls: Option<Vec<u128>> = ds
            .iter()
            .map(|&d| (1..=40u32).find(|&l| (d as u128).checked_pow(l) == Some(t)).map(|l| l as u128))
            .collect();
        if let Some(ls) = ls {
            if best.as_ref().is_none_or(|(b, _)| t < *b) {
                best = Some((t, ls));
            }
        }
    }
    best.map(|(_, l)| l)
}

#[test]
fn exponents_agree_with_small_brute_force() {
    assert_eq!(brute_exponents(&[4, 8]), Some(vec![3, 2]));
    for a in 2..=32u64 {
        for b in 2..=32u64 {
            let mine = common_power_exponents(&[a, b]).unwrap();
            let oracle = brute_exponents(&[a, b]);
            if let Some(o) = &oracle {
                assert_eq!(mine.as_ref(), Some(o), "[{a}, {b}]");
            } else if let Some(l) = &mine {
                // solutions beyond the brute-force window must still be exact
                assert!(l[0] > 10);
            }
        }
    }
}

fn sorted_strings(v: &[MobiusMap]) -> Vec<String> {
    let mut s: Vec<String> = v.iter().map(|m| m.to_string()).collect();
    s.sort();
    s
}

#[test]
fn symmetries_of_power_maps() {
    for n in 2..=5u32 {
        let a = z_pow(n as usize);
        let g = find_symmetries(&a, PREC).unwrap();
        assert_eq!(g.len(), n as usize);
        for k in 0..n as i64 {
            let eta = MobiusMap::new(rotation(n, k)).unwrap();
            assert!(g.contains(&eta), "missing ζ^{k} z for n={n}");
        }
    }
}

#[test]
fn symmetries_of_small_examples() {
    let zhuk = map(&[1, 0, 1], &[0, 1]);
    let g = find_symmetries(&zhuk, PREC).unwrap();
    assert_eq!(
        sorted_strings(&g),
        sorted_strings(&[MobiusMap::identity(1), MobiusMap::new(map(&[1], &[0, 1])).unwrap()])
    );
    let a = poly_map(1, &[0, 1, 1]);
    let g = find_symmetries(&a, PREC).unwrap();
    assert_eq!(g.len(), 2);
    assert!(g.contains(&MobiusMap::new(poly_map(1, &[-1, -1])).unwrap()));
}

#[test]
fn symmetries_form_a_group() {
    for a in [z_pow(4), make_map(MapKind::DihedralInvariant, 3).unwrap(), poly_map(1, &[-1, 0, 0, 0, 8])] {
        let g = find_symmetries(&a, PREC).unwrap();
        assert!(g.iter().any(|e| e.is_identity()));
        for x in &g {
            assert!(g.contains(&x.inverse()));
            for y in &g {
                assert!(g.contains(&x.compose(y)));
            }
        }
    }
}

#[test]
fn symmetry_search_rejects_low_degree() {
    assert!(find_symmetries(&z_pow(1), PREC).is_err());
}

#[test]
fn relate_examples() {
    for n in 3..=6 {
        let p = ritt_pair(n).unwrap();
        let (eta, side) = relate_by_mobius(&p.x, &p.y, PREC).unwrap().unwrap();
        assert_eq!(side, Side::Post);
        assert_eq!(eta, MobiusMap::new(rotation(n as u32, -1)).unwrap());
        assert_eq!(p.y.compose(eta.as_map()).unwrap(), p.x);
    }
    let x = z_pow(2);
    let (eta, _) = relate_by_mobius(&x, &x, PREC).unwrap().unwrap();
    assert!(eta.is_identity());

    // z² = η∘(z²+1) with η = z − 1
    let (eta, side) = relate_by_mobius(&x, &poly_map(1, &[1, 0, 1]), PREC).unwrap().unwrap();
    assert_eq!(side, Side::Pre);
    assert_eq!(eta.as_map(), &poly_map(1, &[-1, 1]));
    assert!(relate_by_mobius(&x, &z_pow(3), PREC).unwrap().is_none());
    assert!(relate_by_mobius(&x, &poly_map(1, &[0, 1, 0, 1]).compose(&z_pow(1)).unwrap(), PREC)
        .unwrap()
        .is_none());
}

#[test]
fn field_generation() {
    let p = ritt_pair(3).unwrap();
    assert_eq!(generates_rational_field(&[p.x.clone(), p.y.clone()], PREC).unwrap(), FieldGeneration::Yes);
    let p = ritt_pair(2).unwrap();
    assert_eq!(generates_rational_field(&[p.x.clone(), p.y.clone()], PREC).unwrap(), FieldGeneration::No);
    assert_eq!(generates_rational_field(&[z_pow(2), z_pow(3)], PREC).unwrap(), FieldGeneration::Yes);
    let t3 = RationalMap::polynomial(chebyshev_polynomial(3));
    let q = poly_map(1, &[0, 1, 0, 1]);
    assert_eq!(generates_rational_field(&[t3, q], PREC).unwrap(), FieldGeneration::Undetermined);
}

#[test]
fn chains_longer_than_degree_are_impossible() {
    // every Möbius η with A∘η = A lies in the symmetry group, so a chain of
    // Möbius members through A has at most |Aut A| ≤ deg A members
    for d in 2..=3usize {
        let a = z_pow(d);
        let g = find_symmetries(&a, PREC).unwrap();
        assert_eq!(g.len(), d);
        let members: Vec<RationalMap> = g.iter().map(|e| e.as_map().clone()).collect();
        assert!(EqualChain::new(a.clone(), members.clone()).is_ok());
        let mut extended = members;
        extended.push(poly_map(1, &[1, 1]));
        assert!(EqualChain::new(a, extended).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exponents_equalize(ds in prop::collection::vec(2u64..=32, 1..=4)) {
        if let Some(ls) = common_power_exponents(&ds).unwrap() {
            let powers: Vec<rug::Integer> = ds.iter().zip(&ls)
                .map(|(&d, &l)| rug::Integer::from(rug::Integer::u_pow_u(d as u32, l as u32)))
                .collect();
            prop_assert!(powers.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn relate_is_sound(a in -3i64..=3, b in 1i64..=3, c in -2i64..=2) {
        // X = Y∘μ for μ = b z + a
        let y = poly_map(1, &[c, 0, 1, 1]);
        let mu = poly_map(1, &[a, b]);
        let x = y.compose(&mu).unwrap();
        let (eta, side) = relate_by_mobius(&x, &y, PREC).unwrap().unwrap();
        let back = match side {
            Side::Post => y.compose(eta.as_map()).unwrap(),
            Side::Pre => eta.as_map().compose(&y).unwrap(),
        };
        prop_assert_eq!(back, x);
    }
}
