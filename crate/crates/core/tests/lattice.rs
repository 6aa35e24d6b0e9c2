//! Minimal vectors, configurations and coset spaces against independent
//! oracles.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;

use common::{brute_minimum, index_gamma0, random_form, random_unimodular};
use wellround::lattice::{
    config_equiv, config_stabilizer, is_well_rounded, minimal_vectors, normalize, CosetSpace, GramForm, GroupSpec,
    VectorConfig,
};

fn rng(seed: u64) -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn minimal_vectors_match_box_search(seed in any::<u64>(), n in 2usize..=4) {
        let a = random_form(n, &mut rng(seed));
        let (min, vecs) = brute_minimum(&a);
        let m = minimal_vectors(&a).unwrap();
        prop_assert_eq!(&m.min_sq, &min);
        let mut got = m.vectors.vectors().to_vec();
        got.sort();
        prop_assert_eq!(got, vecs);
    }

    #[test]
    fn minimal_vectors_are_equivariant(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let a = random_form(n, &mut r);
        let u = random_unimodular(n, &mut r);
        // vᵀ (UᵀAU) v = (Uv)ᵀ A (Uv), so U maps M(UᵀAU) onto M(A).
        let b = a.pullback(&u);
        let ma = minimal_vectors(&a).unwrap();
        let mb = minimal_vectors(&b).unwrap();
        prop_assert_eq!(&ma.min_sq, &mb.min_sq);
        prop_assert_eq!(mb.vectors.transform(&u), ma.vectors);
    }

    #[test]
    fn normalized_forms_have_minimum_one(seed in any::<u64>(), n in 2usize..=4) {
        let a = normalize(&random_form(n, &mut rng(seed))).unwrap();
        prop_assert!(num_traits::One::is_one(&brute_minimum(&a).0));
    }

    #[test]
    fn equivalent_configurations_are_found(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = VectorConfig::of(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[0, 1, 1], &[1, 1, 1]]);
        let u = random_unimodular(3, &mut r);
        let t = s.transform(&u);
        let found = config_equiv(&s, &t, &GroupSpec::gl(3), None).expect("equivalent");
        prop_assert_eq!(s.transform(&found), t);
    }

    #[test]
    fn forms_round_trip_through_json(seed in any::<u64>(), n in 2usize..=4) {
        let a = random_form(n, &mut rng(seed));
        let text = serde_json::to_string(&a).unwrap();
        let back: GramForm = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn well_roundedness_of_classical_forms() {
    assert!(is_well_rounded(&GramForm::identity(3)).unwrap());
    assert!(is_well_rounded(&GramForm::from_ints(&[&[2, 1], &[1, 2]]).unwrap()).unwrap());
    assert!(!is_well_rounded(&GramForm::from_ints(&[&[1, 0], &[0, 2]]).unwrap()).unwrap());
    // D4: 24 minimal vectors, i.e. 12 pairs.
    let d4 = GramForm::from_ints(&[&[2, -1, 0, 0], &[-1, 2, -1, -1], &[0, -1, 2, 0], &[0, -1, 0, 2]]).unwrap();
    assert_eq!(minimal_vectors(&d4).unwrap().vectors.len(), 12);
    assert_eq!(brute_minimum(&d4).1.len(), 12);
}

#[test]
fn stabilizer_orders_of_root_lattices() {
    // Automorphism groups: hexagonal 12, square 8, A3 = FCC 48.
    let hex = VectorConfig::of(&[&[1, 0], &[0, 1], &[1, -1]]);
    assert_eq!(config_stabilizer(&hex, &GroupSpec::gl(2)).order(), 12);
    let sq = VectorConfig::of(&[&[1, 0], &[0, 1]]);
    assert_eq!(config_stabilizer(&sq, &GroupSpec::gl(2)).order(), 8);
    assert_eq!(config_stabilizer(&sq, &GroupSpec::sl(2)).order(), 4);
    let a3 = VectorConfig::of(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, -1, 0], &[0, 1, -1], &[1, 0, -1]]);
    assert_eq!(config_stabilizer(&a3, &GroupSpec::gl(3)).order(), 48);
}

#[test]
fn coset_spaces_have_the_classical_index() {
    for level in 1..=20u64 {
        let omega = CosetSpace::new(GroupSpec::gamma0(2, level), None);
        // Γ_0(N) has determinant one, so Ω = Γ\GL_2(Z) is twice the index in SL_2(Z).
        assert_eq!(omega.len() as u64, 2 * index_gamma0(level), "level {level}");
    }
    assert_eq!(CosetSpace::new(GroupSpec::gl(3), None).len(), 1);
    assert_eq!(CosetSpace::new(GroupSpec::sl(3), None).len(), 2);
}

#[test]
fn transversal_reaches_every_point() {
    for seed in [None, Some(7)] {
        let omega = CosetSpace::new(GroupSpec::gamma0(3, 2), seed);
        for w in 0..omega.len() {
            assert_eq!(omega.act(0, omega.transversal(w)), w);
        }
    }
}

#[test]
fn membership_of_congruence_subgroups() {
    use wellround::exactla::IntMatrix;
    let t = IntMatrix::from_rows(vec![vec![1, 1], vec![0, 1]]);
    let l = IntMatrix::from_rows(vec![vec![1, 0], vec![5, 1]]);
    assert!(GroupSpec::gamma0(2, 5).contains(&t));
    assert!(GroupSpec::gamma0(2, 5).contains(&l));
    assert!(!GroupSpec::gamma0(2, 7).contains(&l));
    assert!(!GroupSpec::principal(2, 5).contains(&t));
}
