//! Flag orbits against the classical cusp counts, and invariance of flag
//! classes under the group.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use common::{cusps_gamma0, genus_principal, random_flag, random_unimodular};
use wellround::exactla::IntMatrix;
use wellround::flags::{flag_orbits, flag_types, standard_flag, subflags_with_signs, FlagOrbitIndex};
use wellround::lattice::{CosetSpace, GroupSpec};

#[test]
fn cusps_of_gamma0_match_the_divisor_sum() {
    for level in 1..=30u64 {
        let orbits = flag_orbits(&GroupSpec::gamma0(2, level), &[1]).unwrap();
        assert_eq!(orbits.count as u64, cusps_gamma0(level), "level {level}");
        assert_eq!(orbits.reps.len(), orbits.count);
    }
}

#[test]
fn cusps_of_principal_congruence_subgroups() {
    for level in 3..=7u64 {
        let orbits = flag_orbits(&GroupSpec::principal(2, level), &[1]).unwrap();
        assert_eq!(orbits.count as u64, genus_principal(level).1, "level {level}");
    }
    // Γ(2) contains −I; its three cusps are 0, 1 and ∞.
    assert_eq!(flag_orbits(&GroupSpec::principal(2, 2), &[1]).unwrap().count, 3);
}

#[test]
fn full_level_groups_have_one_flag_class_per_type() {
    for n in 2..=4 {
        for k in 1..n {
            for dims in flag_types(n, k) {
                assert_eq!(flag_orbits(&GroupSpec::gl(n), &dims).unwrap().count, 1, "{dims:?}");
                assert_eq!(flag_orbits(&GroupSpec::sl(n), &dims).unwrap().count, 1, "{dims:?}");
            }
        }
    }
}

#[test]
fn flag_types_are_increasing_dimension_lists() {
    // Choosing k of the n − 1 proper dimensions.
    assert_eq!(flag_types(4, 1).len(), 3);
    assert_eq!(flag_types(4, 2).len(), 3);
    assert_eq!(flag_types(4, 3), vec![vec![1, 2, 3]]);
    assert!(flag_types(5, 2).iter().all(|t| t.windows(2).all(|w| w[0] < w[1])));
}

#[test]
fn deleting_members_alternates_signs() {
    let f = standard_flag(4, &[1, 2, 3]).unwrap();
    let subs = subflags_with_signs(&f).unwrap();
    assert_eq!(subs.iter().map(|(g, _)| g.dims()).collect::<Vec<_>>(), vec![vec![2, 3], vec![1, 3], vec![1, 2]]);
    assert_eq!(subs.iter().map(|(_, s)| *s).collect::<Vec<_>>(), vec![1, -1, 1]);
}

/// A random element of `Γ_0(N)` as a word in `T = [[1,1],[0,1]]`,
/// `L = [[1,0],[N,1]]` and their inverses.
fn random_gamma0_element(level: i64, rng: &mut rand::rngs::StdRng) -> IntMatrix {
    let mut g = IntMatrix::identity(2);
    for _ in 0..8 {
        let e = rng.gen_range(-2..=2);
        let step = if rng.gen_bool(0.5) {
            IntMatrix::from_rows(vec![vec![1, e], vec![0, 1]])
        } else {
            IntMatrix::from_rows(vec![vec![1, 0], vec![level * e, 1]])
        };
        g = &g * &step;
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flag_classes_are_invariant_under_the_group(seed in any::<u64>(), level in 2i64..=12) {
        let mut r = rand::rngs::StdRng::seed_from_u64(seed);
        let group = GroupSpec::gamma0(2, level as u64);
        let omega = CosetSpace::new(group, None);
        let index = FlagOrbitIndex::new(&omega, &[1]).unwrap();
        let f = random_flag(2, &mut r);
        let g = random_gamma0_element(level, &mut r);
        prop_assert!(group.contains(&g));
        prop_assert_eq!(index.class_of(&omega, &f), index.class_of(&omega, &f.transform(&g)));
    }

    #[test]
    fn flags_are_classified_with_a_transport(seed in any::<u64>(), level in 1u64..=8) {
        let mut r = rand::rngs::StdRng::seed_from_u64(seed);
        let omega = CosetSpace::new(GroupSpec::gamma0(2, level), None);
        let index = FlagOrbitIndex::new(&omega, &[1]).unwrap();
        let f = random_flag(2, &mut r).transform(&random_unimodular(2, &mut r));
        let (k, g) = index.classify(&omega, &f);
        prop_assert!(omega.group().contains(&g));
        prop_assert_eq!(f.transform(&g), index.reps()[k].clone());
    }
}
