use cfp_core::certify::{certify_map, recheck_witness, Condition, Evidence, MapRef};
use cfp_core::gauge::{midpoint_gauge, Gauge};
use cfp_core::iterate::{
    brute_force_fixed_points, multivalued_orbit, picard_iterate, telescoping_audit,
    PotentialSource, StopRule, Termination,
};
use cfp_core::sample::{
    descent_potential, random_map, random_multimap, random_potential, random_space, union_map,
    MapFamily,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FAMILIES: [MapFamily; 3] = [
    MapFamily::Constant,
    MapFamily::FewValued,
    MapFamily::Uniform,
];

proptest! {
    #[test]
    fn certified_banach_orbits_find_the_unique_fixed_point(
        seed in any::<u64>(), n in 2usize..=10, family in 0usize..3, alpha in 0.3f64..0.95,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_space(&mut rng, n);
        let t = random_map(&mut rng, &s, FAMILIES[family]);
        let g = Gauge::banach(alpha).unwrap();
        let cert = certify_map(&s, &t, Condition::Banach, Evidence::Gauge(&g)).unwrap();
        if cert.passed() {
            let fixed = brute_force_fixed_points(&t);
            prop_assert_eq!(fixed.len(), 1);
            for x0 in 0..n {
                let tr = picard_iterate(&s, &t, x0, StopRule::new(n).unwrap(), PotentialSource::Eta(&g)).unwrap();
                prop_assert_eq!(tr.fixed_point(), Some(fixed[0]));
                prop_assert_eq!(telescoping_audit(&s, &tr).unwrap().violations, 0);
                prop_assert_eq!(tr.potential_non_increasing(), Some(true));
            }
        } else {
            prop_assert!(recheck_witness(&s, MapRef::Single(&t), &cert, Evidence::Gauge(&g)));
        }
    }

    #[test]
    fn caristi_potentials_force_descent(seed in any::<u64>(), n in 2usize..=10, family in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_space(&mut rng, n);
        let t = random_map(&mut rng, &s, FAMILIES[family]);
        let phi = descent_potential(&mut rng, &s, &t, 0.3)
            .unwrap_or_else(|| random_potential(&mut rng, n, 30.0));
        let cert = certify_map(&s, &t, Condition::Caristi, Evidence::PointPotential(&phi)).unwrap();
        if cert.passed() {
            for x0 in 0..n {
                let tr = picard_iterate(&s, &t, x0, StopRule::for_caristi(&s), PotentialSource::Table(&phi)).unwrap();
                prop_assert_eq!(tr.termination, Termination::FixedPoint);
                prop_assert!(tr.steps() < n);
                for k in 0..tr.steps() {
                    let (a, b) = (tr.points[k], tr.points[k + 1]);
                    prop_assert!(phi[a] - phi[b] >= s.d(a, b));
                }
                prop_assert_eq!(telescoping_audit(&s, &tr).unwrap().violations, 0);
            }
        } else {
            prop_assert!(recheck_witness(&s, MapRef::Single(&t), &cert, Evidence::PointPotential(&phi)));
        }
    }

    #[test]
    fn unions_of_contractions_contract(seed in any::<u64>(), n in 2usize..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_space(&mut rng, n);
        let g = Gauge::banach(0.9).unwrap();
        let mut contractions = Vec::new();
        for i in 0..30 {
            let t = random_map(&mut rng, &s, FAMILIES[i % 3]);
            if certify_map(&s, &t, Condition::Banach, Evidence::Gauge(&g)).unwrap().passed() {
                contractions.push(t);
            }
        }
        prop_assume!(contractions.len() >= 2);
        let mv = union_map(&s, &contractions[0], &contractions[1]);
        prop_assert!(certify_map(&s, &mv, Condition::Banach, Evidence::Gauge(&g)).unwrap().passed());
        let theta = midpoint_gauge(&g);
        let fixed = brute_force_fixed_points(&mv);
        for x0 in 0..n {
            let tr = multivalued_orbit(&s, &mv, x0, &theta, StopRule::new(n).unwrap()).unwrap();
            prop_assert!(tr.fixed_point().is_some_and(|p| fixed.contains(&p)));
            prop_assert_eq!(telescoping_audit(&s, &tr).unwrap().violations, 0);
        }
    }

    #[test]
    fn multimap_failures_carry_reproducible_witnesses(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_space(&mut rng, n);
        let mv = random_multimap(&mut rng, &s, 0.4);
        let g = Gauge::banach(0.5).unwrap();
        let cert = certify_map(&s, &mv, Condition::Banach, Evidence::Gauge(&g)).unwrap();
        if !cert.passed() {
            prop_assert!(recheck_witness(&s, MapRef::Multi(&mv), &cert, Evidence::Gauge(&g)));
        }
    }
}
