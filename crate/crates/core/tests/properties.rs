use lorgeo::algebra::{jacobi_residual, FrameVector};
use lorgeo::exact::Rational;
use lorgeo::families::{invariant_d_exact, FamilyTag};
use lorgeo::geodesics::{enumerate_families, geodesic_residual, is_geodesic_vector, RESIDUAL_TOL};
use lorgeo::sampling::{random_instance, random_nonsymmetric};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tag() -> impl Strategy<Value = FamilyTag> {
    prop::sample::select(FamilyTag::ALL.to_vec())
}

fn non_unimodular() -> impl Strategy<Value = FamilyTag> {
    prop::sample::select(vec![FamilyTag::G5, FamilyTag::G6, FamilyTag::G7])
}

fn vector() -> impl Strategy<Value = FrameVector> {
    prop::array::uniform3(-10.0f64..10.0).prop_map(FrameVector)
}

fn ratio() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=7)
        .prop_filter("nonzero", |(p, _)| *p != 0)
        .prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bracket_is_antisymmetric(t in tag(), seed in any::<u64>(), x in vector(), y in vector()) {
        let inst = random_instance(t, &mut ChaCha8Rng::seed_from_u64(seed), 0.3);
        let c = &inst.constants;
        let (a, b) = (c.bracket(&x, &y), c.bracket(&y, &x));
        let s = inst.params.scale() * 100.0;
        for i in 0..3 {
            prop_assert!((a.0[i] + b.0[i]).abs() <= 1e-12 * s);
        }
        prop_assert!(c.bracket(&x, &x).0.iter().all(|v| v.abs() <= 1e-12 * s));
    }

    #[test]
    fn jacobi_holds(t in tag(), seed in any::<u64>()) {
        let inst = random_instance(t, &mut ChaCha8Rng::seed_from_u64(seed), 0.3);
        let s = inst.params.scale();
        prop_assert!(jacobi_residual(&inst.constants) <= 1e-12 * s * s);
    }

    #[test]
    fn d_is_scale_invariant(t in non_unimodular(), seed in any::<u64>(), r in ratio()) {
        let inst = random_instance(t, &mut ChaCha8Rng::seed_from_u64(seed), 0.3);
        let d = invariant_d_exact(&inst.params.rationals()).unwrap();
        prop_assert_eq!(invariant_d_exact(&inst.params.scaled(&r).rationals()).unwrap(), d);
    }

    #[test]
    fn residual_scales_quadratically(t in tag(), seed in any::<u64>(), x in vector(), k in -5.0f64..5.0, l in 0.1f64..10.0) {
        let inst = random_instance(t, &mut ChaCha8Rng::seed_from_u64(seed), 0.3);
        let c = &inst.constants;
        let r1 = geodesic_residual(c, &[], &x, k, &[]);
        let r2 = geodesic_residual(c, &[], &(x * l), k * l, &[]);
        let bound = 1e-10 * inst.params.scale() * 100.0 * l * l;
        for i in 0..3 {
            prop_assert!((r2[i] - l * l * r1[i]).abs() <= bound);
        }
    }

    #[test]
    fn family_members_are_geodesic(t in non_unimodular(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_nonsymmetric(t, &mut rng, 0.3);
        for f in enumerate_families(&inst).unwrap() {
            if let Some(x) = f.sample_member(&mut rng) {
                prop_assert!(is_geodesic_vector(&inst.constants, &[], &x, RESIDUAL_TOL).is_some(), "{}", f.label);
                // projective: any rescaling is still geodesic
                prop_assert!(is_geodesic_vector(&inst.constants, &[], &(x * -3.5), RESIDUAL_TOL).is_some());
            }
        }
    }
}
