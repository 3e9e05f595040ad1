use envyline::mechanisms::{self, MechanismSpec};
use envyline::{
    approximation_ratio, envy_ratio, optimal_envy_ratio, optimal_location, ExtendedRatio,
    LocationProfile, PlacementDistribution, Prediction,
};
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = LocationProfile> {
    prop::collection::vec(0.0..=1.0f64, 1..=8).prop_map(|v| LocationProfile::new(v).unwrap())
}

fn distribution() -> impl Strategy<Value = PlacementDistribution> {
    prop::collection::vec((0.0..=1.0f64, 0.01..1.0f64), 1..=5).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        PlacementDistribution::new(atoms.into_iter().map(|(y, w)| (y, w / total))).unwrap()
    })
}

fn spec() -> impl Strategy<Value = MechanismSpec> {
    prop_oneof![
        Just(MechanismSpec::ConstantHalf),
        (1.0..=2.0f64).prop_map(|alpha| MechanismSpec::AlphaBim { alpha }),
        (0.0..=0.5f64, 0.0..=0.5f64).prop_map(|(alpha, p)| MechanismSpec::LrmConstant { alpha, p }),
        Just(MechanismSpec::Bam),
        (1.0001..=2.0f64).prop_map(|alpha| MechanismSpec::AlphaBiRandomized { alpha }),
        Just(MechanismSpec::BiasAwareLrm),
    ]
}

fn run(spec: &MechanismSpec, profile: &LocationProfile, yhat: f64) -> PlacementDistribution {
    let prediction = spec
        .uses_prediction()
        .then(|| Prediction::new(yhat).unwrap());
    mechanisms::run(spec, profile, prediction).unwrap()
}

fn close(a: ExtendedRatio, b: ExtendedRatio, rel: f64) -> bool {
    a.approx_eq(b, rel * a.finite().unwrap_or(1.0).max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn envy_ratio_is_at_least_one(x in profile(), y in 0.0..=1.0f64) {
        prop_assert!(envy_ratio(y, &x).unwrap() >= ExtendedRatio::ONE);
    }

    #[test]
    fn objective_is_reflection_symmetric(x in profile(), y in 0.0..=1.0f64) {
        let a = envy_ratio(y, &x).unwrap();
        let b = envy_ratio(1.0 - y, &x.reflect()).unwrap();
        prop_assert!(close(a, b, 1e-12), "{} vs {}", a, b);
    }

    #[test]
    fn midpoint_is_optimal(x in profile(), k in 0usize..=1000) {
        let y = k as f64 / 1000.0;
        let best = envy_ratio(optimal_location(&x), &x).unwrap();
        prop_assert!(best.le_within(envy_ratio(y, &x).unwrap(), 1e-12));
        prop_assert!(close(best, optimal_envy_ratio(&x), 1e-12));
    }

    #[test]
    fn two_agent_reduction(x in profile(), d in distribution()) {
        let lhs = approximation_ratio(&d, &x);
        let rhs = approximation_ratio(&d, &x.reduce_to_two_agents());
        prop_assert!(lhs.le_within(rhs, 1e-12), "{} > {}", lhs, rhs);
    }

    #[test]
    fn mechanisms_ignore_reports(s in spec(), a in profile(), b in profile(), yhat in 0.0..=1.0f64) {
        prop_assert_eq!(run(&s, &a, yhat), run(&s, &b, yhat));
    }

    #[test]
    fn mechanisms_are_reflection_equivariant(s in spec(), x in profile(), yhat in 0.0..=1.0f64) {
        let direct = run(&s, &x, yhat).reflect();
        let mirrored = run(&s, &x.reflect(), 1.0 - yhat);
        prop_assert!(direct.approx_eq(&mirrored, 1e-12), "{:?} vs {:?}", direct, mirrored);
    }

    #[test]
    fn outputs_have_unit_mass(s in spec(), x in profile(), yhat in 0.0..=1.0f64) {
        let d = run(&s, &x, yhat);
        prop_assert!((d.total_mass() - 1.0).abs() <= envyline::PROBABILITY_TOLERANCE);
        prop_assert!(d.atoms().iter().all(|a| a.probability > 0.0 && (0.0..=1.0).contains(&a.location)));
    }

    #[test]
    fn bim_stays_in_its_interval(alpha in 1.0..=2.0f64, x in profile(), yhat in 0.0..=1.0f64) {
        let d = mechanisms::alpha_bim(&x, Prediction::new(yhat).unwrap(), alpha).unwrap();
        let y = d.atoms()[0].location;
        prop_assert!(d.is_deterministic());
        prop_assert!(y >= 1.0 - 1.0 / alpha - 1e-15 && y <= 1.0 / alpha + 1e-15);
        if (1.0 - 1.0 / alpha..=1.0 / alpha).contains(&yhat) {
            prop_assert!((y - yhat).abs() < 1e-14);
        }
    }

    #[test]
    fn spec_text_round_trips(s in spec()) {
        let parsed: MechanismSpec = s.to_string().parse().unwrap();
        prop_assert_eq!(parsed, s);
    }
}
