//! Property tests: randomised invariants over the samplers and the exact
//! serialisation layer.

use std::collections::BTreeSet;

use proptest::prelude::*;

use operad_lab_core::bar;
use operad_lab_core::disc::{self, DiscConfig};
use operad_lab_core::geometry::{Label, Mode, Norm, Scalar, Tol, Vector};
use operad_lab_core::sample::{self, numeric_labels, rng_for};
use operad_lab_core::spheres::StarPoint;
use operad_lab_core::trees::LabelledTree;

fn tol() -> Tol {
    Tol::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_scalars_round_trip_through_json(p in -10_000i64..10_000, q in 1i64..10_000) {
        let s = Scalar::ratio(p, q);
        let json = serde_json::to_string(&s).unwrap();
        let back: Scalar = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(s, back);
    }

    #[test]
    fn exact_arithmetic_matches_integers(a in -1000i64..1000, b in -1000i64..1000, c in 1i64..1000) {
        let sa = Scalar::ratio(a, c);
        let sb = Scalar::ratio(b, c);
        prop_assert_eq!(&sa + &sb, Scalar::ratio(a + b, c));
        prop_assert_eq!(&sa - &sb, Scalar::ratio(a - b, c));
        prop_assert_eq!(&sa * &sb, Scalar::ratio(a * b, c * c));
    }

    #[test]
    fn configs_round_trip_through_json(seed in any::<u64>(), k in 2usize..5) {
        let mut rng = rng_for(seed, 0);
        let c = sample::sample_d(&mut rng, Mode::Exact, 2, &numeric_labels(k), Norm::LInf).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: DiscConfig = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(c, back);
    }

    #[test]
    fn trees_round_trip_through_json(seed in any::<u64>(), k in 2usize..6) {
        let mut rng = rng_for(seed, 1);
        let t = sample::sample_tree(&mut rng, &numeric_labels(k)).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: LabelledTree = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(t, back);
    }

    #[test]
    fn decompose_then_compose_is_identity(seed in any::<u64>(), k in 3usize..6) {
        let mut rng = rng_for(seed, 2);
        let labels = numeric_labels(k);
        let d = sample::sample_d(&mut rng, Mode::Exact, 2, &labels, Norm::LInf).unwrap();
        let block: BTreeSet<Label> = labels.iter().take(2).cloned().collect();
        let fresh = Label::new("block");
        let (outer, inner) = disc::decompose(&d, &block, &fresh, &tol()).unwrap();
        prop_assert_eq!(disc::compose(&outer, &inner, &fresh).unwrap(), d);
    }

    #[test]
    fn compose_then_decompose_recovers_both_factors(seed in any::<u64>(), k in 2usize..4) {
        let mut rng = rng_for(seed, 3);
        let a = sample::sample_r(&mut rng, Mode::Exact, 2, &numeric_labels(k)).unwrap();
        let b_labels: BTreeSet<Label> = (10..12usize).map(Label::from).collect();
        let b = sample::sample_r(&mut rng, Mode::Exact, 2, &b_labels).unwrap();
        let at = Label::from(1usize);
        let composite = disc::compose(&a, &b, &at).unwrap();
        let (outer, inner) = disc::decompose(&composite, &b_labels, &at, &tol()).unwrap();
        prop_assert_eq!(outer, a);
        prop_assert_eq!(inner, b);
    }

    #[test]
    fn corolla_compatibility_is_the_disjoint_bounded_class(seed in any::<u64>(), k in 2usize..5) {
        let mut rng = rng_for(seed, 4);
        let labels = numeric_labels(k);
        let corolla = LabelledTree::corolla(labels.clone()).unwrap();
        for probe in [
            sample::sample_p(&mut rng, Mode::Exact, 2, &labels).unwrap(),
            sample::sample_d(&mut rng, Mode::Exact, 2, &labels, Norm::LInf).unwrap(),
        ] {
            let member = bar::dv_tree_membership(&probe, &corolla, Norm::LInf, &tol()).unwrap();
            let in_d = disc::classify(&probe, Norm::LInf, &tol()).unwrap().in_d;
            prop_assert_eq!(member, in_d);
        }
    }

    #[test]
    fn norms_satisfy_the_triangle_inequality(
        ax in -50i64..50, ay in -50i64..50,
        bx in -50i64..50, by in -50i64..50,
        q in 1i64..50,
    ) {
        let a = Vector::exact(&[(ax, q), (ay, q)]);
        let b = Vector::exact(&[(bx, q), (by, q)]);
        for norm in [Norm::LInf, Norm::L1] {
            let na = norm.eval(&a).unwrap();
            let nb = norm.eval(&b).unwrap();
            let nab = norm.eval(&a.add(&b)).unwrap();
            prop_assert!(nab.cmp_total(&(&na + &nb)) != std::cmp::Ordering::Greater);
        }
    }

    #[test]
    fn barycentric_samples_have_zero_weighted_mean(seed in any::<u64>(), k in 2usize..5) {
        let mut rng = rng_for(seed, 5);
        let labels = numeric_labels(k);
        let c = sample::sample_r(&mut rng, Mode::Exact, 2, &labels).unwrap();
        prop_assert!(c.barycentre(&labels).unwrap().is_zero());
    }

    #[test]
    fn tree_grafting_inverts_edge_decomposition(seed in any::<u64>(), k in 3usize..6) {
        let mut rng = rng_for(seed, 6);
        let labels = numeric_labels(k);
        let tree = sample::sample_tree(&mut rng, &labels).unwrap();
        let fresh = Label::new("block");
        for edge in tree.internal_edges() {
            let (outer, inner) = tree.decompose_along(&edge, &fresh).unwrap().unwrap();
            let grafted = outer.graft(&inner, &fresh).unwrap();
            prop_assert_eq!(&grafted, &tree);
        }
    }

    #[test]
    fn star_points_round_trip_through_json(seed in any::<u64>(), k in 2usize..4) {
        let mut rng = rng_for(seed, 7);
        let labels = numeric_labels(k);
        let c = sample::sample_open_star(&mut rng, Mode::Exact, 2, &labels).unwrap();
        let p = operad_lab_core::spheres::project_star(&c, Norm::LInf, &tol()).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: StarPoint = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(p, back);
    }
}

proptest! {
    // The flow integrates numerically; keep the case count small.
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn flow_terminals_are_disjoint_and_bounded(seed in any::<u64>(), k in 2usize..5) {
        let mut rng = rng_for(seed, 8);
        let labels = numeric_labels(k);
        let c = sample::sample_rd(&mut rng, Mode::Float, 2, &labels, Norm::LInf).unwrap();
        let trace = operad_lab_core::flow::flow_retract(&c, Norm::LInf, &tol()).unwrap();
        let class = disc::classify(&trace.terminal, Norm::LInf, &tol()).unwrap();
        prop_assert!(class.in_d);
        prop_assert!(trace.terminal_r <= 1.0 + 1e-6);
    }
}
