//! Property-based invariants for the metric constructors and the W1 norm.

use lipext_core::metric::{self, FiniteMetric, SubsetHandle, ValidationMode};
use lipext_core::wasserstein::{w1_norm, SignedMeasure};
use proptest::prelude::*;

/// Random metric with entries in [1, 2]: the triangle inequality holds
/// automatically, so constructions can be stressed freely.
fn arb_metric(max_n: usize) -> impl Strategy<Value = FiniteMetric<f64>> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(1.0f64..2.0, pairs).prop_map(move |vals| {
            let mut dist = vec![vec![0.0; n]; n];
            let mut it = vals.into_iter();
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = it.next().unwrap();
                    dist[i][j] = v;
                    dist[j][i] = v;
                }
            }
            FiniteMetric::from_matrix((0..n).map(|i| i.to_string()).collect(), dist).unwrap()
        })
    })
}

fn arb_measure(n: usize) -> impl Strategy<Value = SignedMeasure<f64>> {
    proptest::collection::vec(-1.0f64..1.0, n).prop_map(move |mut vals| {
        let mean = vals.iter().sum::<f64>() / n as f64;
        for v in vals.iter_mut() {
            *v -= mean;
        }
        SignedMeasure::new(vals).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructed_metrics_validate(m in arb_metric(7), alpha in 0.2f64..1.0, r in 0.1f64..3.0) {
        let tol = 1e-9;
        prop_assert!(metric::validate_metric(&m, &tol, ValidationMode::Metric).unwrap().pass);
        let snow = metric::snowflake(&m, alpha).unwrap();
        prop_assert!(metric::validate_metric(&snow, &tol, ValidationMode::Metric).unwrap().pass);
        let s = SubsetHandle::new(vec![0, 1], m.len()).unwrap();
        let mag = metric::magnify(&m, &s, r).unwrap();
        prop_assert!(metric::validate_metric(&mag, &tol, ValidationMode::Metric).unwrap().pass);
    }

    #[test]
    fn snowflake_composes(m in arb_metric(6), a in 0.3f64..1.0, b in 0.3f64..1.0) {
        let once = metric::snowflake(&metric::snowflake(&m, a).unwrap(), b).unwrap();
        let direct = metric::snowflake(&m, a * b).unwrap();
        for i in 0..m.len() {
            for j in 0..m.len() {
                prop_assert!((once.d(i, j) - direct.d(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn w1_norm_is_a_norm(m in arb_metric(5), lambda in -2.0f64..2.0) {
        let n = m.len();
        let runner = &mut proptest::test_runner::TestRunner::deterministic();
        let f = arb_measure(n).new_tree(runner).unwrap().current();
        let g = arb_measure(n).new_tree(runner).unwrap().current();
        let norm = |h: &SignedMeasure<f64>| w1_norm(h, &m).unwrap().0;
        // triangle inequality
        let sum = f.add(&g).unwrap();
        prop_assert!(norm(&sum) <= norm(&f) + norm(&g) + 1e-9);
        // absolute homogeneity
        let scaled = f.scale(&lambda);
        prop_assert!((norm(&scaled) - lambda.abs() * norm(&f)).abs() < 1e-9 * (1.0 + norm(&f)));
        // definiteness at zero
        prop_assert!(norm(&SignedMeasure::zero(n)) == 0.0);
    }

    #[test]
    fn regular_graphs_have_uniform_degree(n in 4usize..12, seed in 0u64..50) {
        let d = 3;
        if n * d % 2 == 0 {
            let g = lipext_core::graph::random_regular_graph::<f64>(n, d, seed).unwrap();
            prop_assert!(g.degrees().iter().all(|&x| x == d));
        }
    }
}
