use proptest::prelude::*;

use lpplab_core::fredholm::contour::ContourSpec;
use lpplab_core::fredholm::finite::default_contours;
use lpplab_core::{
    airy_ai, cdf_exact, enumerate_paths_oracle, estimate_cdf, finite_n_kernel, j_n_rescaled, last_passage_time, Geometry,
    ModelParams, WeightArray,
};

fn geometry() -> impl Strategy<Value = Geometry> {
    prop_oneof![Just(Geometry::Flat), Just(Geometry::HalfFlat)]
}

fn weights(max_n: usize) -> impl Strategy<Value = WeightArray> {
    (geometry(), 1..=max_n).prop_flat_map(|(g, n)| {
        let sites: usize = match g {
            Geometry::Flat => (1..=2 * n).map(|i| 2 * n + 1 - i).sum(),
            Geometry::HalfFlat => (1..=n).map(|i| 2 * n + 1 - i).sum(),
        };
        prop::collection::vec(0.0..5.0f64, sites).prop_map(move |v| {
            let mut it = v.into_iter();
            WeightArray::from_fn(g, n, |_, _| it.next().unwrap()).unwrap()
        })
    })
}

/// Parameters in [0.3, 1.5] with all 2N values at least 0.05 apart.
fn distinct_params(max_n: usize) -> impl Strategy<Value = ModelParams> {
    (geometry(), 1..=max_n)
        .prop_flat_map(|(g, n)| (Just(g), prop::collection::vec(0.3..1.5f64, 2 * n)))
        .prop_filter("parameters too close", |(_, v)| {
            v.iter().enumerate().all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).abs() >= 0.05))
        })
        .prop_map(|(g, v)| {
            let n = v.len() / 2;
            ModelParams::new(g, v[..n].to_vec(), v[n..].to_vec()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn dp_equals_enumeration(w in weights(4)) {
        prop_assert_eq!(last_passage_time(&w), enumerate_paths_oracle(&w).unwrap());
    }

    #[test]
    fn flat_transpose_invariance(w in weights(4).prop_filter("flat", |w| w.geometry() == Geometry::Flat)) {
        prop_assert_eq!(last_passage_time(&w), last_passage_time(&w.transposed().unwrap()));
    }

    #[test]
    fn passage_time_monotone_in_entries(w in weights(4), pick in 0usize..1000, bump in 0.0..3.0f64) {
        let sites: Vec<(usize, usize)> = w
            .rows()
            .iter()
            .enumerate()
            .flat_map(|(i, r)| (0..r.len()).map(move |j| (i + 1, j + 1)))
            .collect();
        let (i, j) = sites[pick % sites.len()];
        let mut up = w.clone();
        up.set(i, j, w.get(i, j).unwrap() + bump).unwrap();
        prop_assert!(last_passage_time(&up) >= last_passage_time(&w));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_cdf_is_monotone(p in distinct_params(3)) {
        let scale = 1.0 / p.min_rate();
        let mut prev = 0.0;
        for k in 0..50 {
            let v = cdf_exact(&p, 0.4 * scale * k as f64).unwrap();
            prop_assert!(v >= prev - 1e-12, "u index {}: {} < {}", k, v, prev);
            prop_assert!((-1e-7..=1.0 + 1e-7).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn flat_exchange_symmetry(p in distinct_params(3), u in 0.1..10.0f64) {
        let p = p.with_geometry(Geometry::Flat);
        let a = cdf_exact(&p, u).unwrap();
        let b = cdf_exact(&p.swapped(), u).unwrap();
        // Clustered parameters make det H and the Cauchy determinant ill-conditioned;
        // the ratio then carries up to ~1e-10 absolute rounding error.
        prop_assert!((a - b).abs() <= 1e-12 * a.abs() + 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn contour_independence(p in distinct_params(2), shrink in 0.2..0.55f64, grow in 0.6..0.95f64,
                            lambda in 0.0..4.0f64, xi in 0.0..4.0f64) {
        let (g1, g2) = default_contours(&p, 256).unwrap();
        let (lo, hi) = p.param_range();
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let alt1 = ContourSpec::new(c, h + shrink * lo, 256).unwrap();
        let alt2 = ContourSpec::new(c, h + grow * lo, 256).unwrap();
        let a = finite_n_kernel(&p, 2.0, (&g1, &g2), lambda, xi).unwrap();
        let b = finite_n_kernel(&p, 2.0, (&alt1, &alt2), lambda, xi).unwrap();
        prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn airy_positive_and_decreasing(x in 0.0..12.0f64, dx in 1e-3..1.0f64) {
        prop_assert!(airy_ai(x) > 0.0);
        prop_assert!(airy_ai(x + dx) < airy_ai(x));
    }

    #[test]
    fn rescaled_j_n_uniform_bound(n in 1usize..5000, gamma in 0.2..3.0f64, x in -2.0..20.0f64) {
        let v = j_n_rescaled(n, gamma, x).unwrap();
        prop_assert!(v.abs() <= (-x).exp(), "N={} x={}: {}", n, x, v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn monte_carlo_is_monotone_and_swap_symmetric(p in distinct_params(3), seed in any::<u64>()) {
        let p = p.with_geometry(Geometry::Flat);
        let scale = p.n() as f64 / p.min_rate();
        let grid: Vec<f64> = (1..=8).map(|k| 0.5 * scale * k as f64).collect();
        let a = estimate_cdf(&p, &grid, 20_000, seed).unwrap();
        let b = estimate_cdf(&p.swapped(), &grid, 20_000, seed.wrapping_add(1)).unwrap();
        for w in a.windows(2) {
            prop_assert!(w[1].p_hat >= w[0].p_hat);
        }
        for (x, y) in a.iter().zip(&b) {
            let joint = (x.stderr.powi(2) + y.stderr.powi(2)).sqrt();
            prop_assert!((x.p_hat - y.p_hat).abs() <= 4.0 * joint + 1e-12, "u={}: {} vs {}", x.u, x.p_hat, y.p_hat);
        }
    }
}
