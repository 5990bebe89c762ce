//! Sampling of exponential weight arrays, last passage times and Monte
//! Carlo CDF estimates.
//!
//! Sample `k` of a run with seed `s` is drawn from ChaCha8 stream `k` of key
//! `s`, sites in row-major order. Samples are therefore reproducible one by
//! one and independent of how the work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Geometry, ModelParams, WeightArray};

/// Samples per parallel work item.
pub const BATCH: usize = 1 << 16;
/// Largest `2N` accepted by [`enumerate_paths_oracle`].
pub const ENUMERATION_MAX_2N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfEstimate {
    pub u: f64,
    pub p_hat: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exp(rate) by inversion; `1 - U` lies in (0, 1].
fn exp_variate(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// One weight array (sample 0 of the stream family keyed by `seed`).
pub fn sample_weights(params: &ModelParams, seed: u64) -> WeightArray {
    sample_weights_stream(params, seed, 0)
}

/// Weight array number `stream` of the family keyed by `seed`.
pub fn sample_weights_stream(params: &ModelParams, seed: u64, stream: u64) -> WeightArray {
    let mut rng = stream_rng(seed, stream);
    WeightArray::from_fn(params.geometry(), params.n(), |i, j| exp_variate(&mut rng, params.rate(i, j)))
        .expect("sampled array matches the index set")
}

/// Last passage time from (1,1) to the terminal anti-diagonal by dynamic
/// programming, `T(i,j) = W(i,j) + max(T(i-1,j), T(i,j-1))`.
pub fn last_passage_time(weights: &WeightArray) -> f64 {
    let n = weights.n();
    let mut prev = vec![0.0f64; 2 * n + 1];
    let mut cur = vec![0.0f64; 2 * n + 1];
    let mut best = f64::NEG_INFINITY;
    for (r, row) in weights.rows().iter().enumerate() {
        for (c, &w) in row.iter().enumerate() {
            let up = if r > 0 { prev[c] } else { 0.0 };
            let left = if c > 0 { cur[c - 1] } else { 0.0 };
            cur[c] = w + up.max(left);
        }
        best = best.max(cur[row.len() - 1]);
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Maximum over an explicit enumeration of all directed paths.
pub fn enumerate_paths_oracle(weights: &WeightArray) -> Result<f64> {
    let n = weights.n();
    if 2 * n > ENUMERATION_MAX_2N {
        return Err(Error::SizeGuard(format!(
            "path enumeration needs 2N <= {ENUMERATION_MAX_2N}, got 2N = {}",
            2 * n
        )));
    }
    fn walk(w: &WeightArray, i: usize, j: usize, acc: f64, best: &mut f64) {
        let here = acc + w.get(i, j).expect("walk stays on the index set");
        if i + j == 2 * w.n() + 1 {
            *best = best.max(here);
            return;
        }
        if w.get(i + 1, j).is_some() {
            walk(w, i + 1, j, here, best);
        }
        if w.get(i, j + 1).is_some() {
            walk(w, i, j + 1, here, best);
        }
    }
    let mut best = f64::NEG_INFINITY;
    walk(weights, 1, 1, 0.0, &mut best);
    Ok(best)
}

/// Per-row inverse rates, so the sampler avoids recomputing the rate rule.
struct RateTable {
    rows: Vec<Vec<f64>>,
    width: usize,
}

impl RateTable {
    fn new(params: &ModelParams) -> Self {
        let rows = (1..=params.rows())
            .map(|i| (1..=params.row_len(i)).map(|j| params.rate(i, j)).collect())
            .collect();
        RateTable { rows, width: 2 * params.n() + 1 }
    }

    /// Samples stream `k` and runs the DP on the fly; the draws match
    /// [`sample_weights_stream`] exactly.
    fn passage_time(&self, seed: u64, k: u64, prev: &mut [f64], cur: &mut [f64]) -> f64 {
        let mut rng = stream_rng(seed, k);
        let (mut prev, mut cur) = (prev, cur);
        let mut best = f64::NEG_INFINITY;
        for (r, rates) in self.rows.iter().enumerate() {
            for (c, &rate) in rates.iter().enumerate() {
                let w = exp_variate(&mut rng, rate);
                let up = if r > 0 { prev[c] } else { 0.0 };
                let left = if c > 0 { cur[c - 1] } else { 0.0 };
                cur[c] = w + up.max(left);
            }
            best = best.max(cur[rates.len() - 1]);
            std::mem::swap(&mut prev, &mut cur);
        }
        best
    }
}

/// Last passage times of samples `0..samples`, in sample order.
pub fn simulate_passage_times(params: &ModelParams, samples: u64, seed: u64) -> Vec<f64> {
    let table = RateTable::new(params);
    let batches = samples.div_ceil(BATCH as u64);
    (0..batches)
        .into_par_iter()
        .flat_map_iter(|b| {
            let lo = b * BATCH as u64;
            let hi = (lo + BATCH as u64).min(samples);
            let mut prev = vec![0.0; table.width];
            let mut cur = vec![0.0; table.width];
            (lo..hi).map(|k| table.passage_time(seed, k, &mut prev, &mut cur)).collect::<Vec<_>>()
        })
        .collect()
}

/// Empirical CDF of the last passage time on `u_grid`; one set of
/// simulated times serves the whole grid.
pub fn estimate_cdf(params: &ModelParams, u_grid: &[f64], samples: u64, seed: u64) -> Result<Vec<CdfEstimate>> {
    if u_grid.is_empty() {
        return Err(Error::invalid("u_grid", "grid is empty"));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    if let Some(u) = u_grid.iter().find(|u| !u.is_finite()) {
        return Err(Error::invalid("u_grid", format!("non-finite grid point {u}")));
    }
    let mut times = simulate_passage_times(params, samples, seed);
    times.sort_by(|a, b| a.total_cmp(b));
    Ok(u_grid
        .iter()
        .map(|&u| {
            let count = times.partition_point(|&t| t <= u) as u64;
            let p = count as f64 / samples as f64;
            CdfEstimate { u, p_hat: p, stderr: (p * (1.0 - p) / samples as f64).sqrt(), samples, seed }
        })
        .collect())
}

/// Geometry-aware description of the terminal set, for documentation and tests.
pub fn terminal_sites(geometry: Geometry, n: usize) -> Vec<(usize, usize)> {
    (1..=2 * n)
        .map(|i| (i, 2 * n + 1 - i))
        .filter(|&(i, _)| geometry == Geometry::Flat || i <= n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(a: f64, b: f64, g: Geometry) -> ModelParams {
        ModelParams::new(g, vec![a], vec![b]).unwrap()
    }

    #[test]
    fn small_arrays() {
        let w = WeightArray::from_rows(Geometry::Flat, 1, vec![vec![1.0, 2.0], vec![3.0]]).unwrap();
        assert_eq!(last_passage_time(&w), 4.0);
        assert_eq!(enumerate_paths_oracle(&w).unwrap(), 4.0);
        let h = WeightArray::from_rows(Geometry::HalfFlat, 1, vec![vec![1.0, 2.0]]).unwrap();
        assert_eq!(last_passage_time(&h), 3.0);
        assert_eq!(enumerate_paths_oracle(&h).unwrap(), 3.0);
        assert_eq!(terminal_sites(Geometry::HalfFlat, 2), vec![(1, 4), (2, 3)]);
    }

    #[test]
    fn deterministic_and_stream_consistent() {
        let p = ModelParams::new(Geometry::Flat, vec![0.6, 1.0], vec![0.8, 1.3]).unwrap();
        assert_eq!(sample_weights(&p, 7), sample_weights(&p, 7));
        assert_ne!(sample_weights(&p, 7), sample_weights(&p, 8));
        let times = simulate_passage_times(&p, 5, 7);
        for (k, t) in times.iter().enumerate() {
            assert_eq!(*t, last_passage_time(&sample_weights_stream(&p, 7, k as u64)));
        }
    }

    #[test]
    fn site_mean_matches_rate() {
        let (a, b) = (0.7, 1.1);
        let p = p1(a, b, Geometry::Flat);
        let m = 100_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for k in 0..m {
            let x = sample_weights_stream(&p, 3, k).get(1, 1).unwrap();
            s += x;
            s2 += x * x;
        }
        let mean = s / m as f64;
        let se = ((s2 / m as f64 - mean * mean) / m as f64).sqrt();
        assert!((mean - 1.0 / (a + b)).abs() < 4.0 * se);
    }

    #[test]
    fn cdf_edges_and_errors() {
        let p = p1(0.5, 0.5, Geometry::Flat);
        let est = estimate_cdf(&p, &[0.0, 1e3], 1000, 1).unwrap();
        assert_eq!(est[0].p_hat, 0.0);
        assert_eq!(est[1].p_hat, 1.0);
        assert!(estimate_cdf(&p, &[], 10, 1).is_err());
        assert!(estimate_cdf(&p, &[1.0], 0, 1).is_err());
    }

    #[test]
    fn convolution_oracle_n1() {
        // gamma = 0.5: all three weights Exp(1); P(E1 + max(E2,E3) <= u).
        let u: f64 = 2.0;
        // density of M = max(E2,E3) is 2e^{-m}(1-e^{-m}); integrate P(E1 <= u - m).
        let oracle = crate::quadrature::integrate(
            |m| 2.0 * (-m).exp() * (1.0 - (-m).exp()) * (1.0 - (-(u - m)).exp()),
            0.0,
            u,
            8,
            20,
        );
        let p = ModelParams::iid(Geometry::Flat, 1, 0.5).unwrap();
        let est = estimate_cdf(&p, &[u], 100_000, 11).unwrap()[0];
        assert!((est.p_hat - oracle).abs() < 4.0 * est.stderr, "{} vs {oracle}", est.p_hat);
    }
}
