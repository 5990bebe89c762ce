//! Fredholm determinants `det(I - K)` on truncated half-lines.
//!
//! [`nystrom_det`] discretizes with composite Gauss-Legendre panels and the
//! symmetrized matrix `W^{1/2} K W^{1/2}`, doubling the panel count until two
//! consecutive levels agree. [`series_det_oracle`] evaluates the defining
//! series directly and serves as a cross-check.

pub mod contour;
pub mod finite;
pub mod limits;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::log_det_in_place;
use crate::quadrature::QuadratureRule;

/// Target gap between consecutive refinement levels.
pub const LEVEL_TOL: f64 = 1e-9;
/// Highest refinement level tried.
pub const LEVEL_CAP: u32 = 6;
/// Gauss-Legendre points per panel.
pub const PANEL_POINTS: usize = 16;
/// Truncation is extended while the last panel contributes more than this to the trace.
pub const EDGE_TOL: f64 = 1e-12;
/// Maximal number of truncation-length doublings.
pub const MAX_LENGTH_DOUBLINGS: u32 = 4;
pub const SERIES_MAX_TERMS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelId {
    FiniteFlat,
    FiniteHalf,
    Goe,
    Airy21,
    Airy2,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FredholmResult {
    pub value: f64,
    pub level: u32,
    /// |value(level) - value(level - 1)|.
    pub richardson_gap: f64,
    pub kernel_id: KernelId,
    /// Truncation length actually used.
    pub length: f64,
    pub converged: bool,
}

/// A kernel that can fill Nyström matrices. Closures `Fn(f64, f64) -> f64`
/// are kernels; structured kernels override [`Kernel::matrix`] with a
/// faster assembly.
pub trait Kernel: Sync {
    fn eval(&self, x: f64, y: f64) -> f64;

    /// Row-major matrix `K(rows[i], cols[j])`.
    fn matrix(&self, rows: &[f64], cols: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; rows.len() * cols.len()];
        out.par_chunks_mut(cols.len().max(1)).zip(rows.par_iter()).for_each(|(row, &x)| {
            for (slot, &y) in row.iter_mut().zip(cols) {
                *slot = self.eval(x, y);
            }
        });
        out
    }

    fn id(&self) -> KernelId {
        KernelId::Generic
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> Kernel for F {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self(x, y)
    }
}

/// Tuning knobs of the adaptive Nyström driver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NystromOptions {
    pub level_cap: u32,
    pub tol: f64,
    pub edge_tol: f64,
    pub max_length_doublings: u32,
}

impl Default for NystromOptions {
    fn default() -> Self {
        NystromOptions { level_cap: LEVEL_CAP, tol: LEVEL_TOL, edge_tol: EDGE_TOL, max_length_doublings: MAX_LENGTH_DOUBLINGS }
    }
}

/// `det(I - W^{1/2} K W^{1/2})` at exactly the given rule, plus the
/// last-panel trace contribution `sum w_i |K(x_i, x_i)|`.
pub fn nystrom_det_fixed<K: Kernel + ?Sized>(kernel: &K, rule: &QuadratureRule) -> (f64, f64) {
    let n = rule.len();
    let mut m = kernel.matrix(&rule.nodes, &rule.nodes);
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let edge: f64 = rule.last_panel().map(|i| rule.weights[i] * m[i * n + i].abs()).sum();
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = -sw[i] * m[i * n + j] * sw[j];
        }
        m[i * n + i] += 1.0;
    }
    (log_det_in_place(&mut m, n).value(), edge)
}

/// Adaptive Nyström determinant starting from `rule`: the level doubles until
/// two consecutive values differ by at most `LEVEL_TOL` or `LEVEL_CAP` is
/// reached (then `converged = false`).
pub fn nystrom_det<K: Kernel + ?Sized>(kernel: &K, rule: &QuadratureRule) -> FredholmResult {
    nystrom_det_with(kernel, rule, &NystromOptions { max_length_doublings: 0, ..Default::default() })
}

/// Like [`nystrom_det`], and additionally doubles the truncation length
/// while the last panel's trace contribution exceeds `edge_tol`.
pub fn nystrom_det_with<K: Kernel + ?Sized>(kernel: &K, rule: &QuadratureRule, opts: &NystromOptions) -> FredholmResult {
    let mut rule = rule.clone();
    let mut doublings = 0;
    let (mut prev, mut edge) = nystrom_det_fixed(kernel, &rule);
    while edge > opts.edge_tol && doublings < opts.max_length_doublings {
        rule = rule.lengthened();
        doublings += 1;
        (prev, edge) = nystrom_det_fixed(kernel, &rule);
    }
    let mut gap = f64::INFINITY;
    while rule.level < opts.level_cap.max(rule.level) {
        rule = rule.refined();
        let (v, _) = nystrom_det_fixed(kernel, &rule);
        gap = (v - prev).abs();
        prev = v;
        if gap <= opts.tol {
            break;
        }
    }
    FredholmResult {
        value: prev,
        level: rule.level,
        richardson_gap: gap,
        kernel_id: kernel.id(),
        length: rule.length,
        converged: gap <= opts.tol,
    }
}

/// Truncated series `1 + sum_{n=1}^{n_max} (-1)^n / n! int det(K(x_i, x_j)) dx`
/// by tensor quadrature on `rule`.
pub fn series_det_oracle<K: Kernel + ?Sized>(kernel: &K, rule: &QuadratureRule, n_max: usize) -> Result<f64> {
    if n_max > SERIES_MAX_TERMS {
        return Err(Error::SizeGuard(format!("series oracle needs n_max <= {SERIES_MAX_TERMS}")));
    }
    let m = rule.len();
    let k = kernel.matrix(&rule.nodes, &rule.nodes);
    let w = &rule.weights;
    let mut total = 1.0;
    let mut fact = 1.0;
    for n in 1..=n_max {
        fact *= n as f64;
        let term: f64 = (0..m)
            .into_par_iter()
            .map(|i0| {
                let mut idx = vec![0; n];
                idx[0] = i0;
                let mut acc = 0.0;
                let mut mat = vec![0.0; n * n];
                loop {
                    let mut wt = 1.0;
                    for a in 0..n {
                        wt *= w[idx[a]];
                        for b in 0..n {
                            mat[a * n + b] = k[idx[a] * m + idx[b]];
                        }
                    }
                    acc += wt * log_det_in_place(&mut mat, n).value();
                    let mut p = n - 1;
                    loop {
                        if p == 0 {
                            return acc;
                        }
                        idx[p] += 1;
                        if idx[p] < m {
                            break;
                        }
                        idx[p] = 0;
                        p -= 1;
                    }
                }
            })
            .sum();
        total += if n % 2 == 1 { -term } else { term } / fact;
    }
    Ok(total)
}

/// Hadamard bound on the series remainder after `n_max` terms for a kernel
/// with `|K(x, y)| <= c1 e^{-c2 x}` on `[s, infinity)`:
/// `sum_{n > n_max} n^{n/2} (c1 e^{-c2 s} / c2)^n / n!`.
pub fn series_tail_bound(n_max: usize, c1: f64, c2: f64, s: f64) -> f64 {
    let a = c1 * (-c2 * s).exp() / c2;
    let mut total = 0.0;
    let mut log_fact = (1..=n_max).map(|k| (k as f64).ln()).sum::<f64>();
    for n in n_max + 1..n_max + 200 {
        let nf = n as f64;
        log_fact += nf.ln();
        let t = (0.5 * nf * nf.ln() + nf * a.ln() - log_fact).exp();
        total += t;
        if t < 1e-300 {
            break;
        }
    }
    total
}
