//! Acceptance suite shared by the `acceptance` test target and `lpplab selftest`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{convergence_study, j_n_on, j_n_rescaled, jn_contour, log_log_slope, Route};
use crate::error::Result;
use crate::exact::{cdf_exact, simplex_integral_oracle};
use crate::fredholm::contour::ContourSpec;
use crate::fredholm::finite::{default_contours, finite_n_kernel, fredholm_cdf_finite_n};
use crate::fredholm::limits::{f1_result, f21_result, kernel_airy2};
use crate::fredholm::{nystrom_det, PANEL_POINTS};
use crate::model::{Geometry, ModelParams};
use crate::quadrature::QuadratureRule;
use crate::sim::estimate_cdf;
use crate::special::{airy, airy_ai, airy_ai_prime, series_branch, AI0, AIP0, X_SWITCH};

pub const CRITERIA: [(u32, &str); 9] = [
    (1, "fredholm determinant equals exact CDF"),
    (2, "exact CDF equals simplex integral"),
    (3, "exact CDF matches Monte Carlo"),
    (4, "rescaled J_N converges to Ai"),
    (5, "flat CDF converges to F1"),
    (6, "half-flat CDF converges to F2->1"),
    (7, "Fredholm engine consistency"),
    (8, "special functions"),
    (9, "contour robustness"),
];

const SEED: u64 = 20_240_611;
const MC_SAMPLES: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.1}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

/// Runs one criterion; an unknown id yields a failed report.
pub fn run_criterion(id: u32) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => c1_identity(),
        2 => c2_simplex(),
        3 => c3_monte_carlo(),
        4 => c4_airy_limit(),
        5 => convergence(Geometry::Flat),
        6 => convergence(Geometry::HalfFlat),
        7 => c7_engine(),
        8 => c8_special(),
        9 => c9_contours(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1).to_string();
    CriterionReport { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c.0)).collect()
}

type Outcome = Result<(bool, String)>;

fn random_params(rng: &mut ChaCha8Rng, geometry: Geometry, n: usize) -> Result<ModelParams> {
    loop {
        let v: Vec<f64> = (0..2 * n).map(|_| rng.random_range(0.3..1.5)).collect();
        let spread = v.iter().enumerate().all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).abs() >= 0.05));
        if spread {
            return ModelParams::new(geometry, v[..n].to_vec(), v[n..].to_vec());
        }
    }
}

fn c1_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for g in [Geometry::Flat, Geometry::HalfFlat] {
        for n in 1..=3 {
            let p = random_params(&mut rng, g, n)?;
            for u in [1.0, 2.0, 4.0] {
                worst = worst.max((fredholm_cdf_finite_n(&p, u)?.value - cdf_exact(&p, u)?).abs());
            }
        }
    }
    Ok((worst <= 1e-6, format!("max |det - exact| = {worst:.2e}")))
}

fn fixed_params(g: Geometry, n: usize) -> Result<ModelParams> {
    match n {
        1 => ModelParams::new(g, vec![0.7], vec![1.2]),
        2 => ModelParams::new(g, vec![0.6, 1.0], vec![0.8, 1.3]),
        _ => ModelParams::new(g, vec![0.5, 0.9, 1.3], vec![0.7, 1.1, 1.45]),
    }
}

fn c2_simplex() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in [Geometry::Flat, Geometry::HalfFlat] {
        for n in 1..=2 {
            let p = fixed_params(g, n)?;
            for u in [0.5, 2.0, 5.0] {
                worst = worst.max((cdf_exact(&p, u)? - simplex_integral_oracle(&p, u)?).abs());
            }
        }
    }
    Ok((worst <= 1e-6, format!("max |exact - simplex| = {worst:.2e}")))
}

/// Smallest u with `cdf_exact(u) >= q`, by bisection.
fn quantile(p: &ModelParams, q: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    while cdf_exact(p, hi)? < q {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if cdf_exact(p, mid)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn c3_monte_carlo() -> Outcome {
    let (mut ok, mut total) = (0, 0);
    let mut worst_z: f64 = 0.0;
    for g in [Geometry::Flat, Geometry::HalfFlat] {
        for n in 1..=3 {
            let p = fixed_params(g, n)?;
            let (a, b) = (quantile(&p, 0.05)?, quantile(&p, 0.95)?);
            let grid: Vec<f64> = (0..10).map(|k| a + (b - a) * k as f64 / 9.0).collect();
            for est in estimate_cdf(&p, &grid, MC_SAMPLES, SEED + n as u64)? {
                let z = (est.p_hat - cdf_exact(&p, est.u)?).abs() / est.stderr.max(1e-12);
                worst_z = worst_z.max(z);
                ok += usize::from(z <= 4.0);
                total += 1;
            }
        }
    }
    let frac = ok as f64 / total as f64;
    Ok((frac >= 0.95, format!("{ok}/{total} points within 4 stderr, max z = {worst_z:.2}")))
}

fn c4_airy_limit() -> Outcome {
    let ns = [100usize, 1000, 10000];
    let mut errs = Vec::new();
    for &n in &ns {
        let mut e: f64 = 0.0;
        for x in -2..=4 {
            e = e.max((j_n_rescaled(n, 0.5, x as f64)? - airy_ai(x as f64)).abs());
        }
        errs.push(e);
    }
    let pts: Vec<(f64, f64)> = ns.iter().zip(&errs).map(|(&n, &e)| ((n as f64).ln(), e.ln())).collect();
    let slope = log_log_slope(&pts).unwrap_or(f64::NAN);
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    Ok((decreasing && slope <= -0.25, format!("sup errors {:.2e} {:.2e} {:.2e}, slope {slope:.3}", errs[0], errs[1], errs[2])))
}

fn convergence(g: Geometry) -> Outcome {
    let rs = [-1.0, 0.0, 1.0];
    let t = convergence_study(g, 0.5, &rs, &[4, 8, 16, 32], Route::FiniteFredholm)?;
    let mut parts = Vec::new();
    let mut passed = true;
    for r in rs {
        passed &= t.strictly_decreasing(r);
        let errs: Vec<String> = t
            .errors_for(r)
            .iter()
            .map(|(_, e)| e.map_or("n/a".to_string(), |e| format!("{e:.2e}")))
            .collect();
        parts.push(format!("r={r}: [{}]", errs.join(" ")));
    }
    Ok((passed, format!("errors at N=4,8,16,32 {}", parts.join("; "))))
}

fn c7_engine() -> Outcome {
    let mut worst_gap: f64 = 0.0;
    for s in -4..=2 {
        for r in [f1_result(s as f64), f21_result(s as f64)] {
            worst_gap = worst_gap.max(r.richardson_gap);
        }
    }
    let rank_one = |x: f64, y: f64| (-x - y).exp();
    let r1 = nystrom_det(&rank_one, &QuadratureRule::composite(0.0, 40.0, 2, PANEL_POINTS)).value;
    let mut diag: f64 = 0.0;
    for x in [0.0f64, 1.0, 2.0] {
        diag = diag.max((kernel_airy2(x, x) - (airy_ai_prime(x).powi(2) - x * airy_ai(x).powi(2))).abs());
    }
    let passed = worst_gap <= 1e-8 && (r1 - 0.5).abs() <= 1e-10 && diag <= 1e-8;
    Ok((passed, format!("level gap {worst_gap:.2e}, rank-one {:.2e}, diagonal {diag:.2e}", (r1 - 0.5).abs())))
}

fn c8_special() -> Outcome {
    let e0 = (airy_ai(0.0) - AI0).abs().max((airy_ai_prime(0.0) + AIP0).abs());
    let h = 1e-4;
    let mut ode: f64 = 0.0;
    for k in 0..50 {
        let x = -6.0 + 12.0 * k as f64 / 49.0;
        let d2 = (airy_ai(x + h) - 2.0 * airy_ai(x) + airy_ai(x - h)) / (h * h);
        ode = ode.max((d2 - x * airy_ai(x)).abs());
    }
    let mut seam: f64 = 0.0;
    for x in [X_SWITCH, -X_SWITCH] {
        let (ai, aip, _) = series_branch(x);
        let sd = airy(x + x.signum() * 1e-15);
        seam = seam.max((ai - sd.ai).abs()).max((aip - sd.ai_prime).abs());
    }
    let passed = e0 <= 1e-10 && ode <= 1e-6 && seam <= 1e-11;
    Ok((passed, format!("closed forms {e0:.2e}, ODE residual {ode:.2e}, seam {seam:.2e}")))
}

fn c9_contours() -> Outcome {
    let p = fixed_params(Geometry::Flat, 2)?;
    let ph = p.with_geometry(Geometry::HalfFlat);
    let (g1, g2) = default_contours(&p, 256)?;
    let (lo, hi) = p.param_range();
    let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let alt = (ContourSpec::new(c, h + 0.3 * lo, 256)?, ContourSpec::new(c, h + 0.7 * lo, 256)?);
    let mut kern: f64 = 0.0;
    for params in [&p, &ph] {
        for (l, x) in [(0.0, 0.0), (0.5, 2.0), (2.0, 1.0)] {
            let base = finite_n_kernel(params, 2.0, (&g1, &g2), l, x)?;
            let moved = finite_n_kernel(params, 2.0, (&alt.0, &alt.1), l, x)?;
            let dbl = finite_n_kernel(params, 2.0, (&g1.with_m(512), &g2.with_m(512)), l, x)?;
            kern = kern.max((base - moved).abs()).max((base - dbl).abs());
        }
    }
    let mut jn: f64 = 0.0;
    for x in [-1.0, 0.0, 2.0] {
        let base = jn_contour(100, 0.5, x)?;
        let v = j_n_on(100, 0.5, x, &base)?.re;
        let moved = j_n_on(100, 0.5, x, &ContourSpec::new(0.5, 0.25, base.m)?)?.re;
        let dbl = j_n_on(100, 0.5, x, &base.with_m(2 * base.m))?.re;
        jn = jn.max((v - moved).abs()).max((v - dbl).abs());
    }
    Ok((kern <= 1e-9 && jn <= 1e-9, format!("kernel spread {kern:.2e}, J_N spread {jn:.2e}")))
}
