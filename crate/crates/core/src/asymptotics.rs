//! Scaling limits: `J_N -> Ai` and the convergence of the finite-N
//! distributions to `F_1` (flat) and `F_{2->1}` (half-flat).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::cdf_exact;
use crate::fredholm::contour::ContourSpec;
use crate::fredholm::finite::fredholm_cdf_finite_n;
use crate::fredholm::limits::{f1, f21};
use crate::model::{Geometry, ModelParams};

/// Largest N accepted by the determinant route.
pub const EXACT_ROUTE_MAX_N: usize = 64;
/// Minimal trapezoid nodes for `J_N`.
pub const JN_MIN_M: usize = 512;
/// Distance of the contour's left crossing from 0 in units of `gamma / (2N)^{1/3}`.
pub const JN_EPS: f64 = 1.0;
/// Cap on the left crossing in units of `gamma`.
pub const JN_LEFT_CAP: f64 = 0.6;

/// Circle around `gamma` for `J_N(x)`.
///
/// The left crossing sits at the real saddle `sqrt(gamma^2 - 2 N gamma / y)`
/// of `e^{-z y} ((gamma+z)/(gamma-z))^N`, `y = 2N/gamma + x`, when it exists,
/// and never closer to 0 than `gamma / (2N)^{1/3}` (the width of the
/// critical region) nor further than `0.6 gamma`. The node count grows with
/// `(2N)^{1/3}` so that the critical region stays resolved.
pub fn jn_contour(n: usize, gamma: f64, x: f64) -> Result<ContourSpec> {
    let nf = n as f64;
    let y = 2.0 * nf / gamma + x;
    let saddle = if y > 2.0 * nf / gamma { (gamma * gamma - 2.0 * nf * gamma / y).sqrt() } else { 0.0 };
    let floor = JN_EPS * gamma / (2.0 * nf).cbrt();
    let left = saddle.max(floor).min(JN_LEFT_CAP * gamma);
    let m = JN_MIN_M.max(64 * ((2.0 * nf).cbrt().ceil() as usize).next_power_of_two());
    ContourSpec::new(gamma, gamma - left, m)
}

fn check_jn(n: usize, gamma: f64, x: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", format!("must be positive, got {gamma}")));
    }
    if !x.is_finite() {
        return Err(Error::invalid("x", "must be finite"));
    }
    Ok(())
}

/// `-1/(2 pi i) oint e^{-z (2N/gamma + x)} ((gamma + z)/(gamma - z))^N dz` on `contour`,
/// evaluated with the largest log-magnitude factored out.
pub fn j_n_on(n: usize, gamma: f64, x: f64, contour: &ContourSpec) -> Result<Complex64> {
    check_jn(n, gamma, x)?;
    contour.validate()?;
    if !contour.encloses_point(gamma) || contour.distance(gamma) <= 1e-9 * contour.radius {
        return Err(Error::Contour("contour must enclose the pole at gamma".into()));
    }
    let y = 2.0 * n as f64 / gamma + x;
    let nf = n as f64;
    let (z, dz) = contour.nodes();
    let logs: Vec<Complex64> = z
        .iter()
        .zip(&dz)
        .map(|(z, d)| d.ln() - z * y + nf * ((gamma + z).ln() - (gamma - z).ln()))
        .collect();
    let mx = logs.iter().fold(f64::NEG_INFINITY, |m, l| m.max(l.re));
    let s: Complex64 = logs.iter().map(|l| (l - mx).exp()).sum();
    Ok(-s * mx.exp())
}

/// `J_N(x)` on the default contour.
pub fn j_n(n: usize, gamma: f64, x: f64) -> Result<f64> {
    check_jn(n, gamma, x)?;
    Ok(j_n_on(n, gamma, x, &jn_contour(n, gamma, x)?)?.re)
}

/// `(2N)^{1/3}/gamma * J_N((2N)^{1/3}/gamma * x)`, which tends to `Ai(x)`.
pub fn j_n_rescaled(n: usize, gamma: f64, x: f64) -> Result<f64> {
    check_jn(n, gamma, x)?;
    let c = (2.0 * n as f64).cbrt() / gamma;
    Ok(c * j_n(n, gamma, c * x)?)
}

/// A point of the KPZ scaling: `u_N = 2N/gamma + r N^{1/3}` and the limits
/// `F_1(2^{1/3} gamma r)` (flat) and `F_{2->1}(2^{-1/3} gamma r)` (half-flat).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub r: f64,
    pub n: usize,
    pub gamma: f64,
    pub u_n: f64,
    pub target_flat: f64,
    pub target_half: f64,
}

/// Limit argument for the fluctuation coordinate `r`.
pub fn limit_argument(geometry: Geometry, gamma: f64, r: f64) -> f64 {
    match geometry {
        Geometry::Flat => 2f64.cbrt() * gamma * r,
        Geometry::HalfFlat => gamma * r / 2f64.cbrt(),
    }
}

pub fn limit_value(geometry: Geometry, gamma: f64, r: f64) -> f64 {
    let s = limit_argument(geometry, gamma, r);
    match geometry {
        Geometry::Flat => f1(s),
        Geometry::HalfFlat => f21(s),
    }
}

pub fn scaled_u(n: usize, gamma: f64, r: f64) -> f64 {
    2.0 * n as f64 / gamma + r * (n as f64).cbrt()
}

impl ScalingPoint {
    pub fn new(r: f64, n: usize, gamma: f64) -> Result<Self> {
        check_jn(n, gamma, r)?;
        let u_n = scaled_u(n, gamma, r);
        if u_n <= 0.0 {
            return Err(Error::invalid("r", format!("u_N = {u_n} must be positive")));
        }
        Ok(ScalingPoint {
            r,
            n,
            gamma,
            u_n,
            target_flat: limit_value(Geometry::Flat, gamma, r),
            target_half: limit_value(Geometry::HalfFlat, gamma, r),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    ExactDeterminant,
    FiniteFredholm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub r: f64,
    pub u_n: f64,
    /// `None` when the route broke down numerically at this point.
    pub finite_n_value: Option<f64>,
    pub limit_value: f64,
    pub abs_error: Option<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub geometry: Geometry,
    pub gamma: f64,
    pub route: Route,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// `(N, error)` pairs for one value of `r`, in table order.
    pub fn errors_for(&self, r: f64) -> Vec<(usize, Option<f64>)> {
        self.rows.iter().filter(|row| row.r == r).map(|row| (row.n, row.abs_error)).collect()
    }

    /// Whether the error at `r` is available everywhere and strictly decreasing in N.
    pub fn strictly_decreasing(&self, r: f64) -> bool {
        let e = self.errors_for(r);
        e.iter().all(|(_, x)| x.is_some()) && e.windows(2).all(|p| p[1].1.unwrap() < p[0].1.unwrap())
    }

    /// Least-squares slope of log(error) against log(N) at `r`.
    pub fn fitted_slope(&self, r: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .errors_for(r)
            .into_iter()
            .filter_map(|(n, e)| e.filter(|e| *e > 0.0).map(|e| ((n as f64).ln(), e.ln())))
            .collect();
        log_log_slope(&pts)
    }
}

pub fn log_log_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Finite-N CDF at `u` by the chosen route.
pub fn finite_n_cdf(params: &ModelParams, u: f64, route: Route) -> Result<f64> {
    match route {
        Route::ExactDeterminant => cdf_exact(params, u),
        Route::FiniteFredholm => Ok(fredholm_cdf_finite_n(params, u)?.value),
    }
}

/// Compares `P(tau <= u_N)` in the i.i.d. model with the limiting
/// distribution for every `(N, r)`; rows are ordered by N, then r.
/// Numerical breakdowns of the route are recorded per row; invalid input
/// is an error.
pub fn convergence_study(
    geometry: Geometry,
    gamma: f64,
    r_grid: &[f64],
    n_list: &[usize],
    route: Route,
) -> Result<ConvergenceTable> {
    if r_grid.is_empty() || n_list.is_empty() {
        return Err(Error::invalid("grid", "r_grid and n_list must be nonempty"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", format!("must be positive, got {gamma}")));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n == 0 || (route == Route::ExactDeterminant && n > EXACT_ROUTE_MAX_N)) {
        return Err(Error::invalid("n_list", format!("N = {n} outside the route's range")));
    }
    let limits: Vec<f64> = r_grid.par_iter().map(|&r| limit_value(geometry, gamma, r)).collect();
    let cells: Vec<(usize, usize)> = n_list.iter().flat_map(|&n| (0..r_grid.len()).map(move |k| (n, k))).collect();
    let rows = cells
        .par_iter()
        .map(|&(n, k)| -> Result<ConvergenceRow> {
            let r = r_grid[k];
            let u_n = scaled_u(n, gamma, r);
            if u_n <= 0.0 {
                return Err(Error::invalid("r_grid", format!("u_N = {u_n} <= 0 at N = {n}, r = {r}")));
            }
            let params = ModelParams::iid(geometry, n, gamma)?;
            let (value, note) = match finite_n_cdf(&params, u_n, route) {
                Ok(v) => (Some(v), None),
                Err(e) if e.is_numerical() => (None, Some(e.to_string())),
                Err(e) => return Err(e),
            };
            Ok(ConvergenceRow {
                n,
                r,
                u_n,
                finite_n_value: value,
                limit_value: limits[k],
                abs_error: value.map(|v| (v - limits[k]).abs()),
                note,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { geometry, gamma, route, rows })
}
