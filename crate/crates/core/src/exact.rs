//! Exact finite-N distribution functions as determinant ratios
//! `det(H_u(alpha_i, beta_j)) / det(1 / (alpha_i + beta_j))`, the
//! continuous Schur functions, and a direct simplex-integration oracle.

use crate::error::{Error, Result};
use crate::linalg::{log_det_in_place, LogDet};
use crate::model::{pairwise_distinct, Geometry, ModelParams};
use crate::quadrature::gauss_legendre;

/// Below this value of `u |z - w|` the difference quotient uses its Taylor series.
pub const TAYLOR_THRESHOLD: f64 = 1e-6;
/// Tolerance for clamping a determinant ratio into [0, 1].
pub const CLAMP_TOL: f64 = 1e-9;
/// Relative perturbation used for coincident parameters.
pub const PERTURBATION: f64 = 1e-4;
/// Maximal disagreement of the two Richardson estimates.
pub const RICHARDSON_TOL: f64 = 1e-6;
/// Gauss-Legendre order per axis of the simplex oracle (checked against twice this).
pub const SIMPLEX_POINTS: usize = 48;
pub const SIMPLEX_REFINE_TOL: f64 = 1e-7;
pub const SIMPLEX_MAX_N: usize = 3;

/// `(e^{-a} - e^{-b}) / (b - a)`, symmetric and stable for a close to b.
fn decay_quotient(a: f64, b: f64) -> f64 {
    let t = (b - a).abs();
    let q = if t < TAYLOR_THRESHOLD { 1.0 - 0.5 * t + t * t / 6.0 } else { -(-t).exp_m1() / t };
    (-a.min(b)).exp() * q
}

/// Flat: `e^{-u(z+w)} int_0^u (e^{zx}-e^{-zx})(e^{wx}-e^{-wx}) dx`.
/// Half-flat: `e^{-u(z+w)} int_0^u (e^{zx}-e^{-zx}) e^{wx} dx`.
/// Both tend to `1/(z+w)` as `u -> infinity`.
pub fn h_entry(geometry: Geometry, u: f64, z: f64, w: f64) -> Result<f64> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::invalid("u", format!("must be finite and >= 0, got {u}")));
    }
    if !(z > 0.0 && w > 0.0) {
        return Err(Error::invalid("z,w", "arguments must be positive"));
    }
    let s = z + w;
    let lead = -(-u * s).exp_m1() / s;
    Ok(match geometry {
        Geometry::Flat => {
            lead * (1.0 + (-u * s).exp())
                - u * (decay_quotient(2.0 * u * w, u * s) + decay_quotient(2.0 * u * z, u * s))
        }
        Geometry::HalfFlat => lead - u * decay_quotient(2.0 * u * z, u * s),
    })
}

/// `H_u(alpha_i, beta_j)` with per-row log factors pulled out:
/// entry = `scaled[i][j] * exp(row_log_scale[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelEntryMatrix {
    pub n: usize,
    pub u: f64,
    pub geometry: Geometry,
    pub scaled: Vec<f64>,
    pub row_log_scale: Vec<f64>,
}

impl KernelEntryMatrix {
    pub fn new(geometry: Geometry, u: f64, alpha: &[f64], beta: &[f64]) -> Result<Self> {
        let n = alpha.len();
        let mut scaled = Vec::with_capacity(n * n);
        let mut row_log_scale = Vec::with_capacity(n);
        for &a in alpha {
            let row: Vec<f64> = beta.iter().map(|&b| h_entry(geometry, u, a, b)).collect::<Result<_>>()?;
            let m = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let ls = if m > 0.0 { m.ln() } else { 0.0 };
            scaled.extend(row.iter().map(|x| x * (-ls).exp()));
            row_log_scale.push(ls);
        }
        Ok(KernelEntryMatrix { n, u, geometry, scaled, row_log_scale })
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.scaled[i * self.n + j] * self.row_log_scale[i].exp()
    }

    pub fn log_det(&self) -> LogDet {
        let mut a = self.scaled.clone();
        let ld = log_det_in_place(&mut a, self.n);
        LogDet { log_abs: ld.log_abs + self.row_log_scale.iter().sum::<f64>(), sign: ld.sign }
    }
}

/// Log of the Cauchy determinant `det(1/(alpha_i + beta_j))` from the product formula.
pub fn cauchy_log_det(alpha: &[f64], beta: &[f64]) -> Result<LogDet> {
    if alpha.len() != beta.len() {
        return Err(Error::invalid("beta", "length differs from alpha"));
    }
    let n = alpha.len();
    let (mut log_abs, mut sign) = (0.0, 1.0);
    for i in 0..n {
        for j in i + 1..n {
            for d in [alpha[i] - alpha[j], beta[i] - beta[j]] {
                if d == 0.0 {
                    return Ok(LogDet { log_abs: f64::NEG_INFINITY, sign: 0.0 });
                }
                log_abs += d.abs().ln();
                if d < 0.0 {
                    sign = -sign;
                }
            }
        }
    }
    for &a in alpha {
        for &b in beta {
            if a + b <= 0.0 {
                return Err(Error::invalid("alpha,beta", "all alpha_i + beta_j must be positive"));
            }
            log_abs -= (a + b).ln();
        }
    }
    Ok(LogDet { log_abs, sign })
}

pub fn cauchy_det(alpha: &[f64], beta: &[f64]) -> Result<f64> {
    Ok(cauchy_log_det(alpha, beta)?.value())
}

fn ratio(geometry: Geometry, u: f64, alpha: &[f64], beta: &[f64]) -> Result<f64> {
    if u == 0.0 {
        return Ok(0.0);
    }
    let num = KernelEntryMatrix::new(geometry, u, alpha, beta)?.log_det();
    let den = cauchy_log_det(alpha, beta)?;
    if den.sign == 0.0 {
        return Err(Error::Degenerate("Cauchy determinant vanishes".into()));
    }
    Ok(if num.sign == 0.0 { 0.0 } else { num.sign * den.sign * (num.log_abs - den.log_abs).exp() })
}

fn accept_probability(v: f64) -> Result<f64> {
    if !v.is_finite() || !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
        return Err(Error::Breakdown(format!("determinant ratio {v} outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Exact CDF `P(tau <= u)` as a determinant ratio.
///
/// Coincident parameters (in particular the i.i.d. case) are handled by
/// shifting `alpha_k += k eps`, `beta_k += (k+N) eps` with
/// `eps = 1e-4 * scale` and Richardson extrapolation from `eps` and `2 eps`.
/// A third level `4 eps` guards the extrapolation: when the two
/// extrapolants disagree by more than [`RICHARDSON_TOL`] the Cauchy matrix
/// is too ill-conditioned and a breakdown is reported.
pub fn cdf_exact(params: &ModelParams, u: f64) -> Result<f64> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::invalid("u", format!("must be finite and >= 0, got {u}")));
    }
    let (alpha, beta, g) = (params.alpha(), params.beta(), params.geometry());
    if pairwise_distinct(alpha) && pairwise_distinct(beta) && params.iid_gamma().is_none() {
        return accept_probability(ratio(g, u, alpha, beta)?);
    }
    let n = params.n();
    let scale = params
        .iid_gamma()
        .unwrap_or_else(|| alpha.iter().chain(beta).sum::<f64>() / (2 * n) as f64);
    let eps = PERTURBATION * scale;
    let at = |e: f64| -> Result<f64> {
        let a: Vec<f64> = alpha.iter().enumerate().map(|(k, x)| x + (k + 1) as f64 * e).collect();
        let b: Vec<f64> = beta.iter().enumerate().map(|(k, x)| x + (k + 1 + n) as f64 * e).collect();
        ratio(g, u, &a, &b)
    };
    let (f1, f2, f4) = (at(eps)?, at(2.0 * eps)?, at(4.0 * eps)?);
    let r1 = 2.0 * f1 - f2;
    let r2 = 2.0 * f2 - f4;
    if !r1.is_finite() || (r1 - r2).abs() > RICHARDSON_TOL {
        return Err(Error::Breakdown(format!(
            "perturbed determinant ratio unstable at N = {n}: extrapolants {r1} and {r2}"
        )));
    }
    accept_probability(r1)
}

/// Spectral parameters and ordered nonnegative arguments of a continuous Schur function.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurPoint {
    alpha: Vec<f64>,
    x: Vec<f64>,
}

impl SchurPoint {
    pub fn new(alpha: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if alpha.len() != x.len() || alpha.is_empty() {
            return Err(Error::invalid("x", "alpha and x must have the same positive length"));
        }
        if x.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || x.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::invalid("x", "need x_1 >= x_2 >= ... >= x_N >= 0"));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        if !pairwise_distinct(&alpha) {
            return Err(Error::Degenerate("spectral parameters must be pairwise distinct".into()));
        }
        Ok(SchurPoint { alpha, x })
    }
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
    pub fn x(&self) -> &[f64] {
        &self.x
    }
}

/// `log |prod_{i<j} (a_i - a_j)|` and its sign.
fn vandermonde(a: &[f64]) -> LogDet {
    let (mut l, mut s) = (0.0, 1.0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let d = a[i] - a[j];
            l += d.abs().ln();
            if d < 0.0 {
                s = -s;
            }
        }
    }
    LogDet { log_abs: l, sign: s }
}

/// Row-log-scaled determinant of `entry(alpha_j, x_i)`; `scale(x_i)` is the row factor.
fn scaled_det(alpha: &[f64], x: &[f64], scale: impl Fn(f64) -> f64, entry: impl Fn(f64, f64, f64) -> f64) -> LogDet {
    let n = alpha.len();
    let mut m = Vec::with_capacity(n * n);
    let mut shift = 0.0;
    for &xi in x {
        let s = scale(xi);
        shift += s;
        m.extend(alpha.iter().map(|&a| entry(a, xi, s)));
    }
    let ld = log_det_in_place(&mut m, n);
    LogDet { log_abs: ld.log_abs + shift, sign: ld.sign }
}

pub(crate) fn schur_log(alpha: &[f64], x: &[f64]) -> LogDet {
    let amax = alpha.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a));
    let amin = alpha.iter().fold(f64::INFINITY, |m, &a| m.min(a));
    let d = scaled_det(alpha, x, |xi| (amax * xi).max(amin * xi), |a, xi, s| (a * xi - s).exp());
    let v = vandermonde(alpha);
    LogDet { log_abs: d.log_abs - v.log_abs, sign: d.sign * v.sign }
}

pub(crate) fn sp_schur_log(alpha: &[f64], x: &[f64]) -> LogDet {
    let amax = alpha.iter().fold(0.0f64, |m, &a| m.max(a.abs()));
    let d = scaled_det(alpha, x, |xi| amax * xi, |a, xi, s| (a * xi - s).exp() - (-a * xi - s).exp());
    let mut den = vandermonde(alpha);
    for i in 0..alpha.len() {
        for j in i..alpha.len() {
            let p = alpha[i] + alpha[j];
            den.log_abs += p.abs().ln();
            if p < 0.0 {
                den.sign = -den.sign;
            }
        }
    }
    LogDet { log_abs: d.log_abs - den.log_abs, sign: d.sign * den.sign }
}

/// `det(e^{alpha_j x_i}) / prod_{i<j}(alpha_i - alpha_j)`.
pub fn schur_cont(p: &SchurPoint) -> f64 {
    schur_log(&p.alpha, &p.x).value()
}

/// `det(e^{alpha_j x_i} - e^{-alpha_j x_i}) / (prod_{i<j}(alpha_i - alpha_j) prod_{i<=j}(alpha_i + alpha_j))`.
pub fn sp_schur_cont(p: &SchurPoint) -> f64 {
    sp_schur_log(&p.alpha, &p.x).value()
}

/// Integral over `0 <= y_1 <= ... <= y_N <= top` by nested substitution
/// `y_N = top t_N`, `y_k = y_{k+1} t_k`, with `q` Gauss-Legendre points per axis.
fn ordered_integral(n: usize, top: f64, q: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let (gx, gw) = gauss_legendre(q);
    fn rec(k: usize, upper: f64, y: &mut Vec<f64>, gx: &[f64], gw: &[f64], f: &dyn Fn(&[f64]) -> f64) -> f64 {
        let mut total = 0.0;
        for (x, w) in gx.iter().zip(gw) {
            let v = 0.5 * upper * (x + 1.0);
            y[k] = v;
            let inner = if k == 0 { f(y) } else { rec(k - 1, v, y, gx, gw, f) };
            total += 0.5 * upper * w * inner;
        }
        total
    }
    let mut y = vec![0.0; n];
    rec(n - 1, top, &mut y, &gx, &gw, f)
}

/// Direct quadrature of the multiple-integral representation
/// `e^{-u sum(alpha+beta)} int_{0<=x_N<=...<=x_1<=u} sp_alpha(x) (sp_beta or s_beta)(x) dx`,
/// normalized by the same expression at `u -> infinity`.
///
/// The integral runs in `y_i = u - x_i`; the integrand decays like
/// `e^{-(min alpha + min beta) y_N}`, so the region is cut at
/// `Y = 40 / (min alpha + min beta)`. The normalization is the same
/// quadrature at `u_inf = Y + 40 / min(alpha, beta)`, where the CDF equals
/// 1 up to `e^{-40}`.
pub fn simplex_integral_oracle(params: &ModelParams, u: f64) -> Result<f64> {
    let n = params.n();
    if n > SIMPLEX_MAX_N {
        return Err(Error::SizeGuard(format!("simplex oracle needs N <= {SIMPLEX_MAX_N}, got {n}")));
    }
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::invalid("u", format!("must be finite and >= 0, got {u}")));
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    if !pairwise_distinct(alpha) || !pairwise_distinct(beta) || params.iid_gamma().is_some() {
        return Err(Error::Degenerate("simplex oracle needs distinct alpha and distinct beta".into()));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let amin = alpha.iter().fold(f64::INFINITY, |m, &a| m.min(a));
    let bmin = beta.iter().fold(f64::INFINITY, |m, &b| m.min(b));
    let cut = 40.0 / (amin + bmin);
    let u_inf = cut + 40.0 / amin.min(bmin);
    let shift: f64 = alpha.iter().chain(beta).sum();
    let geometry = params.geometry();
    let z = |v: f64, q: usize| {
        let integrand = |y: &[f64]| {
            let x: Vec<f64> = y.iter().map(|yi| v - yi).collect();
            let a = sp_schur_log(alpha, &x);
            let b = match geometry {
                Geometry::Flat => sp_schur_log(beta, &x),
                Geometry::HalfFlat => schur_log(beta, &x),
            };
            let s = a.sign * b.sign;
            if s == 0.0 {
                0.0
            } else {
                s * (a.log_abs + b.log_abs - v * shift).exp()
            }
        };
        ordered_integral(n, v.min(cut), q, &integrand)
    };
    let estimate = |q: usize| z(u, q) / z(u_inf, q);
    let coarse = estimate(SIMPLEX_POINTS);
    let fine = estimate(2 * SIMPLEX_POINTS);
    if (coarse - fine).abs() >= SIMPLEX_REFINE_TOL {
        return Err(Error::Breakdown(format!(
            "simplex quadrature not converged: {coarse} vs {fine} after doubling"
        )));
    }
    Ok(fine)
}
