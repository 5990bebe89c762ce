//! Airy function Ai and its derivative on the real line.
//!
//! |x| <= [`X_SWITCH`]: Maclaurin series `Ai = c1 f(x) - c2 g(x)`.
//! Beyond the seam the contour integral is evaluated directly along
//! steepest-descent rays through the saddle point with Gauss-Legendre
//! quadrature, which is accurate to a few ulps at any |x|.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::quadrature::gauss_legendre;

/// Crossover between the series and the saddle-path branches. Beyond
/// |x| = 2.5 cancellation in the series costs more than the quadrature.
pub const X_SWITCH: f64 = 2.5;
/// Hard cap on series terms; |x| = 2.5 needs about 30.
pub const SERIES_MAX_TERMS: usize = 200;
/// Gauss-Legendre order along each steepest-descent ray.
pub const SADDLE_POINTS: usize = 64;
/// Depth (in units of the exponent) at which rays are truncated.
pub const SADDLE_DEPTH: f64 = 40.0;

/// Ai(0) = 3^(-2/3) / Gamma(2/3).
pub const AI0: f64 = 0.355_028_053_887_817_2;
/// -Ai'(0) = 3^(-1/3) / Gamma(1/3).
pub const AIP0: f64 = 0.258_819_403_792_806_8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AiryMethod {
    Series,
    /// Saddle-path quadrature for x > X_SWITCH.
    AsymptoticPositive,
    /// Saddle-path quadrature for x < -X_SWITCH.
    AsymptoticNegative,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AiryEvaluation {
    pub x: f64,
    pub ai: f64,
    pub ai_prime: f64,
    pub method: AiryMethod,
    pub est_abs_err: f64,
}

pub fn method_for(x: f64) -> AiryMethod {
    if x > X_SWITCH {
        AiryMethod::AsymptoticPositive
    } else if x < -X_SWITCH {
        AiryMethod::AsymptoticNegative
    } else {
        AiryMethod::Series
    }
}

/// Ai(x) and Ai'(x) with method and error estimate.
///
/// # Panics
/// On non-finite input.
pub fn airy(x: f64) -> AiryEvaluation {
    assert!(x.is_finite(), "airy: argument must be finite, got {x}");
    let method = method_for(x);
    let (ai, ai_prime, est_abs_err) = match method {
        AiryMethod::Series => series_branch(x),
        AiryMethod::AsymptoticPositive => {
            let (a, d) = saddle_positive(x);
            (a, d, 4.0 * f64::EPSILON * a.abs().max(d.abs()))
        }
        AiryMethod::AsymptoticNegative => {
            let (a, d) = saddle_negative(x);
            (a, d, 16.0 * f64::EPSILON * (1.0 + x.abs().sqrt()))
        }
    };
    AiryEvaluation { x, ai, ai_prime, method, est_abs_err }
}

pub fn airy_ai(x: f64) -> f64 {
    airy(x).ai
}

pub fn airy_ai_prime(x: f64) -> f64 {
    airy(x).ai_prime
}

/// Maclaurin series branch: (Ai, Ai', rounding estimate). Valid at any x,
/// accurate for moderate |x|.
pub fn series_branch(x: f64) -> (f64, f64, f64) {
    let x3 = x * x * x;
    // f = sum a_k x^{3k}, g = sum b_k x^{3k+1} and their derivatives.
    let (mut f, mut g, mut df, mut dg) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut tf, mut tg, mut tdf, mut tdg) = (1.0f64, x, 0.5 * x * x, 1.0f64);
    let mut biggest: f64 = 1.0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        f += tf;
        g += tg;
        if k > 0 {
            df += tdf;
        }
        dg += tdg;
        biggest = biggest.max(tf.abs()).max(tg.abs()).max(tdf.abs()).max(tdg.abs());
        let small = 1e-18 * (1.0 + f.abs() + g.abs() + df.abs() + dg.abs());
        if k > 2 && tf.abs() < small && tg.abs() < small && tdf.abs() < small && tdg.abs() < small {
            break;
        }
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        if k > 0 {
            tdf *= x3 / ((3.0 * kf) * (3.0 * kf + 2.0));
        }
        tdg *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
    }
    let ai = AI0 * f - AIP0 * g;
    let aip = AI0 * df - AIP0 * dg;
    (ai, aip, 8.0 * f64::EPSILON * biggest)
}

fn nodes() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(SADDLE_POINTS))
}

/// Saddle-path branch for x > 0: integrate along z = sqrt(x) + i t.
pub fn saddle_positive(x: f64) -> (f64, f64) {
    let s = x.sqrt();
    let zeta = 2.0 / 3.0 * x * s;
    let t_max = (SADDLE_DEPTH / s).sqrt();
    let (gx, gw) = nodes();
    let (mut a, mut d) = (0.0, 0.0);
    for (xi, wi) in gx.iter().zip(gw) {
        let t = 0.5 * t_max * (xi + 1.0);
        let w = 0.5 * t_max * wi;
        let damp = (-s * t * t).exp();
        let (sn, cs) = (t * t * t / 3.0).sin_cos();
        a += w * damp * cs;
        d += w * damp * (s * cs + t * sn);
    }
    let pre = (-zeta).exp() / PI;
    (pre * a, -pre * d)
}

/// Saddle-path branch for x < 0: two rays from the saddle i sqrt(-x),
/// the lower half of the contour by conjugate symmetry.
pub fn saddle_negative(x: f64) -> (f64, f64) {
    let big_x = -x;
    let z0 = Complex64::new(0.0, big_x.sqrt());
    let phi = |z: Complex64| z * z * z / 3.0 + big_x * z;
    let phi0 = phi(z0);
    let (gx, gw) = nodes();
    let mut tot_a = Complex64::new(0.0, 0.0);
    let mut tot_d = Complex64::new(0.0, 0.0);
    for (theta, sgn) in [(PI / 4.0, 1.0), (9.0 * PI / 8.0, -1.0)] {
        let e = Complex64::from_polar(1.0, theta);
        let mut t_max = 1.0;
        while (phi(z0 + e * t_max) - phi0).re > -SADDLE_DEPTH {
            t_max *= 1.2;
        }
        for (xi, wi) in gx.iter().zip(gw) {
            let t = 0.5 * t_max * (xi + 1.0);
            let z = z0 + e * t;
            let v = phi(z).exp() * e * (0.5 * t_max * wi);
            tot_a += sgn * v;
            tot_d += sgn * v * (-z);
        }
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    (2.0 * (tot_a / two_pi_i).re, 2.0 * (tot_d / two_pi_i).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Taylor propagation of y'' = x y from the origin,
    /// using y^(k+2) = x y^(k) + k y^(k-1).
    fn taylor_oracle(target: f64) -> (f64, f64) {
        let (mut y, mut dy) = (AI0, -AIP0);
        let mut x0 = 0.0;
        let steps = (target.abs() / 0.125).ceil().max(1.0) as usize;
        let h = target / steps as f64;
        for _ in 0..steps {
            let mut d = vec![0.0; 60];
            d[0] = y;
            d[1] = dy;
            for k in 0..58 {
                d[k + 2] = x0 * d[k] + if k >= 1 { k as f64 * d[k - 1] } else { 0.0 };
            }
            let (mut ny, mut ndy, mut fact) = (0.0, 0.0, 1.0);
            for k in 0..59 {
                if k > 0 {
                    fact *= k as f64;
                }
                let hk = h.powi(k as i32) / fact;
                ny += d[k] * hk;
                ndy += d[k + 1] * hk;
            }
            y = ny;
            dy = ndy;
            x0 += h;
        }
        (y, dy)
    }

    /// Large-x asymptotic expansion truncated at its smallest term (test-only oracle).
    fn asymptotic_oracle(x: f64) -> (f64, f64) {
        let zeta = 2.0 / 3.0 * x.powf(1.5);
        let (mut su, mut sv, mut uk, mut last) = (1.0, 1.0, 1.0, f64::INFINITY);
        for k in 1..40 {
            let kf = k as f64;
            uk *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            let vk = -uk * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
            let term = uk / zeta.powi(k);
            if term > last {
                break;
            }
            last = term;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            su += sign * term;
            sv += sign * vk / zeta.powi(k);
        }
        let e = (-zeta).exp() / (2.0 * PI.sqrt());
        (e * su / x.powf(0.25), -e * x.powf(0.25) * sv)
    }

    #[test]
    fn closed_forms_at_zero() {
        assert!((airy_ai(0.0) - 0.355028053887817).abs() < 1e-14);
        assert!((airy_ai_prime(0.0) + 0.258819403792807).abs() < 1e-14);
    }

    #[test]
    fn matches_taylor_oracle_on_minus12_to_4() {
        let mut x = -12.0;
        while x <= 4.5 {
            let e = airy(x);
            let (a, d) = taylor_oracle(x);
            assert!((e.ai - a).abs() < 1e-12, "Ai({x}): {} vs {a}", e.ai);
            assert!((e.ai_prime - d).abs() < 1e-11, "Ai'({x}): {} vs {d}", e.ai_prime);
            x += 0.37;
        }
    }

    #[test]
    fn matches_asymptotic_oracle_for_large_x() {
        for x in [6.0, 8.0] {
            let e = airy(x);
            let (a, d) = asymptotic_oracle(x);
            assert!((e.ai - a).abs() <= 1e-13, "Ai({x})");
            assert!((e.ai_prime - d).abs() <= 1e-13, "Ai'({x})");
        }
        for x in [12.0, 20.0, 50.0] {
            let e = airy(x);
            let (a, d) = asymptotic_oracle(x);
            assert!((e.ai - a).abs() <= 1e-12 * a.abs(), "Ai({x})");
            assert!((e.ai_prime - d).abs() <= 1e-12 * d.abs(), "Ai'({x})");
        }
        assert_eq!(airy_ai(1e4), 0.0);
    }

    #[test]
    fn first_zero() {
        let (mut lo, mut hi) = (-2.4, -2.3);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if series_branch(mid).0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((lo + 2.338107410459767).abs() < 1e-12);
        assert!(airy_ai(lo).abs() < 1e-10);
    }

    #[test]
    fn seam_continuity() {
        for x in [X_SWITCH, -X_SWITCH] {
            let s = series_branch(x);
            let q = if x > 0.0 { saddle_positive(x) } else { saddle_negative(x) };
            assert!((s.0 - q.0).abs() <= 1e-11, "Ai seam at {x}: {}", s.0 - q.0);
            assert!((s.1 - q.1).abs() <= 1e-11, "Ai' seam at {x}: {}", s.1 - q.1);
        }
    }

    #[test]
    fn error_estimate_and_method() {
        for k in -80..=80 {
            let x = k as f64 * 0.1;
            let e = airy(x);
            assert!(e.est_abs_err <= 1e-12, "x={x} est={}", e.est_abs_err);
            assert_eq!(e.method, method_for(x));
        }
    }

    #[test]
    fn finite_difference_derivative() {
        let h = 1e-5;
        let fd = (airy_ai(0.5 + h) - airy_ai(0.5 - h)) / (2.0 * h);
        assert!((fd - airy_ai_prime(0.5)).abs() < 1e-7);
    }

    #[test]
    fn ode_residual() {
        let h = 1e-4;
        for k in 0..50 {
            let x = -6.0 + 12.0 * k as f64 / 49.0;
            let d2 = (airy_ai(x + h) - 2.0 * airy_ai(x) + airy_ai(x - h)) / (h * h);
            assert!((d2 - x * airy_ai(x)).abs() <= 1e-6, "x={x}");
        }
    }
}
