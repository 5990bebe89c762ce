//! Finite-N Fredholm kernels
//!
//! `K(l, x) = (2 pi i)^{-2} oint_{G1} dz oint_{G2} dw e^{-l z - x w} Hhat(z, w) P(z) Q(w)`
//!
//! with `P(z) = prod (z + beta_m) / (z - alpha_m)`, `Q(w) = prod (w + alpha_m) / (w - beta_m)`,
//! `G1` around the alphas, `G2` around the betas and `G1`, and
//!
//! * flat: `Hhat = e^{-2uz}/(w-z) + e^{-2uw}/(z-w) + e^{-2u(z+w)}/(z+w)`,
//! * half-flat: `Hhat = e^{-u(z+w)}/(z+w) + e^{-u(z+w)}/(z-w) + e^{-2uz}/(w-z)`.
//!
//! [`finite_n_kernel`] evaluates the whole integrand on a caller-chosen pair
//! of circles. For the Fredholm determinant itself, [`FiniteKernel`] splits
//! `Hhat` into its terms and puts each on its own circle pair: exponentially
//! decaying factors sit on circles far from the origin, growing ones on
//! circles through the saddle of `|P e^{-cuz}|`. The `e^{-2uw}/(z-w)` term
//! is integrated with the contours swapped, which costs one residue
//! integral along `w = z`. Each circle still encloses every parameter, so
//! by Cauchy's theorem the sum equals the kernel on any admissible pair,
//! but the cancellation between large and small terms disappears.

use num_complex::Complex64;
use rayon::prelude::*;

use super::contour::ContourSpec;
use super::{nystrom_det_with, FredholmResult, Kernel, KernelId, NystromOptions, PANEL_POINTS};
use crate::error::{Error, Result};
use crate::model::{Geometry, ModelParams};
use crate::quadrature::QuadratureRule;

/// Default trapezoid nodes per circle.
pub const DEFAULT_M: usize = 256;
/// Trapezoid nodes per circle in the split assembly.
pub const SPLIT_M: usize = 512;
/// Starting refinement level for finite-N determinants (4 panels).
pub const FINITE_START_LEVEL: u32 = 2;
/// Points of the real-axis saddle search.
const SADDLE_GRID: usize = 400;

fn log_p(z: Complex64, alpha: &[f64], beta: &[f64]) -> Complex64 {
    alpha.iter().zip(beta).map(|(&a, &b)| (z + b).ln() - (z - a).ln()).sum()
}

fn log_q(w: Complex64, alpha: &[f64], beta: &[f64]) -> Complex64 {
    alpha.iter().zip(beta).map(|(&a, &b)| (w + a).ln() - (w - b).ln()).sum()
}

/// Default pair: circles centred at the midpoint of the parameter
/// range with radii `h + 0.45 p_min` (z) and `h + 0.85 p_min` (w).
pub fn default_contours(params: &ModelParams, m: usize) -> Result<(ContourSpec, ContourSpec)> {
    let (lo, hi) = params.param_range();
    let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    Ok((ContourSpec::new(c, h + 0.45 * lo, m)?, ContourSpec::new(c, h + 0.85 * lo, m)?))
}

fn check_contours(params: &ModelParams, g1: &ContourSpec, g2: &ContourSpec) -> Result<()> {
    g1.validate()?;
    g2.validate()?;
    if !g2.strictly_encloses(g1) {
        return Err(Error::Contour("the w-contour must strictly enclose the z-contour".into()));
    }
    let guard = |c: &ContourSpec, x: f64| c.encloses_point(x) && c.distance(x) > 1e-9 * c.radius;
    if !params.alpha().iter().all(|&a| guard(g1, a)) {
        return Err(Error::Contour("the z-contour must enclose every alpha away from the circle".into()));
    }
    if !params.beta().iter().all(|&b| guard(g2, b)) {
        return Err(Error::Contour("the w-contour must enclose every beta away from the circle".into()));
    }
    Ok(())
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Coupling {
    WMinusZ,
    ZMinusW,
    ZPlusW,
}

impl Coupling {
    fn eval(self, z: Complex64, w: Complex64) -> Complex64 {
        match self {
            Coupling::WMinusZ => (w - z).inv(),
            Coupling::ZMinusW => (z - w).inv(),
            Coupling::ZPlusW => (z + w).inv(),
        }
    }
}

/// Terms `e^{-cz u z - cw u w} / coupling` of Hhat.
fn hhat_terms(geometry: Geometry) -> [(f64, f64, Coupling); 3] {
    match geometry {
        Geometry::Flat => [
            (2.0, 0.0, Coupling::WMinusZ),
            (0.0, 2.0, Coupling::ZMinusW),
            (2.0, 2.0, Coupling::ZPlusW),
        ],
        Geometry::HalfFlat => [
            (1.0, 1.0, Coupling::ZPlusW),
            (1.0, 1.0, Coupling::ZMinusW),
            (2.0, 0.0, Coupling::WMinusZ),
        ],
    }
}

/// Kernel value as a complex number; the imaginary part is rounding noise.
pub fn finite_n_kernel_complex(
    params: &ModelParams,
    u: f64,
    contours: (&ContourSpec, &ContourSpec),
    lambda: f64,
    xi: f64,
) -> Result<Complex64> {
    check_nonneg("u", u)?;
    check_nonneg("lambda", lambda)?;
    check_nonneg("xi", xi)?;
    let (g1, g2) = contours;
    check_contours(params, g1, g2)?;
    let (alpha, beta) = (params.alpha(), params.beta());
    let (z, dz) = g1.nodes();
    let (w, dw) = g2.nodes();
    let pz: Vec<Complex64> = z.iter().zip(&dz).map(|(z, d)| d.ln() - lambda * z + log_p(*z, alpha, beta)).collect();
    let qw: Vec<Complex64> = w.iter().zip(&dw).map(|(w, d)| d.ln() - xi * w + log_q(*w, alpha, beta)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (cz, cw, coupling) in hhat_terms(params.geometry()) {
        let fz: Vec<Complex64> = pz.iter().zip(&z).map(|(p, z)| p - cz * u * z).collect();
        let fw: Vec<Complex64> = qw.iter().zip(&w).map(|(q, w)| q - cw * u * w).collect();
        let mz = fz.iter().fold(f64::NEG_INFINITY, |m, f| m.max(f.re));
        let mw = fw.iter().fold(f64::NEG_INFINITY, |m, f| m.max(f.re));
        let ez: Vec<Complex64> = fz.iter().map(|f| (f - mz).exp()).collect();
        let ew: Vec<Complex64> = fw.iter().map(|f| (f - mw).exp()).collect();
        let mut s = Complex64::new(0.0, 0.0);
        for (za, ea) in z.iter().zip(&ez) {
            let mut inner = Complex64::new(0.0, 0.0);
            for (wb, eb) in w.iter().zip(&ew) {
                inner += eb * coupling.eval(*za, *wb);
            }
            s += ea * inner;
        }
        total += s * (mz + mw).exp();
    }
    Ok(total)
}

/// `K_{N,u}(lambda, xi)` by the trapezoid rule on the given circles, with
/// the whole `Hhat` under one double integral.
pub fn finite_n_kernel(
    params: &ModelParams,
    u: f64,
    contours: (&ContourSpec, &ContourSpec),
    lambda: f64,
    xi: f64,
) -> Result<f64> {
    Ok(finite_n_kernel_complex(params, u, contours, lambda, xi)?.re)
}

/// One double-integral term: z nodes with log weights `lz`, w nodes with
/// log weights `lw`, and a Cauchy-type coupling.
struct DoublePiece {
    z: Vec<Complex64>,
    lz: Vec<Complex64>,
    w: Vec<Complex64>,
    lw: Vec<Complex64>,
    coupling: Coupling,
}

/// Single integral `sign * oint e^{-(lambda + xi) z} e^{l(z)} dz / (2 pi i)`.
struct SinglePiece {
    z: Vec<Complex64>,
    l: Vec<Complex64>,
    sign: f64,
}

/// `exp(-x z_a + l_a - M_x)` for each x, with the row maxima `M_x`.
fn compensated_rows(xs: &[f64], z: &[Complex64], l: &[Complex64]) -> (Vec<Complex64>, Vec<f64>) {
    let m = z.len();
    let mut out = vec![Complex64::new(0.0, 0.0); xs.len() * m];
    let mut shifts = vec![0.0; xs.len()];
    out.par_chunks_mut(m).zip(shifts.par_iter_mut()).zip(xs.par_iter()).for_each(|((row, shift), &x)| {
        let mut mx = f64::NEG_INFINITY;
        for (a, slot) in row.iter_mut().enumerate() {
            *slot = -x * z[a] + l[a];
            mx = mx.max(slot.re);
        }
        for slot in row.iter_mut() {
            *slot = (*slot - mx).exp();
        }
        *shift = mx;
    });
    (out, shifts)
}

/// Kernel of the finite-N Fredholm determinant, assembled term by term on
/// well-conditioned circles.
pub struct FiniteKernel {
    geometry: Geometry,
    doubles: Vec<DoublePiece>,
    singles: Vec<SinglePiece>,
}

fn nodes_with(c: &ContourSpec, f: impl Fn(Complex64) -> Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
    let (z, dz) = c.nodes();
    let l = z.iter().zip(&dz).map(|(z, d)| d.ln() + f(*z)).collect();
    (z, l)
}

impl FiniteKernel {
    pub fn new(params: &ModelParams, u: f64, m: usize) -> Result<Self> {
        check_nonneg("u", u)?;
        let (alpha, beta) = (params.alpha().to_vec(), params.beta().to_vec());
        let (pmin, pmax) = params.param_range();
        let n = params.n() as f64;
        let dmin = 0.5 * pmin / (2.0 * n).cbrt();
        let lp = |z: Complex64| log_p(z, &alpha, &beta);
        let lq = |w: Complex64| log_q(w, &alpha, &beta);
        let (inner, outer) = default_contours(params, m)?;
        // Left crossing of a circle through the real-axis minimum of `f` on (0, p_min).
        let saddle = |f: &dyn Fn(f64) -> f64| {
            let mut best = (f64::INFINITY, 0.5 * pmin);
            for k in 1..SADDLE_GRID - 1 {
                let x = pmin * k as f64 / (SADDLE_GRID - 1) as f64;
                let v = f(x);
                if v < best.0 {
                    best = (v, x);
                }
            }
            best.1.clamp(dmin, 0.6 * pmin)
        };
        let mirror = |left: f64| pmax + pmin - left;
        let re = |f: Complex64| f.re;
        let mut doubles = Vec::new();
        let mut singles = Vec::new();
        let piece = |zc: &ContourSpec, fz: &dyn Fn(Complex64) -> Complex64, wc: &ContourSpec, fw: &dyn Fn(Complex64) -> Complex64, coupling| {
            let (z, lz) = nodes_with(zc, fz);
            let (w, lw) = nodes_with(wc, fw);
            DoublePiece { z, lz, w, lw, coupling }
        };
        // e^{-2uz}/(w-z): z on the inner, w on the outer default circle (both geometries).
        doubles.push(piece(&inner, &|z| lp(z) - 2.0 * u * z, &outer, &|w| lq(w), Coupling::WMinusZ));
        match params.geometry() {
            Geometry::Flat => {
                // e^{-2uw}/(z-w) with the w-circle inside the z-circle ...
                doubles.push(piece(&outer, &|z| lp(z), &inner, &|w| lq(w) - 2.0 * u * w, Coupling::ZMinusW));
                doubles.push(piece(&inner, &|z| lp(z) - 2.0 * u * z, &inner, &|w| lq(w) - 2.0 * u * w, Coupling::ZPlusW));
                // ... minus the residue along w = z picked up by the swap.
                let xl = saddle(&|x| re(lp(x.into()) + lq(x.into())) - 2.0 * u * x);
                let rc = ContourSpec::through(xl, mirror(xl), m)?;
                let (z, l) = nodes_with(&rc, |z| lp(z) + lq(z) - 2.0 * u * z);
                singles.push(SinglePiece { z, l, sign: -1.0 });
            }
            Geometry::HalfFlat => {
                let xp = saddle(&|x| re(lp(x.into())) - u * x);
                let xq = saddle(&|x| re(lq(x.into())) - u * x);
                let xl = xp.max(xq);
                let rz = ContourSpec::through(xl, mirror(xl), m)?;
                doubles.push(piece(&rz, &|z| lp(z) - u * z, &rz, &|w| lq(w) - u * w, Coupling::ZPlusW));
                let gap = dmin.min(0.5 * (pmin - xl));
                let zc = ContourSpec::through(xl + gap, mirror(xl), m)?;
                let wc = ContourSpec::through(xl, mirror(xl) + gap + 0.5 * pmin, m)?;
                doubles.push(piece(&zc, &|z| lp(z) - u * z, &wc, &|w| lq(w) - u * w, Coupling::ZMinusW));
            }
        }
        Ok(FiniteKernel { geometry: params.geometry(), doubles, singles })
    }

    fn matrix_complex(&self, rows: &[f64], cols: &[f64]) -> Vec<Complex64> {
        let (nr, nc) = (rows.len(), cols.len());
        let mut out = vec![Complex64::new(0.0, 0.0); nr * nc];
        for p in &self.doubles {
            let m = p.z.len();
            let (ez, sz) = compensated_rows(rows, &p.z, &p.lz);
            let (ew, sw) = compensated_rows(cols, &p.w, &p.lw);
            // t[a][j] = sum_b coupling(z_a, w_b) ew[j][b]
            let mut t = vec![Complex64::new(0.0, 0.0); m * nc];
            t.par_chunks_mut(nc).enumerate().for_each(|(a, trow)| {
                let za = p.z[a];
                for (b, wb) in p.w.iter().enumerate() {
                    let c = p.coupling.eval(za, *wb);
                    for (j, slot) in trow.iter_mut().enumerate() {
                        *slot += c * ew[j * m + b];
                    }
                }
            });
            out.par_chunks_mut(nc).enumerate().for_each(|(i, orow)| {
                let erow = &ez[i * m..(i + 1) * m];
                let mut acc = vec![Complex64::new(0.0, 0.0); nc];
                for (a, e) in erow.iter().enumerate() {
                    let trow = &t[a * nc..(a + 1) * nc];
                    for (x, y) in acc.iter_mut().zip(trow) {
                        *x += e * y;
                    }
                }
                for (j, slot) in orow.iter_mut().enumerate() {
                    *slot += acc[j] * (sz[i] + sw[j]).exp();
                }
            });
        }
        for p in &self.singles {
            let m = p.z.len();
            let zero = vec![Complex64::new(0.0, 0.0); m];
            let (er, sr) = compensated_rows(rows, &p.z, &p.l);
            let (ec, sc) = compensated_rows(cols, &p.z, &zero);
            out.par_chunks_mut(nc).enumerate().for_each(|(i, orow)| {
                let erow = &er[i * m..(i + 1) * m];
                for (j, slot) in orow.iter_mut().enumerate() {
                    let ecol = &ec[j * m..(j + 1) * m];
                    let s: Complex64 = erow.iter().zip(ecol).map(|(x, y)| x * y).sum();
                    *slot += p.sign * s * (sr[i] + sc[j]).exp();
                }
            });
        }
        out
    }

    /// Largest imaginary part over the matrix, a rounding diagnostic.
    pub fn max_imag(&self, rows: &[f64], cols: &[f64]) -> f64 {
        self.matrix_complex(rows, cols).iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }
}

impl Kernel for FiniteKernel {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.matrix_complex(&[x], &[y])[0].re
    }

    fn matrix(&self, rows: &[f64], cols: &[f64]) -> Vec<f64> {
        self.matrix_complex(rows, cols).into_iter().map(|z| z.re).collect()
    }

    fn id(&self) -> KernelId {
        match self.geometry {
            Geometry::Flat => KernelId::FiniteFlat,
            Geometry::HalfFlat => KernelId::FiniteHalf,
        }
    }
}

/// Overrides for [`fredholm_cdf_finite_n_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteOptions {
    pub m: usize,
    /// Truncation length; `None` picks it from the kernel decay.
    pub length: Option<f64>,
    pub start_level: u32,
    pub nystrom: NystromOptions,
}

impl Default for FiniteOptions {
    fn default() -> Self {
        FiniteOptions { m: SPLIT_M, length: None, start_level: FINITE_START_LEVEL, nystrom: NystromOptions::default() }
    }
}

/// Truncation length from the kernel decay: the diagonal decays like
/// `e^{-(min alpha + min beta) x}`, and the kernel lives on the scale
/// `(2N)^{1/3} / p_min` near criticality.
pub fn default_length(params: &ModelParams) -> f64 {
    let amin = params.alpha().iter().fold(f64::INFINITY, |m, &a| m.min(a));
    let bmin = params.beta().iter().fold(f64::INFINITY, |m, &b| m.min(b));
    let (pmin, _) = params.param_range();
    (40.0 / (amin + bmin)).max(16.0 * (2.0 * params.n() as f64).cbrt() / pmin)
}

/// `P(tau <= u) = det(I - K_{N,u})` on `L^2(0, inf)`.
pub fn fredholm_cdf_finite_n(params: &ModelParams, u: f64) -> Result<FredholmResult> {
    fredholm_cdf_finite_n_with(params, u, &FiniteOptions::default())
}

pub fn fredholm_cdf_finite_n_with(params: &ModelParams, u: f64, opts: &FiniteOptions) -> Result<FredholmResult> {
    check_nonneg("u", u)?;
    let kernel = FiniteKernel::new(params, u, opts.m)?;
    let length = opts.length.unwrap_or_else(|| default_length(params));
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::invalid("length", format!("must be positive, got {length}")));
    }
    let rule = QuadratureRule::composite(0.0, length, opts.start_level, PANEL_POINTS);
    let res = nystrom_det_with(&kernel, &rule, &opts.nystrom);
    if !res.value.is_finite() || !(-1e-7..=1.0 + 1e-7).contains(&res.value) {
        return Err(Error::Breakdown(format!("Fredholm determinant {} outside [0, 1]", res.value)));
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{cdf_exact, h_entry};

    fn params(g: Geometry) -> ModelParams {
        ModelParams::new(g, vec![0.6, 1.0], vec![0.8, 1.3]).unwrap()
    }

    /// Residue oracle: Hhat(alpha_k, beta_i) = 1/(alpha_k + beta_i) - H_u(alpha_k, beta_i).
    fn residue_oracle(p: &ModelParams, u: f64, lambda: f64, xi: f64) -> f64 {
        let (a, b) = (p.alpha(), p.beta());
        let n = a.len();
        let res_p = |k: usize| {
            let mut r = 1.0;
            for m in 0..n {
                r *= a[k] + b[m];
                if m != k {
                    r /= a[k] - a[m];
                }
            }
            r
        };
        let res_q = |i: usize| {
            let mut r = 1.0;
            for m in 0..n {
                r *= b[i] + a[m];
                if m != i {
                    r /= b[i] - b[m];
                }
            }
            r
        };
        let mut total = 0.0;
        for (k, &ak) in a.iter().enumerate() {
            for (i, &bi) in b.iter().enumerate() {
                let hhat = 1.0 / (ak + bi) - h_entry(p.geometry(), u, ak, bi).unwrap();
                total += (-lambda * ak - xi * bi).exp() * hhat * res_p(k) * res_q(i);
            }
        }
        total
    }

    #[test]
    fn whole_kernel_matches_residues() {
        for g in [Geometry::Flat, Geometry::HalfFlat] {
            for p in [ModelParams::new(g, vec![0.7], vec![1.2]).unwrap(), params(g)] {
                let (g1, g2) = default_contours(&p, DEFAULT_M).unwrap();
                for (u, l, x) in [(1.0, 0.3, 0.9), (2.0, 0.0, 1.5), (0.5, 2.0, 0.1)] {
                    let k = finite_n_kernel_complex(&p, u, (&g1, &g2), l, x).unwrap();
                    let want = residue_oracle(&p, u, l, x);
                    assert!((k.re - want).abs() < 1e-10, "{g:?} N={} u={u}: {} vs {want}", p.n(), k.re);
                    assert!(k.im.abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn contour_independence_and_m_doubling() {
        for g in [Geometry::Flat, Geometry::HalfFlat] {
            let p = params(g);
            let (g1, g2) = default_contours(&p, 128).unwrap();
            let base = finite_n_kernel(&p, 1.0, (&g1, &g2), 0.4, 1.1).unwrap();
            let g1b = ContourSpec::new(g1.center, g1.radius - 0.1, 128).unwrap();
            let g2b = ContourSpec::new(g2.center, g2.radius + 0.05, 128).unwrap();
            let moved = finite_n_kernel(&p, 1.0, (&g1b, &g2b), 0.4, 1.1).unwrap();
            let doubled = finite_n_kernel(&p, 1.0, (&g1.with_m(256), &g2.with_m(256)), 0.4, 1.1).unwrap();
            assert!((base - moved).abs() <= 1e-9);
            assert!((base - doubled).abs() <= 1e-10);
        }
    }

    #[test]
    fn contour_validation() {
        let p = params(Geometry::Flat);
        let (g1, g2) = default_contours(&p, 64).unwrap();
        assert!(finite_n_kernel(&p, 1.0, (&g2, &g1), 0.0, 0.0).is_err());
        let tiny = ContourSpec::new(0.8, 0.05, 64).unwrap();
        assert!(finite_n_kernel(&p, 1.0, (&tiny, &g2), 0.0, 0.0).is_err());
        assert!(finite_n_kernel(&p, -1.0, (&g1, &g2), 0.0, 0.0).is_err());
    }

    #[test]
    fn split_assembly_matches_whole_kernel() {
        for g in [Geometry::Flat, Geometry::HalfFlat] {
            for p in [params(g), ModelParams::iid(g, 3, 0.5).unwrap()] {
                let (g1, g2) = default_contours(&p, DEFAULT_M).unwrap();
                let k = FiniteKernel::new(&p, 2.0, DEFAULT_M).unwrap();
                let pts = [0.0, 0.7, 2.5];
                let m = k.matrix(&pts, &pts);
                for (i, &l) in pts.iter().enumerate() {
                    for (j, &x) in pts.iter().enumerate() {
                        let whole = finite_n_kernel(&p, 2.0, (&g1, &g2), l, x).unwrap();
                        assert!((m[i * 3 + j] - whole).abs() < 1e-10, "{g:?} ({l},{x}): {} vs {whole}", m[i * 3 + j]);
                    }
                }
                assert!(k.max_imag(&pts, &pts) < 1e-10);
            }
        }
    }

    #[test]
    fn determinant_equals_ratio() {
        for g in [Geometry::Flat, Geometry::HalfFlat] {
            let p = params(g);
            for u in [1.0, 3.0] {
                let f = fredholm_cdf_finite_n(&p, u).unwrap();
                let e = cdf_exact(&p, u).unwrap();
                assert!((f.value - e).abs() < 1e-6, "{g:?} u={u}: {} vs {e}", f.value);
                assert!(f.converged);
            }
        }
    }

    #[test]
    fn boundary_values() {
        for g in [Geometry::Flat, Geometry::HalfFlat] {
            let p = params(g);
            assert!(fredholm_cdf_finite_n(&p, 0.0).unwrap().value.abs() < 1e-8);
            assert!((fredholm_cdf_finite_n(&p, 60.0).unwrap().value - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn kernel_decays_exponentially() {
        let p = params(Geometry::Flat);
        let k = FiniteKernel::new(&p, 2.0, DEFAULT_M).unwrap();
        let lam: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).collect();
        let vals = k.matrix(&lam, &[0.5]);
        // Least-squares slope of log|K| against lambda, then the envelope constant.
        let pts: Vec<(f64, f64)> = lam.iter().zip(&vals).map(|(l, v)| (*l, v.abs().max(1e-300).ln())).collect();
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let c2 = -slope;
        assert!(c2 > 0.0);
        let c1 = lam.iter().zip(&vals).map(|(l, v)| v.abs() * (c2 * l).exp()).fold(0.0, f64::max);
        assert!(c1.is_finite() && c1 > 0.0);
        for (l, v) in lam.iter().zip(&vals) {
            assert!(v.abs() <= c1 * (-c2 * l).exp() * (1.0 + 1e-12));
        }
    }
}
