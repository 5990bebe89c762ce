//! Limiting kernels and distribution functions.
//!
//! * GOE: `K_1(x, y) = Ai((x + y) / 2) / 2` on `[s, inf)`, giving `F_1(s)`.
//! * Airy2->1: `int_0^inf Ai(x + t) Ai(y + t) dt + int_0^inf Ai(x + t) Ai(y - t) dt`,
//!   giving `F_{2->1}(s)`.
//! * Airy2: the first addend alone (the classical Airy kernel).

use rayon::prelude::*;

use super::{nystrom_det_with, FredholmResult, Kernel, KernelId, NystromOptions, PANEL_POINTS};
use crate::quadrature::{gauss_legendre, QuadratureRule};
use crate::special::airy_ai;

/// Beyond `t = AIRY_CUTOFF`, `Ai(t) < 1e-16`; Airy integrals are truncated there.
pub const AIRY_CUTOFF: f64 = 14.0;
/// Default truncation length of the limiting Fredholm determinants.
pub const LIMIT_LENGTH: f64 = 16.0;
/// Starting refinement level (2 panels).
pub const LIMIT_START_LEVEL: u32 = 1;
/// Below this argument the distribution functions are reported as 0.
pub const LIMIT_FLOOR: f64 = -10.0;
/// Width of the shared integration panels used in matrix assembly.
const GRID_PANEL: f64 = 0.5;
/// Points per panel for the point-wise Airy integrals.
const POINT_PANEL_POINTS: usize = 20;

pub fn kernel_goe(lambda: f64, xi: f64) -> f64 {
    0.5 * airy_ai(0.5 * (lambda + xi))
}

/// `int_a^b f` with unit-or-smaller Gauss-Legendre panels and forced breakpoints.
fn integrate_with_breaks(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], refine: u32) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&c| c > a && c < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.total_cmp(y));
    let (gx, gw) = gauss_legendre(POINT_PANEL_POINTS);
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let panels = ((hi - lo).ceil() as usize).max(1) << refine;
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let mid = lo + h * (p as f64 + 0.5);
            let mut s = 0.0;
            for (x, w) in gx.iter().zip(&gw) {
                s += w * f(mid + 0.5 * h * x);
            }
            total += 0.5 * h * s;
        }
    }
    total
}

/// First addend `int_0^inf Ai(lambda + x) Ai(xi + x) dx` at resolution `refine`.
pub fn airy2_term(lambda: f64, xi: f64, refine: u32) -> f64 {
    let top = (AIRY_CUTOFF - lambda.max(xi)).max(0.0);
    let breaks = [-lambda, -xi];
    integrate_with_breaks(&|x| airy_ai(lambda + x) * airy_ai(xi + x), 0.0, top, &breaks, refine)
}

/// Second addend `int_0^inf Ai(lambda + x) Ai(xi - x) dx` at resolution `refine`;
/// split at the turning points `x = -lambda` and `x = xi`.
pub fn airy21_reflected_term(lambda: f64, xi: f64, refine: u32) -> f64 {
    let top = (AIRY_CUTOFF - lambda).max(0.0);
    let breaks = [-lambda, xi];
    integrate_with_breaks(&|x| airy_ai(lambda + x) * airy_ai(xi - x), 0.0, top, &breaks, refine)
}

pub fn kernel_airy2(lambda: f64, xi: f64) -> f64 {
    airy2_term(lambda, xi, 0)
}

pub fn kernel_airy21(lambda: f64, xi: f64) -> f64 {
    airy2_term(lambda, xi, 0) + airy21_reflected_term(lambda, xi, 0)
}

/// GOE kernel for Nyström assembly.
pub struct GoeKernel;

impl Kernel for GoeKernel {
    fn eval(&self, x: f64, y: f64) -> f64 {
        kernel_goe(x, y)
    }
    fn id(&self) -> KernelId {
        KernelId::Goe
    }
}

/// Airy2 or Airy2->1 kernel, assembled as `A W B^T` over a shared
/// Gauss-Legendre grid in the integration variable.
pub struct AiryProductKernel {
    pub reflected: bool,
}

impl AiryProductKernel {
    pub const AIRY2: AiryProductKernel = AiryProductKernel { reflected: false };
    pub const AIRY21: AiryProductKernel = AiryProductKernel { reflected: true };
}

fn airy_table(points: &[f64], grid: &[f64], sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; points.len() * grid.len()];
    out.par_chunks_mut(grid.len().max(1)).zip(points.par_iter()).for_each(|(row, &p)| {
        for (slot, &t) in row.iter_mut().zip(grid) {
            *slot = airy_ai(p + sign * t);
        }
    });
    out
}

impl Kernel for AiryProductKernel {
    fn eval(&self, x: f64, y: f64) -> f64 {
        if self.reflected {
            kernel_airy21(x, y)
        } else {
            kernel_airy2(x, y)
        }
    }

    fn matrix(&self, rows: &[f64], cols: &[f64]) -> Vec<f64> {
        let lo = rows.iter().chain(cols).fold(f64::INFINITY, |m, &v| m.min(v));
        let top = (AIRY_CUTOFF - lo).max(GRID_PANEL);
        let panels = (top / GRID_PANEL).ceil() as usize;
        let (gx, gw) = gauss_legendre(PANEL_POINTS);
        let mut grid = Vec::with_capacity(panels * PANEL_POINTS);
        let mut wts = Vec::with_capacity(panels * PANEL_POINTS);
        for p in 0..panels {
            let mid = GRID_PANEL * (p as f64 + 0.5);
            for (x, w) in gx.iter().zip(&gw) {
                grid.push(mid + 0.5 * GRID_PANEL * x);
                wts.push(0.5 * GRID_PANEL * w);
            }
        }
        let a = airy_table(rows, &grid, 1.0);
        let mut b = airy_table(cols, &grid, 1.0);
        if self.reflected {
            let c = airy_table(cols, &grid, -1.0);
            b.iter_mut().zip(c).for_each(|(x, y)| *x += y);
        }
        let k = grid.len();
        let mut out = vec![0.0; rows.len() * cols.len()];
        out.par_chunks_mut(cols.len().max(1)).enumerate().for_each(|(i, row)| {
            let ai = &a[i * k..(i + 1) * k];
            for (j, slot) in row.iter_mut().enumerate() {
                let bj = &b[j * k..(j + 1) * k];
                *slot = ai.iter().zip(bj).zip(&wts).map(|((x, y), w)| x * y * w).sum();
            }
        });
        out
    }

    fn id(&self) -> KernelId {
        if self.reflected {
            KernelId::Airy21
        } else {
            KernelId::Airy2
        }
    }
}

fn limit_det<K: Kernel>(kernel: &K, s: f64, length: f64, opts: &NystromOptions) -> FredholmResult {
    let rule = QuadratureRule::composite(s, length, LIMIT_START_LEVEL, PANEL_POINTS);
    nystrom_det_with(kernel, &rule, opts)
}

/// GOE Tracy-Widom distribution with diagnostics.
pub fn f1_result(s: f64) -> FredholmResult {
    f1_result_with(s, LIMIT_LENGTH, &NystromOptions::default())
}

/// Airy2->1 one-point distribution with diagnostics.
pub fn f21_result(s: f64) -> FredholmResult {
    f21_result_with(s, LIMIT_LENGTH, &NystromOptions::default())
}

/// GUE Tracy-Widom distribution (Airy2 kernel), used as a cross-check.
pub fn f2_result(s: f64) -> FredholmResult {
    limit_det(&AiryProductKernel::AIRY2, s, LIMIT_LENGTH, &NystromOptions::default())
}

/// [`f1_result`] on `[s, s + length]` with explicit refinement options.
pub fn f1_result_with(s: f64, length: f64, opts: &NystromOptions) -> FredholmResult {
    limit_det(&GoeKernel, s, length, opts)
}

pub fn f21_result_with(s: f64, length: f64, opts: &NystromOptions) -> FredholmResult {
    limit_det(&AiryProductKernel::AIRY21, s, length, opts)
}

/// `F_1(s)`; 0 for `s < -10`.
pub fn f1(s: f64) -> f64 {
    if s < LIMIT_FLOOR {
        0.0
    } else {
        f1_result(s).value
    }
}

/// `F_{2->1}(s)`; 0 for `s < -10`.
pub fn f21(s: f64) -> f64 {
    if s < LIMIT_FLOOR {
        0.0
    } else {
        f21_result(s).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::airy_ai_prime;

    #[test]
    fn goe_kernel_examples() {
        assert!((kernel_goe(0.0, 0.0) - 0.177514026943909).abs() < 1e-14);
        assert_eq!(kernel_goe(0.3, 1.7), kernel_goe(1.7, 0.3));
        assert_eq!(kernel_goe(1.0, 3.0), kernel_goe(2.0, 2.0));
    }

    #[test]
    fn airy2_diagonal_identity() {
        for x in [0.0f64, 1.0, 2.0] {
            let want = airy_ai_prime(x).powi(2) - x * airy_ai(x).powi(2);
            assert!((kernel_airy2(x, x) - want).abs() < 1e-8);
        }
        assert!((airy2_term(0.0, 0.0, 0) - crate::special::AIP0.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn airy2_symmetry_and_closed_form() {
        for (a, b) in [(0.3, -1.2), (2.0, 5.0), (-3.0, -0.5)] {
            assert!((kernel_airy2(a, b) - kernel_airy2(b, a)).abs() < 1e-14);
            let closed = (airy_ai(a) * airy_ai_prime(b) - airy_ai_prime(a) * airy_ai(b)) / (a - b);
            assert!((kernel_airy2(a, b) - closed).abs() < 1e-11);
        }
    }

    #[test]
    fn airy21_resolution_doubling() {
        for (a, b) in [(2.0, 5.0), (-2.0, 1.0), (0.0, -4.0)] {
            let lo = kernel_airy21(a, b);
            let hi = airy2_term(a, b, 1) + airy21_reflected_term(a, b, 1);
            assert!((lo - hi).abs() < 1e-9, "({a},{b}): {lo} vs {hi}");
        }
    }

    #[test]
    fn matrix_assembly_matches_pointwise() {
        let pts = [-3.0, -0.4, 0.0, 1.3, 5.0];
        for k in [AiryProductKernel::AIRY2, AiryProductKernel::AIRY21] {
            let m = k.matrix(&pts, &pts);
            for (i, &x) in pts.iter().enumerate() {
                for (j, &y) in pts.iter().enumerate() {
                    assert!((m[i * 5 + j] - k.eval(x, y)).abs() < 1e-12, "{x},{y}");
                }
            }
        }
    }

    #[test]
    fn airy2_gram_matrix_is_psd() {
        let nodes: Vec<f64> = (0..20).map(|k| -3.0 + 0.4 * k as f64).collect();
        let m = AiryProductKernel::AIRY2.matrix(&nodes, &nodes);
        let mat = nalgebra::DMatrix::from_row_slice(20, 20, &m);
        let sym = (&mat + mat.transpose()) * 0.5;
        let ev = sym.symmetric_eigenvalues();
        assert!(ev.min() >= -1e-10, "min eigenvalue {}", ev.min());
    }

    #[test]
    fn tails() {
        assert!(1.0 - f1(10.0) <= 1e-8);
        assert!(f1(-8.0) <= 1e-3);
        assert_eq!(f1(-11.0), 0.0);
    }

    #[test]
    fn goe_refinement_gaps_shrink() {
        for s in [-2.0, 0.0, 2.0] {
            let mut prev: Option<f64> = None;
            let mut last_gap = f64::INFINITY;
            for level in 0..5 {
                let rule = QuadratureRule::composite(s, LIMIT_LENGTH, level, PANEL_POINTS);
                let (v, _) = super::super::nystrom_det_fixed(&GoeKernel, &rule);
                if let Some(p) = prev {
                    let gap: f64 = (v - p).abs();
                    if last_gap > 1e-10 {
                        assert!(gap <= 0.1 * last_gap || gap < 1e-10, "s={s} level={level}: {gap} vs {last_gap}");
                    }
                    last_gap = gap;
                }
                prev = Some(v);
            }
        }
    }
}
