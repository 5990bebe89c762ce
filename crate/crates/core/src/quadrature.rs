//! Gauss-Legendre rules and composite rules on truncated intervals.

use std::sync::{Mutex, OnceLock};

type RuleCache = Mutex<Vec<(usize, Vec<f64>, Vec<f64>)>>;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton's method
/// on the three-term recurrence. Results are cached per order.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    if let Some((_, x, w)) = cache.lock().unwrap().iter().find(|(k, _, _)| *k == q) {
        return (x.clone(), w.clone());
    }
    let (x, w) = compute_gauss_legendre(q);
    cache.lock().unwrap().push((q, x.clone(), w.clone()));
    (x, w)
}

fn compute_gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1, "Gauss-Legendre order must be positive");
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    let qf = q as f64;
    for k in 0..q.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (k as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for l in 2..=q {
                let lf = l as f64;
                let p2 = ((2.0 * lf - 1.0) * t * p1 - (lf - 1.0) * p0) / lf;
                p0 = p1;
                p1 = p2;
            }
            let p = if q == 1 { t } else { p1 };
            let pm1 = if q == 1 { 1.0 } else { p0 };
            dp = qf * (t * p - pm1) / (t * t - 1.0);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        if q == 1 {
            dp = 1.0;
        }
        x[k] = -t;
        x[q - 1 - k] = t;
        let wk = 2.0 / ((1.0 - t * t) * dp * dp);
        w[k] = wk;
        w[q - 1 - k] = wk;
    }
    if q % 2 == 1 {
        x[q / 2] = 0.0;
    }
    (x, w)
}

/// Integrates `f` over [a, b] with `panels` equal Gauss-Legendre panels of order `q`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, q: usize) -> f64 {
    let (x, w) = gauss_legendre(q);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Composite Gauss-Legendre rule on [s, s + length]; level `l` uses `2^l` panels.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub s: f64,
    pub length: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub level: u32,
    pub points_per_panel: usize,
}

impl QuadratureRule {
    pub fn composite(s: f64, length: f64, level: u32, points_per_panel: usize) -> Self {
        assert!(length > 0.0 && length.is_finite(), "rule length must be positive");
        let panels = 1usize << level;
        let (x, w) = gauss_legendre(points_per_panel);
        let h = length / panels as f64;
        let mut nodes = Vec::with_capacity(panels * points_per_panel);
        let mut weights = Vec::with_capacity(panels * points_per_panel);
        for p in 0..panels {
            let mid = s + h * (p as f64 + 0.5);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        QuadratureRule { s, length, nodes, weights, level, points_per_panel }
    }

    /// Same interval, twice as many panels.
    pub fn refined(&self) -> Self {
        Self::composite(self.s, self.length, self.level + 1, self.points_per_panel)
    }

    /// Same level structure on an interval of twice the length.
    pub fn lengthened(&self) -> Self {
        Self::composite(self.s, 2.0 * self.length, self.level + 1, self.points_per_panel)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index range of the nodes in the last panel.
    pub fn last_panel(&self) -> std::ops::Range<usize> {
        self.len() - self.points_per_panel..self.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials_exactly() {
        for q in [1, 2, 5, 16, 20, 48, 64] {
            let (x, w) = gauss_legendre(q);
            for deg in 0..2 * q {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "q={q} deg={deg} got={got}");
            }
        }
    }

    #[test]
    fn composite_rule_invariants() {
        let r = QuadratureRule::composite(-3.0, 16.0, 3, 16);
        let total: f64 = r.weights.iter().sum();
        assert!((total - 16.0).abs() < 1e-12);
        assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(r.nodes[0] > -3.0 && *r.nodes.last().unwrap() < 13.0);
        assert_eq!(r.refined().len(), 2 * r.len());
    }

    #[test]
    fn integrate_exponential() {
        let v = integrate(|x| (-x).exp(), 0.0, 40.0, 8, 16);
        assert!((v - (1.0 - (-40f64).exp())).abs() < 1e-14);
    }
}
