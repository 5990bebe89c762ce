use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Path geometry. Paths start at (1,1) and end on the anti-diagonal
/// `i + j = 2N + 1`; half-flat paths additionally stay in `i <= N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Flat,
    HalfFlat,
}

impl Geometry {
    pub fn name(self) -> &'static str {
        match self {
            Geometry::Flat => "flat",
            Geometry::HalfFlat => "half-flat",
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Geometry::Flat),
            "half-flat" | "half" | "halfflat" => Ok(Geometry::HalfFlat),
            _ => Err(Error::invalid("geometry", format!("unknown geometry `{s}`"))),
        }
    }
}

/// Relative gap under which two parameters count as coincident.
pub const DISTINCT_REL_GAP: f64 = 1e-8;

/// Model parameters: `N`, geometry and the rate vectors.
///
/// Site (i,j) (1-based) has rate
/// `alpha_i + beta_j` for `i, j <= N`,
/// `alpha_i + alpha_{2N-j+1}` for `i <= N < j`, and
/// `beta_{2N-i+1} + beta_j` for `j <= N < i`.
/// With `iid_gamma = Some(g)` every rate is `2g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    geometry: Geometry,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    iid_gamma: Option<f64>,
    distinct: bool,
}

fn check_rates(field: &str, v: &[f64]) -> Result<()> {
    for (k, &x) in v.iter().enumerate() {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::invalid(
                format!("{field}[{k}]"),
                format!("rate must be finite and positive, got {x}"),
            ));
        }
    }
    Ok(())
}

pub(crate) fn pairwise_distinct(v: &[f64]) -> bool {
    for i in 0..v.len() {
        for j in 0..i {
            let scale = v[i].abs().max(v[j].abs()).max(f64::MIN_POSITIVE);
            if (v[i] - v[j]).abs() < DISTINCT_REL_GAP * scale {
                return false;
            }
        }
    }
    true
}

impl ModelParams {
    pub fn new(geometry: Geometry, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::invalid("alpha", "N must be at least 1"));
        }
        if alpha.len() != beta.len() {
            return Err(Error::invalid(
                "beta",
                format!("length {} differs from alpha length {}", beta.len(), alpha.len()),
            ));
        }
        check_rates("alpha", &alpha)?;
        check_rates("beta", &beta)?;
        let all: Vec<f64> = alpha.iter().chain(beta.iter()).copied().collect();
        let distinct = pairwise_distinct(&all);
        Ok(ModelParams { n: alpha.len(), geometry, alpha, beta, iid_gamma: None, distinct })
    }

    pub fn iid(geometry: Geometry, n: usize, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "N must be at least 1"));
        }
        check_rates("gamma", &[gamma])?;
        Ok(ModelParams {
            n,
            geometry,
            alpha: vec![gamma; n],
            beta: vec![gamma; n],
            iid_gamma: Some(gamma),
            distinct: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
    pub fn iid_gamma(&self) -> Option<f64> {
        self.iid_gamma
    }
    /// True iff all 2N parameters are pairwise distinct.
    pub fn is_distinct(&self) -> bool {
        self.distinct
    }

    pub fn with_geometry(&self, geometry: Geometry) -> Self {
        ModelParams { geometry, ..self.clone() }
    }

    /// Swaps the roles of alpha and beta.
    pub fn swapped(&self) -> Self {
        ModelParams { alpha: self.beta.clone(), beta: self.alpha.clone(), ..self.clone() }
    }

    /// Smallest and largest of the 2N parameters.
    pub fn param_range(&self) -> (f64, f64) {
        let it = self.alpha.iter().chain(self.beta.iter());
        let lo = it.clone().copied().fold(f64::INFINITY, f64::min);
        let hi = it.copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Whether the 1-based site (i,j) belongs to the geometry's index set.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        let n = self.n;
        i >= 1 && j >= 1 && i + j <= 2 * n + 1 && (self.geometry == Geometry::Flat || i <= n)
    }

    /// Rate of the exponential weight at the 1-based site (i,j).
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        debug_assert!(self.contains(i, j));
        let n = self.n;
        if let Some(g) = self.iid_gamma {
            return 2.0 * g;
        }
        match (i <= n, j <= n) {
            (true, true) => self.alpha[i - 1] + self.beta[j - 1],
            (true, false) => self.alpha[i - 1] + self.alpha[2 * n - j],
            (false, true) => self.beta[2 * n - i] + self.beta[j - 1],
            (false, false) => unreachable!("site outside i + j <= 2N + 1"),
        }
    }

    /// Number of rows of the index set.
    pub fn rows(&self) -> usize {
        match self.geometry {
            Geometry::Flat => 2 * self.n,
            Geometry::HalfFlat => self.n,
        }
    }

    /// Row lengths: row i has columns 1..=2N+1-i.
    pub fn row_len(&self, i: usize) -> usize {
        2 * self.n + 1 - i
    }

    pub fn min_rate(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 1..=self.rows() {
            for j in 1..=self.row_len(i) {
                m = m.min(self.rate(i, j));
            }
        }
        m
    }
}

/// Sampled waiting times on the index set of a geometry, stored row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightArray {
    geometry: Geometry,
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl WeightArray {
    /// Builds an array from explicit rows; row i (1-based) must have
    /// `2N + 1 - i` entries and there must be `2N` (flat) or `N` rows.
    pub fn from_rows(geometry: Geometry, n: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedWeights("N must be at least 1".into()));
        }
        let expected = match geometry {
            Geometry::Flat => 2 * n,
            Geometry::HalfFlat => n,
        };
        if rows.len() != expected {
            return Err(Error::MalformedWeights(format!(
                "expected {expected} rows, got {}",
                rows.len()
            )));
        }
        for (k, row) in rows.iter().enumerate() {
            let want = 2 * n - k;
            if row.len() != want {
                return Err(Error::MalformedWeights(format!(
                    "row {} has {} entries, expected {want}",
                    k + 1,
                    row.len()
                )));
            }
            if let Some(x) = row.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::MalformedWeights(format!("entry {x} in row {} is not >= 0", k + 1)));
            }
        }
        Ok(WeightArray { geometry, n, rows })
    }

    /// Builds an array by evaluating `f(i, j)` on every site, rows in order.
    pub fn from_fn(geometry: Geometry, n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let nrows = match geometry {
            Geometry::Flat => 2 * n,
            Geometry::HalfFlat => n,
        };
        let rows = (1..=nrows).map(|i| (1..=2 * n + 1 - i).map(|j| f(i, j)).collect()).collect();
        Self::from_rows(geometry, n, rows)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Entry at 1-based site (i,j), or `None` outside the index set.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == 0 || j == 0 {
            return None;
        }
        self.rows.get(i - 1).and_then(|r| r.get(j - 1)).copied()
    }

    /// Mirror image (i,j) -> (j,i); only defined for the flat geometry.
    pub fn transposed(&self) -> Result<Self> {
        if self.geometry != Geometry::Flat {
            return Err(Error::MalformedWeights("transpose needs the flat geometry".into()));
        }
        Self::from_fn(Geometry::Flat, self.n, |i, j| self.rows[j - 1][i - 1])
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::MalformedWeights(format!("entry {value} is not >= 0")));
        }
        match self.rows.get_mut(i.wrapping_sub(1)).and_then(|r| r.get_mut(j.wrapping_sub(1))) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::MalformedWeights(format!("site ({i},{j}) outside the index set"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_follow_three_case_rule() {
        let p = ModelParams::new(Geometry::Flat, vec![0.3, 0.7], vec![1.1, 1.9]).unwrap();
        assert_eq!(p.rate(1, 2), 0.3 + 1.9);
        // i <= N < j: alpha_i + alpha_{2N-j+1}
        assert_eq!(p.rate(1, 3), 0.3 + 0.7);
        assert_eq!(p.rate(1, 4), 0.3 + 0.3);
        assert_eq!(p.rate(2, 3), 0.7 + 0.7);
        // j <= N < i
        assert_eq!(p.rate(3, 1), 1.9 + 1.1);
        assert_eq!(p.rate(4, 1), 1.1 + 1.1);
        assert_eq!(p.min_rate(), 0.6);

        let q = ModelParams::new(Geometry::Flat, vec![0.4], vec![1.5]).unwrap();
        assert_eq!((q.rate(1, 1), q.rate(1, 2), q.rate(2, 1)), (0.4 + 1.5, 0.8, 3.0));
    }

    #[test]
    fn index_sets() {
        let f = ModelParams::new(Geometry::Flat, vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        let h = f.with_geometry(Geometry::HalfFlat);
        let count = |p: &ModelParams| (1..=6).flat_map(|i| (1..=6).map(move |j| (i, j))).filter(|&(i, j)| p.contains(i, j)).count();
        assert_eq!(count(&f), 4 + 3 + 2 + 1);
        assert_eq!(count(&h), 4 + 3);
        assert!(f.is_distinct());
    }

    #[test]
    fn validation() {
        let e = ModelParams::new(Geometry::Flat, vec![1.0, -2.0], vec![1.0, 1.0]).unwrap_err();
        assert!(e.to_string().contains("alpha[1]"));
        assert!(ModelParams::new(Geometry::Flat, vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(ModelParams::iid(Geometry::Flat, 0, 1.0).is_err());
        assert!(!ModelParams::iid(Geometry::Flat, 2, 1.0).unwrap().is_distinct());
    }

    #[test]
    fn weight_array_shape() {
        assert!(WeightArray::from_rows(Geometry::HalfFlat, 1, vec![vec![1.0, 2.0]]).is_ok());
        assert!(WeightArray::from_rows(Geometry::HalfFlat, 1, vec![vec![1.0]]).is_err());
        assert!(WeightArray::from_rows(Geometry::Flat, 1, vec![vec![1.0, -2.0], vec![1.0]]).is_err());
    }
}
