//! Dense LU with partial pivoting and log-domain determinants.

/// Determinant as `sign * exp(log_abs)`; `sign == 0` for a singular matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub sign: f64,
}

impl LogDet {
    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.log_abs.exp()
        }
    }
}

/// Log-determinant of the row-major `n x n` matrix `a`, destroyed in place.
pub fn log_det_in_place(a: &mut [f64], n: usize) -> LogDet {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut sign = 1.0;
    let mut log_abs = 0.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return LogDet { log_abs: f64::NEG_INFINITY, sign: 0.0 };
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        if pivot < 0.0 {
            sign = -sign;
        }
        log_abs += pivot.abs().ln();
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(i * n);
                let row_k = &top[k * n + k + 1..k * n + n];
                let row_i = &mut bottom[k + 1..n];
                for (x, y) in row_i.iter_mut().zip(row_k) {
                    *x -= f * y;
                }
            }
        }
    }
    LogDet { log_abs, sign }
}

pub fn log_det(a: &[f64], n: usize) -> LogDet {
    let mut m = a.to_vec();
    log_det_in_place(&mut m, n)
}

pub fn det(a: &[f64], n: usize) -> f64 {
    log_det(a, n).value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        assert_eq!(det(&[], 0), 1.0);
        assert!((det(&[3.0], 1) - 3.0).abs() < 1e-15);
        assert!((det(&[1.0, 2.0, 3.0, 4.0], 2) + 2.0).abs() < 1e-15);
        assert_eq!(det(&[1.0, 2.0, 2.0, 4.0], 2), 0.0);
        let ld = log_det(&[0.0, 1.0, 1.0, 0.0], 2);
        assert_eq!(ld.sign, -1.0);
    }

    #[test]
    fn matches_nalgebra() {
        let n = 7;
        let a: Vec<f64> = (0..n * n).map(|k| ((k * 37 % 11) as f64 - 5.0) / 3.0 + if k % (n + 1) == 0 { 2.0 } else { 0.0 }).collect();
        let m = nalgebra::DMatrix::from_row_slice(n, n, &a);
        let want = m.determinant();
        let got = det(&a, n);
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
    }
}
