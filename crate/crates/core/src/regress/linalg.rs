//! Dense least-squares kernels.

/// Cholesky solve of the symmetric system `a x = b`. Returns `None` when a
/// pivot falls below `tol` times the largest diagonal entry.
pub fn cholesky_solve(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().enumerate().map(|(i, r)| r[i]).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= tol * scale {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut z = vec![0.0; n];
    for i in 0..n {
        z[i] = (b[i] - (0..i).map(|k| l[i][k] * z[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (z[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Some(x)
}

/// Column means and standard deviations; a constant column gets scale 1.
pub fn column_scaling(x: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len() as f64;
    let p = x.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; p];
    for row in x {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v / n;
        }
    }
    let mut sd = vec![0.0; p];
    for row in x {
        for ((s, v), m) in sd.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m) / n;
        }
    }
    for s in &mut sd {
        *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
    }
    (mean, sd)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// The normal equations were singular and were damped.
    pub ridge: bool,
}

pub const RIDGE_DAMPING: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-11;

/// Ordinary least squares with intercept. Columns are centred and scaled
/// before the normal equations are solved. With `ridge_fallback`, a
/// singular system is retried with `RIDGE_DAMPING` on the diagonal;
/// otherwise `None` is returned.
pub fn least_squares(x: &[Vec<f64>], y: &[f64], ridge_fallback: bool) -> Option<LinearFit> {
    let n = y.len();
    let p = x.first().map_or(0, Vec::len);
    let y_mean = y.iter().sum::<f64>() / n as f64;
    if p == 0 {
        return Some(LinearFit {
            weights: Vec::new(),
            bias: y_mean,
            ridge: false,
        });
    }
    let (mean, sd) = column_scaling(x);
    let z: Vec<Vec<f64>> = x
        .iter()
        .map(|r| r.iter().zip(&mean).zip(&sd).map(|((v, m), s)| (v - m) / s).collect())
        .collect();
    let mut a = vec![vec![0.0; p]; p];
    let mut rhs = vec![0.0; p];
    for (row, &yi) in z.iter().zip(y) {
        for i in 0..p {
            rhs[i] += row[i] * (yi - y_mean) / n as f64;
            for j in 0..=i {
                a[i][j] += row[i] * row[j] / n as f64;
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            a[j][i] = a[i][j];
        }
    }
    let (beta, ridge) = match cholesky_solve(&a, &rhs, PIVOT_TOL) {
        Some(b) => (b, false),
        None if ridge_fallback => {
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += RIDGE_DAMPING;
            }
            (cholesky_solve(&a, &rhs, 0.0)?, true)
        }
        None => return None,
    };
    let weights: Vec<f64> = beta.iter().zip(&sd).map(|(b, s)| b / s).collect();
    let bias = y_mean - weights.iter().zip(&mean).map(|(w, m)| w * m).sum::<f64>();
    Some(LinearFit {
        weights,
        bias,
        ridge,
    })
}

pub fn linear_predict(w: &[f64], b: f64, x: &[f64]) -> f64 {
    b + w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
}

pub fn sse(w: &[f64], b: f64, x: &[Vec<f64>], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(r, yi)| (linear_predict(w, b, r) - yi).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_system() {
        let a = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let x = cholesky_solve(&a, &[2.0, 1.0], 1e-12).unwrap();
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-12);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-12);
        assert!(cholesky_solve(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 1.0], 1e-12).is_none());
    }

    #[test]
    fn duplicate_columns_fall_back_to_ridge() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, i as f64]).collect();
        let y: Vec<f64> = (0..6).map(|i| 2.0 * i as f64 + 1.0).collect();
        assert!(least_squares(&x, &y, false).is_none());
        let fit = least_squares(&x, &y, true).unwrap();
        assert!(fit.ridge);
        assert!((fit.weights[0] + fit.weights[1] - 2.0).abs() < 1e-6);
    }
}
