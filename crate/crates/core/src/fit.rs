//! Small least-squares fits shared by the analyses.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

fn r_squared(x: &[f64], y: &[f64], slope: f64, intercept: f64) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    if ss_tot <= f64::EPSILON * n * mean.abs().max(1.0) {
        if ss_res <= 1e-20 { 1.0 } else { 0.0 }
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Ordinary least squares y ≈ intercept + slope·x.
pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "linear fit needs at least 2 points, got {}",
            x.len().min(y.len())
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(LinearFit {
        slope,
        intercept,
        r_squared: r_squared(x, y, slope, intercept),
        n_points: x.len(),
    })
}

/// Least squares y ≈ slope·x (no intercept).
pub fn ols_through_origin(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::InsufficientData("fit through the origin needs data".into()));
    }
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae are zero".into()));
    }
    let slope = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx;
    Ok(LinearFit {
        slope,
        intercept: 0.0,
        r_squared: r_squared(x, y, slope, 0.0),
        n_points: x.len(),
    })
}

/// Shifted hyperbolic tangent, decreasing from `offset + level` to `offset`:
/// f(x) = offset + level·(1 − tanh((x − center)/width))/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sigmoid {
    pub offset: f64,
    pub level: f64,
    pub center: f64,
    pub width: f64,
}

impl Sigmoid {
    pub fn eval(&self, x: f64) -> f64 {
        self.offset + self.level * 0.5 * (1.0 - ((x - self.center) / self.width).tanh())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidFit {
    pub curve: Sigmoid,
    pub rss: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Levenberg-Marquardt fit of [`Sigmoid`]. With `free_offset = false` the
/// lower asymptote is pinned to zero.
pub fn fit_sigmoid(x: &[f64], y: &[f64], start: Sigmoid, free_offset: bool) -> SigmoidFit {
    let n_par = if free_offset { 4 } else { 3 };
    let unpack = |p: &DVector<f64>| Sigmoid {
        level: p[0],
        center: p[1],
        width: p[2],
        offset: if free_offset { p[3] } else { 0.0 },
    };
    let residuals = |s: &Sigmoid| -> DVector<f64> {
        DVector::from_iterator(x.len(), x.iter().zip(y).map(|(&xi, &yi)| yi - s.eval(xi)))
    };
    let mut p = DVector::from_vec(if free_offset {
        vec![start.level, start.center, start.width, start.offset]
    } else {
        vec![start.level, start.center, start.width]
    });
    let mut cur = unpack(&p);
    let mut r = residuals(&cur);
    let mut rss = r.norm_squared();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..500 {
        iterations = it + 1;
        let mut jac = DMatrix::<f64>::zeros(x.len(), n_par);
        for (i, &xi) in x.iter().enumerate() {
            let u = (xi - cur.center) / cur.width;
            let th = u.tanh();
            let sech2 = 1.0 - th * th;
            jac[(i, 0)] = 0.5 * (1.0 - th);
            jac[(i, 1)] = 0.5 * cur.level * sech2 / cur.width;
            jac[(i, 2)] = 0.5 * cur.level * sech2 * u / cur.width;
            if free_offset {
                jac[(i, 3)] = 1.0;
            }
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..n_par {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial_p = &p + &step;
            let trial = unpack(&trial_p);
            if !(trial.width.is_finite() && trial.width.abs() > 1e-12) {
                lambda *= 10.0;
                continue;
            }
            let trial_r = residuals(&trial);
            let trial_rss = trial_r.norm_squared();
            if trial_rss.is_finite() && trial_rss <= rss {
                let rel = (rss - trial_rss) / rss.max(1e-300);
                let small_step = step.norm() <= 1e-12 * (p.norm() + 1e-12);
                p = trial_p;
                cur = trial;
                r = trial_r;
                rss = trial_rss;
                lambda = (lambda / 10.0).max(1e-15);
                improved = true;
                if rel < 1e-14 || small_step || rss < 1e-28 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // no descent direction left: stationary point
            converged = jtr.norm() <= 1e-8 * (1.0 + rss.sqrt());
            break;
        }
        if converged {
            break;
        }
    }
    SigmoidFit {
        curve: cur,
        rss,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ols_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let fit = ols(&x, &y).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 2.0).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ols_needs_two_distinct_points() {
        assert!(ols(&[1.0], &[2.0]).is_err());
        assert!(ols(&[1.0, 1.0], &[2.0, 3.0]).is_err());
    }

    #[test]
    fn origin_fit() {
        let x = [1.0, 2.0, 3.0];
        let y = [3.0, 6.0, 9.0];
        let fit = ols_through_origin(&x, &y).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-14);
    }

    #[test]
    fn sigmoid_noiseless_recovery() {
        let truth = Sigmoid {
            offset: 0.0,
            level: 1.3,
            center: -2.0,
            width: 0.4,
        };
        let x: Vec<f64> = (0..61).map(|i| -5.0 + 4.0 * i as f64 / 60.0).collect();
        let y: Vec<f64> = x.iter().map(|&v| truth.eval(v)).collect();
        let start = Sigmoid {
            offset: 0.0,
            level: 1.0,
            center: -3.0,
            width: 1.0,
        };
        let fit = fit_sigmoid(&x, &y, start, false);
        assert!(fit.converged);
        assert!((fit.curve.center + 2.0).abs() < 1e-9);
        assert!((fit.curve.width - 0.4).abs() < 1e-9);
        let free = fit_sigmoid(&x, &y, start, true);
        assert!((free.curve.center + 2.0).abs() < 1e-8);
        assert!(free.curve.offset.abs() < 1e-8);
    }
}
