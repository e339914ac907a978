//! Small regression utilities used by the scaling analyses.

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::lstsq;

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientStatistics { found: x.len().min(y.len()), needed: 2 });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("regressor has zero variance".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit { slope, intercept, r_squared })
}

/// Polynomial least squares on `x` mapped affinely onto `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
    center: f64,
    scale: f64,
}

impl Polynomial {
    pub fn fit(x: &[f64], y: &[f64], degree: usize) -> Result<Self> {
        if x.len() != y.len() || x.len() <= degree {
            return Err(Error::InsufficientStatistics { found: x.len(), needed: degree + 1 });
        }
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let center = 0.5 * (lo + hi);
        let scale = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
        let a = Mat::from_fn(x.len(), degree + 1, |i, j| ((x[i] - center) / scale).powi(j as i32));
        let coeffs = lstsq(&a, y);
        Ok(Self { coeffs, center, scale })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.scale;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Local-quadratic (Savitzky-Golay) first derivative `dy/dx` on nonuniform
/// abscissae. Returns `(x_center, slope)` for every point with a full
/// centred window of `window` (odd, >= 3) points.
pub fn local_quadratic_slope(x: &[f64], y: &[f64], window: usize) -> Result<Vec<(f64, f64)>> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::Domain(format!("window must be odd and >= 3, got {window}")));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let h = window / 2;
    let mut out = Vec::new();
    for c in h..x.len().saturating_sub(h) {
        let xs = &x[c - h..=c + h];
        let ys = &y[c - h..=c + h];
        let a = Mat::from_fn(window, 3, |i, j| (xs[i] - x[c]).powi(j as i32));
        let coef = lstsq(&a, ys);
        out.push((x[c], coef[1]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_exact() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 1.0 - 2.0 * v).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_reproduces_cubic() {
        let x: Vec<f64> = (0..30).map(|i| -3.0 + 0.2 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v * v - v + 4.0).collect();
        let p = Polynomial::fit(&x, &y, 3).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((p.eval(*a) - b).abs() < 1e-10);
        }
    }

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = (0..60).map(|i| -2.0 + 0.07 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.75 * v + 0.1 * v * v).collect();
        let s = local_quadratic_slope(&x, &y, 9).unwrap();
        assert_eq!(s.len(), 52);
        for (xc, d) in s {
            assert!((d - (0.75 + 0.2 * xc)).abs() < 1e-10);
        }
    }
}
