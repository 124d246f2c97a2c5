//! Log-log least squares for measured decay rates.

use crate::error::{Error, Result};
use crate::params::DecayRate;

/// Least-squares line through `(ln Y, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the log residuals
    pub residual: f64,
    pub mu_expected: Option<DecayRate>,
}

impl RateFit {
    /// Measured exponent `-slope` is at least `mu - tol`.
    pub fn passes(&self, tol: f64) -> bool {
        match self.mu_expected {
            Some(DecayRate { mu }) => -self.slope >= mu - tol,
            None => false,
        }
    }

    pub fn with_mu(self, mu: DecayRate) -> Self {
        Self { mu_expected: Some(mu), ..self }
    }
}

pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} points, need at least 2", points.len())));
    }
    if let Some(&(y, v)) = points.iter().find(|&&(y, v)| !(y > 0.0 && v > 0.0) || !y.is_finite() || !v.is_finite()) {
        return Err(Error::DegenerateFit(format!("point ({y}, {v}) has no logarithm")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let zs: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let zm = zs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if sxx <= 1e-24 * n {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxz: f64 = xs.iter().zip(&zs).map(|(x, z)| (x - xm) * (z - zm)).sum();
    let slope = sxz / sxx;
    let intercept = zm - slope * xm;
    let ss: f64 = xs.iter().zip(&zs).map(|(x, z)| (z - intercept - slope * x).powi(2)).sum();
    Ok(RateFit { slope, intercept, residual: (ss / n).sqrt(), mu_expected: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let f = rate_fit(&[(1.0, 1.0), (2.0, 2f64.powi(-3))]).unwrap();
        assert!((f.slope + 3.0).abs() < 1e-14);
        let f = rate_fit(&[(1.0, 5.0), (2.0, 5.0), (4.0, 5.0)]).unwrap();
        assert!(f.slope.abs() < 1e-15);
        let pts: Vec<_> = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0].iter().map(|&y: &f64| (y, 7.0 * y.powf(-1.5))).collect();
        let f = rate_fit(&pts).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-13);
        assert!((f.intercept - 7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(rate_fit(&[(2.0, 1.0), (2.0, 3.0)]), Err(Error::DegenerateFit(_))));
        assert!(matches!(rate_fit(&[(1.0, 0.0), (2.0, 3.0)]), Err(Error::DegenerateFit(_))));
        assert!(rate_fit(&[(1.0, 1.0)]).is_err());
    }
}
