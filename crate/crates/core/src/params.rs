//! Problem parameters: the fractional order, the reaction coefficient, the
//! spatial dimension and the constants derived from them.

use crate::error::{domain, Result};
use statrs::function::gamma::{gamma, ln_gamma};

/// `alpha = 1 - 2 beta`, the exponent of the extension weight `y^alpha`.
pub fn alpha_from_beta(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(1.0 - 2.0 * beta)
}

/// Normalisation constant `d_beta = 2^(1-2 beta) Gamma(1-beta) / Gamma(beta)`
/// of the Neumann data of the extension.
pub fn compute_dbeta(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    // Gamma is only evaluated on (0, 1), where the Lanczos form is accurate to ~1e-15.
    Ok((1.0 - 2.0 * beta).exp2() * gamma(1.0 - beta) / gamma(beta))
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("beta = {beta} is outside (0, 1)")))
    }
}

/// Algebraic decay exponent of the squared truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRate {
    pub mu: f64,
}

/// `mu = 1 + |alpha|` for `s > 0` and `mu = 1 + alpha` for `s = 0`.
///
/// The branch uses an exact comparison: the rate jumps at `s = 0`.
pub fn compute_mu(alpha: f64, s: f64) -> Result<DecayRate> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(domain(format!("alpha = {alpha} is outside (-1, 1)")));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(domain(format!("s = {s} must be a finite nonnegative number")));
    }
    let mu = if s > 0.0 { 1.0 + alpha.abs() } else { 1.0 + alpha };
    Ok(DecayRate { mu })
}

/// Parameter bundle of the fractional problem `L^beta u + s u = f` in `R^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    beta: f64,
    alpha: f64,
    s: f64,
    dim: usize,
    d_beta: f64,
}

impl FracParams {
    pub fn new(beta: f64, s: f64, dim: usize) -> Result<Self> {
        let alpha = alpha_from_beta(beta)?;
        let d_beta = compute_dbeta(beta)?;
        if !(s >= 0.0) || !s.is_finite() {
            return Err(domain(format!("s = {s} must be a finite nonnegative number")));
        }
        match dim {
            3 => {}
            2 if s > 0.0 => {}
            2 => return Err(domain("dim = 2 requires s > 0")),
            _ => return Err(domain(format!("dim = {dim} is not 2 or 3"))),
        }
        Ok(Self { beta, alpha, s, dim, d_beta })
    }

    /// Same order and dimension with a different reaction coefficient.
    pub fn with_s(&self, s: f64) -> Result<Self> {
        Self::new(self.beta, s, self.dim)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn d_beta(&self) -> f64 {
        self.d_beta
    }

    pub fn mu(&self) -> DecayRate {
        // alpha and s were validated on construction
        compute_mu(self.alpha, self.s).expect("validated parameters")
    }

    /// Surface measure of the unit sphere in `R^dim`.
    pub fn omega(&self) -> f64 {
        sphere_measure(self.dim)
    }
}

pub(crate) fn sphere_measure(dim: usize) -> f64 {
    match dim {
        2 => 2.0 * std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI,
    }
}

/// `1 / Gamma(x)` through the log-gamma function, valid for `x > 0`.
pub(crate) fn recip_gamma_pos(x: f64) -> f64 {
    (-ln_gamma(x)).exp()
}
