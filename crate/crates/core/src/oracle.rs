//! Closed-form mode solutions of the constant-coefficient extension.
//!
//! For a frequency `lambda > 0` the mode ODE `-(y^alpha w')' + lambda^2
//! y^alpha w = 0` has the solutions `(lambda y)^beta K_beta(lambda y)` and
//! `(lambda y)^beta I_beta(lambda y)`. The full-space profile uses the
//! decaying `K` branch only; the truncated profile adds the `I` branch so that
//! `w'(Y) = 0`. The Robin condition `d_beta^{-1}(-lim y^alpha w') + s w(0) = fhat`
//! fixes the amplitude.

use crate::bessel::{bessel_i_scaled, bessel_k_scaled, bessel_k_scaled_seq, recip_gamma};
use crate::error::{domain, Error, Result};
use crate::params::FracParams;
use crate::Cutoff;
use std::f64::consts::PI;

/// Deepest y-derivative supported by [`ModeProfile::derivative`].
pub const DERIVATIVE_CAP: usize = 12;

/// Normalised truncated symbol `a_Y(lambda)` (so that `w(0) = fhat / (s + a_Y)`)
/// together with a bound on `lambda^{2 beta} - a_Y(lambda)`.
///
/// `a_Y = lambda^{2 beta} I_{1-beta}(X) / (I_{1-beta}(X) + (2/pi) sin(pi beta) K_{1-beta}(X))`
/// with `X = lambda Y`, and `a_inf = lambda^{2 beta}`.
pub fn dtn_symbol_with_bound(lambda: f64, cutoff: Cutoff, params: &FracParams) -> Result<(f64, f64)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(format!("frequency {lambda} must be positive")));
    }
    let beta = params.beta();
    let full = lambda.powf(2.0 * beta);
    let Some(y) = cutoff.finite() else {
        return Ok((full, 0.0));
    };
    if !(y > 0.0) {
        return Err(domain(format!("cutoff {y} must be positive")));
    }
    let x = lambda * y;
    let sfac = 2.0 / PI * (PI * beta).sin();
    // K_{1-beta}/I_{1-beta} = (e^x K)/(e^-x I) e^{-2x}; the tail underflows harmlessly.
    let ratio = bessel_k_scaled(1.0 - beta, x) / bessel_i_scaled(1.0 - beta, x) * (-2.0 * x).exp();
    let value = full / (1.0 + sfac * ratio);
    Ok((value, full * sfac * ratio))
}

/// Normalised Dirichlet-to-Neumann symbol of the (truncated) extension.
pub fn dtn_symbol(lambda: f64, cutoff: Cutoff, params: &FracParams) -> Result<f64> {
    dtn_symbol_with_bound(lambda, cutoff, params).map(|(v, _)| v)
}

/// Exact solution of one mode problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    lambda: f64,
    params: FracParams,
    cutoff: Cutoff,
    fhat: f64,
    trace: f64,
    dtn: f64,
    /// coefficient of `(lambda y)^beta K_beta(lambda y)`
    amp: f64,
    /// `c_I = amp * ratio_scaled * e^{-2 lambda Y}`
    ratio_scaled: f64,
    big_x: f64,
}

impl ModeProfile {
    pub fn new(lambda: f64, params: FracParams, cutoff: Cutoff, fhat: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(domain(format!("frequency {lambda} must be nonnegative")));
        }
        if let Cutoff::Finite(y) = cutoff {
            if !(y > 0.0) || !y.is_finite() {
                return Err(domain(format!("cutoff {y} must be positive")));
            }
        }
        let s = params.s();
        let beta = params.beta();
        if lambda == 0.0 {
            if s == 0.0 {
                return Err(Error::DivisionByZero("mode lambda = 0 with s = 0 has no solution".into()));
            }
            return Ok(Self {
                lambda,
                params,
                cutoff,
                fhat,
                trace: fhat / s,
                dtn: 0.0,
                amp: 0.0,
                ratio_scaled: 0.0,
                big_x: f64::INFINITY,
            });
        }
        let dtn = dtn_symbol(lambda, cutoff, &params)?;
        let trace = fhat / (s + dtn);
        // (lambda y)^beta K_beta(lambda y) -> 2^{beta-1} Gamma(beta) as y -> 0
        let amp = trace * recip_gamma(beta) * (1.0 - beta).exp2();
        let (ratio_scaled, big_x) = match cutoff {
            Cutoff::Infinite => (0.0, f64::INFINITY),
            Cutoff::Finite(y) => {
                let x = lambda * y;
                (bessel_k_scaled(1.0 - beta, x) / bessel_i_scaled(beta - 1.0, x), x)
            }
        };
        Ok(Self { lambda, params, cutoff, fhat, trace, dtn, amp, ratio_scaled, big_x })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn params(&self) -> &FracParams {
        &self.params
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn fhat(&self) -> f64 {
        self.fhat
    }

    /// `w(0) = fhat / (s + a_Y(lambda))`.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn dtn(&self) -> f64 {
        self.dtn
    }

    /// Coefficients `(c_K, c_I)` of `w = c_K (lambda y)^beta K_beta + c_I (lambda y)^beta I_beta`.
    pub fn coefficients(&self) -> (f64, f64) {
        let c_i = if self.ratio_scaled == 0.0 {
            0.0
        } else {
            self.amp * self.ratio_scaled * (-2.0 * self.big_x).exp()
        };
        (self.amp, c_i)
    }

    fn check_point(&self, y: f64) -> Result<()> {
        if !(y >= 0.0) {
            return Err(domain(format!("evaluation point {y} must be nonnegative")));
        }
        if let Cutoff::Finite(cut) = self.cutoff {
            if y > cut * (1.0 + 1e-12) {
                return Err(domain(format!("evaluation point {y} lies beyond the cutoff {cut}")));
            }
        }
        Ok(())
    }

    /// `w(y)`; the limit `y -> 0+` is the trace.
    pub fn eval(&self, y: f64) -> Result<f64> {
        self.check_point(y)?;
        if y == 0.0 || self.lambda == 0.0 {
            return Ok(self.trace);
        }
        let beta = self.params.beta();
        let x = self.lambda * y;
        let xb = x.powf(beta);
        let mut inner = xb * bessel_k_scaled(beta, x);
        if self.ratio_scaled != 0.0 {
            let growth = (2.0 * (x - self.big_x)).exp();
            if growth > 0.0 {
                inner += self.ratio_scaled * growth * xb * bessel_i_scaled(beta, x);
            }
        }
        Ok(self.amp * (-x).exp() * inner)
    }

    /// `d^ell w / dy^ell` at `y > 0`, from the Bessel derivative recurrences
    /// `d/dx[x^p K_q] = (p - q) x^{p-1} K_q - x^p K_{q-1}` and
    /// `d/dx[x^p I_q] = (p - q) x^{p-1} I_q + x^p I_{q-1}` applied to the
    /// coefficients, never to sampled values.
    pub fn derivative(&self, ell: usize, y: f64) -> Result<f64> {
        if ell > DERIVATIVE_CAP {
            return Err(Error::DepthCap { requested: ell, cap: DERIVATIVE_CAP });
        }
        if ell == 0 {
            return self.eval(y);
        }
        self.check_point(y)?;
        if self.lambda == 0.0 {
            return Ok(0.0);
        }
        if y == 0.0 {
            return Err(domain("derivatives are evaluated at y > 0"));
        }
        let beta = self.params.beta();
        let x = self.lambda * y;
        if x < SERIES_SWITCH {
            let mut v = phi_series_derivative(beta, ell, x, false);
            if self.ratio_scaled != 0.0 {
                v += self.ratio_scaled * (-2.0 * self.big_x).exp() * phi_series_derivative(beta, ell, x, true);
            }
            return Ok(self.lambda.powi(ell as i32) * self.amp * v);
        }
        let (coef_k, coef_i) = derivative_coefficients(ell);
        // K_{beta - j} = K_{|beta - j|}: K_beta, then K_{1-beta}, K_{2-beta}, ...
        let k_beta = bessel_k_scaled(beta, x);
        let k_seq = bessel_k_scaled_seq(1.0 - beta, x, ell - 1);
        let ln_x = x.ln();
        let mut sum_k = 0.0;
        for j in 0..=ell {
            let p = beta - (ell - j) as f64;
            let kv = if j == 0 { k_beta } else { k_seq[j - 1] };
            sum_k += coef_k[j] * (p * ln_x).exp() * kv;
        }
        let mut inner = sum_k;
        if self.ratio_scaled != 0.0 {
            let growth = (2.0 * (x - self.big_x)).exp();
            if growth > 0.0 {
                let mut sum_i = 0.0;
                for j in 0..=ell {
                    let p = beta - (ell - j) as f64;
                    sum_i += coef_i[j] * (p * ln_x).exp() * bessel_i_scaled(beta - j as f64, x);
                }
                inner += self.ratio_scaled * growth * sum_i;
            }
        }
        Ok(self.lambda.powi(ell as i32) * self.amp * (-x).exp() * inner)
    }

    /// Unit-datum norms of the profile on `(0, Y)`: `(int y^alpha (|w'|^2 +
    /// lambda^2 |w|^2), |w(0)|^2)`, integrated by parts against the ODE.
    pub fn norms(&self) -> (f64, f64) {
        let energy = self.params.d_beta() * self.dtn * self.trace * self.trace;
        (energy, self.trace * self.trace)
    }
}

/// Below this argument the derivatives come from the power series; the
/// recurrence terms cancel there.
const SERIES_SWITCH: f64 = 1.0;

/// `d^ell/dx^ell` of `x^beta K_beta(x)` (or of `x^beta I_beta(x)` when
/// `growing`) from
/// `x^beta K_beta = pi / (2 sin(pi beta)) (2^beta sum (x/2)^{2k} / (k! Gamma(k+1-beta))
///                 - 2^-beta x^{2 beta} sum (x/2)^{2k} / (k! Gamma(k+1+beta)))`.
fn phi_series_derivative(beta: f64, ell: usize, x: f64, growing: bool) -> f64 {
    let falling = |p: f64| (0..ell).fold(1.0, |acc, i| acc * (p - i as f64));
    let power_sum = |shift: f64, sign_gamma: f64| {
        let mut total = 0.0;
        let mut fact = 1.0;
        for k in 0..40 {
            if k > 0 {
                fact *= k as f64;
            }
            let p = 2.0 * k as f64 + shift;
            let c = 0.5f64.powi(2 * k) / fact * recip_gamma(k as f64 + 1.0 + sign_gamma * beta);
            let term = c * falling(p) * x.powf(p - ell as f64);
            total += term;
            if k as f64 > 0.5 * ell as f64 + 1.0 && term.abs() <= 1e-17 * total.abs() {
                break;
            }
        }
        total
    };
    let singular = (-beta).exp2() * power_sum(2.0 * beta, 1.0);
    if growing {
        return singular;
    }
    let regular = beta.exp2() * power_sum(0.0, -1.0);
    PI / (2.0 * (PI * beta).sin()) * (regular - singular)
}

/// Coefficients `c_j` of `d^ell/dx^ell [x^beta Z_beta(x)] = sum_j c_j x^{beta - ell + j} Z_{beta - j}(x)`
/// for `Z = K` and `Z = I`.
fn derivative_coefficients(ell: usize) -> (Vec<f64>, Vec<f64>) {
    let mut ck = vec![1.0];
    let mut ci = vec![1.0];
    for m in 0..ell {
        let mut nk = vec![0.0; m + 2];
        let mut ni = vec![0.0; m + 2];
        for j in 0..=m {
            let shift = (2 * j) as f64 - m as f64;
            nk[j] += ck[j] * shift;
            nk[j + 1] -= ck[j];
            ni[j] += ci[j] * shift;
            ni[j + 1] += ci[j];
        }
        ck = nk;
        ci = ni;
    }
    (ck, ci)
}

/// Norms of `a - b` on `(0, yc)` for two profiles of the same mode and datum,
/// both defined on `(0, yc)`: `(int_0^yc y^alpha (|e'|^2 + lambda^2 |e|^2), |e(0)|^2)`.
///
/// Integration by parts with the homogeneous Robin condition of `e` gives
/// `energy = yc^alpha e(yc) e'(yc) - s d_beta e(0)^2`.
pub fn difference_norms(a: &ModeProfile, b: &ModeProfile, yc: f64) -> Result<(f64, f64)> {
    if a.lambda != b.lambda || a.params != b.params || a.fhat != b.fhat {
        return Err(domain("difference of profiles with different modes"));
    }
    let e0 = a.trace - b.trace;
    if a.lambda == 0.0 {
        return Ok((0.0, e0 * e0));
    }
    let e = a.eval(yc)? - b.eval(yc)?;
    let de = a.derivative(1, yc)? - b.derivative(1, yc)?;
    let p = &a.params;
    let full = yc.powf(p.alpha()) * e * de;
    let energy = (full - p.s() * p.d_beta() * e0 * e0).max(0.0);
    Ok((energy, e0 * e0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(s: f64) -> FracParams {
        FracParams::new(0.5, s, 3).unwrap()
    }

    #[test]
    fn full_space_symbol_examples() {
        let p = FracParams::new(0.25, 1.0, 3).unwrap();
        assert!((dtn_symbol(3.0, Cutoff::Infinite, &p).unwrap() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn truncated_half_order_is_tanh() {
        let v = dtn_symbol(1.0, Cutoff::Finite(1.0), &half(1.0)).unwrap();
        assert!((v - 1f64.tanh()).abs() < 1e-14, "{v}");
        let mut prev = 0.0;
        for y in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let v = dtn_symbol(1.0, Cutoff::Finite(y), &half(1.0)).unwrap();
            assert!(v > prev && v < 1.0);
            prev = v;
        }
    }

    #[test]
    fn half_order_profiles() {
        let w = ModeProfile::new(1.0, half(1.0), Cutoff::Infinite, 1.0).unwrap();
        for y in [0.0f64, 0.3, 1.0, 5.0] {
            assert!((w.eval(y).unwrap() - 0.5 * (-y).exp()).abs() < 1e-14);
        }
        for ell in 1..=6 {
            let y = 0.7f64;
            let exact = (-1.0f64).powi(ell as i32) * 0.5 * (-y).exp();
            let got = w.derivative(ell, y).unwrap();
            assert!((got - exact).abs() < 1e-12, "ell={ell}: {got} vs {exact}");
        }
        let t = ModeProfile::new(1.0, half(0.0), Cutoff::Finite(1.0), 1.0).unwrap();
        // w = cosh(1 - y) / sinh(1)
        for y in [0.0f64, 0.25, 0.9] {
            let exact = (1.0 - y).cosh() / 1f64.sinh();
            assert!((t.eval(y).unwrap() - exact).abs() < 1e-13);
        }
        assert!(t.derivative(1, 1.0).unwrap().abs() < 1e-13);
    }

    #[test]
    fn depth_cap() {
        let w = ModeProfile::new(1.0, half(1.0), Cutoff::Infinite, 1.0).unwrap();
        assert!(matches!(w.derivative(13, 1.0), Err(Error::DepthCap { .. })));
    }
}
