//! Weighted derivative norms `r_l = |y^{l - eps} grad d_y^l U|_{L^2(y^alpha)}`
//! of the full-space solution and their factorial growth.
//!
//! With `w = A(lambda) phi(lambda y)`, `phi(x) = x^beta K_beta(x)`, the
//! substitution `x = lambda y` separates
//! `r_l^2 = Q * J_l`, `Q = omega int |fhat|^2 A^2 lambda^{1 + 2 eps - alpha} lambda^{d-1}`,
//! `J_l = int_0^inf x^{2l - 2 eps + alpha} (|phi^{(l+1)}|^2 + |phi^{(l)}|^2) dx`.

use crate::error::{domain, Result};
use crate::oracle::{ModeProfile, DERIVATIVE_CAP};
use crate::params::FracParams;
use crate::quadrature::{integrate_adaptive, AdaptiveOptions};
use crate::synthesis::{power_tail, RadialProfile};
use crate::Cutoff;

/// Growth bound on `g_l`.
pub const K_CAP: f64 = 10.0;

/// Largest `ell_max` accepted.
pub const ELL_MAX_CAP: usize = 8;

/// `min(1 + alpha, 1 - alpha) / 4`.
pub fn default_eps(alpha: f64) -> f64 {
    (1.0 + alpha).min(1.0 - alpha) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityRow {
    pub ell: usize,
    pub r: f64,
    /// `r_{l+1} / ((l+1) r_l)`; `None` on the last row
    pub growth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityProbe {
    pub eps: f64,
    pub rows: Vec<RegularityRow>,
    pub max_growth: f64,
    /// all increments of `g_l` positive and the last no smaller than the first
    pub blow_up_trend: bool,
    pub pass: bool,
}

const X_MIN: f64 = 1e-8;
const X_MAX: f64 = 90.0;

/// `J_l` for `l = 0..=ell_max`.
pub fn profile_moments(params: &FracParams, ell_max: usize, eps: f64) -> Result<Vec<f64>> {
    let w = ModeProfile::new(1.0, *params, Cutoff::Infinite, 1.0)?;
    let norm = w.coefficients().0;
    let alpha = params.alpha();
    (0..=ell_max)
        .map(|ell| {
            let power = 2.0 * ell as f64 - 2.0 * eps + alpha;
            let g = |x: f64| -> Result<f64> {
                let d0 = w.derivative(ell, x)? / norm;
                let d1 = w.derivative(ell + 1, x)? / norm;
                Ok(x.powf(power) * (d1 * d1 + d0 * d0))
            };
            let tail = power_tail(X_MIN, g(X_MIN)?, g(2.0 * X_MIN)?)?;
            let mut failure = None;
            let body = integrate_adaptive(
                |t| {
                    let x = t.exp();
                    match g(x) {
                        Ok(v) => v * x,
                        Err(e) => {
                            failure.get_or_insert(e);
                            0.0
                        }
                    }
                },
                X_MIN.ln(),
                X_MAX.ln(),
                AdaptiveOptions { rel_tol: 1e-10, abs_tol: 0.0, initial_panels: 32, max_panels: 8000 },
            )?;
            match failure {
                Some(e) => Err(e),
                None => Ok(body.value + tail),
            }
        })
        .collect()
}

/// Growth ratios `g_l` for `l = 1..ell_max-1` and their verdict from the moments alone.
pub fn growth_ratios(moments: &[f64]) -> Vec<f64> {
    (1..moments.len().saturating_sub(1))
        .map(|l| (moments[l + 1] / moments[l]).sqrt() / (l + 1) as f64)
        .collect()
}

fn blow_up(g: &[f64]) -> bool {
    if g.len() < 3 {
        return false;
    }
    let inc: Vec<f64> = g.windows(2).map(|w| w[1] - w[0]).collect();
    inc.iter().all(|d| *d > 0.0) && inc[inc.len() - 1] >= inc[0]
}

pub fn regularity_probe(params: &FracParams, f: &RadialProfile, ell_max: usize, eps: f64) -> Result<RegularityProbe> {
    if ell_max > ELL_MAX_CAP || ell_max + 1 > DERIVATIVE_CAP {
        return Err(domain(format!("ell_max = {ell_max} exceeds {ELL_MAX_CAP}")));
    }
    if ell_max < 2 {
        return Err(domain("ell_max must be at least 2"));
    }
    let alpha = params.alpha();
    if !(eps > 0.0 && eps < 1.0) || !(alpha - eps > -1.0 && alpha + eps < 1.0) {
        return Err(domain(format!("eps = {eps} must lie in (0, 1) with alpha +- eps in (-1, 1)")));
    }
    if f.is_zero() {
        let rows = (0..=ell_max).map(|ell| RegularityRow { ell, r: 0.0, growth: None }).collect();
        return Ok(RegularityProbe { eps, rows, max_growth: 0.0, blow_up_trend: false, pass: true });
    }
    let moments = profile_moments(params, ell_max, eps)?;
    let beta = params.beta();
    let amp0 = crate::bessel::recip_gamma(beta) * (1.0 - beta).exp2();
    let q = crate::synthesis::mode_integral(f, 1.0 + 2.0 * eps - alpha, |l| {
        let a = amp0 / (params.s() + l.powf(2.0 * beta));
        Ok(a * a * l.powf(1.0 + 2.0 * eps - alpha))
    })?;
    let g = growth_ratios(&moments);
    let rows = moments
        .iter()
        .enumerate()
        .map(|(ell, j)| RegularityRow {
            ell,
            r: (q * j).sqrt(),
            growth: if ell >= 1 { g.get(ell - 1).copied() } else { None },
        })
        .collect();
    let max_growth = g.iter().copied().fold(0.0, f64::max);
    let blow_up_trend = blow_up(&g);
    Ok(RegularityProbe { eps, rows, max_growth, blow_up_trend, pass: max_growth <= K_CAP && !blow_up_trend })
}
