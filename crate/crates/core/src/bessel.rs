//! Modified Bessel functions `I_nu` and `K_nu` of real order.
//!
//! `I_nu` is summed from its power series (positive terms, with dynamic
//! rescaling so large arguments do not overflow) and from the Hankel
//! asymptotic series once `x > max(30, 4 nu^2)`. `K_nu` follows Temme's
//! method: the Temme series for `x < 2`, Steed's continued fraction
//! otherwise, then forward recurrence in the order. All internal routines
//! return exponentially scaled values.

use crate::error::{domain, Error, Result};
use crate::params::recip_gamma_pos;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

/// Largest argument accepted by the unscaled [`bessel_ik`].
pub const OVERFLOW_GUARD: f64 = 600.0;

const EPS: f64 = 1e-17;
const MAX_ITER: usize = 100_000;

/// Taylor coefficients `c_k` of `1 / Gamma(z) = sum_k c_k z^k`, `k = 1..=28`.
const RGAMMA_TAYLOR: [f64; 28] = [
    1.0,
    0.577_215_664_901_532_860_606_5,
    -0.655_878_071_520_253_881_077,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_501_7,
    -0.042_197_734_555_544_336_748_21,
    -0.009_621_971_527_876_973_562_115,
    0.007_218_943_246_663_099_542_395,
    -0.001_165_167_591_859_065_112_114,
    -0.000_215_241_674_114_950_972_815_7,
    0.000_128_050_282_388_116_186_153_2,
    -0.000_020_134_854_780_788_238_655_69,
    -0.000_001_250_493_482_142_670_657_345,
    0.000_001_133_027_231_981_695_882_374,
    -2.056_338_416_977_607_103_45e-7,
    6.116_095_104_481_415_817_862e-9,
    5.002_007_644_469_222_930_056e-9,
    -1.181_274_570_487_020_144_588e-9,
    1.043_426_711_691_100_510_492e-10,
    7.782_263_439_905_071_254_05e-12,
    -3.696_805_618_642_205_708_188e-12,
    5.100_370_287_454_475_979_015e-13,
    -2.058_326_053_566_506_783_222e-14,
    -5.348_122_539_423_017_982_37e-15,
    1.226_778_628_238_260_790_159e-15,
    -1.181_259_301_697_458_769_514e-16,
    1.186_692_254_751_600_332_58e-18,
    1.412_380_655_318_031_781_556e-18,
];

/// Temme's auxiliary functions for `|mu| <= 1/2`:
/// `gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)`,
/// `gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2`,
/// and `1/Gamma(1+mu)`, `1/Gamma(1-mu)`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // 1/Gamma(1 +- mu) = sum_k c_k (+-mu)^(k-1): odd k give gam2, even k give -gam1
    let mu2 = mu * mu;
    let (mut gam1, mut gam2) = (0.0, 0.0);
    let mut pw = 1.0;
    for pair in RGAMMA_TAYLOR.chunks(2) {
        gam2 += pair[0] * pw;
        if let Some(&c) = pair.get(1) {
            gam1 -= c * pw;
        }
        pw *= mu2;
    }
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}

/// `e^x K_mu(x)` and `e^x K_{mu+1}(x)` for `|mu| <= 1/2`.
fn k_pair_scaled(mu: f64, x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let mu2 = mu * mu;
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < 1e-15 { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < 1e-15 { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        let scale = x.exp();
        (sum * scale, sum1 * 2.0 * xi * scale)
    } else {
        // Steed's algorithm for the continued fraction CF2
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        let kmu = (PI / (2.0 * x)).sqrt() / s;
        let k1 = kmu * (mu + x + 0.5 - h) * xi;
        (kmu, k1)
    }
}

/// `e^x K_{nu0 + k}(x)` for `k = 0..=n`, `nu0 >= 0`, `x > 0`.
pub fn bessel_k_scaled_seq(nu0: f64, x: f64, n: usize) -> Vec<f64> {
    let nu0 = nu0.abs();
    let nl = (nu0 + 0.5).floor();
    let mu = nu0 - nl;
    let (mut kmu, mut k1) = k_pair_scaled(mu, x);
    let xi2 = 2.0 / x;
    // forward recurrence K_{v+1} = (2v/x) K_v + K_{v-1}
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(kmu);
    if n >= 1 {
        out.push(k1);
    }
    for k in 2..=n {
        let v = nu0 + (k - 1) as f64;
        let next = v * xi2 * out[k - 1] + out[k - 2];
        out.push(next);
    }
    out
}

/// `e^x K_nu(x)`; `K` is even in the order.
pub fn bessel_k_scaled(nu: f64, x: f64) -> f64 {
    bessel_k_scaled_seq(nu.abs(), x, 0)[0]
}

/// `e^{-x} I_nu(x)` for real `nu` (non-integer when `nu < -1`) and `x > 0`.
pub fn bessel_i_scaled(nu: f64, x: f64) -> f64 {
    if nu <= -1.0 {
        let m = -nu;
        let refl = 2.0 / PI * (PI * m).sin();
        let k = if refl == 0.0 { 0.0 } else { bessel_k_scaled(m, x) * (-2.0 * x).exp() };
        return bessel_i_scaled(m, x) + refl * k;
    }
    if x > 30.0 && x > 4.0 * nu * nu {
        i_asymptotic_scaled(nu, x)
    } else {
        i_series_scaled(nu, x)
    }
}

fn i_series_scaled(nu: f64, x: f64) -> f64 {
    // t_0 = (x/2)^nu / Gamma(nu + 1), kept as mantissa * e^log_offset
    let half = 0.5 * x;
    let quarter_sq = half * half;
    let mut log_offset = nu * half.ln() - ln_gamma(nu + 1.0) - x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        term *= quarter_sq / (kf * (kf + nu));
        sum += term;
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            log_offset += 250.0 * std::f64::consts::LN_10;
        }
        if term < sum * EPS && kf > half {
            break;
        }
    }
    sum * log_offset.exp()
}

fn i_asymptotic_scaled(nu: f64, x: f64) -> f64 {
    let m4 = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let next = -term * (m4 - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// `I_nu(x)`, `K_nu(x)` and their derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub nu: f64,
    pub x: f64,
    pub i: f64,
    pub k: f64,
    pub di: f64,
    pub dk: f64,
}

impl BesselPair {
    /// `x (I K' - I' K)`, identically `-1`.
    pub fn wronskian_residual(&self) -> f64 {
        self.x * (self.i * self.dk - self.di * self.k) + 1.0
    }
}

/// `I_nu(x)`, `K_nu(x)` and derivatives for `0 < nu < 1`, `0 < x <= 600`.
pub fn bessel_ik(nu: f64, x: f64) -> Result<BesselPair> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(domain(format!("order {nu} is outside (0, 1)")));
    }
    if !(x > 0.0) {
        return Err(domain(format!("argument {x} must be positive")));
    }
    if x > OVERFLOW_GUARD {
        return Err(Error::Overflow { x, limit: OVERFLOW_GUARD });
    }
    let ex = x.exp();
    let i = bessel_i_scaled(nu, x) * ex;
    let i_m1 = bessel_i_scaled(nu - 1.0, x) * ex;
    let ks = bessel_k_scaled_seq(nu, x, 0)[0];
    let k = ks / ex;
    let k_m1 = bessel_k_scaled(1.0 - nu, x) / ex;
    Ok(BesselPair {
        nu,
        x,
        i,
        k,
        di: i_m1 - nu / x * i,
        dk: -k_m1 - nu / x * k,
    })
}

/// `1 / Gamma(nu)` helper re-exported for the oracle's small-argument limits.
pub(crate) fn recip_gamma(nu: f64) -> f64 {
    recip_gamma_pos(nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_forms() {
        let p = bessel_ik(0.5, 1.0).unwrap();
        let k_exact = (PI / 2.0).sqrt() * (-1.0f64).exp();
        let i_exact = (2.0 / PI).sqrt() * 1.0f64.sinh();
        assert!((p.k - k_exact).abs() < 1e-14 * k_exact, "{} vs {}", p.k, k_exact);
        assert!((p.i - i_exact).abs() < 1e-14 * i_exact);
        assert!((k_exact - 0.46107).abs() < 1e-5);
        assert!((i_exact - 0.93767).abs() < 1e-5);
    }

    #[test]
    fn half_order_across_switchover() {
        for &x in &[0.01, 0.5, 1.99, 2.0, 2.01, 7.9, 8.0, 29.0, 31.0, 120.0] {
            let ks = bessel_k_scaled(0.5, x);
            let exact = (PI / (2.0 * x)).sqrt();
            assert!((ks - exact).abs() < 2e-14 * exact, "x={x}: {ks} vs {exact}");
            let is = bessel_i_scaled(-0.5, x);
            let exact = (2.0 / (PI * x)).sqrt() * 0.5 * (1.0 + (-2.0 * x).exp());
            assert!((is - exact).abs() < 2e-14 * exact, "x={x}: {is} vs {exact}");
        }
    }

    #[test]
    fn wronskian_small_grid() {
        for &nu in &[0.1, 0.5, 0.9] {
            for &x in &[0.1, 1.0, 10.0, 50.0] {
                let p = bessel_ik(nu, x).unwrap();
                assert!(p.wronskian_residual().abs() < 1e-12, "nu={nu} x={x}: {}", p.wronskian_residual());
            }
        }
    }

    #[test]
    fn guard_and_domain() {
        assert!(matches!(bessel_ik(0.5, 601.0), Err(Error::Overflow { .. })));
        assert!(bessel_ik(1.0, 1.0).is_err());
        assert!(bessel_ik(0.5, 0.0).is_err());
    }
}
