//! Radial data and `d`-dimensional norms assembled from per-mode quantities:
//! `omega_{d-1} int_0^inf |fhat(lambda)|^2 m(lambda) lambda^{d-1} dlambda`.

use crate::error::{domain, Error, Result};
use crate::oracle::{difference_norms, dtn_symbol, ModeProfile};
use crate::params::{sphere_measure, FracParams};
use crate::quadrature::{integrate_adaptive, legendre_cached, AdaptiveOptions};
use crate::Cutoff;
use std::f64::consts::PI;
use std::sync::Arc;

/// Lower end of the frequency quadrature; `(0, LAMBDA_MIN)` is covered by a
/// power-law tail.
pub const LAMBDA_MIN: f64 = 1e-6;

const BUMP_PANELS: usize = 96;
const BUMP_ORDER: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum DatumShape {
    /// `fhat(lambda) = exp(-(width lambda)^2)`
    Gaussian { width: f64 },
    /// `f(r) = exp(1 - 1/(1 - (r/R)^2))` for `r < R`
    Bump { radius: f64 },
    Zero,
}

/// Nodes and weights reducing the Fourier transform of the unit bump to a
/// cosine (d = 2, through the Abel projection) or sine (d = 3) sum on `(0, 1)`.
#[derive(Debug, PartialEq)]
struct BumpTable {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn bump(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

fn composite_nodes(panels: usize) -> Vec<(f64, f64)> {
    let h = 1.0 / panels as f64;
    let rule = legendre_cached(BUMP_ORDER);
    (0..panels).flat_map(|i| rule.mapped(i as f64 * h, (i + 1) as f64 * h).collect::<Vec<_>>()).collect()
}

impl BumpTable {
    fn new(dim: usize) -> Self {
        let pts = composite_nodes(BUMP_PANELS);
        let (nodes, weights) = match dim {
            2 => {
                // Abel projection P(x) = 2 int_0^{sqrt(1-x^2)} f(sqrt(x^2 + t^2)) dt
                let inner = composite_nodes(8);
                pts.iter()
                    .map(|&(x, w)| {
                        let top = (1.0 - x * x).max(0.0).sqrt();
                        let p: f64 = inner.iter().map(|&(u, v)| v * top * bump((x * x + (u * top).powi(2)).sqrt())).sum();
                        (x, w * 2.0 * p / PI)
                    })
                    .unzip()
            }
            _ => pts.iter().map(|&(r, w)| (r, w * bump(r) * r * (2.0 / PI).sqrt())).unzip(),
        };
        Self { nodes, weights }
    }

    fn eval(&self, dim: usize, lambda: f64) -> f64 {
        match dim {
            2 => self.nodes.iter().zip(&self.weights).map(|(x, w)| w * (lambda * x).cos()).sum(),
            _ if lambda < 1e-8 => self.nodes.iter().zip(&self.weights).map(|(r, w)| w * r).sum(),
            _ => self.nodes.iter().zip(&self.weights).map(|(r, w)| w * (lambda * r).sin()).sum::<f64>() / lambda,
        }
    }
}

/// A radial datum given through its (unitary) Fourier transform `fhat(|xi|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    shape: DatumShape,
    dim: usize,
    amplitude: f64,
    table: Option<Arc<BumpTable>>,
}

impl RadialProfile {
    pub fn gaussian(dim: usize, width: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(width > 0.0) || !width.is_finite() {
            return Err(domain(format!("Gaussian width {width} must be positive")));
        }
        Ok(Self { shape: DatumShape::Gaussian { width }, dim, amplitude: 1.0, table: None })
    }

    pub fn bump(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain(format!("bump radius {radius} must be positive")));
        }
        Ok(Self { shape: DatumShape::Bump { radius }, dim, amplitude: 1.0, table: Some(Arc::new(BumpTable::new(dim))) })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { shape: DatumShape::Zero, dim, amplitude: 0.0, table: None })
    }

    /// `c f`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { amplitude: self.amplitude * c, ..self.clone() }
    }

    pub fn shape(&self) -> &DatumShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || self.shape == DatumShape::Zero
    }

    /// `fhat(lambda)`.
    pub fn eval(&self, lambda: f64) -> f64 {
        match (&self.shape, &self.table) {
            (DatumShape::Zero, _) => 0.0,
            (DatumShape::Gaussian { width }, _) => self.amplitude * (-(width * lambda).powi(2)).exp(),
            (DatumShape::Bump { radius }, Some(t)) => {
                self.amplitude * radius.powi(self.dim as i32) * t.eval(self.dim, radius * lambda)
            }
            (DatumShape::Bump { .. }, None) => unreachable!("bump profiles carry their table"),
        }
    }

    /// `f(|x|)` in physical space.
    pub fn physical(&self, r: f64) -> f64 {
        match &self.shape {
            DatumShape::Zero => 0.0,
            DatumShape::Gaussian { width } => {
                let w2 = width * width;
                self.amplitude * (2.0 * w2).powf(-0.5 * self.dim as f64) * (-r * r / (4.0 * w2)).exp()
            }
            DatumShape::Bump { radius } => self.amplitude * bump(r / radius),
        }
    }

    /// Frequency beyond which `|fhat|^2 lambda^{d-1+extra_power}` is below
    /// `1e-16` of its peak for good.
    pub fn lambda_max(&self, extra_power: f64) -> f64 {
        let pw = self.dim as f64 - 1.0 + extra_power;
        match &self.shape {
            DatumShape::Zero => 1.0,
            DatumShape::Gaussian { width } => {
                // exp(-2 w^2 l^2) l^pw; take l with 2 w^2 l^2 = 40 + pw ln(l) iterated
                let mut l = (40.0f64 / (2.0 * width * width)).sqrt();
                for _ in 0..20 {
                    l = ((40.0 + pw.max(0.0) * l.max(1.0).ln()) / (2.0 * width * width)).sqrt();
                }
                l.max(1.0 / width)
            }
            DatumShape::Bump { radius } => {
                let g = |l: f64| self.eval(l).powi(2) * l.powf(pw);
                let step = 0.25 / radius;
                let mut peak = 0.0f64;
                let mut last = step;
                let mut l = step;
                while l < 2000.0 / radius {
                    let v = g(l);
                    peak = peak.max(v);
                    if v > 1e-16 * peak {
                        last = l;
                    }
                    l += step;
                }
                last + 4.0 * step
            }
        }
    }

    /// `|f|^2_{L^2} = omega int |fhat|^2 lambda^{d-1}`.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        self.sobolev_norm_sq(0)
    }

    /// `|f|^2_{H^m} = omega int (1 + lambda^2)^m |fhat|^2 lambda^{d-1}`.
    pub fn sobolev_norm_sq(&self, m: u32) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        let v = mode_integral(self, 2.0 * m as f64, |l| Ok((1.0 + l * l).powi(m as i32)))?;
        if !v.is_finite() {
            return Err(Error::NonIntegrable("datum is not square integrable".into()));
        }
        Ok(v)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(domain(format!("dimension {dim} is not 2 or 3")))
    }
}

/// Energy and trace parts of an extension norm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldNorms {
    /// `int int y^alpha |grad U|^2`
    pub energy_sq: f64,
    /// `|tr_0 U|^2_{L^2}`
    pub trace_sq: f64,
    /// `energy_sq + s trace_sq`
    pub combined: f64,
}

impl FieldNorms {
    pub fn new(energy_sq: f64, trace_sq: f64, s: f64) -> Self {
        let combined = if s == 0.0 { energy_sq } else { energy_sq + s * trace_sq };
        Self { energy_sq, trace_sq, combined }
    }
}

/// Which per-mode quantity is integrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalKind {
    /// norms of `U^Y`
    SolutionNorms,
    /// norms of `U^Y - U`
    TruncationError,
    /// norms of `U^{Y2} - U^{Y1}` on `(0, Y1)`, `Y1 < Y2`
    CauchyDifference { y1: f64, y2: f64 },
}

/// Unit-datum `(energy, trace)` of one mode.
pub fn mode_norms(lambda: f64, params: &FracParams, cutoff: Cutoff, kind: FunctionalKind) -> Result<(f64, f64)> {
    match kind {
        FunctionalKind::SolutionNorms => {
            let w = ModeProfile::new(lambda, *params, cutoff, 1.0)?;
            Ok(w.norms())
        }
        FunctionalKind::TruncationError => {
            let Some(y) = cutoff.finite() else {
                return Ok((0.0, 0.0));
            };
            let full = ModeProfile::new(lambda, *params, Cutoff::Infinite, 1.0)?;
            let trunc = ModeProfile::new(lambda, *params, cutoff, 1.0)?;
            difference_norms(&full, &trunc, y)
        }
        FunctionalKind::CauchyDifference { y1, y2 } => {
            let far = ModeProfile::new(lambda, *params, Cutoff::Finite(y2), 1.0)?;
            let near = ModeProfile::new(lambda, *params, Cutoff::Finite(y1), 1.0)?;
            difference_norms(&far, &near, y1)
        }
    }
}

/// `omega int_0^inf |fhat|^2 m(lambda) lambda^{d-1} dlambda`, adaptive in
/// `ln lambda` on `[LAMBDA_MIN, lambda_max]` with a power-law tail below.
pub(crate) fn mode_integral(f: &RadialProfile, extra_power: f64, mut m: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let d = f.dim() as f64;
    let lmax = f.lambda_max(extra_power);
    let mut failure = None;
    let mut g = |l: f64| -> f64 {
        match m(l) {
            Ok(v) => f.eval(l).powi(2) * v * l.powf(d - 1.0),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let (g0, g1) = (g(LAMBDA_MIN), g(2.0 * LAMBDA_MIN));
    let tail = power_tail(LAMBDA_MIN, g0, g1)?;
    let opts = AdaptiveOptions { rel_tol: 1e-9, abs_tol: 1e-300, initial_panels: 24, max_panels: 20000 };
    let body = integrate_adaptive(
        |t| {
            let l = t.exp();
            g(l) * l
        },
        LAMBDA_MIN.ln(),
        lmax.ln(),
        opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(sphere_measure(f.dim()) * (body?.value + tail))
}

/// `int_0^x g` for `g ~ c l^p` below `x`, with `p` read off `g(x)` and `g(2x)`.
pub(crate) fn power_tail(x: f64, gx: f64, g2x: f64) -> Result<f64> {
    if gx == 0.0 {
        return Ok(0.0);
    }
    if g2x <= 0.0 || !gx.is_finite() || !g2x.is_finite() {
        return Err(Error::NonIntegrable(format!("integrand near {x:e} is not a power law")));
    }
    let p = (g2x / gx).log2();
    if p <= -1.0 + 1e-3 {
        return Err(Error::NonIntegrable(format!("integrand behaves like lambda^{p:.3} at 0")));
    }
    Ok(gx * x / (p + 1.0))
}

/// Energy and trace norms of `U^Y` (or of an error, see [`FunctionalKind`]).
///
/// With `s = 0` a non-integrable trace part is reported as `inf`, since it does
/// not enter the combined norm.
pub fn radial_functional(f: &RadialProfile, params: &FracParams, cutoff: Cutoff, kind: FunctionalKind) -> Result<FieldNorms> {
    if f.dim() != params.dim() {
        return Err(domain("datum and parameters disagree on the dimension"));
    }
    if let FunctionalKind::CauchyDifference { y1, y2 } = kind {
        if !(y1 > 0.0 && y2 > y1 && y2.is_finite()) {
            return Err(domain(format!("Cauchy pair ({y1}, {y2}) must satisfy 0 < Y1 < Y2")));
        }
    }
    if f.is_zero() || (kind == FunctionalKind::TruncationError && cutoff.is_infinite()) {
        return Ok(FieldNorms::default());
    }
    let energy = mode_integral(f, 2.0, |l| mode_norms(l, params, cutoff, kind).map(|v| v.0))?;
    let trace = match mode_integral(f, 0.0, |l| mode_norms(l, params, cutoff, kind).map(|v| v.1)) {
        Ok(t) => t,
        Err(Error::NonIntegrable(_)) if params.s() == 0.0 => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(FieldNorms::new(energy, trace, params.s()))
}

/// `uhat(lambda) = fhat(lambda) / (s + lambda^{2 beta})`.
pub fn fullspace_trace_symbol(f: &RadialProfile, params: &FracParams, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(domain(format!("frequency {lambda} must be nonnegative")));
    }
    let denom = params.s() + lambda.powf(2.0 * params.beta());
    if denom == 0.0 {
        return Err(Error::DivisionByZero("s = 0 at lambda = 0".into()));
    }
    Ok(f.eval(lambda) / denom)
}

/// Weighted energy `omega int |fhat|^2 lambda^{2m} E(lambda) lambda^{d-1}` of
/// the full-space solution together with `|f|^2_{H^m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XRegNorms {
    pub xreg_sq: f64,
    pub data_sq: f64,
}

impl XRegNorms {
    /// `sqrt(xreg_sq / data_sq)`, or 0 for the zero datum.
    pub fn ratio(&self) -> f64 {
        if self.data_sq == 0.0 {
            0.0
        } else {
            (self.xreg_sq / self.data_sq).sqrt()
        }
    }
}

pub fn xreg_norm_sq(f: &RadialProfile, params: &FracParams, m: u32) -> Result<XRegNorms> {
    if f.is_zero() {
        return Ok(XRegNorms { xreg_sq: 0.0, data_sq: 0.0 });
    }
    let xreg_sq = mode_integral(f, 2.0 + 2.0 * m as f64, |l| {
        let e = mode_norms(l, params, Cutoff::Infinite, FunctionalKind::SolutionNorms)?.0;
        Ok(l.powi(2 * m as i32) * e)
    })?;
    Ok(XRegNorms { xreg_sq, data_sq: f.sobolev_norm_sq(m)? })
}

/// Truncated symbol at `lambda`, exposed for the grid path.
pub(crate) fn trace_multiplier(lambda: f64, params: &FracParams, cutoff: Cutoff) -> Result<f64> {
    if lambda == 0.0 {
        return if params.s() > 0.0 {
            Ok(1.0 / params.s())
        } else {
            Err(Error::DivisionByZero("s = 0 at lambda = 0".into()))
        };
    }
    Ok(1.0 / (params.s() + dtn_symbol(lambda, cutoff, params)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss3() -> RadialProfile {
        RadialProfile::gaussian(3, 1.0).unwrap()
    }

    #[test]
    fn gaussian_l2_norm() {
        // omega_2 int e^{-2 l^2} l^2 = 4 pi sqrt(pi/2) / 8
        let exact = 4.0 * PI * (PI / 2.0).sqrt() / 8.0;
        let v = gauss3().l2_norm_sq().unwrap();
        assert!((v - exact).abs() < 1e-9 * exact, "{v} {exact}");
    }

    #[test]
    fn gaussian_pair_is_unitary() {
        // Plancherel in physical space: omega int f(r)^2 r^{d-1} dr
        for dim in [2, 3] {
            let f = RadialProfile::gaussian(dim, 0.7).unwrap();
            let phys = integrate_adaptive(|r| f.physical(r).powi(2) * r.powi(dim as i32 - 1), 0.0, 20.0, AdaptiveOptions::default())
                .unwrap()
                .value
                * sphere_measure(dim);
            let spec = f.l2_norm_sq().unwrap();
            assert!((phys / spec - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn bump_transform_matches_plancherel() {
        for dim in [2, 3] {
            let f = RadialProfile::bump(dim, 1.0).unwrap();
            let phys = integrate_adaptive(|r| f.physical(r).powi(2) * r.powi(dim as i32 - 1), 0.0, 1.0, AdaptiveOptions::default())
                .unwrap()
                .value
                * sphere_measure(dim);
            let spec = f.l2_norm_sq().unwrap();
            assert!((phys / spec - 1.0).abs() < 1e-7, "d={dim}: {phys} {spec}");
        }
    }

    #[test]
    fn zero_datum() {
        let p = FracParams::new(0.5, 1.0, 3).unwrap();
        let z = RadialProfile::zero(3).unwrap();
        let n = radial_functional(&z, &p, Cutoff::Finite(2.0), FunctionalKind::SolutionNorms).unwrap();
        assert_eq!(n, FieldNorms::default());
    }

    #[test]
    fn truncation_error_vanishes_at_infinity() {
        let p = FracParams::new(0.5, 1.0, 3).unwrap();
        let n = radial_functional(&gauss3(), &p, Cutoff::Infinite, FunctionalKind::TruncationError).unwrap();
        assert_eq!(n.combined, 0.0);
    }

    #[test]
    fn trace_symbol_examples() {
        let one = RadialProfile::gaussian(3, 1e-9).unwrap();
        let p = FracParams::new(0.3, 1.0, 3).unwrap();
        assert!((fullspace_trace_symbol(&one, &p, 1.0).unwrap() - 0.5).abs() < 1e-12);
        let p = FracParams::new(0.3, 2.0, 3).unwrap();
        assert!((fullspace_trace_symbol(&one.scaled(3.0), &p, 0.0).unwrap() - 1.5).abs() < 1e-15);
        let p = FracParams::new(0.5, 0.0, 3).unwrap();
        assert!((fullspace_trace_symbol(&one, &p, 4.0).unwrap() - 0.25).abs() < 1e-12);
        assert!(matches!(fullspace_trace_symbol(&one, &p, 0.0), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn xreg_m0_is_solution_energy() {
        let p = FracParams::new(0.25, 1.0, 3).unwrap();
        let x = xreg_norm_sq(&gauss3(), &p, 0).unwrap();
        let n = radial_functional(&gauss3(), &p, Cutoff::Infinite, FunctionalKind::SolutionNorms).unwrap();
        assert!((x.xreg_sq / n.energy_sq - 1.0).abs() < 1e-8);
    }

    #[test]
    fn power_tail_flags_divergence() {
        assert!(matches!(power_tail(1e-6, 1.0, 0.5), Err(Error::NonIntegrable(_))));
        let v = power_tail(1e-6, 1e-6, 2e-6).unwrap();
        assert!((v - 0.5e-12).abs() < 1e-24);
    }
}
