//! Truncation and Cauchy-sequence studies over a list of cutoffs.

use super::fit::{rate_fit, RateFit};
use crate::error::{domain, Result};
use crate::params::FracParams;
use crate::synthesis::{radial_functional, FieldNorms, FunctionalKind, RadialProfile};
use crate::Cutoff;
use rayon::prelude::*;
use std::time::Instant;

/// Tolerance on fitted exponents.
pub const RATE_TOL: f64 = 0.15;

/// Default cutoff grid.
pub const DEFAULT_YS: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

/// One measured cutoff: `error_sq = |U^Y - U|^2` and its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRecord {
    pub y: f64,
    pub error_sq: f64,
    pub norms: FieldNorms,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationStudy {
    pub params: FracParams,
    pub records: Vec<ExperimentRecord>,
    pub fit: RateFit,
    pub pass: bool,
}

pub fn truncation_study(params: &FracParams, f: &RadialProfile, ys: &[f64]) -> Result<TruncationStudy> {
    if ys.len() < 4 {
        return Err(domain(format!("a truncation study needs at least 4 cutoffs, got {}", ys.len())));
    }
    if ys.iter().any(|y| !(*y > 0.0) || !y.is_finite()) {
        return Err(domain("cutoffs must be positive and finite"));
    }
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut records = sorted
        .par_iter()
        .map(|&y| {
            let start = Instant::now();
            let norms = radial_functional(f, params, Cutoff::Finite(y), FunctionalKind::TruncationError)?;
            Ok(ExperimentRecord { y, error_sq: norms.combined, norms, wall_time: start.elapsed().as_secs_f64() })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.y.total_cmp(&b.y));
    let fit = fit_records(&records)?.with_mu(params.mu());
    Ok(TruncationStudy { params: *params, pass: fit.passes(RATE_TOL), records, fit })
}

/// Rate fit of stored records; the verdict needs nothing else.
pub fn fit_records(records: &[ExperimentRecord]) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.y, r.error_sq)).collect();
    rate_fit(&pts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyStudy {
    /// cutoffs `(3/2)^n Y0`, `n = 0..=n_max + 1`
    pub cutoffs: Vec<f64>,
    /// `D_n = |U^{Y_{n+1}} - U^{Y_n}|` on `(0, Y_n)`
    pub differences: Vec<f64>,
    pub ratios: Vec<f64>,
    pub bound: f64,
    pub pass: bool,
}

/// Below this `D_n` is treated as converged and its ratio is not judged.
pub const CAUCHY_FLOOR: f64 = 1e-12;

pub fn cauchy_study(params: &FracParams, f: &RadialProfile, y0: f64, n_max: usize) -> Result<CauchyStudy> {
    if n_max < 3 {
        return Err(domain("a Cauchy study needs n_max >= 3"));
    }
    if !(y0 > 0.0) || !y0.is_finite() {
        return Err(domain(format!("Y0 = {y0} must be positive")));
    }
    let cutoffs: Vec<f64> = (0..=n_max + 1).map(|n| y0 * 1.5f64.powi(n as i32)).collect();
    let differences = cutoffs
        .par_windows(2)
        .map(|w| {
            let kind = FunctionalKind::CauchyDifference { y1: w[0], y2: w[1] };
            radial_functional(f, params, Cutoff::Finite(w[0]), kind).map(|n| n.combined.sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = (2.0f64 / 3.0).powf(params.mu().mu / 2.0) + 0.1;
    let ratios: Vec<f64> = differences
        .windows(2)
        .map(|d| if d[0] <= CAUCHY_FLOOR { 0.0 } else { d[1] / d[0] })
        .collect();
    let pass = ratios.iter().all(|r| *r <= bound);
    Ok(CauchyStudy { cutoffs, differences, ratios, bound, pass })
}

/// `sqrt(combined) / (min(1, 1/s) |f|)` for the truncated solution.
pub fn stability_ratio(params: &FracParams, f: &RadialProfile, cutoff: Cutoff) -> Result<f64> {
    let fnorm = f.l2_norm_sq()?.sqrt();
    if fnorm == 0.0 {
        return Ok(0.0);
    }
    let n = radial_functional(f, params, cutoff, FunctionalKind::SolutionNorms)?;
    let scale = if params.s() > 0.0 { (1.0 / params.s()).min(1.0) } else { 1.0 };
    Ok(n.combined.sqrt() / (scale * fnorm))
}
