//! Norms of the extension of a general datum sampled on a periodic box,
//! through the discrete Fourier transform.

use crate::error::{domain, Result};
use crate::params::FracParams;
use crate::synthesis::{mode_norms, trace_multiplier, FieldNorms, FunctionalKind};
use crate::Cutoff;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Samples `f(x_j)`, `x_j = -side/2 + j side/n` per axis, row-major with the
/// last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridData {
    pub dim: usize,
    pub n: usize,
    pub side: f64,
    pub values: Vec<f64>,
}

impl GridData {
    pub fn new(dim: usize, n: usize, side: f64, values: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(domain(format!("dimension {dim} is not 2 or 3")));
        }
        if n < 2 || !(side > 0.0) {
            return Err(domain("grid needs n >= 2 points per axis and a positive side"));
        }
        if values.len() != n.pow(dim as u32) {
            return Err(domain("sample count does not match n^dim"));
        }
        Ok(Self { dim, n, side, values })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(dim: usize, n: usize, side: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let h = side / n as f64;
        let total = n.pow(dim as u32);
        let mut x = vec![0.0; dim];
        let mut values = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rest = idx;
            for axis in (0..dim).rev() {
                x[axis] = -0.5 * side + h * (rest % n) as f64;
                rest /= n;
            }
            values.push(f(&x));
        }
        Self::new(dim, n, side, values)
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.n as f64
    }
}

/// Output of [`grid_synthesize`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSynthesis {
    pub norms: FieldNorms,
    /// `tr_0 U` on the grid points of the input
    pub trace: Vec<f64>,
    /// Share of `sum |fhat|^2` carried by the outer eighth of the frequency box.
    pub aliasing_fraction: f64,
    /// `aliasing_fraction > 1e-6`
    pub aliasing_warning: bool,
}

fn fft_all_axes(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let total = data.len();
        for start in 0..total {
            // first index of each line along `axis`
            if !(start / stride).is_multiple_of(n) {
                continue;
            }
            for k in 0..n {
                line[k] = data[start + k * stride];
            }
            fft.process(&mut line);
            for k in 0..n {
                data[start + k * stride] = line[k];
            }
        }
    }
}

fn signed(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Energy and trace norms of `U^Y` for the periodised datum, and `tr_0 U^Y`
/// on the grid. With `s = 0` the mean of the datum is dropped.
pub fn grid_synthesize(data: &GridData, params: &FracParams, cutoff: Cutoff) -> Result<GridSynthesis> {
    if data.dim != params.dim() {
        return Err(domain("grid and parameters disagree on the dimension"));
    }
    let (dim, n) = (data.dim, data.n);
    let h = data.spacing();
    let mut spec: Vec<Complex64> = data.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_all_axes(&mut spec, dim, n, false);
    let scale = h.powi(dim as i32) / (2.0 * PI).powf(0.5 * dim as f64);
    let dk = 2.0 * PI / data.side;
    let cell = dk.powi(dim as i32);
    let outer = (n / 2) as i64 - (n / 8).max(1) as i64;

    let mut cache: HashMap<i64, (f64, f64, f64)> = HashMap::new();
    let (mut energy, mut trace_sq, mut total, mut shell) = (0.0, 0.0, 0.0, 0.0);
    let mut idx = vec![0i64; dim];
    for (pos, z) in spec.iter_mut().enumerate() {
        let mut rest = pos;
        for axis in (0..dim).rev() {
            idx[axis] = signed(rest % n, n);
            rest /= n;
        }
        let r2: i64 = idx.iter().map(|k| k * k).sum();
        let amp2 = (z.norm() * scale).powi(2);
        total += amp2;
        if idx.iter().any(|k| k.abs() > outer) {
            shell += amp2;
        }
        if r2 == 0 && params.s() == 0.0 {
            *z = Complex64::new(0.0, 0.0);
            continue;
        }
        let &mut (e, t, mult) = match cache.entry(r2) {
            std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
            std::collections::hash_map::Entry::Vacant(v) => {
                let lambda = dk * (r2 as f64).sqrt();
                let (e, t) = mode_norms(lambda, params, cutoff, FunctionalKind::SolutionNorms)?;
                v.insert((e, t, trace_multiplier(lambda, params, cutoff)?))
            }
        };
        energy += amp2 * e * cell;
        trace_sq += amp2 * t * cell;
        *z *= mult;
    }
    fft_all_axes(&mut spec, dim, n, true);
    let norm = 1.0 / n.pow(dim as u32) as f64;
    let trace = spec.iter().map(|z| z.re * norm).collect();
    let aliasing_fraction = if total > 0.0 { shell / total } else { 0.0 };
    Ok(GridSynthesis {
        norms: FieldNorms::new(energy, trace_sq, params.s()),
        trace,
        aliasing_fraction,
        aliasing_warning: aliasing_fraction > 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dtn_symbol;

    #[test]
    fn single_harmonic_trace() {
        let p = FracParams::new(0.3, 0.7, 2).unwrap();
        let side = 2.0 * PI;
        let g = GridData::from_fn(2, 32, side, |x| (3.0 * x[0] + 2.0 * x[1]).cos()).unwrap();
        let out = grid_synthesize(&g, &p, Cutoff::Finite(1.5)).unwrap();
        let lam = 13f64.sqrt();
        let factor = 1.0 / (0.7 + dtn_symbol(lam, Cutoff::Finite(1.5), &p).unwrap());
        for (v, f) in out.trace.iter().zip(&g.values) {
            assert!((v - factor * f).abs() < 1e-12);
        }
        assert!(!out.aliasing_warning);
    }

    #[test]
    fn zero_field() {
        let p = FracParams::new(0.5, 1.0, 3).unwrap();
        let g = GridData::from_fn(3, 8, 4.0, |_| 0.0).unwrap();
        let out = grid_synthesize(&g, &p, Cutoff::Infinite).unwrap();
        assert_eq!(out.norms, FieldNorms::default());
        assert!(out.trace.iter().all(|&v| v == 0.0));
    }
}
