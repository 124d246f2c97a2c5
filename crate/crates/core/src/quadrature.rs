//! Gauss rules for the measure `y^alpha dy` on `(0, 1)` and an adaptive
//! integrator for smooth integrands on finite intervals.

use crate::error::{domain, Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Gauss rule on `(0, 1)` for the weight `y^weight_exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub weight_exponent: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `int_0^1 y^a f(y) dy`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&y, &w)| w * f(y)).sum()
    }

    /// Nodes and weights of the plain (unweighted) rule mapped to `(a, b)`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = b - a;
        self.nodes.iter().zip(&self.weights).map(move |(&t, &w)| (a + h * t, h * w))
    }
}

/// n-point Gauss-Jacobi rule for `int_0^1 y^alpha p(y) dy`, exact for
/// polynomials of degree `2n - 1`.
///
/// Golub-Welsch on the Jacobi matrix of the weight `(1 + x)^alpha` on
/// `(-1, 1)`, mapped affinely to `(0, 1)`.
pub fn gauss_jacobi_rule(n: usize, alpha: f64) -> Result<QuadratureRule> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(domain(format!("weight exponent {alpha} is outside (-1, 1)")));
    }
    gauss_jacobi_any(n, alpha)
}

/// Same as [`gauss_jacobi_rule`] but for any exponent `> -1`.
pub(crate) fn gauss_jacobi_any(n: usize, alpha: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(domain("a quadrature rule needs at least one node"));
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(domain(format!("weight exponent {alpha} must exceed -1")));
    }
    // Jacobi recurrence for (1-x)^a (1+x)^b with a = 0, b = alpha.
    let (a, b) = (0.0f64, alpha);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let diag = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        // map x in (-1, 1) to y = (1 + x) / 2
        jac[(k, k)] = 0.5 * (1.0 + diag);
        if k + 1 < n {
            let m = kf + 1.0;
            let sm = 2.0 * m + a + b;
            let num = 4.0 * m * (m + a) * (m + b) * (m + a + b);
            let den = sm * sm * (sm + 1.0) * (sm - 1.0);
            let off = 0.5 * (num / den).sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let moment0 = 1.0 / (alpha + 1.0);
    let eig = SymmetricEigen::new(jac.clone());
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], moment0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));

    // eigen-residual check on the tridiagonal matrix
    for i in 0..n {
        let v = eig.eigenvectors.column(i);
        let r = (&jac * v - v * eig.eigenvalues[i]).norm();
        if r > 1e-13 {
            return Err(Error::Quadrature(format!("Golub-Welsch residual {r:e} for n = {n}")));
        }
    }
    Ok(QuadratureRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        weight_exponent: alpha,
    })
}

/// n-point Gauss-Legendre rule on `(0, 1)`.
pub fn gauss_legendre(n: usize) -> QuadratureRule {
    gauss_jacobi_any(n.max(1), 0.0).expect("Legendre rule")
}

const CACHE_MAX: usize = 64;

/// Cached Gauss-Legendre rule; `n` up to 64.
pub(crate) fn legendre_cached(n: usize) -> &'static QuadratureRule {
    static CACHE: OnceLock<Vec<QuadratureRule>> = OnceLock::new();
    let rules = CACHE.get_or_init(|| (1..=CACHE_MAX).map(gauss_legendre).collect());
    &rules[n.clamp(1, CACHE_MAX) - 1]
}

/// Options of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 0.0, initial_panels: 16, max_panels: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

const LOW_ORDER: usize = 10;
const HIGH_ORDER: usize = 21;

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let mut hi = 0.0;
    for (y, w) in legendre_cached(HIGH_ORDER).mapped(a, b) {
        hi += w * f(y);
    }
    let mut lo = 0.0;
    for (y, w) in legendre_cached(LOW_ORDER).mapped(a, b) {
        lo += w * f(y);
    }
    Panel { a, b, value: hi, err: (hi - lo).abs() }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Globally adaptive Gauss-Legendre integration (10/21-point panel pairs,
/// worst panel bisected first).
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(domain(format!("invalid interval ({a}, {b})")));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, panels: 0 });
    }
    let n0 = opts.initial_panels.max(1);
    let h = (b - a) / n0 as f64;
    let mut heap = BinaryHeap::new();
    for i in 0..n0 {
        let lo = a + h * i as f64;
        let hi = if i + 1 == n0 { b } else { a + h * (i + 1) as f64 };
        let p = panel(&mut f, lo, hi);
        if !p.value.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on ({lo}, {hi})")));
        }
        heap.push(p);
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(Integral { value, error: err, panels: heap.len() });
        }
        if heap.len() >= opts.max_panels {
            return Err(Error::Quadrature(format!(
                "no convergence after {} panels (value {value:e}, error {err:e})",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let p = panel(&mut f, lo, hi);
            if !p.value.is_finite() {
                return Err(Error::Quadrature(format!("non-finite integrand on ({lo}, {hi})")));
            }
            heap.push(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_rule() {
        let r = gauss_jacobi_rule(1, 0.0).unwrap();
        assert!((r.nodes[0] - 0.5).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_point_weighted_rule_solves_moment_equations() {
        // int y^a = 1/(a+1), int y^(a+1) = 1/(a+2)  =>  node (a+1)/(a+2)
        let r = gauss_jacobi_rule(1, 0.5).unwrap();
        assert!((r.nodes[0] - 0.6).abs() < 1e-14);
        assert!((r.weights[0] - 1.0 / 1.5).abs() < 1e-14);
    }

    #[test]
    fn three_point_rule_moment() {
        let r = gauss_jacobi_rule(3, -0.5).unwrap();
        let v = r.integrate(|y| y.powi(5));
        assert!((v - 2.0 / 11.0).abs() < 1e-12 * 2.0 / 11.0);
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(gauss_jacobi_rule(4, 1.0).is_err());
        assert!(gauss_jacobi_rule(4, -1.0).is_err());
        assert!(gauss_jacobi_rule(0, 0.0).is_err());
    }

    #[test]
    fn adaptive_handles_peaks() {
        let v = integrate_adaptive(
            |x| 1.0 / (1e-4 + x * x),
            -1.0,
            1.0,
            AdaptiveOptions { rel_tol: 1e-12, ..Default::default() },
        )
        .unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v.value - exact).abs() < 1e-10 * exact);
    }
}
