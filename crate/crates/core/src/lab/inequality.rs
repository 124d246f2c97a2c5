//! Seeded checks of the trace, Poincare, Hardy and stability inequalities
//! on random separable test functions.

use super::studies::stability_ratio;
use crate::error::{domain, Result};
use crate::mesh::{weighted_points, Partition, PiecewiseFunction};
use crate::params::FracParams;
use crate::quadrature::legendre_cached;
use crate::synthesis::RadialProfile;
use crate::Cutoff;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Cap on the measured stability constant.
pub const STABILITY_CAP: f64 = 10.0;

/// Poincare weight exponents `mu`.
pub const POINCARE_MUS: [f64; 2] = [0.0, 0.1];

/// Shift of the second Hardy exponent above `alpha - 2`.
pub const HARDY_SHIFT: f64 = 0.1;

/// Degree of `q` in the bubbles `x(1 - x) q(x)` searched by [`poincare_ascent`].
pub const BUBBLE_DEGREE: usize = 3;

/// Alternating sweeps of [`poincare_ascent`].
pub const ASCENT_SWEEPS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: String,
    pub trials: usize,
    pub max_ratio: f64,
    /// constant the ratios are checked against
    pub bound: f64,
    pub violated: bool,
}

fn report(name: String, ratios: &[f64], bound: f64) -> InequalityReport {
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let violated = ratios.iter().any(|r| !r.is_finite() || *r > bound * (1.0 + 1e-9));
    InequalityReport { name, trials: ratios.len(), max_ratio, bound, violated }
}

/// Trial `i` draws from its own stream, so a longer run repeats a shorter one.
fn trial_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// Continuous piecewise polynomial on a fixed partition of `(0, 1)` with
/// uniform coefficients in `[-1, 1]`, vanishing at `y = 1` when `clamp`.
pub fn random_profile(rng: &mut impl Rng, clamp: bool) -> PiecewiseFunction {
    let breaks = vec![0.0, 0.125, 0.25, 0.5, 1.0];
    let degrees: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=4)).collect();
    let mut vertices: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    if clamp {
        vertices[4] = 0.0;
    }
    let coefficients = degrees
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let mut c = vec![vertices[j], vertices[j + 1]];
            c.extend((2..=p).map(|_| rng.gen_range(-1.0..=1.0)));
            c
        })
        .collect();
    let part = Partition::new(breaks, degrees).expect("fixed partition");
    PiecewiseFunction::new(part, coefficients).expect("consistent coefficients")
}

/// `sup_lambda lambda^{2 beta} h(0)^2 / int_0^1 y^alpha (|h'|^2 + lambda^2 |h|^2)`,
/// attained at `lambda^2 = beta A / ((1 - beta) B)`.
pub fn trace_ratio(h: &PiecewiseFunction, params: &FracParams) -> Result<f64> {
    let h0 = h.eval(0.0);
    if h0 == 0.0 {
        return Ok(0.0);
    }
    let beta = params.beta();
    let a = h.weighted_seminorm_sq(params.alpha())?;
    let b = h.weighted_norm_sq(params.alpha())?;
    if a == 0.0 || b == 0.0 {
        return Ok(f64::INFINITY);
    }
    let lam2 = beta * a / ((1.0 - beta) * b);
    Ok(lam2.powf(beta) * h0 * h0 / (a + lam2 * b))
}

/// `int_0^1 y^a |G|^2 / int_0^1 y^{a+2} |g|^2` with `G(y) = int_0^y g`.
pub fn hardy_ratio(g: &PiecewiseFunction, a: f64) -> Result<f64> {
    let rhs = g.weighted_norm_sq(a + 2.0)?;
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(g.antiderivative()?.weighted_norm_sq(a)? / rhs)
}

/// `x(1 - x) q(x)` with `q` in monomial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BubblePoly(pub Vec<f64>);

impl BubblePoly {
    fn value_and_slope(&self, x: f64) -> (f64, f64) {
        let (mut q, mut dq) = (0.0, 0.0);
        for &c in self.0.iter().rev() {
            dq = dq * x + q;
            q = q * x + c;
        }
        let b = x * (1.0 - x);
        (b * q, (1.0 - 2.0 * x) * q + b * dq)
    }
}

/// Left over right side of the weighted Poincare inequality for
/// `U = prod_i g_i(x_i) h(y)` on `(0,1)^d x (0,1)`, with `rho = (1 + |x|^2 + y^2)^{1/2}`:
/// `int y^alpha rho^{mu-2} |U|^2 / (int y^alpha rho^mu |grad U|^2 + |3-d| |tr U|^2)`.
pub fn poincare_ratio(gs: &[BubblePoly], h: &PiecewiseFunction, params: &FracParams, mu: f64) -> Result<f64> {
    let d = gs.len();
    let xrule = legendre_cached(8);
    let xs: Vec<(f64, f64)> = xrule.mapped(0.0, 1.0).collect();
    let mut ypts = Vec::new();
    let part = h.partition();
    for j in 0..part.num_elements() {
        let (a, b) = part.element(j);
        ypts.extend(weighted_points(a, b, params.alpha(), 2 * part.degrees()[j] + 8)?);
    }
    let hv: Vec<(f64, f64, f64)> = ypts.iter().map(|&(y, w)| (y, w, h.eval(y))).collect();
    let hd: Vec<f64> = ypts.iter().map(|&(y, _)| h.derivative(y)).collect();
    let (mut lhs, mut rhs, mut trace) = (0.0, 0.0, 0.0);
    let n = xs.len();
    for idx in 0..n.pow(d as u32) {
        let mut rest = idx;
        let (mut wx, mut r2, mut g) = (1.0, 0.0, 1.0);
        let mut vals = [(0.0, 0.0); 3];
        for (i, gi) in gs.iter().enumerate() {
            let (x, w) = xs[rest % n];
            rest /= n;
            wx *= w;
            r2 += x * x;
            vals[i] = gi.value_and_slope(x);
            g *= vals[i].0;
        }
        // |grad_x g|^2
        let mut grad2 = 0.0;
        for i in 0..d {
            let mut term = vals[i].1;
            for (k, v) in vals.iter().enumerate().take(d) {
                if k != i {
                    term *= v.0;
                }
            }
            grad2 += term * term;
        }
        trace += wx * g * g;
        for (&(y, w, hy), &dy) in hv.iter().zip(&hd) {
            let rho2 = 1.0 + r2 + y * y;
            lhs += wx * w * rho2.powf(0.5 * mu - 1.0) * g * g * hy * hy;
            rhs += wx * w * rho2.powf(0.5 * mu) * (grad2 * hy * hy + g * g * dy * dy);
        }
    }
    let h0 = h.eval(0.0);
    rhs += (3.0 - d as f64).abs() * trace * h0 * h0;
    Ok(if lhs == 0.0 { 0.0 } else { lhs / rhs })
}

/// Largest `l` with `a v = l b v` for symmetric `a` and positive definite `b`.
fn top_pair(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let n = a.nrows();
    let d = DVector::from_iterator(n, b.diagonal().iter().map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 }));
    let scale = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m[(i, j)] * d[i] * d[j]);
    let l = scale(b)
        .cholesky()
        .ok_or_else(|| domain("right-hand form is not positive definite"))?
        .l();
    let linv = l.try_inverse().ok_or_else(|| domain("singular Cholesky factor"))?;
    let c = &linv * scale(a) * linv.transpose();
    let eig = ((&c + c.transpose()) * 0.5).symmetric_eigen();
    let (k, &top) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .ok_or_else(|| domain("empty space"))?;
    let v = linv.transpose() * eig.eigenvectors.column(k);
    Ok((top, v.component_mul(&d)))
}

/// Random partition `{0, r^3, r^2, r, 1}` with `r` in `[0.05, 0.6]` and degrees in `1..=4`.
pub fn random_space(rng: &mut impl Rng) -> Partition {
    let r: f64 = rng.gen_range(0.05..=0.6);
    let degrees = (0..4).map(|_| rng.gen_range(1..=4)).collect();
    Partition::new(vec![0.0, r.powi(3), r * r, r, 1.0], degrees).expect("increasing breakpoints")
}

/// Hat functions of the vertices (without `y = 1` when `clamp`), then the
/// bubbles of every element.
pub fn space_basis(part: &Partition, clamp: bool) -> Vec<PiecewiseFunction> {
    let m = part.num_elements();
    let zero: Vec<Vec<f64>> = part.degrees().iter().map(|&p| vec![0.0; p + 1]).collect();
    let mut out = Vec::new();
    let vertices = if clamp { m } else { m + 1 };
    for k in 0..vertices {
        let mut c = zero.clone();
        if k > 0 {
            c[k - 1][1] = 1.0;
        }
        if k < m {
            c[k][0] = 1.0;
        }
        out.push(PiecewiseFunction::new(part.clone(), c).expect("hat function"));
    }
    for j in 0..m {
        for b in 2..=part.degrees()[j] {
            let mut c = zero.clone();
            c[j][b] = 1.0;
            out.push(PiecewiseFunction::new(part.clone(), c).expect("bubble"));
        }
    }
    out
}

fn combine(basis: &[PiecewiseFunction], coef: &[f64]) -> Result<PiecewiseFunction> {
    let part = basis[0].partition().clone();
    let mut c: Vec<Vec<f64>> = part.degrees().iter().map(|&p| vec![0.0; p + 1]).collect();
    for (f, &w) in basis.iter().zip(coef) {
        for (ce, fe) in c.iter_mut().zip(f.coefficients()) {
            for (x, y) in ce.iter_mut().zip(fe) {
                *x += w * y;
            }
        }
    }
    PiecewiseFunction::new(part, c)
}

/// Supremum of [`hardy_ratio`] over the span of `basis`.
pub fn hardy_sup(basis: &[PiecewiseFunction], a: f64) -> Result<f64> {
    let anti = basis.iter().map(|g| g.antiderivative()).collect::<Result<Vec<_>>>()?;
    let lhs = PiecewiseFunction::weighted_gram(&anti, a, false)?;
    let rhs = PiecewiseFunction::weighted_gram(basis, a + 2.0, false)?;
    Ok(top_pair(&lhs, &rhs)?.0)
}

/// Supremum of [`trace_ratio`] over the span of `basis`: for fixed `lambda`
/// the best `h` gives `lambda^{2 beta} e^T (A + lambda^2 B)^{-1} e` with `e`
/// the traces of the basis; `lambda` is then scanned in `ln lambda`.
pub fn trace_sup(basis: &[PiecewiseFunction], params: &FracParams) -> Result<f64> {
    let (alpha, beta) = (params.alpha(), params.beta());
    let a = PiecewiseFunction::weighted_gram(basis, alpha, true)?;
    let b = PiecewiseFunction::weighted_gram(basis, alpha, false)?;
    let e = DVector::from_iterator(basis.len(), basis.iter().map(|f| f.eval(0.0)));
    let at = |t: f64| -> f64 {
        let lam2 = (2.0 * t).exp();
        match (&a + &b * lam2).cholesky() {
            Some(c) => lam2.powf(beta) * e.dot(&c.solve(&e)),
            None => f64::INFINITY,
        }
    };
    let (lo, hi, n) = (-12.0, 12.0, 241);
    let step = (hi - lo) / (n - 1) as f64;
    let (mut best_t, mut best) = (lo, at(lo));
    for k in 1..n {
        let t = lo + step * k as f64;
        let v = at(t);
        if v > best {
            (best_t, best) = (t, v);
        }
    }
    // golden section around the best grid point
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut l, mut r) = (best_t - step, best_t + step);
    for _ in 0..60 {
        let (x1, x2) = (r - g * (r - l), l + g * (r - l));
        if at(x1) > at(x2) {
            r = x2;
        } else {
            l = x1;
        }
    }
    Ok(best.max(at(0.5 * (l + r))))
}

/// Tensor Gauss points of `(0,1)^d`: `(weight, |x|^2, per-axis (value, slope) of the g_i)`.
fn x_points(gs: &[BubblePoly]) -> Vec<(f64, f64, Vec<(f64, f64)>, Vec<f64>)> {
    let xs: Vec<(f64, f64)> = legendre_cached(8).mapped(0.0, 1.0).collect();
    let (n, d) = (xs.len(), gs.len());
    (0..n.pow(d as u32))
        .map(|idx| {
            let mut rest = idx;
            let (mut wx, mut r2) = (1.0, 0.0);
            let mut vals = Vec::with_capacity(d);
            let mut coords = Vec::with_capacity(d);
            for g in gs {
                let (x, w) = xs[rest % n];
                rest /= n;
                wx *= w;
                r2 += x * x;
                vals.push(g.value_and_slope(x));
                coords.push(x);
            }
            (wx, r2, vals, coords)
        })
        .collect()
}

/// `(prod_{k != i} g_k, sum_{k != i} (g_k' prod_{m != k, i} g_m)^2)`.
fn others(vals: &[(f64, f64)], i: usize) -> (f64, f64) {
    let p = vals.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| v.0).product();
    let q = (0..vals.len())
        .filter(|&k| k != i)
        .map(|k| {
            let t: f64 = vals.iter().enumerate().filter(|&(m, _)| m != k && m != i).map(|(_, v)| v.0).product();
            (vals[k].1 * t).powi(2)
        })
        .sum();
    (p, q)
}

/// Poincare ratio driven upward from the start `gs`: alternately the best
/// `h` in the span of `hbasis` and the best bubble in each variable.
pub fn poincare_ascent(mut gs: Vec<BubblePoly>, hbasis: &[PiecewiseFunction], params: &FracParams, mu: f64) -> Result<f64> {
    let part = hbasis[0].partition().clone();
    let mut ypts = Vec::new();
    for j in 0..part.num_elements() {
        let (a, b) = part.element(j);
        ypts.extend(weighted_points(a, b, params.alpha(), 2 * part.degrees()[j] + 8)?);
    }
    let phi: Vec<Vec<(f64, f64)>> =
        ypts.iter().map(|&(y, _)| hbasis.iter().map(|f| (f.eval(y), f.derivative(y))).collect()).collect();
    let phi0: Vec<f64> = hbasis.iter().map(|f| f.eval(0.0)).collect();
    let c3 = (3.0 - gs.len() as f64).abs();
    let nb = hbasis.len();
    // (rho^{mu-2}, rho^mu) on the tensor points; |x| does not depend on g
    let weights: Vec<Vec<(f64, f64)>> = x_points(&gs)
        .iter()
        .map(|(_, r2, _, _)| {
            ypts.iter()
                .map(|&(y, _)| {
                    let rho2: f64 = 1.0 + r2 + y * y;
                    (rho2.powf(0.5 * mu - 1.0), rho2.powf(0.5 * mu))
                })
                .collect()
        })
        .collect();
    let mut h = hbasis[0].clone();
    for _ in 0..ASCENT_SWEEPS {
        // best h for the current g
        let (mut a, mut b) = (DMatrix::zeros(nb, nb), DMatrix::zeros(nb, nb));
        let xp = x_points(&gs);
        let gx: Vec<(f64, f64)> = xp
            .iter()
            .map(|(_, _, vals, _)| {
                let g2: f64 = vals.iter().map(|v| v.0 * v.0).product();
                let grad2: f64 = (0..vals.len()).map(|i| (vals[i].1 * others(vals, i).0).powi(2)).sum();
                (g2, grad2)
            })
            .collect();
        for (yi, &(_, w)) in ypts.iter().enumerate() {
            let (mut wl, mut wg, mut wd) = (0.0, 0.0, 0.0);
            for (xi, (wx, _, _, _)) in xp.iter().enumerate() {
                let (lo, hi) = weights[xi][yi];
                let (g2, grad2) = gx[xi];
                wl += wx * lo * g2;
                wg += wx * hi * grad2;
                wd += wx * hi * g2;
            }
            for k in 0..nb {
                for l in 0..=k {
                    let (pk, pl) = (phi[yi][k], phi[yi][l]);
                    a[(k, l)] += w * wl * pk.0 * pl.0;
                    b[(k, l)] += w * (wg * pk.0 * pl.0 + wd * pk.1 * pl.1);
                }
            }
        }
        let trace: f64 = xp.iter().map(|(wx, _, vals, _)| wx * vals.iter().map(|v| v.0 * v.0).product::<f64>()).sum();
        for k in 0..nb {
            for l in 0..=k {
                b[(k, l)] += c3 * trace * phi0[k] * phi0[l];
            }
        }
        a.fill_upper_triangle_with_lower_triangle();
        b.fill_upper_triangle_with_lower_triangle();
        let (_, v) = top_pair(&a, &b)?;
        h = combine(hbasis, v.as_slice())?;

        // best g_i for the current h and the other factors
        let hy: Vec<(f64, f64, f64, f64)> = ypts.iter().map(|&(y, w)| (y, w, h.eval(y), h.derivative(y))).collect();
        let h0 = h.eval(0.0);
        let nm = BUBBLE_DEGREE + 1;
        for i in 0..gs.len() {
            let xp = x_points(&gs);
            let (mut a, mut b) = (DMatrix::zeros(nm, nm), DMatrix::zeros(nm, nm));
            for (xi, (wx, _, vals, coords)) in xp.iter().enumerate() {
                let (mut sl, mut sd, mut sh) = (0.0, 0.0, 0.0);
                for (&(_, w, hv, hd), &(lo, hi)) in hy.iter().zip(&weights[xi]) {
                    sl += w * lo * hv * hv;
                    sd += w * hi * hv * hv;
                    sh += w * hi * hd * hd;
                }
                let (p, q) = others(vals, i);
                let p2 = p * p;
                let basis: Vec<(f64, f64)> = (0..nm)
                    .map(|m| {
                        let mut c = vec![0.0; m + 1];
                        c[m] = 1.0;
                        BubblePoly(c).value_and_slope(coords[i])
                    })
                    .collect();
                for m in 0..nm {
                    for n in 0..=m {
                        let vv = basis[m].0 * basis[n].0;
                        let ss = basis[m].1 * basis[n].1;
                        a[(m, n)] += wx * sl * p2 * vv;
                        b[(m, n)] += wx * (sd * (p2 * ss + q * vv) + sh * p2 * vv + c3 * h0 * h0 * p2 * vv);
                    }
                }
            }
            a.fill_upper_triangle_with_lower_triangle();
            b.fill_upper_triangle_with_lower_triangle();
            let (_, v) = top_pair(&a, &b)?;
            gs[i] = BubblePoly(v.iter().copied().collect());
        }
    }
    poincare_ratio(&gs, &h, params, mu)
}

fn random_bubbles(rng: &mut impl Rng, d: usize) -> Vec<BubblePoly> {
    (0..d)
        .map(|_| {
            let deg = rng.gen_range(0..=3);
            BubblePoly((0..=deg).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        })
        .collect()
}

/// Runs every inequality `trials` times; bounds are the sharp constants where
/// known (`1/d_beta`, `1/(d pi^2)`, `4/(a+1)^2`) and [`STABILITY_CAP`].
///
/// Trace and Hardy trials report the worst function of a random piecewise
/// polynomial space, a Poincare trial the end point of [`poincare_ascent`]
/// from a random start.
pub fn inequality_suite(params: &FracParams, seed: u64, trials: usize) -> Result<Vec<InequalityReport>> {
    if trials == 0 {
        return Err(domain("at least one trial is required"));
    }
    let d = params.dim();
    let mut out = Vec::new();

    let ratios = (0..trials)
        .into_par_iter()
        .map(|i| trace_sup(&space_basis(&random_space(&mut trial_rng(seed, i)), true), params))
        .collect::<Result<Vec<_>>>()?;
    out.push(report("trace".into(), &ratios, 1.0 / params.d_beta()));

    for (k, &mu) in POINCARE_MUS.iter().enumerate() {
        let ratios = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed ^ (0x5eed_0000 + k as u64), i);
                let gs = random_bubbles(&mut rng, d);
                let basis = space_basis(&random_space(&mut rng), true);
                poincare_ascent(gs, &basis, params, mu)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(report(format!("poincare_mu{mu}"), &ratios, 1.0 / (d as f64 * PI * PI)));
    }

    for (k, a) in [params.alpha() - 2.0, params.alpha() - 2.0 + HARDY_SHIFT].into_iter().enumerate() {
        let ratios = (0..trials)
            .into_par_iter()
            .map(|i| {
                let part = random_space(&mut trial_rng(seed ^ (0x4a2d_0000 + k as u64), i));
                hardy_sup(&space_basis(&part, false), a)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(report(format!("hardy_a{a:.3}"), &ratios, 4.0 / (a + 1.0).powi(2)));
    }

    let ratios = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed ^ 0x57ab_0000, i);
            let width = rng.gen_range(0.3..=3.0);
            let s = 10f64.powf(rng.gen_range(-1.0..=1.0));
            let y = [1.0, 4.0, 16.0][rng.gen_range(0..3)];
            let p = params.with_s(s)?;
            stability_ratio(&p, &RadialProfile::gaussian(d, width)?, Cutoff::Finite(y))
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(report("stability".into(), &ratios, STABILITY_CAP));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> FracParams {
        FracParams::new(0.3, 1.0, 3).unwrap()
    }

    #[test]
    fn zero_functions_give_zero_ratios() {
        let part = Partition::new(vec![0.0, 0.5, 1.0], vec![2, 3]).unwrap();
        let z = PiecewiseFunction::zero(part);
        assert_eq!(trace_ratio(&z, &params()).unwrap(), 0.0);
        assert_eq!(hardy_ratio(&z, -1.5).unwrap(), 0.0);
        let gs = vec![BubblePoly(vec![1.0]); 3];
        assert_eq!(poincare_ratio(&gs, &z, &params(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn hardy_constant_function() {
        let one = PiecewiseFunction::interpolate(Partition::new(vec![0.0, 1.0], vec![1]).unwrap(), |_| 1.0).unwrap();
        // int y^2 / int y^2
        assert!((hardy_ratio(&one, 0.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_ratio_is_sharp_for_the_exact_profile() {
        // the half-order profile e^{-y} truncated smoothly is nearly extremal: ratio <= 1/d_beta = 1
        let p = FracParams::new(0.5, 1.0, 3).unwrap();
        let part = Partition::new(vec![0.0, 0.25, 0.5, 1.0], vec![6, 6, 6]).unwrap();
        let h = PiecewiseFunction::interpolate(part, |y| (1.0 - y) * (1.0 - y)).unwrap();
        let r = trace_ratio(&h, &p).unwrap();
        assert!(r > 0.5 && r <= 1.0, "{r}");
    }

    #[test]
    fn hardy_sup_dominates_members() {
        let mut rng = trial_rng(3, 0);
        let part = random_space(&mut rng);
        let basis = space_basis(&part, false);
        let sup = hardy_sup(&basis, -1.5).unwrap();
        for k in 0..20 {
            let coef: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let g = combine(&basis, &coef).unwrap();
            assert!(hardy_ratio(&g, -1.5).unwrap() <= sup * (1.0 + 1e-10), "member {k}");
        }
        // the hats sum to the constant function
        let mut coef = vec![0.0; basis.len()];
        coef[..=part.num_elements()].fill(1.0);
        let one = combine(&basis, &coef).unwrap();
        assert!((one.eval(0.3) - 1.0).abs() < 1e-14);
        assert!(hardy_ratio(&one, -1.5).unwrap() <= sup);
    }

    #[test]
    fn trace_sup_dominates_members() {
        let p = params();
        let mut rng = trial_rng(5, 0);
        let basis = space_basis(&random_space(&mut rng), true);
        let sup = trace_sup(&basis, &p).unwrap();
        assert!(sup <= 1.0 / p.d_beta());
        for _ in 0..20 {
            let coef: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            assert!(trace_ratio(&combine(&basis, &coef).unwrap(), &p).unwrap() <= sup * (1.0 + 1e-9));
        }
    }

    #[test]
    fn space_basis_dimension() {
        let part = Partition::new(vec![0.0, 0.5, 1.0], vec![3, 1]).unwrap();
        assert_eq!(space_basis(&part, false).len(), 3 + 2);
        assert_eq!(space_basis(&part, true).len(), 2 + 2);
    }

    #[test]
    fn ascent_never_lowers_the_start() {
        let p = params();
        let mut rng = trial_rng(11, 0);
        let gs = random_bubbles(&mut rng, 3);
        let part = random_space(&mut rng);
        let basis = space_basis(&part, true);
        let h = combine(&basis, &vec![0.5; basis.len()]).unwrap();
        let start = poincare_ratio(&gs, &h, &p, 0.0).unwrap();
        let end = poincare_ascent(gs, &basis, &p, 0.0).unwrap();
        assert!(end >= start * (1.0 - 1e-12), "{start} -> {end}");
    }

    #[test]
    fn trials_are_prefix_stable() {
        let a = random_profile(&mut trial_rng(42, 7), true);
        let b = random_profile(&mut trial_rng(42, 7), true);
        assert_eq!(a, b);
    }
}
