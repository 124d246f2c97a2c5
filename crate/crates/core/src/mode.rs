//! hp Galerkin solver for one Fourier mode of the truncated extension:
//! find `w` with
//! `int_0^Y y^alpha (w' v' + lambda^2 w v) + s d_beta w(0) v(0) = d_beta fhat v(0)`
//! for all `v`. The Neumann condition at `Y` is natural.

use crate::error::{domain, Error, Result};
use crate::mesh::{geometric_mesh, shape_functions, weighted_points, GeometricMesh, Partition, PiecewiseFunction};
use crate::oracle::ModeProfile;
use crate::params::FracParams;
use crate::Cutoff;
use nalgebra::{DMatrix, DVector};

/// One mode problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProblem {
    pub lambda: f64,
    pub params: FracParams,
    pub cutoff: Cutoff,
    pub fhat: f64,
}

impl ModeProblem {
    pub fn new(lambda: f64, params: FracParams, cutoff: Cutoff, fhat: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(domain(format!("frequency {lambda} must be nonnegative")));
        }
        if !fhat.is_finite() {
            return Err(domain("datum must be finite"));
        }
        match cutoff {
            Cutoff::Finite(y) if !(y > 0.0) || !y.is_finite() => {
                return Err(domain(format!("cutoff {y} must be positive")));
            }
            Cutoff::Infinite if lambda == 0.0 && params.s() == 0.0 => {
                return Err(domain("lambda = 0 on the infinite cylinder requires s > 0"));
            }
            _ => {}
        }
        Ok(Self { lambda, params, cutoff, fhat })
    }

    /// Height actually meshed: `Y`, or the proxy [`infinity_proxy`] for `Y = inf`.
    pub fn solve_height(&self) -> f64 {
        match self.cutoff {
            Cutoff::Finite(y) => y,
            Cutoff::Infinite => infinity_proxy(self.lambda),
        }
    }
}

/// Finite stand-in for `Y = inf`: `max(40 / lambda, 40)`, so that
/// `lambda Y >= 40` and the neglected tail is of size `e^{-80}`.
pub fn infinity_proxy(lambda: f64) -> f64 {
    if lambda > 0.0 {
        (40.0 / lambda).max(40.0)
    } else {
        40.0
    }
}

/// Mesh parameters of the mode solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshControls {
    pub sigma: f64,
    /// Number of layers; `None` grades until the innermost element is below
    /// `inner_scale^max(1, 1/(2 beta))` in units of `min(Y, 1/lambda)`.
    pub layers: Option<usize>,
    pub degree_slope: f64,
    pub max_degree: usize,
    pub extra_degree: usize,
    pub inner_scale: f64,
}

impl Default for MeshControls {
    fn default() -> Self {
        Self { sigma: 0.15, layers: None, degree_slope: 1.0, max_degree: 20, extra_degree: 0, inner_scale: 1e-12 }
    }
}

/// Smallest relative size of the innermost element chosen automatically.
const INNER_FLOOR: f64 = 1e-60;

impl MeshControls {
    /// Same controls with every degree raised by `extra`.
    pub fn enriched(self, extra: usize) -> Self {
        Self { extra_degree: self.extra_degree + extra, ..self }
    }

    /// Geometric mesh of `(0, height)` for frequency `lambda` and order `beta`.
    ///
    /// The energy of the `y^(2 beta)` singular part on `(0, h)` scales like
    /// `h^(2 beta)`, hence the finer inner element for small `beta`.
    pub fn mesh(&self, lambda: f64, height: f64, beta: f64) -> Result<GeometricMesh> {
        let layers = match self.layers {
            Some(l) => l,
            None => {
                let scale = if lambda > 0.0 { height.min(1.0 / lambda) } else { height };
                let inner = self.inner_scale.powf((0.5 / beta).max(1.0)).max(INNER_FLOOR);
                let ratio = height / (scale * inner);
                ((ratio.ln() / (1.0 / self.sigma).ln()).ceil() as usize + 1).max(2)
            }
        };
        let mesh = geometric_mesh(height, self.sigma, layers, self.degree_slope)?.capped(self.max_degree);
        Ok(if self.extra_degree > 0 { mesh.enriched(self.extra_degree) } else { mesh })
    }
}

/// Dense mode system `K c = F`.
///
/// The vertex unknowns are `u(0)` and the increments `u(y_i) - u(y_{i-1})`,
/// i.e. the basis is the constant `1` and the ramps rising across one element;
/// the bubbles follow element by element. Gradients of the ramps have disjoint
/// supports, so tiny elements near `y = 0` never enter through cancellation.
#[derive(Debug, Clone)]
pub struct ModeSystem {
    pub matrix: DMatrix<f64>,
    pub load: DVector<f64>,
    bubbles: Vec<Vec<usize>>,
}

impl ModeSystem {
    /// Element coefficients `[u(a), u(b), bubbles...]` of the solution vector `c`.
    fn element_coefficients(&self, c: &DVector<f64>) -> Vec<Vec<f64>> {
        let mut vertex = 0.0;
        self.bubbles
            .iter()
            .enumerate()
            .map(|(e, bub)| {
                if e == 0 {
                    vertex = c[0];
                }
                let left = vertex;
                vertex += c[e + 1];
                let mut out = vec![left, vertex];
                out.extend(bub.iter().map(|&i| c[i]));
                out
            })
            .collect()
    }
}

/// Assembles stiffness `int y^alpha (u'v' + lambda^2 uv) + s d_beta u(0)v(0)`
/// and load `d_beta fhat v(0)`.
pub fn assemble_mode_system(partition: &Partition, prob: &ModeProblem) -> Result<ModeSystem> {
    if partition.left() != 0.0 {
        return Err(domain("mode mesh must start at y = 0"));
    }
    let right = partition.right();
    if let Cutoff::Finite(y) = prob.cutoff {
        if (right - y).abs() > 1e-12 * y {
            return Err(domain(format!("mesh ends at {right}, cutoff is {y}")));
        }
    }
    let p = &prob.params;
    let lam2 = prob.lambda * prob.lambda;
    let n = partition.num_dofs();
    let n_el = partition.num_elements();
    let mut next = n_el + 1;
    let bubbles: Vec<Vec<usize>> = partition
        .degrees()
        .iter()
        .map(|&deg| {
            let b: Vec<usize> = (next..next + deg - 1).collect();
            next += deg - 1;
            b
        })
        .collect();
    let mut k = DMatrix::<f64>::zeros(n, n);
    let (mut val, mut der) = (Vec::new(), Vec::new());
    for e in 0..n_el {
        let (a, b) = partition.element(e);
        let deg = partition.degrees()[e];
        let h = b - a;
        // local basis: 1, right hat, bubbles
        let mut local = DMatrix::<f64>::zeros(deg + 1, deg + 1);
        for (y, w) in weighted_points(a, b, p.alpha(), 2 * deg)? {
            shape_functions(deg, 2.0 * (y - a) / h - 1.0, &mut val, &mut der);
            val[0] = 1.0;
            der[0] = 0.0;
            for r in 0..=deg {
                let dr = der[r] * 2.0 / h;
                for c in r..=deg {
                    local[(r, c)] += w * (dr * der[c] * 2.0 / h + lam2 * val[r] * val[c]);
                }
            }
        }
        let targets = |r: usize| -> Vec<usize> {
            match r {
                0 => (0..=e).collect(),
                1 => vec![e + 1],
                r => vec![bubbles[e][r - 2]],
            }
        };
        for r in 0..=deg {
            for c in r..=deg {
                let v = local[(r, c)];
                for &gr in &targets(r) {
                    for &gc in &targets(c) {
                        k[(gr, gc)] += v;
                        if r != c {
                            k[(gc, gr)] += v;
                        }
                    }
                }
            }
        }
    }
    k[(0, 0)] += p.s() * p.d_beta();
    let mut load = DVector::<f64>::zeros(n);
    load[0] = p.d_beta() * prob.fhat;
    Ok(ModeSystem { matrix: k, load, bubbles })
}

/// Galerkin solution of one mode.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub problem: ModeProblem,
    pub solution: PiecewiseFunction,
    /// `w(0)`
    pub trace0: f64,
    /// `int y^alpha (|w'|^2 + lambda^2 |w|^2)`
    pub energy_sq: f64,
    /// `|K u - F| / |F|` of the factorised solve
    pub residual: f64,
}

impl ModeSolution {
    pub fn mesh(&self) -> &Partition {
        self.solution.partition()
    }
}

/// Solves `prob` on `partition` by a dense Cholesky factorisation.
///
/// `lambda = 0` with `Y = inf` is answered directly by the constant `fhat / s`.
pub fn solve_mode(prob: &ModeProblem, partition: &Partition) -> Result<ModeSolution> {
    let s = prob.params.s();
    if prob.lambda == 0.0 && prob.cutoff.is_infinite() {
        let c = prob.fhat / s;
        let solution = PiecewiseFunction::interpolate(partition.clone(), |_| c)?;
        return Ok(ModeSolution { problem: *prob, solution, trace0: c, energy_sq: 0.0, residual: 0.0 });
    }
    if prob.lambda == 0.0 && s == 0.0 {
        return Err(Error::Singular("lambda = s = 0 leaves the constants undetermined".into()));
    }
    let sys = assemble_mode_system(partition, prob)?;
    let n = sys.load.len();
    // symmetric diagonal scaling removes the h^(alpha-1) spread of the graded mesh
    let scale: Vec<f64> = (0..n).map(|i| 1.0 / sys.matrix[(i, i)].sqrt()).collect();
    if scale.iter().any(|d| !d.is_finite()) {
        return Err(Error::NotSpd(format!("nonpositive diagonal, mode lambda = {}", prob.lambda)));
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| scale[i] * sys.matrix[(i, j)] * scale[j]);
    let chol = scaled
        .cholesky()
        .ok_or_else(|| Error::NotSpd(format!("mode lambda = {}, {n} unknowns", prob.lambda)))?;
    let rhs = DVector::from_fn(n, |i, _| scale[i] * sys.load[i]);
    let mut z = chol.solve(&rhs);
    // one step of iterative refinement
    let r = &rhs - DMatrix::from_fn(n, n, |i, j| scale[i] * sys.matrix[(i, j)] * scale[j]) * &z;
    z += chol.solve(&r);
    let u = DVector::from_fn(n, |i, _| scale[i] * z[i]);
    let fnorm = sys.load.norm();
    let residual = if fnorm > 0.0 { (&sys.matrix * &u - &sys.load).norm() / fnorm } else { 0.0 };
    let coefficients = sys.element_coefficients(&u);
    let solution = PiecewiseFunction::new(partition.clone(), coefficients)?;
    let alpha = prob.params.alpha();
    let energy_sq = solution.weighted_seminorm_sq(alpha)?
        + prob.lambda * prob.lambda * solution.weighted_norm_sq(alpha)?;
    Ok(ModeSolution { problem: *prob, trace0: u[0], solution, energy_sq, residual })
}

fn solve_with(lambda: f64, cutoff: Cutoff, params: &FracParams, controls: &MeshControls, fhat: f64) -> Result<ModeSolution> {
    let prob = ModeProblem::new(lambda, *params, cutoff, fhat)?;
    let mesh = controls.mesh(lambda, prob.solve_height(), prob.params.beta())?;
    solve_mode(&prob, mesh.partition())
}

/// Discrete DtN symbol `a_Y(lambda) = fhat / w(0) - s` from a unit-datum solve.
pub fn mode_dtn(lambda: f64, cutoff: Cutoff, params: &FracParams, controls: &MeshControls) -> Result<f64> {
    if lambda == 0.0 && params.s() > 0.0 {
        return Ok(0.0);
    }
    let sol = solve_with(lambda, cutoff, params, controls, 1.0)?;
    if sol.trace0 == 0.0 {
        return Err(Error::DivisionByZero("discrete trace vanished".into()));
    }
    Ok(1.0 / sol.trace0 - params.s())
}

/// Squared energy error `int_0^Y y^alpha (|e'|^2 + lambda^2 |e|^2) + s d_beta |e(0)|^2`
/// between the discrete truncated solution and the exact full-space mode
/// (unit datum).
pub fn mode_energy_error(lambda: f64, cutoff: Cutoff, params: &FracParams, controls: &MeshControls) -> Result<f64> {
    let Some(y) = cutoff.finite() else {
        return Ok(0.0);
    };
    if lambda == 0.0 && params.s() > 0.0 {
        return Ok(0.0);
    }
    let sol = solve_with(lambda, cutoff, params, controls, 1.0)?;
    let (reference, ref_trace): (Box<dyn Fn(f64) -> Result<(f64, f64)>>, f64) =
        match ModeProfile::new(lambda, *params, Cutoff::Infinite, 1.0) {
            Ok(w) => {
                let t = w.trace();
                (Box::new(move |y| Ok((w.eval(y)?, w.derivative(1, y)?))), t)
            }
            Err(_) => {
                let far = solve_with(lambda, Cutoff::Finite(y.max(infinity_proxy(lambda))), params, &controls.enriched(4), 1.0)?;
                let t = far.trace0;
                (Box::new(move |y| Ok((far.solution.eval(y), far.solution.derivative(y)))), t)
            }
        };
    let part = sol.solution.partition();
    let lam2 = lambda * lambda;
    let mut total = 0.0;
    for j in 0..part.num_elements() {
        let (a, b) = part.element(j);
        let deg = part.degrees()[j];
        for (t, w) in weighted_points(a, b, params.alpha(), 2 * deg + 24)? {
            let (rv, rd) = reference(t)?;
            let ev = sol.solution.eval(t) - rv;
            let ed = sol.solution.derivative(t) - rd;
            total += w * (ed * ed + lam2 * ev * ev);
        }
    }
    let e0 = sol.trace0 - ref_trace;
    Ok(total + params.s() * params.d_beta() * e0 * e0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dtn_symbol;

    fn p(beta: f64, s: f64) -> FracParams {
        FracParams::new(beta, s, 3).unwrap()
    }

    #[test]
    fn zero_frequency_mode_is_constant() {
        let prob = ModeProblem::new(0.0, p(0.3, 1.0), Cutoff::Finite(2.0), 3.0).unwrap();
        let mesh = MeshControls::default().mesh(0.0, 2.0, 0.3).unwrap();
        let sol = solve_mode(&prob, mesh.partition()).unwrap();
        for y in [0.0, 0.5, 2.0] {
            assert!((sol.solution.eval(y) - 3.0).abs() < 1e-10);
        }
        assert!(sol.energy_sq < 1e-18);
    }

    #[test]
    fn half_order_examples() {
        let c = MeshControls::default();
        let sol = solve_with(1.0, Cutoff::Infinite, &p(0.5, 1.0), &c, 1.0).unwrap();
        assert!((sol.trace0 - 0.5).abs() < 1e-10);
        assert!((sol.solution.eval(1.0) - 0.5 * (-1.0f64).exp()).abs() < 1e-8);
        let sol = solve_with(1.0, Cutoff::Finite(1.0), &p(0.5, 1.0), &c, 1.0).unwrap();
        assert!((sol.trace0 - 1.0 / (1.0 + 1f64.tanh())).abs() < 1e-10);
        assert!(sol.residual < 1e-10);
    }

    #[test]
    fn full_space_trace_against_symbol() {
        let sol = solve_with(2.0, Cutoff::Infinite, &p(0.25, 0.0), &MeshControls::default(), 1.0).unwrap();
        assert!((sol.trace0 - 2f64.powf(-0.5)).abs() < 1e-4 * 2f64.powf(-0.5));
    }

    #[test]
    fn zero_datum_gives_zero() {
        let sol = solve_with(1.0, Cutoff::Finite(3.0), &p(0.4, 1.0), &MeshControls::default(), 0.0).unwrap();
        assert_eq!(sol.trace0, 0.0);
        assert_eq!(sol.energy_sq, 0.0);
    }

    #[test]
    fn dtn_examples() {
        let c = MeshControls::default();
        let v = mode_dtn(2.0, Cutoff::Infinite, &p(0.3, 1.0), &c).unwrap();
        assert!((v / 2f64.powf(0.6) - 1.0).abs() < 1e-4);
        let v = mode_dtn(1.0, Cutoff::Finite(1.0), &p(0.5, 1.0), &c).unwrap();
        assert!((v - 1f64.tanh()).abs() < 1e-9);
        let exact = dtn_symbol(1.5, Cutoff::Finite(0.8), &p(0.7, 0.3)).unwrap();
        let v = mode_dtn(1.5, Cutoff::Finite(0.8), &p(0.7, 0.3), &c).unwrap();
        assert!((v / exact - 1.0).abs() < 1e-6, "{v} {exact}");
    }

    #[test]
    fn energy_error_examples() {
        let c = MeshControls::default();
        assert_eq!(mode_energy_error(1.0, Cutoff::Infinite, &p(0.5, 1.0), &c).unwrap(), 0.0);
        assert_eq!(mode_energy_error(0.0, Cutoff::Finite(1.0), &p(0.5, 1.0), &c).unwrap(), 0.0);
        // beta = 1/2, s = 1, lambda = 1, Y = 1: w_inf = e^{-y}/2,
        // w_1 = cosh(1 - y) / (sinh 1 + cosh 1)
        let got = mode_energy_error(1.0, Cutoff::Finite(1.0), &p(0.5, 1.0), &c).unwrap();
        let (sh, ch) = (1f64.sinh(), 1f64.cosh());
        let k = 1.0 / (sh + ch);
        // e = k cosh(1-y) - e^{-y}/2, e' = -k sinh(1-y) + e^{-y}/2
        // |e'|^2 + |e|^2 = k^2 cosh(2(1-y)) - k e^{1-2y} + e^{-2y}/2
        let exact = k * k * 2f64.sinh() / 2.0 - k * 1f64.exp() * (1.0 - (-2.0f64).exp()) / 2.0
            + (1.0 - (-2.0f64).exp()) / 4.0
            + (k * ch - 0.5).powi(2);
        assert!((got - exact).abs() < 1e-8 * exact, "{got} vs {exact}");
    }
}
