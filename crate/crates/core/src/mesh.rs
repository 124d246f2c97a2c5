//! Partitions of `(0, Y)`, geometric meshes graded toward `y = 0`, and
//! continuous piecewise polynomials in an integrated-Legendre basis.

use crate::error::{domain, Error, Result};
use crate::quadrature::{gauss_jacobi_any, legendre_cached};
use nalgebra::{DMatrix, DVector};

/// Gauss points added on elements away from `y = 0`, where the weight is
/// smooth but not polynomial.
pub(crate) const QUAD_PADDING: usize = 14;

/// A partition `0 = b_0 < b_1 < ... < b_L` with one polynomial degree per element.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    breakpoints: Vec<f64>,
    degrees: Vec<usize>,
}

impl Partition {
    pub fn new(breakpoints: Vec<f64>, degrees: Vec<usize>) -> Result<Self> {
        if breakpoints.len() < 2 || degrees.len() + 1 != breakpoints.len() {
            return Err(domain("partition needs L + 1 breakpoints and L degrees"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) || !breakpoints.iter().all(|b| b.is_finite()) {
            return Err(domain("breakpoints must be finite and strictly increasing"));
        }
        if degrees.contains(&0) {
            return Err(domain("element degrees must be positive"));
        }
        Ok(Self { breakpoints, degrees })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn num_elements(&self) -> usize {
        self.degrees.len()
    }

    pub fn element(&self, j: usize) -> (f64, f64) {
        (self.breakpoints[j], self.breakpoints[j + 1])
    }

    pub fn left(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn right(&self) -> f64 {
        *self.breakpoints.last().expect("nonempty")
    }

    /// Index of the element containing `y` (clamped to the end elements).
    pub fn locate(&self, y: f64) -> usize {
        let n = self.num_elements();
        match self.breakpoints.partition_point(|&b| b <= y) {
            0 => 0,
            k if k > n => n - 1,
            k => k - 1,
        }
    }

    /// Every degree raised by `extra`.
    pub fn enriched(&self, extra: usize) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            degrees: self.degrees.iter().map(|p| p + extra).collect(),
        }
    }

    /// Number of unknowns of the continuous space on this partition.
    pub fn num_dofs(&self) -> usize {
        self.breakpoints.len() + self.degrees.iter().map(|p| p - 1).sum::<usize>()
    }
}

/// Partition of `(0, Y)` graded geometrically toward `y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricMesh {
    pub cutoff: f64,
    pub sigma: f64,
    pub layers: usize,
    partition: Partition,
}

/// Breakpoints `{0, Y sigma^(L-1), ..., Y sigma, Y}`; element `j` (counted
/// from `y = 0`, starting at 1) gets degree `max(1, round(degree_slope * j))`.
pub fn geometric_mesh(cutoff: f64, sigma: f64, layers: usize, degree_slope: f64) -> Result<GeometricMesh> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(domain(format!("cutoff {cutoff} must be positive and finite")));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(domain(format!("grading factor {sigma} is outside (0, 1)")));
    }
    if layers == 0 {
        return Err(domain("a geometric mesh needs at least one layer"));
    }
    if !(degree_slope >= 0.0) {
        return Err(domain("degree slope must be nonnegative"));
    }
    let mut breakpoints = vec![0.0];
    for k in (0..layers).rev() {
        breakpoints.push(cutoff * sigma.powi(k as i32));
    }
    let degrees = (1..=layers)
        .map(|j| ((degree_slope * j as f64).round() as usize).max(1))
        .collect();
    Ok(GeometricMesh { cutoff, sigma, layers, partition: Partition::new(breakpoints, degrees)? })
}

impl GeometricMesh {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn breakpoints(&self) -> &[f64] {
        self.partition.breakpoints()
    }

    pub fn degrees(&self) -> &[usize] {
        self.partition.degrees()
    }

    /// Same breakpoints with every degree clamped to at most `max_degree`.
    pub fn capped(&self, max_degree: usize) -> Self {
        let degrees = self.degrees().iter().map(|&p| p.min(max_degree.max(1))).collect();
        let partition = Partition::new(self.breakpoints().to_vec(), degrees).expect("same breakpoints");
        Self { partition, ..self.clone() }
    }

    /// p-enrichment: all degrees raised by `extra`.
    pub fn enriched(&self, extra: usize) -> Self {
        Self { partition: self.partition.enriched(extra), ..self.clone() }
    }
}

impl From<GeometricMesh> for Partition {
    fn from(m: GeometricMesh) -> Self {
        m.partition
    }
}

/// Legendre polynomials `P_0..=P_n` at `t`.
fn legendre_values(n: usize, t: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n >= 1 {
        out.push(t);
    }
    for k in 2..=n {
        let kf = k as f64;
        let v = ((2.0 * kf - 1.0) * t * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
        out.push(v);
    }
}

/// Values and reference-coordinate derivatives of the hierarchic shape
/// functions of degree `p` at `t` in `[-1, 1]`: two vertex hats followed by
/// the integrated-Legendre bubbles `(P_k - P_{k-2}) / sqrt(2(2k-1))`.
pub(crate) fn shape_functions(p: usize, t: f64, val: &mut Vec<f64>, der: &mut Vec<f64>) {
    let mut leg = Vec::with_capacity(p + 1);
    legendre_values(p, t, &mut leg);
    val.clear();
    der.clear();
    val.push(0.5 * (1.0 - t));
    val.push(0.5 * (1.0 + t));
    der.push(-0.5);
    der.push(0.5);
    for k in 2..=p {
        let kf = k as f64;
        val.push((leg[k] - leg[k - 2]) / (2.0 * (2.0 * kf - 1.0)).sqrt());
        der.push(((2.0 * kf - 1.0) / 2.0).sqrt() * leg[k - 1]);
    }
}

/// Quadrature points `(y, w)` for `int_a^b y^exponent g(y) dy` with `g` a
/// polynomial of degree `deg`; the weight is folded into `w`.
///
/// The element touching `y = 0` uses a Gauss-Jacobi rule for the weight,
/// the others a padded Gauss-Legendre rule.
pub(crate) fn weighted_points(a: f64, b: f64, exponent: f64, deg: usize) -> Result<Vec<(f64, f64)>> {
    let h = b - a;
    if a == 0.0 {
        if !(exponent > -1.0) {
            return Err(Error::Integrability(format!(
                "y^{exponent} is not integrable at y = 0"
            )));
        }
        let n = deg / 2 + 2;
        let rule = gauss_jacobi_any(n, exponent)?;
        let scale = h.powf(exponent + 1.0);
        Ok(rule.nodes.iter().zip(&rule.weights).map(|(&t, &w)| (h * t, scale * w)).collect())
    } else {
        let n = deg / 2 + 1 + QUAD_PADDING;
        Ok(legendre_cached(n).mapped(a, b).map(|(y, w)| (y, w * y.powf(exponent))).collect())
    }
}

/// Piecewise polynomial on a [`Partition`]; per element the coefficients of
/// the hierarchic basis `[left hat, right hat, bubbles...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFunction {
    partition: Partition,
    coefficients: Vec<Vec<f64>>,
    continuous: bool,
}

impl PiecewiseFunction {
    pub fn new(partition: Partition, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        if coefficients.len() != partition.num_elements() {
            return Err(domain("one coefficient vector per element is required"));
        }
        for (c, &p) in coefficients.iter().zip(partition.degrees()) {
            if c.len() != p + 1 {
                return Err(domain("coefficient vector length must be degree + 1"));
            }
        }
        let continuous = coefficients.windows(2).all(|w| {
            let (l, r) = (w[0][1], w[1][0]);
            (l - r).abs() <= 1e-12 * l.abs().max(r.abs()).max(1.0)
        });
        Ok(Self { partition, coefficients, continuous })
    }

    pub fn zero(partition: Partition) -> Self {
        let coefficients = partition.degrees().iter().map(|&p| vec![0.0; p + 1]).collect();
        Self { partition, coefficients, continuous: true }
    }

    /// Interpolates `f` at Chebyshev-Lobatto points of every element; exact
    /// for piecewise polynomials of the partition's degrees and continuous
    /// whenever `f` is.
    pub fn interpolate(partition: Partition, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let mut coefficients = Vec::with_capacity(partition.num_elements());
        let (mut val, mut der) = (Vec::new(), Vec::new());
        for j in 0..partition.num_elements() {
            let (a, b) = partition.element(j);
            let p = partition.degrees()[j];
            let ts: Vec<f64> = (0..=p).map(|i| -(std::f64::consts::PI * i as f64 / p as f64).cos()).collect();
            let mut vmat = DMatrix::<f64>::zeros(p + 1, p + 1);
            let mut rhs = DVector::<f64>::zeros(p + 1);
            for (i, &t) in ts.iter().enumerate() {
                shape_functions(p, t, &mut val, &mut der);
                for k in 0..=p {
                    vmat[(i, k)] = val[k];
                }
                let y = match i {
                    0 => a,
                    i if i == p => b,
                    _ => a + 0.5 * (t + 1.0) * (b - a),
                };
                rhs[i] = f(y);
            }
            let c = vmat
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::Singular("interpolation matrix".into()))?;
            coefficients.push(c.iter().copied().collect());
        }
        Self::new(partition, coefficients)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    fn element_eval(&self, j: usize, y: f64) -> (f64, f64) {
        let (a, b) = self.partition.element(j);
        let p = self.partition.degrees()[j];
        let t = 2.0 * (y - a) / (b - a) - 1.0;
        let (mut val, mut der) = (Vec::with_capacity(p + 1), Vec::with_capacity(p + 1));
        shape_functions(p, t, &mut val, &mut der);
        let c = &self.coefficients[j];
        let v: f64 = c.iter().zip(&val).map(|(c, v)| c * v).sum();
        let d: f64 = c.iter().zip(&der).map(|(c, d)| c * d).sum();
        (v, d * 2.0 / (b - a))
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.element_eval(self.partition.locate(y), y).0
    }

    pub fn derivative(&self, y: f64) -> f64 {
        self.element_eval(self.partition.locate(y), y).1
    }

    /// `int y^exponent |f|^2 dy` over the partition.
    ///
    /// For `exponent <= -1` the function must vanish at `y = 0`; the integral
    /// is then evaluated as `int y^(exponent+2) |f/y|^2`.
    pub fn weighted_norm_sq(&self, exponent: f64) -> Result<f64> {
        let mut total = 0.0;
        for j in 0..self.partition.num_elements() {
            let (a, b) = self.partition.element(j);
            let p = self.partition.degrees()[j];
            if a == 0.0 && !(exponent > -1.0) {
                let f0 = self.coefficients[j][0];
                let scale = self.coefficients[j].iter().fold(0.0f64, |m, c| m.max(c.abs()));
                if f0.abs() > 1e-13 * scale.max(1e-300) && f0 != 0.0 {
                    return Err(Error::Integrability(format!(
                        "y^{exponent} |f|^2 is not integrable: f(0) = {f0:e}"
                    )));
                }
                let shifted = exponent + 2.0;
                for (y, w) in weighted_points(a, b, shifted, 2 * p)? {
                    let q = self.element_eval(j, y).0 / y;
                    total += w * q * q;
                }
            } else {
                for (y, w) in weighted_points(a, b, exponent, 2 * p)? {
                    let v = self.element_eval(j, y).0;
                    total += w * v * v;
                }
            }
        }
        Ok(total)
    }

    /// Gram matrix `int y^exponent u_i u_j` (or of the derivatives) of
    /// functions on one partition, with the same rule at `y = 0` as
    /// [`Self::weighted_norm_sq`].
    pub fn weighted_gram(fs: &[Self], exponent: f64, derivative: bool) -> Result<DMatrix<f64>> {
        let n = fs.len();
        let mut gram = DMatrix::zeros(n, n);
        let Some(first) = fs.first() else {
            return Ok(gram);
        };
        let part = &first.partition;
        if fs.iter().any(|f| f.partition != *part) {
            return Err(domain("Gram matrix of functions on different partitions"));
        }
        let mut vals = vec![0.0; n];
        for j in 0..part.num_elements() {
            let (a, b) = part.element(j);
            let p = part.degrees()[j];
            let singular = a == 0.0 && !derivative && !(exponent > -1.0);
            let e = if singular { exponent + 2.0 } else { exponent };
            for (y, w) in weighted_points(a, b, e, 2 * p)? {
                for (v, f) in vals.iter_mut().zip(fs) {
                    let (val, der) = f.element_eval(j, y);
                    *v = if derivative { der } else if singular { val / y } else { val };
                }
                for r in 0..n {
                    for c in 0..=r {
                        gram[(r, c)] += w * vals[r] * vals[c];
                    }
                }
            }
        }
        gram.fill_upper_triangle_with_lower_triangle();
        Ok(gram)
    }

    /// `int y^exponent |f'|^2 dy`.
    pub fn weighted_seminorm_sq(&self, exponent: f64) -> Result<f64> {
        let mut total = 0.0;
        for j in 0..self.partition.num_elements() {
            let (a, b) = self.partition.element(j);
            let p = self.partition.degrees()[j];
            for (y, w) in weighted_points(a, b, exponent, 2 * p.saturating_sub(1))? {
                let d = self.element_eval(j, y).1;
                total += w * d * d;
            }
        }
        Ok(total)
    }

    /// `G(y) = int_0^y f`, one degree higher on every element.
    pub fn antiderivative(&self) -> Result<Self> {
        let part = self.partition.enriched(1);
        let mut offsets = Vec::with_capacity(self.partition.num_elements());
        let mut acc = 0.0;
        for j in 0..self.partition.num_elements() {
            offsets.push(acc);
            let (a, b) = self.partition.element(j);
            acc += self.integral_on(j, a, b);
        }
        Self::interpolate(part, |y| {
            let j = self.partition.locate(y);
            offsets[j] + self.integral_on(j, self.partition.element(j).0, y)
        })
    }

    fn integral_on(&self, j: usize, a: f64, b: f64) -> f64 {
        let p = self.partition.degrees()[j];
        legendre_cached(p / 2 + 1).mapped(a, b).map(|(y, w)| w * self.element_eval(j, y).0).sum()
    }

    /// `c * f`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            partition: self.partition.clone(),
            coefficients: self.coefficients.iter().map(|v| v.iter().map(|x| c * x).collect()).collect(),
            continuous: self.continuous,
        }
    }
}

/// Extension of `f` from `(0, Y)` to `(0, 3Y/2)` by reflection about
/// `y = Y`: `W(y) = f(2Y - y)` for `Y < y <= 3Y/2`.
pub fn reflect_extend(f: &PiecewiseFunction, cutoff: f64) -> Result<PiecewiseFunction> {
    let part = f.partition();
    if (part.right() - cutoff).abs() > 1e-12 * cutoff || part.left() != 0.0 {
        return Err(domain(format!("function is not defined on (0, {cutoff})")));
    }
    let mut breakpoints: Vec<f64> = part.breakpoints().to_vec();
    let mut degrees: Vec<usize> = part.degrees().to_vec();
    *breakpoints.last_mut().expect("nonempty") = cutoff;
    // mirror the elements meeting (Y/2, Y), walking inward from Y
    for j in (0..part.num_elements()).rev() {
        let (a, _) = part.element(j);
        let lo = a.max(0.5 * cutoff);
        breakpoints.push(2.0 * cutoff - lo);
        degrees.push(part.degrees()[j]);
        if a <= 0.5 * cutoff {
            break;
        }
    }
    *breakpoints.last_mut().expect("nonempty") = 1.5 * cutoff;
    let ext = Partition::new(breakpoints, degrees)?;
    PiecewiseFunction::interpolate(ext, |y| if y <= cutoff { f.eval(y) } else { f.eval(2.0 * cutoff - y) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(p: usize) -> Partition {
        Partition::new(vec![0.0, 1.0], vec![p]).unwrap()
    }

    #[test]
    fn geometric_mesh_examples() {
        let m = geometric_mesh(1.0, 0.5, 3, 1.0).unwrap();
        assert_eq!(m.breakpoints(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(m.degrees(), &[1, 2, 3]);
        let m = geometric_mesh(4.0, 0.25, 2, 0.0).unwrap();
        assert_eq!(m.breakpoints(), &[0.0, 1.0, 4.0]);
        assert_eq!(m.degrees(), &[1, 1]);
        let m = geometric_mesh(1.0, 0.5, 10, 1.0).unwrap();
        assert!((m.breakpoints()[1] - 0.5f64.powi(9)).abs() < 1e-18);
        assert!(geometric_mesh(0.0, 0.5, 3, 1.0).is_err());
    }

    #[test]
    fn weighted_norm_examples() {
        let one = PiecewiseFunction::interpolate(unit(1), |_| 1.0).unwrap();
        assert!((one.weighted_norm_sq(0.5).unwrap() - 1.0 / 1.5).abs() < 1e-14);
        let zero = PiecewiseFunction::zero(unit(3));
        assert_eq!(zero.weighted_norm_sq(0.5).unwrap(), 0.0);
        let lin = PiecewiseFunction::interpolate(unit(1), |y| y).unwrap();
        assert!((lin.weighted_norm_sq(-0.5).unwrap() - 1.0 / 2.5).abs() < 1e-14);
    }

    #[test]
    fn singular_exponent_needs_vanishing_trace() {
        let one = PiecewiseFunction::interpolate(unit(2), |_| 1.0).unwrap();
        assert!(matches!(one.weighted_norm_sq(-1.5), Err(Error::Integrability(_))));
        let lin = PiecewiseFunction::interpolate(unit(2), |y| y).unwrap();
        // int_0^1 y^-1.5 y^2 = 1/1.5
        assert!((lin.weighted_norm_sq(-1.5).unwrap() - 1.0 / 1.5).abs() < 1e-13);
    }

    #[test]
    fn reflection_examples() {
        let lin = PiecewiseFunction::interpolate(geometric_mesh(1.0, 0.5, 3, 1.0).unwrap().into(), |y| y).unwrap();
        let w = reflect_extend(&lin, 1.0).unwrap();
        assert!((w.eval(1.25) - 0.75).abs() < 1e-14);
        assert!((w.partition().right() - 1.5).abs() < 1e-15);
        assert!(w.is_continuous());

        let c = PiecewiseFunction::interpolate(geometric_mesh(3.0, 0.3, 4, 1.0).unwrap().into(), |_| 2.5).unwrap();
        let w = reflect_extend(&c, 3.0).unwrap();
        for y in [0.1, 1.0, 3.2, 4.4] {
            assert!((w.eval(y) - 2.5).abs() < 1e-13);
        }

        let sq = PiecewiseFunction::interpolate(geometric_mesh(2.0, 0.5, 4, 1.0).unwrap().into(), |y| y * y).unwrap();
        let w = reflect_extend(&sq, 2.0).unwrap();
        assert!((w.eval(3.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn antiderivative_of_constant() {
        let one = PiecewiseFunction::interpolate(geometric_mesh(1.0, 0.5, 3, 0.0).unwrap().into(), |_| 1.0).unwrap();
        let g = one.antiderivative().unwrap();
        for y in [0.0, 0.1, 0.3, 0.77, 1.0] {
            assert!((g.eval(y) - y).abs() < 1e-14);
        }
    }

    #[test]
    fn seminorm_of_linear() {
        let f = PiecewiseFunction::interpolate(geometric_mesh(2.0, 0.5, 4, 2.0).unwrap().into(), |y| 3.0 * y).unwrap();
        // int_0^2 y^0.5 * 9 = 9 * 2^1.5 / 1.5
        let exact = 9.0 * 2f64.powf(1.5) / 1.5;
        assert!((f.weighted_seminorm_sq(0.5).unwrap() - exact).abs() < 1e-12 * exact);
    }
}
