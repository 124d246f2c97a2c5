use fracext::lab::inequality::random_profile;
use fracext::lab::stability_ratio;
use fracext::mode::{assemble_mode_system, MeshControls, ModeProblem};
use fracext::oracle::dtn_symbol_with_bound;
use fracext::synthesis::{radial_functional, FunctionalKind, RadialProfile};
use fracext::{
    alpha_from_beta, compute_dbeta, compute_mu, gauss_jacobi_rule, mode_energy_error, reflect_extend, solve_mode,
    Cutoff, FracParams, ModeProfile, Partition, PiecewiseFunction,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn coarse() -> MeshControls {
    MeshControls { layers: Some(5), ..MeshControls::default() }
}

proptest! {
    #[test]
    fn alpha_is_antisymmetric(beta in 0.001f64..0.999) {
        let a = alpha_from_beta(beta).unwrap();
        prop_assert!(a > -1.0 && a < 1.0);
        prop_assert!((alpha_from_beta(1.0 - beta).unwrap() + a).abs() < 1e-15);
    }

    #[test]
    fn mu_symmetric_and_above_s_zero(alpha in -0.999f64..0.999, s in 1e-6f64..1e3) {
        let m = compute_mu(alpha, s).unwrap().mu;
        prop_assert_eq!(m, compute_mu(-alpha, s).unwrap().mu);
        prop_assert!(m >= compute_mu(alpha, 0.0).unwrap().mu);
        prop_assert!(m > 0.0 && m < 2.0);
    }

    #[test]
    fn quadrature_weights_positive(n in 1usize..40, alpha in -0.99f64..0.99) {
        let rule = gauss_jacobi_rule(n, alpha).unwrap();
        prop_assert!(rule.weights.iter().all(|&w| w > 0.0));
        prop_assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        let total: f64 = rule.weights.iter().sum();
        prop_assert!(rel(total, 1.0 / (alpha + 1.0)) < 1e-12);
    }

    #[test]
    fn weighted_norm_is_homogeneous(seed in any::<u64>(), c in -20.0f64..20.0, e in -0.9f64..2.0) {
        let f = random_profile(&mut ChaCha8Rng::seed_from_u64(seed), false);
        let base = f.weighted_norm_sq(e).unwrap();
        prop_assert!(rel(f.scaled(c).weighted_norm_sq(e).unwrap(), c * c * base) < 1e-12 || base == 0.0);
    }

    #[test]
    fn solve_is_linear_in_datum(lam in 0.01f64..20.0, beta in 0.05f64..0.95, s in 0.0f64..5.0, c in -10.0f64..10.0) {
        let p = FracParams::new(beta, s, 3).unwrap();
        let y = 3.0;
        let part = MeshControls::default().mesh(lam, y, beta).unwrap();
        let one = solve_mode(&ModeProblem::new(lam, p, Cutoff::Finite(y), 1.0).unwrap(), part.partition()).unwrap();
        let many = solve_mode(&ModeProblem::new(lam, p, Cutoff::Finite(y), c).unwrap(), part.partition()).unwrap();
        prop_assert!((many.trace0 - c * one.trace0).abs() <= 1e-10 * (c * one.trace0).abs().max(1e-300));
        prop_assert!((many.energy_sq - c * c * one.energy_sq).abs() <= 1e-10 * c * c * one.energy_sq);
    }

    #[test]
    fn p_enrichment_reduces_error(lam in 0.1f64..10.0, beta in 0.1f64..0.9, s in 0.1f64..5.0) {
        // energy error of a Galerkin solution is proportional to w(0) - w_h(0)
        let p = FracParams::new(beta, s, 3).unwrap();
        let y = 2.0;
        let exact = ModeProfile::new(lam, p, Cutoff::Finite(y), 1.0).unwrap().trace();
        let prob = ModeProblem::new(lam, p, Cutoff::Finite(y), 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for extra in 0..4 {
            let part = coarse().enriched(extra).mesh(lam, y, beta).unwrap();
            let err = exact - solve_mode(&prob, part.partition()).unwrap().trace0;
            prop_assert!(err >= -1e-13 * exact);
            prop_assert!(err <= prev + 1e-13 * exact);
            prev = err;
        }
    }

    #[test]
    fn truncated_symbol_gap_decays_like_exp(lam in 0.2f64..5.0, beta in 0.05f64..0.95) {
        let p = FracParams::new(beta, 1.0, 3).unwrap();
        let full = lam.powf(2.0 * beta);
        for x in [1.0, 2.0, 4.0, 7.0, 10.0] {
            let (v, _) = dtn_symbol_with_bound(lam, Cutoff::Finite(x / lam), &p).unwrap();
            let gap = full - v;
            prop_assert!(gap > 0.0);
            prop_assert!(gap <= 2.5 * full * (-2.0 * x).exp(), "x={} gap={}", x, gap);
        }
    }

    #[test]
    fn norms_scale_quadratically(c in 0.01f64..100.0, beta in 0.1f64..0.9) {
        let p = FracParams::new(beta, 1.0, 3).unwrap();
        let f = RadialProfile::gaussian(3, 0.7).unwrap();
        let a = radial_functional(&f, &p, Cutoff::Finite(2.0), FunctionalKind::SolutionNorms).unwrap();
        let b = radial_functional(&f.scaled(c), &p, Cutoff::Finite(2.0), FunctionalKind::SolutionNorms).unwrap();
        prop_assert!(rel(b.energy_sq, c * c * a.energy_sq) < 1e-9);
        prop_assert!(rel(b.trace_sq, c * c * a.trace_sq) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn mode_matrix_is_spd(lam in 0.0f64..50.0, beta in 0.05f64..0.98, s in 0.0f64..10.0, y in 0.1f64..40.0) {
        prop_assume!(s > 0.0 || lam > 0.0);
        let p = FracParams::new(beta, s, 3).unwrap();
        let prob = ModeProblem::new(lam, p, Cutoff::Finite(y), 1.0).unwrap();
        let part = MeshControls::default().mesh(lam, y, beta).unwrap();
        let sys = assemble_mode_system(part.partition(), &prob).unwrap();
        let m = &sys.matrix;
        prop_assert!((m - m.transpose()).amax() <= 1e-12 * m.amax());
        let d = nalgebra::DVector::from_iterator(m.nrows(), m.diagonal().iter().map(|v| 1.0 / v.sqrt()));
        let scaled = nalgebra::DMatrix::from_diagonal(&d) * m * nalgebra::DMatrix::from_diagonal(&d);
        prop_assert!(scaled.cholesky().is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn truncation_error_nonincreasing_in_y(beta in 0.1f64..0.9, s in prop_oneof![Just(0.0), 0.1f64..5.0], w in 0.3f64..2.0) {
        let p = FracParams::new(beta, s, 3).unwrap();
        let f = RadialProfile::gaussian(3, w).unwrap();
        let mut prev = f64::INFINITY;
        for y in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            let e = radial_functional(&f, &p, Cutoff::Finite(y), FunctionalKind::TruncationError).unwrap().combined;
            prop_assert!(e <= prev * (1.0 + 1e-9), "Y={} {} > {}", y, e, prev);
            prev = e;
        }
    }

    #[test]
    fn mode_error_decays_exponentially(lam in 0.2f64..4.0, beta in 0.1f64..0.9, s in 0.1f64..5.0) {
        let p = FracParams::new(beta, s, 3).unwrap();
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0]
            .iter()
            .map(|k| {
                let y = k / lam;
                (y, mode_energy_error(lam, Cutoff::Finite(y), &p, &MeshControls::default()).unwrap().ln())
            })
            .collect();
        let fit = fracext::lab::rate_fit(&pts.iter().map(|&(y, l)| (y.exp(), l.exp())).collect::<Vec<_>>()).unwrap();
        prop_assert!(fit.slope <= -0.9 * lam, "slope {} for lambda {}", fit.slope, lam);
    }
}

#[test]
fn dbeta_is_continuous() {
    let jump = |n: usize| {
        (0..n)
            .map(|j| {
                let (a, b) = (0.05 + 0.9 * j as f64 / n as f64, 0.05 + 0.9 * (j + 1) as f64 / n as f64);
                (compute_dbeta(b).unwrap() / compute_dbeta(a).unwrap() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    };
    let mut prev = jump(100);
    for n in [200, 400, 800, 1600] {
        let next = jump(n);
        assert!(next < 0.6 * prev, "n={n}: {next} vs {prev}");
        prev = next;
    }
    assert!(prev < 2e-2);
}

fn on_interval(f: &PiecewiseFunction, y: f64) -> PiecewiseFunction {
    let part = f.partition();
    let breaks = part.breakpoints().iter().map(|b| b * y).collect();
    PiecewiseFunction::new(Partition::new(breaks, part.degrees().to_vec()).unwrap(), f.coefficients().to_vec()).unwrap()
}

#[test]
fn reflection_constant_independent_of_height() {
    for beta in [0.25, 0.5, 0.75] {
        let alpha = alpha_from_beta(beta).unwrap();
        for mu in [0.0, 1.0 + alpha.abs()] {
            let e = alpha + mu;
            let mut worst: f64 = 0.0;
            for trial in 0..200u64 {
                let f = random_profile(&mut ChaCha8Rng::seed_from_u64(trial), false);
                let ratios: Vec<f64> = [1.0, 4.0, 16.0]
                    .iter()
                    .map(|&y| {
                        let g = on_interval(&f, y);
                        let w = reflect_extend(&g, y).unwrap();
                        w.weighted_seminorm_sq(e).unwrap() / g.weighted_seminorm_sq(e).unwrap()
                    })
                    .collect();
                assert!(rel(ratios[1], ratios[0]) < 1e-9 && rel(ratios[2], ratios[0]) < 1e-9, "{ratios:?}");
                worst = worst.max(ratios[0]);
            }
            assert!(worst <= 1.0 + 3f64.powf(e.max(0.0)), "beta={beta} mu={mu}: {worst}");
        }
    }
}

#[test]
fn stability_ratio_grows_like_root_s() {
    let f = RadialProfile::gaussian(3, 1.0).unwrap();
    for beta in [0.25, 0.5, 0.75] {
        let p = FracParams::new(beta, 1.0, 3).unwrap();
        let r = |s: f64| stability_ratio(&p.with_s(s).unwrap(), &f, Cutoff::Finite(4.0)).unwrap();
        let (a, b) = (r(100.0), r(1e4));
        assert!((b / a / 10.0 - 1.0).abs() < 0.05, "beta={beta}: {a} -> {b}");
        let (c, d) = (r(0.01), r(0.1));
        assert!(c.is_finite() && d.is_finite() && c < 10.0 && d < 10.0);
    }
}
