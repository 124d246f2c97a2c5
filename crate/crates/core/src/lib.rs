//! Numerical laboratory for the truncated Caffarelli-Silvestre extension of
//! the full-space fractional diffusion problem `L^beta u + s u = f` in `R^d`.
//!
//! The extension problem is diagonalised by the Fourier transform in `x`:
//! every frequency `lambda = |xi|` yields a degenerate two-point problem in
//! `y` with the Muckenhoupt weight `y^alpha`. The crate solves those mode
//! problems with an hp finite element method on geometric meshes
//! ([`mode`]), checks them against closed-form Bessel profiles
//! ([`oracle`]), aggregates modes into `d`-dimensional norms
//! ([`synthesis`]) and runs the truncation, Cauchy, regularity and
//! inequality studies of [`lab`].

pub mod bessel;
pub mod error;
pub mod grid;
pub mod lab;
pub mod mesh;
pub mod mode;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod synthesis;

pub use error::{Error, Result};
pub use mesh::{geometric_mesh, reflect_extend, GeometricMesh, Partition, PiecewiseFunction};
pub use mode::{mode_dtn, mode_energy_error, solve_mode, MeshControls, ModeProblem, ModeSolution};
pub use oracle::{dtn_symbol, ModeProfile};
pub use params::{alpha_from_beta, compute_dbeta, compute_mu, DecayRate, FracParams};
pub use quadrature::{gauss_jacobi_rule, QuadratureRule};
pub use synthesis::{FieldNorms, FunctionalKind, RadialProfile};

/// Truncation height of the extension cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    Finite(f64),
    Infinite,
}

impl Cutoff {
    pub fn finite(self) -> Option<f64> {
        match self {
            Cutoff::Finite(y) => Some(y),
            Cutoff::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Cutoff::Infinite)
    }
}

impl std::fmt::Display for Cutoff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cutoff::Finite(y) => write!(f, "{y}"),
            Cutoff::Infinite => f.write_str("inf"),
        }
    }
}
