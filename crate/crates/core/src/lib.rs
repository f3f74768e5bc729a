//! Legendre–Petrov–Galerkin solver for a time-dependent third-order problem on
//! `[-1, 1]` with `u(-1) = u(1) = u'(1) = 0`, Crank–Nicolson in time.

// NaN must fail range checks, hence `!(x > 0.0)` style guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod legendre;
pub mod profile;
pub mod quadrature;
pub mod solver;
pub mod stability;

pub use assembly::{build_step_matrices, verify_closed_forms, MatrixKind, OperatorSet, StepMatrices};
pub use error::{LpgError, Result};
pub use experiments::{ManufacturedProblem, ProfileCase};
pub use legendre::BasisSpec;
pub use profile::{Coefficient, CoefficientProfile, Coefficients};
pub use solver::{LpgSolver, ModalState, SolverConfig, Source, Trajectory};
