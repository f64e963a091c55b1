//! Numerical toolkit for weighted eigenvalue-sum operators
//! `M_a(X) = sum_i a_i lambda_i(X)` on symmetric matrices: exact matrix-level
//! evaluation, closed-form radial solutions, a wide-stencil Dirichlet solver
//! on 2D/3D grids, and a harness that checks maximum-principle type
//! estimates on solver output.

pub mod config;
pub mod domain;
pub mod error;
pub mod expr;
pub mod grid;
pub mod matrix;
pub mod operator;
pub mod radial;
pub mod sampling;
pub mod scheme;
pub mod stencil;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use matrix::SymMatrix;
pub use operator::{bellman_estimate, isaacs_estimate, OperatorSpec, Sign};
pub use radial::{exact_radial_solution, radial_operator_value, Branch, RadialSolution};
pub use weights::{ClassTag, Weights};
