//! Iterative solvers for split variational inclusion problems.
//!
//! The problem: given maximal monotone `B1` on `H1`, `B2` on `H2`, inverse
//! strongly monotone `f1`, `f2` and a bounded linear `A: H1 → H2`, find `x`
//! with `0 ∈ B1(x) + f1(x)` such that `y = Ax` satisfies `0 ∈ B2(y) + f2(y)`.
//! A strongly monotone `F` picks out one solution through Tikhonov
//! regularization.
//!
//! Modules:
//! - [`hilbert`]: vectors, linear operators with adjoints, norm estimation.
//! - [`operators`]: resolvents, projections, soft thresholding, ism maps.
//! - [`problem`]: the problem type, its reductions and the built-in examples.
//! - [`solver`]: the regularized, forward-backward and Moudafi schemes.
//! - [`oracle`]: independent scalar and sampling oracles for testing.
//! - [`experiments`]: starting points, the benchmark and CSV output.
//! - [`config`]: TOML problem files.
//!
//! ```
//! use svi_core::experiments::{Case, Experiment};
//! use svi_core::solver::{run, Variant};
//!
//! let exp = Experiment::Two;
//! let problem = exp.problem(3).unwrap();
//! let cfg = exp.solver_config(Variant::ForwardBackward);
//! let res = run(&problem, &exp.schedule(), &cfg, &Case::IIa.initial_point(3)).unwrap();
//! assert!(res.converged);
//! ```

pub mod config;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod operators;
pub mod oracle;
pub mod problem;
pub mod solver;

pub use error::{Error, Result};
pub use hilbert::{inner, LinearOperator, Vector};
pub use problem::SviProblem;
pub use solver::{run, Schedule, SolveResult, SolverConfig, Variant};
