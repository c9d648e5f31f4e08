//! Cubic-regularized Newton's method (CR) with an exact cubic-subproblem
//! solver, an inexact-CR variant, a gradient-descent baseline, and post-hoc
//! diagnostics that verify per-step descent inequalities and classify the
//! asymptotic convergence rate of a run against closed-form predictions.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`objectives`] — test functions with analytic gradients/Hessians and
//!   known sharpness exponents and solution sets.
//! * [`subproblem`] — global minimization of the cubic model
//!   `⟨g,s⟩ + ½ sᵀHs + (M/6)‖s‖³` via the secular equation in the Hessian
//!   eigenbasis, with hard-case handling and an optimality certificate.
//! * [`optimizer`] — the CR / inexact-CR / GD iteration loops; each run
//!   produces a [`optimizer::Trace`] of per-iterate records.
//! * [`diagnostics`] — per-step inequality checks, path-length tail sums,
//!   and certificate-constant fits along a trace.
//! * [`rate_fit`] — classifies a positive decaying sequence as finite /
//!   superlinear / linear / sublinear and compares against predicted rates.
//! * [`cli`] — experiment configs, trace CSV persistence, and the
//!   subcommand entry points used by the `cubicreg` binary.
//!
//! All run loops are single-threaded and deterministic: identical config and
//! seed produce bitwise-identical traces.

pub mod cli;
pub mod diagnostics;
pub mod linalg;
pub mod objectives;
pub mod optimizer;
pub mod rate_fit;
pub mod rng;
pub mod subproblem;
mod vecmath;

pub use linalg::{EigenDecomposition, SymmetricMatrix};
pub use objectives::{KlSpec, Objective, SolutionOracle};
pub use optimizer::{Algorithm, CrConfig, GdConfig, InexactConfig, IterateRecord, Termination, Trace};
pub use rate_fit::{RateEstimate, Regime, TheoreticalRate};
pub use subproblem::{CubicModel, SubproblemSolution};
