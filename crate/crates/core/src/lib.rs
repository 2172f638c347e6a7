//! Energy-optimal transmission of one bit over a delay-constrained
//! Gaussian channel with noiseless feedback.
//!
//! The encoder and decoder share the log-likelihood ratio `l_k` of the
//! message as their state. The optimal gap amplitude `v_k(l)` is found by
//! backward dynamic programming on a grid over `l`, with a Lagrange
//! multiplier pricing the expected energy. The multiplier is then bisected
//! until the expected energy meets the budget.
//!
//! Module map:
//!
//! * [`belief`]: Gaussian density, Q-function, posteriors, LLR update,
//!   stage and terminal costs.
//! * [`grid`], [`quadrature`]: state discretisation and Gauss-Hermite rules.
//! * [`dp`]: Bellman backups and the policy/value tables.
//! * [`propagate`]: exact density propagation of `l_k` under each message.
//! * [`calibrate`]: bisection on the multiplier.
//! * [`channel`], [`montecarlo`]: executable encoder/decoder, MIMO
//!   embedding and a seeded Monte Carlo harness.
//! * [`baselines`]: no-feedback, Schalkwijk-Kailath and one-bit feedback
//!   reference schemes.
//! * [`io`], [`config`], [`commands`]: policy files, sweep CSV and the
//!   command implementations behind the `fbdp` binary.

pub mod baselines;
pub mod belief;
pub mod calibrate;
pub mod channel;
pub mod commands;
pub mod config;
pub mod dp;
pub mod error;
pub mod grid;
pub mod io;
pub mod montecarlo;
pub mod propagate;
pub mod quadrature;

pub use calibrate::{calibrate_lambda, CalibratedSolution};
pub use channel::{EncoderSpec, MimoEncoder, Trajectory};
pub use dp::{PolicyTable, Solver, SolverConfig, ValueTable};
pub use error::{Error, Result};
pub use grid::Grid;
pub use montecarlo::McReport;
pub use quadrature::Quadrature;
