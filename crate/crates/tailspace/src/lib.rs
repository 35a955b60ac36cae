//! Random metric spaces from heavy-tailed maxima and random walks in
//! growing dimension, together with their Poisson-cluster limits.
//!
//! The library builds three kinds of objects and the machinery to compare
//! them:
//!
//! * finite counting measures on the line with the matched-atom `dm_p`
//!   metrics ([`counting_measure`]);
//! * prelimit chains `{0, M_1, …, M_n}` (cumulative maxima) and
//!   `{0, S_1, …, S_n}` (cumulative sums) of heavy-tailed vectors whose
//!   dimension grows with `n` ([`generators`], [`chain_space`]);
//! * the limiting metric on `[0, T]` induced by a Poisson cluster process of
//!   counting measures ([`limit_process`]).
//!
//! Gromov–Hausdorff estimation for finite metric spaces lives in [`gh`];
//! Monte Carlo verifiers for the moment/overlap conditions, tail functions
//! and Laplace functionals live in [`diagnostics`]; [`simulation`] holds the
//! streaming samplers used by the convergence experiments.

pub mod chain_space;
pub mod counting_measure;
pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod gh;
pub mod heavy_tail;
pub mod limit_process;
pub mod numeric;
pub mod pnorm;
pub mod simulation;
pub mod stats;
pub mod streams;

pub use counting_measure::CountingMeasure;
pub use error::{Error, Result};
pub use pnorm::Lp;
