//! Solvers and diagnostics for principal-agent contracting with graphon
//! interactions.
//!
//! A principal contracts a large population of agents whose projects are
//! coupled through an interaction function `G : [0,1]^2 -> R` (a graphon):
//! `G(u, v)` is the weight with which the type-`v` agent's output feeds the
//! drift of the type-`u` agent's project. The optimal contract problem
//! reduces, in both the `N`-agent and continuum formulations, to a backward
//! linear system for an effort field `Q`:
//!
//! ```text
//! continuum:  dQ/dt (t,u) = -∫ G(v,u) Q(t,v) dv,      Q(T,u) = 1
//! N agents:   dQ^i/dt (t) = -(1/N) Σ_j G(j/N,i/N) Q^j, Q^i(T) = 1
//! ```
//!
//! `Q` equals the equilibrium effort and the incentive slope of the optimal
//! contract; the contract's conditional law is Gaussian with mean
//! `R_a(u) + ½∫Q²dt` and variance `∫Q²dt`.
//!
//! The crate provides:
//! - [`graphon`]: interaction functions (builtin families, step kernels,
//!   discretization, sampled sup-norm distance);
//! - [`population`]: type-indexed initial laws and reservation utilities;
//! - [`continuum`]: the infinite-dimensional backward solve and all derived
//!   quantities (principal value, marginal values, contract laws);
//! - [`finite`]: the `N`-agent solve, mean output dynamics, and the
//!   near-optimality gap of the projected mean-field contract;
//! - [`montecarlo`]: seeded, thread-count-invariant particle simulation of
//!   the equilibrium dynamics and contract sampling;
//! - [`analysis`]: convergence-rate, stability, and monotonicity checks.

pub mod analysis;
pub mod continuum;
pub mod error;
pub mod finite;
pub mod graphon;
pub mod grid;
pub mod montecarlo;
pub mod numeric;
pub mod population;
pub mod typefn;

pub use continuum::{ContractLaw, EffortField};
pub use error::{Error, Result};
pub use finite::{FiniteEffort, FiniteSolution};
pub use graphon::{DiscreteInteraction, Family, InteractionFunction};
pub use grid::TypeGrid;
pub use montecarlo::{ContractSampleStats, SimConfig};
pub use population::{InitialLaw, ReservationUtility};
pub use typefn::TypeFn;
