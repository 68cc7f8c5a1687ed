//! Linear Markovian Hawkes processes with large initial intensity.
//!
//! The crate simulates exact sample paths of the excitation state `Z` and the
//! counting process `N` for the exponential kernel `h(t) = α e^{-βt}`, evaluates
//! closed-form moments and the affine transform `E[e^{-θ Z_t}] = e^{A(t,-θ) z}`,
//! and exposes the limit laws (fluid limits, Gaussian fluctuations, rescaled
//! regimes, CIR diffusion) together with a Monte Carlo harness that checks
//! simulated ensembles against them.
//!
//! Module map:
//!
//! * [`model`]: parameters, regimes, time grids, the `ψ` curve.
//! * [`simulator`]: direct (compensator inversion) and cluster simulators.
//! * [`moments`]: conditional moments of `Z_t`.
//! * [`affine_mgf`]: the Riccati-type ODE for `A`, `θ_c(t)`, transform values.
//! * [`limits`]: covariance functions, passage-time approximation, rescaled laws.
//! * [`cir`]: exact and Euler samplers for the square-root diffusion.
//! * [`validation`]: experiment specs, Monte Carlo checks, reports.

pub mod affine_mgf;
pub mod cir;
pub mod error;
pub mod limits;
pub mod model;
pub mod moments;
pub mod ode;
pub mod quadrature;
pub mod rng;
pub mod simulator;
pub mod stats;
pub mod validation;

pub use affine_mgf::{OdeSolutionA, ThetaCritical};
pub use cir::{CirParams, CirPath};
pub use error::{HawkesError, Result};
pub use limits::{GaussianLawG, GaussianLawH, RescaledLimitLaw};
pub use model::{HawkesParams, Regime, TimeGrid};
pub use moments::MomentSet;
pub use simulator::{PathFunctionals, SimPath};
pub use validation::{ExperimentSpec, McReport};
