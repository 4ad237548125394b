//! Numerical toolkit for the diffusion-based 2x2 molecular MIMO channel.
//!
//! The crate covers the full modeling chain:
//!
//! - [`sim`] — particle-based Monte Carlo simulation of 3D Brownian diffusion
//!   with two point transmitters, two absorbing spherical receivers, and an
//!   optional reflecting cuboid body; produces cumulative hitting-fraction
//!   curves.
//! - [`channel`] — closed-form channel functions: the single-link absorbing
//!   sphere solution and the six-coefficient parametric MIMO models, plus
//!   conversion into per-symbol-slot channel taps.
//! - [`fit`] — nonlinear least-squares estimation of the model coefficients
//!   from simulated curves, and batch dataset construction over parameter
//!   grids.
//! - [`surrogate`] — small MLP regressors mapping system geometry
//!   `(d, h, R, D)` to model coefficients, trained by Levenberg-Marquardt
//!   with a squared-weight penalty.
//! - [`link`] — BCSK link evaluation: Gaussian count statistics, analytic
//!   bit error rate by pattern enumeration, tap-level Monte Carlo, and full
//!   particle-level ground truth.
//!
//! All lengths are in micrometers, times in seconds, and diffusion
//! coefficients in um^2/s. Every stochastic entry point is deterministic
//! given its seed, independent of thread count or scheduling.

pub mod channel;
pub mod error;
pub mod fit;
pub mod link;
pub mod math;
pub mod rng;
pub mod sim;
pub mod surrogate;

pub use error::{CoreError, Result};
