//! Steady-state simulator for a cavity-magnomechanical system with an
//! intracavity degenerate parametric amplifier.
//!
//! The linearized quadrature fluctuations of the cavity, magnon and phonon
//! modes form a three-mode Gaussian state. Its 6×6 covariance matrix is the
//! solution of a Lyapunov equation built from the drift and diffusion
//! matrices; bipartite entanglement is quantified by the logarithmic
//! negativity and genuine tripartite entanglement by the minimal residual
//! contangle.
//!
//! Module map:
//!
//! - [`model`]: constants, parameter records, thermal occupations, JSON config
//! - [`steadystate`]: drive strength, mean magnon amplitude, effective coupling
//! - [`dynamics`]: drift/diffusion matrices and stability analysis
//! - [`lyapunov`]: steady-state covariance matrix
//! - [`gaussian`]: symplectic spectra, log-negativity, contangles
//! - [`sweep`]: point evaluation, grids, temperature and tripartite scans
//! - [`cli`]: command-line front end used by the `magnomech` binary

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
mod error;
pub mod gaussian;
pub mod lyapunov;
pub mod model;
pub mod steadystate;
pub mod sweep;

pub use error::{Error, Result, Violation};
pub use model::{PhysicalConstants, SphereSpec, SystemParams, ThermalOccupations};
pub use sweep::{evaluate_point, PointReport};
