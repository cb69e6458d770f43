//! Geometric phases, quench dynamics and renormalization-group flow of the
//! anisotropic XY chain in a transverse field,
//!
//! ```text
//! H = sum_i (1+alpha)/2 sx_i sx_{i+1} + (1-alpha)/2 sy_i sy_{i+1} + B(t) sz_i
//! ```
//!
//! driven by the linear ramp `B(t) = -t / tau_q`.
//!
//! - [`model`]: momentum grid, quasiparticle gap and Bogoliubov angle.
//! - [`geophase`]: per-mode and total Berry phases and their field derivative.
//! - [`quench`]: Landau-Zener statistics, kink counts, two-level integrator.
//! - [`rg`]: sine-Gordon flow, mass gap, phase classification.
//! - [`ed`]: dense exact diagonalization and Wilson-loop phases, used as an
//!   independent check of the closed forms.

pub mod ed;
pub mod error;
pub mod geophase;
pub mod model;
pub mod quench;
pub mod rg;

pub use error::{Error, Result};
pub use model::{bogoliubov_angle, dispersion, momentum_grid, ChainSpec, Mode};
