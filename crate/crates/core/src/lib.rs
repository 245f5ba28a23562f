//! Exponential wave integrator Fourier pseudospectral (EWI-FP) solver for the
//! nonlinear space-fractional Klein-Gordon equation
//!
//! ```text
//! psi_tt + (-Delta)^{alpha/2} psi + beta psi + eps^{2p} |psi|^{2p} psi = 0
//! ```
//!
//! on periodic 1D and 2D domains, together with the convergence and energy
//! studies used to validate it.

pub mod error;
pub mod grid;
pub mod harness;
pub mod observables;
pub mod ops;
pub mod solver;
pub mod state;

pub use error::{Error, Result};
pub use grid::{forward_transform, inverse_transform, sobolev_norm, Axis, SpectralField, SpectralGrid};
pub use observables::{convergence_order, energy, h_alpha_half_error, running_max, EnergyRecord, ErrorRecord};
pub use ops::{make_symbol, ModelParams, Regime, Symbol};
pub use solver::{solve, solve_oscillatory, Integrator, SolveConfig, Trajectory};
pub use state::{from_nls, to_nls, KgeState, NlsState};
