//! Numerical laboratory for the quasineutral Euler limit of a collisional
//! ion plasma: exact and smoothed rarefaction waves, a 1D
//! Navier-Stokes-Poisson solver with a screened nonlinear Poisson equation,
//! velocity-space utilities for the Landau collision frequency, and a sweep
//! harness that measures empirical convergence rates toward the wave.

pub mod closures;
pub mod diagnostics;
pub mod error;
pub mod euler;
pub mod fluid;
pub mod harness;
pub mod kinetic;
pub mod numerics;
pub mod smoothwave;

pub use closures::{ClosureKind, ElectronClosure};
pub use error::{Error, Result};
pub use euler::{EulerState, RarefactionWave, WavePoint};
pub use fluid::{FluidField, SolverConfig, TransportLaw};
pub use smoothwave::{delta_from_epsilon, SmoothWave};
