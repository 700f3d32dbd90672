//! Geometric phases for Hamiltonians with a continuous, nondegenerate
//! spectrum under slow parameter transport.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::needless_range_loop)]

pub mod engine;
pub mod error;
pub mod exec;
pub mod models;
pub mod oracles;
pub mod path;
pub mod quadrature;
pub mod scattering;
pub mod spectral;
pub mod verification;

pub use engine::{
    adiabatic_coefficient, dynamical_phase, eigendifferential_norm, evolved_state, geometric_phase, ContinuumModel,
    KernelShape,
};
pub use error::{PhaseError, Result};
pub use spectral::{PhaseResult, PhysicalConstants, QuadratureScheme, SpectralBand, TimeWindow};
