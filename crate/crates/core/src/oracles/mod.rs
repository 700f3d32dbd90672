//! Independent brute-force checks of the closed forms and the phase engine.

pub mod box_oracle;
pub mod kernel_quad;
pub mod two_level;
pub mod wavepacket;

pub use box_oracle::{box_berry_phase, BoxDiscretization, BoxModes, BoxPhase};
pub use kernel_quad::kernel_x_quadrature;
pub use two_level::{two_level_evolve, TwoLevelSystem};
pub use wavepacket::{wavepacket_transmission_phase, WavepacketGrid};
