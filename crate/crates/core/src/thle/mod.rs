//! Truncated Heisenberg-Langevin equations: assembly, resonator elimination,
//! steady-state solve, time evolution and transmission.

pub mod elimination;
pub mod evolve;
pub mod solve;
pub mod system;
pub mod transmission;

pub use elimination::{eliminate_resonators, ResonatorElimination};
pub use evolve::{relaxation_time, spectral_abscissa, time_evolve};
pub use solve::{steady_state, SteadyState};
pub use system::{assemble_linear_system, assemble_with_cap, LinearSystem, DEFAULT_MAX_DIM};
pub use transmission::{thle_transmission, transmission_direct, transmission_side, REFERENCE_INTENSITY};
