//! Nonlinear photon transport through one-dimensional waveguide-QED lattices.
//!
//! Two media are supported: a chain of directly hopping qubits, and a chain of
//! hopping resonators with one qubit side-coupled to each resonator. Both ends
//! are coupled to zero-temperature photon baths and the left bath carries a
//! coherent drive. Steady-state transmission is computed by
//!
//! * truncated Heisenberg-Langevin equations ([`thle`]), built symbolically by
//!   the normal-ordered boson algebra in [`algebra`];
//! * quasi-classical equations, optionally with a complex effective on-site
//!   interaction ([`semiclassical`]);
//! * a self-consistent mean-field loop ([`semiclassical::mean_field`]).
//!
//! All frequencies and rates are pure numbers in units of the reference qubit
//! frequency, and the group velocity is fixed to one.

pub mod algebra;
pub mod config;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod ode;
pub mod semiclassical;
pub mod sweep;
pub mod thle;
pub mod validate;

pub use error::{Error, Result};
pub use lattice::{build_model, drive_from_intensity, Detunings, DriveSpec, LatticeModel, Medium};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
