//! Exact linear-optical dynamics of one-dimensional anyons.
//!
//! Bosonic and fermionic anyons on an `m`-site lattice obey commutation
//! relations deformed by an exchange phase `phi` between distinct sites. This
//! crate builds their occupation-number bases, applies creation and
//! annihilation operators with the correct statistical phases, and evolves
//! states through networks of phase shifters and beam splitters.
//!
//! Modules, bottom-up:
//!
//! - [`fock`]: particle classes, occupation vectors, fixed-number sectors and
//!   sparse state vectors.
//! - [`operators`]: dense sector matrices for quadratic operators, the SU(2)
//!   generators of a mode pair, Jordan-Wigner images, the commutator defect of
//!   the quadratic algebra and the Kerr Hamiltonian.
//! - [`network`]: optical elements, exact spectral evolution, the algebraic
//!   propagation engine and the three-mode braiding network.
//! - [`dualrail`]: dual-rail qubits, single-qubit and controlled-phase gate
//!   compilation, logical circuit simulation.
//! - [`coherent`]: truncated coherent-state toolkit for bosonic anyons.
//!
//! Mode indices are 1-based everywhere in the public API.

pub mod angle;
pub mod coherent;
pub mod dualrail;
mod error;
pub mod fock;
pub mod linalg;
pub mod network;
pub mod operators;

pub use angle::Angle;
pub use error::{Error, Result};
pub use fock::{AnyonSpec, FockSector, Occupation, ParticleClass, StateVector};
pub use network::{Element, Network};
pub use num_complex::Complex64;
pub use operators::OperatorMatrix;

/// Tolerance for exact algebraic identities (commutators, Hermiticity, unitarity).
pub const ATOL_ALGEBRA: f64 = 1e-12;

/// Tolerance for physical amplitudes after evolution.
pub const ATOL_PHYSICS: f64 = 1e-10;
