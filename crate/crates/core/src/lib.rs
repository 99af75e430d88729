//! Catalytic dynamics of the resonant Jaynes-Cummings model on a truncated
//! Fock space.
//!
//! A two-level atom coupled to a single cavity mode can act as a *catalyst*:
//! for a suitable initial atom state and interaction time the joint unitary
//! (or dissipative) evolution returns the atom exactly to its initial state
//! while the cavity mode is driven into a non-classical state. This crate
//!
//! - represents cavity, atom and joint states on a truncated Fock space
//!   ([`hilbert`]),
//! - evolves them with the closed-form Jaynes-Cummings propagator
//!   ([`jc_core`]) or a Lindblad master equation ([`lindblad`]),
//! - solves the catalytic constraint analytically and as a channel fixed
//!   point ([`catalyst`]),
//! - quantifies non-classicality via the second-order correlation function,
//!   Wigner logarithmic negativity and quadrature squeezing ([`witness`]),
//! - and packages the composite experiments (time scans, amplitude scans,
//!   catalytic-set sampling, multi-cavity runs) in [`protocols`].
//!
//! All numerics are generic over the underlying real scalar (see
//! [`scalar::Real`]); the `*64` aliases at the crate root fix `f64`, which is
//! the precision the accuracy targets of the test suite assume.

pub mod scalar;
pub mod error;
pub mod linalg;
pub mod hilbert;
pub mod jc_core;
pub mod catalyst;
pub mod witness;
pub mod lindblad;
pub mod protocols;

pub use error::{Error, Result};
pub use scalar::Real;

/// Cavity density matrix over `f64`.
pub type CavityState64 = hilbert::CavityState<f64>;
/// Atom (qubit) state over `f64`.
pub type AtomState64 = hilbert::AtomState<f64>;
/// Joint cavity-atom density matrix over `f64`.
pub type JointState64 = hilbert::JointState<f64>;
pub type SimulationParams64 = jc_core::SimulationParams<f64>;
pub type Propagator64 = jc_core::Propagator<f64>;
pub type DissipationParams64 = lindblad::DissipationParams<f64>;
pub type Liouvillian64 = lindblad::Liouvillian<f64>;
pub type EffectiveChannel64 = catalyst::EffectiveChannel<f64>;
