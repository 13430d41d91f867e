//! State-vector simulator for two three-level atoms coupled to a single lossy
//! cavity mode, built around the quantum-jump (conditional-evolution) picture.
//!
//! The crate models the dynamics conditioned on observing no photon: states
//! evolve under a non-Hermitian conditional Hamiltonian whose anti-Hermitian
//! part carries all decay channels, so the squared norm of the evolved state
//! is the no-emission probability. On top of that it provides
//!
//! * the decoherence-free subspace (DFS) of the two-atom/cavity system and
//!   the Zeno-projected effective Hamiltonian acting inside it,
//! * laser driving and the single-pulse CNOT protocol that operates entirely
//!   within the DFS,
//! * waiting-time statistics, jump trajectories, and decay-rate spectroscopy
//!   of the non-DFS complement,
//! * a three-level V-configuration reference model exhibiting macroscopic
//!   dark periods.
//!
//! Units: `ħ = 1` and rates are quoted in units of the atom–cavity coupling
//! `g` (times in `1/g`). Decay terms follow the amplitude-rate convention:
//! `−iκ b†b` makes a bare photon's population decay at `2κ`, and
//! `−iΓ_cav |2⟩⟨2|` makes an excited atom's population decay at `2Γ_cav`.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only toggles `std::error::Error` integration.

#![cfg_attr(not(feature = "std"), no_std)]
// Index loops mirror the matrix formulas they implement.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod dynamics;
mod error;
pub mod gates;
pub mod hilbert;
pub mod linalg;
pub mod model;
pub mod stats;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
