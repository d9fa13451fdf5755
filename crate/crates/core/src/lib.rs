//! Noise-generator characterization through fidelity decay under random
//! single-qubit rotations.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense density-matrix algebra, Pauli products, Haar-random
//!   SU(2) rotations and Hermitian exponentials.
//! - [`noise`]: the noise generator `G = Σ χ_l O_l`, coefficient
//!   distributions and the coherent / incoherent correlation classes.
//! - [`sim`]: Monte Carlo estimation of the averaged fidelity `⟨f(t)⟩` and
//!   of initial decay rates.
//! - [`analytics`]: closed-form decay laws, the general initial-decay-rate
//!   formula and curve fitting.
//! - [`protocol`]: the subset-measurement protocol that recovers collective
//!   one-, two- and three-body strengths, plus sample budgeting.
//! - [`cli`]: configuration files, CSV output and the `fdecay` front-end.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod protocol;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
