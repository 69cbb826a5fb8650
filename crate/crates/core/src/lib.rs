//! Dissipative dynamics of a spin of arbitrary size `J` coupled diagonally
//! (through `J_z`) to an ohmic bath of harmonic oscillators.
//!
//! Units throughout: `ħ = k_B = 1`, energies in units of the tunnel amplitude
//! `T_c`, times in units of `1/T_c`.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin`]: angular-momentum matrices, the coherent Hamiltonian
//!   `ε J_z + 2 T_c J_x` and the rotation onto the Dicke frame.
//! * [`special`] and [`quadrature`]: the exponential integral and
//!   principal-value quadrature the bath rates are built on.
//! * [`bath`]: the ohmic spectral function and the complex rates
//!   `Γ`, `Γ_c`, `Γ_s`.
//! * [`dynamics`]: the Born–Markov master equation, the spin-1/2 Bloch
//!   equations and a fixed-step RK4 integrator.
//! * [`analysis`]: closed-form equilibria, the perturbative beat predictor and
//!   trajectory post-processing.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bath;
pub mod dynamics;
mod error;
pub mod quadrature;
pub mod special;
pub mod spin;

pub use error::{Error, Result};

/// Complex scalar used for all operator entries.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used for operators and density matrices.
pub type CMatrix = nalgebra::DMatrix<C64>;
