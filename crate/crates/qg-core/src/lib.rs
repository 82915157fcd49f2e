//! Quantization calculi on U(1) and SU(2): representation data, heat-kernel
//! coherent states, global and local pseudo-differential calculi, the
//! Stratonovich-Weyl calculus on spin orbits, and a Bohr-lattice calculus.
//!
//! The crate is `no_std` with `alloc`; file formats and the CLI live in `qg`.
#![no_std]

extern crate alloc;

pub mod error;
pub mod quad;
pub mod repgroup;
pub mod heatcs;
pub mod pw;
pub mod gweyl;
pub mod sworbit;
pub mod bohrcalc;

pub use error::{Error, Result};
