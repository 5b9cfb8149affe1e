//! Exact simulation and bitstring-statistics analysis of two-leg Rydberg
//! ladders.
//!
//! Units: lengths in μm, times in μs, frequencies and energies in rad/μs.
//! Basis index bit `k` is the Rydberg occupation of atom `k = 2·rung + leg`.

pub mod bits;
pub mod dynamics;
pub mod dist;
pub mod error;
pub mod fit;
pub mod infoflow;
pub mod lattice;
pub mod noise;
pub mod spectrum;

pub use error::{Error, Result};
