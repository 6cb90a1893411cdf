//! Spectral solvers and numerical obstruction tests for cohomological
//! equations over Diophantine torus rotations, linear flows, parabolic affine
//! maps of `T²` and `SL(2,R)` cocycles over circle rotations.
//!
//! ```
//! use torus_cohomology::cohomology::solve_map;
//! use torus_cohomology::diophantine::FrequencyVector;
//! use torus_cohomology::fourier::FourierSeries;
//!
//! let alpha = FrequencyVector::new(vec![0.6180339887498949, 0.41421356237309515])?;
//! let xi = FourierSeries::cosine(&[1, 2], 1.0);
//! let solution = solve_map(&xi, &alpha, 1e-10)?;
//! assert!(solution.is_complete());
//! # Ok::<(), torus_cohomology::Error>(())
//! ```

pub mod cli;
pub mod cocycle;
pub mod cohomology;
pub mod config;
pub mod diophantine;
pub mod error;
pub mod fourier;
pub mod lattice;
pub mod lincocycle;
pub mod parabolic;
pub mod pipeline;
pub mod skewproduct;
pub mod stats;

pub use error::{Error, Result};
