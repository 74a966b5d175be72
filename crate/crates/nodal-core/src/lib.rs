//! Spectral calculus and nodal-set geometry on flat tori.
//!
//! The crate works on the unit torus `[0,1)^d` (`d` = 1 or 2) discretized by
//! a uniform power-of-two grid, and provides the pieces needed to measure
//! how much an oscillatory function must vanish:
//!
//! - [`spectral`]: Fourier decomposition in the Laplacian eigenbasis, heat
//!   semigroup, spectral projectors, the heat kernel, and the frequency
//!   scale of a field (the eigenvalue threshold below which it carries
//!   almost no mass).
//! - [`nodal`]: zero-set extraction (sign changes in 1D, marching squares
//!   in 2D) with the (n−1)-dimensional measure.
//! - [`distance`]: exact distance-to-nodal-set transforms, ε-tube volumes
//!   and volume-expansion profiles.
//! - [`bounds`]: the lower-bound formulas relating nodal measure to the
//!   frequency scale and norm ratio, with measured-vs-bound reports.
//! - [`diagnostics`]: cube partitions with decay labels, heat-mass
//!   retention constants, Gaussian kernel bounds and off-diagonal
//!   (Davies–Gaffney) estimates.
//!
//! ```
//! use nodal_core::{Field, TorusGrid};
//!
//! let grid = TorusGrid::line(64).unwrap();
//! let f = Field::cosine(grid, [3, 0], 1.0);
//! let back = f.decompose().reconstruct().unwrap();
//! let err = f
//!     .values()
//!     .iter()
//!     .zip(back.values())
//!     .map(|(a, b)| (a - b).abs())
//!     .fold(0.0f64, f64::max);
//! assert!(err < 1e-12);
//! ```

pub mod bounds;
pub mod diagnostics;
pub mod distance;
mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod nodal;
pub mod spectral;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::TorusGrid;
pub use nodal::NodalSet;
pub use spectral::{FrequencyScaleOptions, FrequencyScaleResult, Spectrum};
