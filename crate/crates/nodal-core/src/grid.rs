//! Discretization of the unit torus `[0,1)^d`, `d ∈ {1,2}`.
//!
//! The torus carries the probability measure (total volume 1), so integrals
//! of grid functions are plain means over grid points. Grid point `i`
//! (multi-index) sits at coordinates `i/N` componentwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on the unit torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
}

impl TorusGrid {
    /// A grid with `n` points per axis. `n` must be a power of two, `n >= 16`.
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::BadResolution(n));
        }
        Ok(Self { dim, n })
    }

    /// One-dimensional torus grid.
    pub fn line(n: usize) -> Result<Self> {
        Self::new(1, n)
    }

    /// Two-dimensional torus grid.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(2, n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing `h = 1/N`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Total number of grid points, `N^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of a multi-index. In 2D the layout is row-major over
    /// `(i, j) -> (x1, x2) = (i/N, j/N)`, i.e. `idx = i*N + j`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && (self.dim == 2 || j == 0) && j < self.n.max(1));
        if self.dim == 1 {
            i
        } else {
            i * self.n + j
        }
    }

    /// Multi-index of a flat index; the second component is 0 in 1D.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    /// Coordinates of a flat index; the second component is 0 in 1D.
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let mi = self.multi_index(idx);
        let h = self.spacing();
        [mi[0] as f64 * h, mi[1] as f64 * h]
    }

    /// Euclidean distance between two points of the torus.
    pub fn torus_dist(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let dx = torus_delta(a[0], b[0]);
        if self.dim == 1 {
            dx.abs()
        } else {
            let dy = torus_delta(a[1], b[1]);
            (dx * dx + dy * dy).sqrt()
        }
    }
}

/// Wrap a coordinate into `[0,1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Signed displacement from `b` to `a` wrapped into `[-1/2, 1/2)`.
pub fn torus_delta(a: f64, b: f64) -> f64 {
    let mut d = a - b;
    d -= d.round();
    d
}
