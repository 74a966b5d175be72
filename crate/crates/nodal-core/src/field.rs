//! Real-valued grid functions with quadrature-defined norms.
//!
//! All norms are taken with respect to the probability measure on the torus,
//! so the trapezoidal rule on the periodic uniform grid reduces to a plain
//! mean over grid points: `‖f‖_{L¹} = mean |f|`, `‖f‖²_{L²} = mean f²`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// A real field sampled on a [`TorusGrid`]. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl Field {
    /// Wrap raw values; every value must be finite and the count must match
    /// the grid.
    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: grid.len(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(bad));
        }
        Ok(Self { grid, values })
    }

    /// Sample a function of torus coordinates on the grid.
    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// `amp · cos(2π m·x)`. In 1D only `m[0]` is used.
    pub fn cosine(grid: TorusGrid, m: [i64; 2], amp: f64) -> Self {
        Self::from_fn(grid, |x| {
            amp * (2.0 * PI * (m[0] as f64 * x[0] + m[1] as f64 * x[1])).cos()
        })
    }

    /// `amp · sin(2π m·x)`.
    pub fn sine(grid: TorusGrid, m: [i64; 2], amp: f64) -> Self {
        Self::from_fn(grid, |x| {
            amp * (2.0 * PI * (m[0] as f64 * x[0] + m[1] as f64 * x[1])).sin()
        })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn from_parts_unchecked(grid: TorusGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    /// Mean value over the torus (= integral, since vol = 1).
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn norm_l1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() / self.values.len() as f64
    }

    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    pub fn norm_linf(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, a: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::Invalid(
                "cannot add fields on different grids".into(),
            ));
        }
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.add(&other.scaled(-1.0))
    }

    /// Shift every value by a constant.
    pub fn offset(&self, c: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }
}
