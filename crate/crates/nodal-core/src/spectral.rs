//! Exact discrete spectral calculus on the torus.
//!
//! The Laplacian eigenbasis on `[0,1)^d` is `1, √2·cos(2π m·x), √2·sin(2π m·x)`
//! with eigenvalues `λ(m) = 4π²|m|²`; the discrete Fourier transform realizes
//! the inner products exactly for band-limited fields. Wave indices live in
//! `[-N/2, N/2)` per axis.
//!
//! Coefficients are stored in the complex-exponential convention
//! `f(x) = Σ_m c_m e^{2πi m·x}`; for a real field the squared mass of a
//! spectral level `|m|² = s` equals the sum of squared orthonormal-basis
//! coefficients at that level, `Σ_{|m|²=s} |c_m|²`, so Parseval reads
//! `Σ_m |c_m|² = ‖f‖²_{L²}`.

use std::f64::consts::PI;

pub use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::field::Field;
use crate::grid::TorusGrid;

/// Eigenvalue of the wave vector with squared length `msq`.
pub fn eigenvalue_of(msq: u64) -> f64 {
    4.0 * PI * PI * msq as f64
}

/// Largest eigenvalue representable on the grid: `4π² · dim · (N/2)²`.
pub fn max_eigenvalue(grid: TorusGrid) -> f64 {
    let half = (grid.n() / 2) as u64;
    eigenvalue_of(grid.dim() as u64 * half * half)
}

/// Whether the band-limited heat kernel at time `t` has converged on this
/// grid: `4π² (N/2)² t ≥ 9`, i.e. the spectral tail is below `e^{-9}`.
pub fn band_resolved(grid: TorusGrid, t: f64) -> bool {
    let half = (grid.n() / 2) as f64;
    4.0 * PI * PI * half * half * t >= 9.0
}

/// Smallest power-of-two resolution for which [`band_resolved`] holds at `t`.
pub fn required_resolution(t: f64) -> usize {
    let half = (9.0 / (4.0 * PI * PI * t)).sqrt();
    let n = (2.0 * half).ceil() as usize;
    n.next_power_of_two().max(16)
}

/// Fourier coefficients of a real field, indexed by integer wave vectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

/// One distinct eigenvalue level of a spectrum.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralLevel {
    /// Squared wave-vector length `|m|²` (exact integer).
    pub msq: u64,
    /// Eigenvalue `4π²|m|²`.
    pub eigenvalue: f64,
    /// Squared coefficient mass `Σ_{|m|²} |c_m|²` over the full level.
    pub mass: f64,
}

impl Spectrum {
    pub fn zero(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn axis_index(&self, m: i64) -> usize {
        let n = self.grid.n() as i64;
        debug_assert!(m >= -n / 2 && m < n / 2, "wave index out of range");
        m.rem_euclid(n) as usize
    }

    fn flat_index(&self, m: [i64; 2]) -> usize {
        if self.grid.dim() == 1 {
            self.axis_index(m[0])
        } else {
            self.axis_index(m[0]) * self.grid.n() + self.axis_index(m[1])
        }
    }

    /// Wave vector of a flat storage index; second component 0 in 1D.
    pub fn wave_index(&self, idx: usize) -> [i64; 2] {
        let n = self.grid.n() as i64;
        let unfold = |i: i64| if i < n / 2 { i } else { i - n };
        let mi = self.grid.multi_index(idx);
        if self.grid.dim() == 1 {
            [unfold(mi[0] as i64), 0]
        } else {
            [unfold(mi[0] as i64), unfold(mi[1] as i64)]
        }
    }

    pub fn coefficient(&self, m: [i64; 2]) -> Complex64 {
        self.coeffs[self.flat_index(m)]
    }

    /// Set the raw coefficient at `m` (no symmetry bookkeeping).
    pub fn set_coefficient(&mut self, m: [i64; 2], c: Complex64) {
        let idx = self.flat_index(m);
        self.coeffs[idx] = c;
    }

    /// Set `c` at `m` and the conjugate at `-m`, keeping the spectrum that of
    /// a real field. Wave vectors with a `-N/2` component are self-conjugate
    /// under aliasing; for those the imaginary part must be zero.
    pub fn set_mode(&mut self, m: [i64; 2], c: Complex64) -> Result<()> {
        let n = self.grid.n() as i64;
        let self_conj = (0..self.grid.dim()).all(|a| m[a] == 0 || m[a] == -n / 2);
        if self_conj {
            if c.im != 0.0 {
                return Err(Error::Invalid(
                    "self-conjugate mode must have a real coefficient".into(),
                ));
            }
            self.set_coefficient(m, c);
            return Ok(());
        }
        let neg = [
            if m[0] == -n / 2 { m[0] } else { -m[0] },
            if m[1] == -n / 2 { m[1] } else { -m[1] },
        ];
        self.set_coefficient(m, c);
        self.set_coefficient(neg, c.conj());
        Ok(())
    }

    /// Squared wave-vector length of a flat index.
    pub fn msq(&self, idx: usize) -> u64 {
        let m = self.wave_index(idx);
        (m[0] * m[0] + m[1] * m[1]) as u64
    }

    /// Total squared coefficient mass, `Σ_m |c_m|²` (= `‖f‖²_{L²}` by Parseval).
    pub fn total_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Distinct eigenvalue levels in increasing order with their squared
    /// coefficient mass. Eigenvalue multiplicity is merged into one level.
    pub fn levels(&self) -> Vec<SpectralLevel> {
        let mut acc: std::collections::BTreeMap<u64, f64> = std::collections::BTreeMap::new();
        for (idx, c) in self.coeffs.iter().enumerate() {
            let e = c.norm_sqr();
            if e > 0.0 {
                *acc.entry(self.msq(idx)).or_insert(0.0) += e;
            }
        }
        acc.into_iter()
            .map(|(msq, mass)| SpectralLevel {
                msq,
                eigenvalue: eigenvalue_of(msq),
                mass,
            })
            .collect()
    }

    /// Multiply each coefficient by `exp(-4π²|m|² t)`.
    pub fn heat_evolved(&self, t: f64) -> Result<Spectrum> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let mut out = self.clone();
        for idx in 0..out.coeffs.len() {
            let lam = eigenvalue_of(out.msq(idx));
            out.coeffs[idx] *= (-lam * t).exp();
        }
        Ok(out)
    }

    /// Keep only coefficients with eigenvalue in `[lambda_min, lambda_max]`
    /// (inclusive).
    pub fn band(&self, lambda_min: f64, lambda_max: f64) -> Spectrum {
        let mut out = self.clone();
        for idx in 0..out.coeffs.len() {
            let lam = eigenvalue_of(out.msq(idx));
            if lam < lambda_min || lam > lambda_max {
                out.coeffs[idx] = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    fn symmetry_violation(&self) -> f64 {
        let n = self.grid.n() as i64;
        let mut worst = 0.0f64;
        for idx in 0..self.coeffs.len() {
            let m = self.wave_index(idx);
            let self_conj = (0..self.grid.dim()).all(|a| m[a] == 0 || m[a] == -n / 2);
            if self_conj {
                worst = worst.max(self.coeffs[idx].im.abs());
                continue;
            }
            let neg = [
                if m[0] == -n / 2 { m[0] } else { -m[0] },
                if m[1] == -n / 2 { m[1] } else { -m[1] },
            ];
            let diff = self.coefficient(neg) - self.coeffs[idx].conj();
            worst = worst.max(diff.norm());
        }
        worst
    }

    /// Inverse transform back to a field. Fails if the coefficients are not
    /// Hermitian-symmetric (relative tolerance 1e-9 against the largest
    /// coefficient magnitude).
    pub fn reconstruct(&self) -> Result<Field> {
        let scale = self
            .coeffs
            .iter()
            .fold(0.0f64, |m, c| m.max(c.norm()))
            .max(1e-300);
        let violation = self.symmetry_violation();
        let tolerance = 1e-9 * scale;
        if violation > tolerance {
            return Err(Error::MalformedSpectrum {
                violation,
                tolerance,
            });
        }
        Ok(self.synthesize())
    }

    /// Inverse transform without the symmetry check (trusted internal path).
    pub(crate) fn synthesize(&self) -> Field {
        let buf = fft::inverse(&self.coeffs, self.grid.dim(), self.grid.n());
        Field::from_parts_unchecked(self.grid, buf.into_iter().map(|c| c.re).collect())
    }

    /// Values of the band-limited interpolant at the centers of all grid
    /// cells (2D), via a half-spacing phase shift and inverse transform.
    /// Nyquist modes contribute through their cosine part.
    pub fn values_at_cell_centers(&self) -> Result<Vec<f64>> {
        if self.grid.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.grid.dim(),
            });
        }
        let h = self.grid.spacing();
        let mut shifted = self.clone();
        for idx in 0..shifted.coeffs.len() {
            let m = shifted.wave_index(idx);
            let phase = PI * h * (m[0] + m[1]) as f64;
            shifted.coeffs[idx] *= Complex64::from_polar(1.0, phase);
        }
        let buf = fft::inverse(&shifted.coeffs, self.grid.dim(), self.grid.n());
        Ok(buf.into_iter().map(|c| c.re).collect())
    }
}

/// Options for [`Field::frequency_scale`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrequencyScaleOptions {
    /// Almost-orthogonality constant `c ∈ (0,1)`.
    pub c: f64,
    /// Norm on the right-hand side of the low-energy condition. The L¹ form
    /// is the default; the L² variant is exposed for experimentation only.
    pub rhs_norm: RhsNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhsNorm {
    L1,
    L2,
}

impl Default for FrequencyScaleOptions {
    fn default() -> Self {
        Self {
            c: 1e-2,
            rhs_norm: RhsNorm::L1,
        }
    }
}

impl FrequencyScaleOptions {
    pub fn with_c(c: f64) -> Self {
        Self {
            c,
            ..Self::default()
        }
    }
}

/// Result of the frequency-scale computation: the largest eigenvalue
/// threshold below which the field carries almost no spectral mass.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrequencyScaleResult {
    /// The frequency scale (supremum of the admissible set; equals the first
    /// failing eigenvalue when one exists on the grid).
    pub lambda: f64,
    pub first_failing_eigenvalue: Option<f64>,
    /// Cumulative low-frequency energy `(Σ|⟨f,φ⟩|²)^{1/2}` at the failure
    /// level (or over the whole grid spectrum if the condition never fails).
    pub low_energy_at_failure: f64,
    pub c_used: f64,
}

impl Field {
    /// Fourier decomposition. Total on valid fields;
    /// `decompose().reconstruct()` is the identity up to roundoff.
    pub fn decompose(&self) -> Spectrum {
        Spectrum {
            grid: self.grid(),
            coeffs: fft::forward(self.values(), self.grid().dim(), self.grid().n()),
        }
    }

    /// Heat evolution `e^{tΔ}f`: damps the coefficient at `m` by
    /// `exp(-4π²|m|² t)`. Mass and mean are conserved.
    pub fn heat_evolve(&self, t: f64) -> Result<Field> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.decompose().heat_evolved(t)?.synthesize())
    }

    /// Spectral projector onto eigenvalues in `[lambda_min, lambda_max]`.
    pub fn project_band(&self, lambda_min: f64, lambda_max: f64) -> Field {
        self.decompose().band(lambda_min, lambda_max).synthesize()
    }

    /// The largest eigenvalue `λ` such that the spectral mass at eigenvalues
    /// `≤ λ` stays below `c` times the right-hand-side norm. Distinct
    /// eigenvalues are enumerated in increasing order with cumulative squared
    /// mass; the first level at which the condition fails is returned as the
    /// supremum of the admissible set. Scale-invariant in the field.
    pub fn frequency_scale(&self, opts: FrequencyScaleOptions) -> Result<FrequencyScaleResult> {
        if opts.c.is_nan() || opts.c <= 0.0 || opts.c >= 1.0 {
            return Err(Error::BadConstant(opts.c));
        }
        if self.is_zero() {
            return Err(Error::ZeroField);
        }
        let rhs = match opts.rhs_norm {
            RhsNorm::L1 => self.norm_l1(),
            RhsNorm::L2 => self.norm_l2(),
        };
        let threshold = opts.c * rhs;
        let spectrum = self.decompose();
        let mut cum = 0.0f64;
        for level in spectrum.levels() {
            cum += level.mass;
            if cum.sqrt() > threshold {
                return Ok(FrequencyScaleResult {
                    lambda: level.eigenvalue,
                    first_failing_eigenvalue: Some(level.eigenvalue),
                    low_energy_at_failure: cum.sqrt(),
                    c_used: opts.c,
                });
            }
        }
        Ok(FrequencyScaleResult {
            lambda: max_eigenvalue(self.grid()),
            first_failing_eigenvalue: None,
            low_energy_at_failure: cum.sqrt(),
            c_used: opts.c,
        })
    }
}

/// A heat-kernel evaluation together with its band-limit validity flag.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KernelEval {
    pub value: f64,
    /// False when `√t` is below the grid scale and spectral truncation makes
    /// the kernel inaccurate (see [`band_resolved`]).
    pub band_resolved: bool,
}

/// One-dimensional kernel value at a single grid offset,
/// `Σ_{m=-N/2}^{N/2-1} e^{-4π²m²t} cos(2πm j/N)`.
///
/// The unpaired `-N/2` mode contributes through its cosine, which vanishes
/// identically at half-integer offsets and equals `±e^{-4π²(N/2)²t}` on grid
/// points; at valid times this is far below roundoff.
fn kernel_value_1d(n: usize, t: f64, offset: usize) -> f64 {
    let half = (n / 2) as i64;
    let x = offset as f64 / n as f64;
    let mut sum = 1.0;
    for m in 1..half {
        let w = (-eigenvalue_of((m * m) as u64) * t).exp();
        sum += 2.0 * w * (2.0 * PI * m as f64 * x).cos();
    }
    sum + (-eigenvalue_of((half * half) as u64) * t).exp() * (2.0 * PI * half as f64 * x).cos()
}

/// One-dimensional kernel profile over all grid offsets.
pub fn kernel_profile_1d(n: usize, t: f64) -> Vec<f64> {
    (0..n).map(|j| kernel_value_1d(n, t, j)).collect()
}

/// Heat kernel `p_t(x,y)` between two grid points, as the band-limited
/// spectral sum. Factorizes over axes on the torus.
pub fn heat_kernel(grid: TorusGrid, x: [usize; 2], y: [usize; 2], t: f64) -> Result<KernelEval> {
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let n = grid.n();
    let off = |a: usize, b: usize| (a + n - b % n) % n;
    let mut value = kernel_value_1d(n, t, off(x[0] % n, y[0]));
    if grid.dim() == 2 {
        value *= kernel_value_1d(n, t, off(x[1] % n, y[1]));
    }
    Ok(KernelEval {
        value,
        band_resolved: band_resolved(grid, t),
    })
}
