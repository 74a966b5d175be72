//! Seeded field generators used by the sweeps.

use rand::Rng;
use rand_distr::StandardNormal;

use nodal_core::diagnostics::GridMask;
use nodal_core::spectral::{band_resolved, required_resolution, Complex64, Spectrum};
use nodal_core::{Error as CoreError, Field, TorusGrid};

use crate::error::{Error, Result};
use crate::rng::stream;

/// Mean-free field with independent standard-normal coefficients on every
/// eigenbasis element with `n_cut < |m| ≤ n_max`, renormalized to
/// `‖f‖_∞ = 1`. Coefficients at or below the cutoff are exactly zero by
/// construction.
pub fn gen_highpass(seed: u64, n_cut: u32, n_max: u32, grid: TorusGrid) -> Result<Field> {
    if n_cut >= n_max || n_max as usize > grid.n() / 4 {
        return Err(Error::Config(format!(
            "highpass needs n_cut < n_max <= N/4, got n_cut={n_cut}, n_max={n_max}, N={}",
            grid.n()
        )));
    }
    let mut rng = stream("gen-highpass", seed, pack(n_cut, n_max, grid));
    let mut spectrum = Spectrum::zero(grid);
    let lo = (n_cut as i64) * (n_cut as i64);
    let hi = (n_max as i64) * (n_max as i64);
    for m in half_space_modes(grid, n_max as i64) {
        let msq = m[0] * m[0] + m[1] * m[1];
        if msq <= lo || msq > hi {
            continue;
        }
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        spectrum
            .set_mode(m, Complex64::new(re, im))
            .map_err(Error::Core)?;
    }
    normalize_linf(spectrum.reconstruct().map_err(Error::Core)?)
}

/// 1D high-pass series with sine coefficients only, `k_min ≤ k ≤ k_max`.
pub fn gen_sine_highpass(seed: u64, k_min: u32, k_max: u32, grid: TorusGrid) -> Result<Field> {
    if grid.dim() != 1 {
        return Err(Error::Core(CoreError::DimensionMismatch {
            expected: 1,
            got: grid.dim(),
        }));
    }
    if k_min == 0 || k_min > k_max || k_max as usize > grid.n() / 4 {
        return Err(Error::Config(format!(
            "sine series needs 0 < k_min <= k_max <= N/4, got {k_min}..{k_max}"
        )));
    }
    let mut rng = stream("gen-sine-highpass", seed, pack(k_min, k_max, grid));
    let mut spectrum = Spectrum::zero(grid);
    for k in k_min..=k_max {
        let a: f64 = rng.sample(StandardNormal);
        // a·sin(2πkx) has complex coefficients ∓ a/2 · i at ±k
        spectrum
            .set_mode([k as i64, 0], Complex64::new(0.0, -a / 2.0))
            .map_err(Error::Core)?;
    }
    normalize_linf(spectrum.reconstruct().map_err(Error::Core)?)
}

/// Canonical half of the wave-index lattice (one representative per ±m
/// pair) with `max|m_a| ≤ bound`.
fn half_space_modes(grid: TorusGrid, bound: i64) -> Vec<[i64; 2]> {
    let mut modes = Vec::new();
    match grid.dim() {
        1 => {
            for m in 1..=bound {
                modes.push([m, 0]);
            }
        }
        _ => {
            for m1 in 0..=bound {
                let lo2 = if m1 == 0 { 1 } else { -bound };
                for m2 in lo2..=bound {
                    modes.push([m1, m2]);
                }
            }
        }
    }
    modes
}

fn pack(a: u32, b: u32, grid: TorusGrid) -> u64 {
    ((a as u64) << 40) ^ ((b as u64) << 16) ^ grid.n() as u64 ^ ((grid.dim() as u64) << 62)
}

fn normalize_linf(f: Field) -> Result<Field> {
    let linf = f.norm_linf();
    if linf == 0.0 {
        return Err(Error::Config("generated field is identically zero".into()));
    }
    Ok(f.scaled(1.0 / linf))
}

/// A smoothed-point-mass field together with the scales that built it.
#[derive(Debug, Clone)]
pub struct DiracField {
    pub field: Field,
    /// Heat time `t = r² n^{-2/d}`.
    pub t: f64,
    /// Point locations (grid-snapped).
    pub points: Vec<[f64; 2]>,
}

/// `f = -n + e^{tΔ} Σ δ_{x_k}` with `n` points on a jittered lattice
/// (jitter ≤ 20% of the lattice spacing) and `t = r² n^{-2/d}`. Each point
/// mass is a unit-mass grid indicator (value `N^d` at one node).
pub fn gen_dirac_field(n_points: u32, r: f64, seed: u64, grid: TorusGrid) -> Result<DiracField> {
    if n_points == 0 {
        return Err(Error::Config("dirac field needs at least one point".into()));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Config(format!(
            "dirac radius must be positive, got {r}"
        )));
    }
    let d = grid.dim() as f64;
    let t = r * r * (n_points as f64).powf(-2.0 / d);
    if !band_resolved(grid, t) {
        return Err(Error::Config(format!(
            "t = {t:.3e} is below band-limit validity at N = {}; need N >= {}",
            grid.n(),
            required_resolution(t)
        )));
    }
    let mut rng = stream("gen-dirac", seed, (n_points as u64) << 32 ^ r.to_bits());
    let per_axis = (n_points as f64).powf(1.0 / d).ceil() as usize;
    let spacing = 1.0 / per_axis as f64;
    let n = grid.n();
    let mut values = vec![0.0f64; grid.len()];
    let mut points = Vec::with_capacity(n_points as usize);
    'outer: for a in 0..per_axis {
        for b in 0..per_axis {
            if points.len() == n_points as usize {
                break 'outer;
            }
            if grid.dim() == 1 && b > 0 {
                continue;
            }
            let jitter =
                |rng: &mut rand_chacha::ChaCha8Rng| (rng.gen::<f64>() * 2.0 - 1.0) * 0.2 * spacing;
            let x0 = (a as f64 + 0.5) * spacing + jitter(&mut rng);
            let x1 = if grid.dim() == 2 {
                (b as f64 + 0.5) * spacing + jitter(&mut rng)
            } else {
                0.0
            };
            let i = ((x0.rem_euclid(1.0)) * n as f64).round() as usize % n;
            let j = ((x1.rem_euclid(1.0)) * n as f64).round() as usize % n;
            values[grid.index(i, j)] += grid.len() as f64;
            points.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let deltas = Field::from_values(grid, values).map_err(Error::Core)?;
    let field = deltas
        .heat_evolve(t)
        .map_err(Error::Core)?
        .offset(-(n_points as f64));
    Ok(DiracField { field, t, points })
}

/// One eigenfunction term of a two-term combination.
#[derive(Debug, Clone, Copy)]
pub struct EigenTerm {
    pub m: [i64; 2],
    /// Coefficient of the L²-normalized eigenfunction `√2·cos/sin(2πm·x)`.
    pub coeff: f64,
    pub sine: bool,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct TwoTermCombo {
    pub terms: [EigenTerm; 2],
    pub field: Field,
}

/// `a·φ + b·ψ` for two distinct eigenbasis elements with wave vectors of
/// sup-norm at most `level_max`. The mixing angle is drawn from
/// `[π/8, 3π/8]` so both terms carry comparable weight.
pub fn gen_two_term(seed: u64, level_max: i64, grid: TorusGrid) -> Result<TwoTermCombo> {
    if grid.dim() != 2 {
        return Err(Error::Core(CoreError::DimensionMismatch {
            expected: 2,
            got: grid.dim(),
        }));
    }
    if level_max < 1 || level_max as usize > grid.n() / 4 {
        return Err(Error::Config(format!(
            "level_max out of range: {level_max}"
        )));
    }
    let mut rng = stream("gen-two-term", seed, level_max as u64);
    let pool = half_space_modes(grid, level_max);
    let i = rng.gen_range(0..pool.len());
    let mut j = rng.gen_range(0..pool.len() - 1);
    if j >= i {
        j += 1;
    }
    let theta = std::f64::consts::FRAC_PI_8 * (1.0 + 2.0 * rng.gen::<f64>());
    let signs = [
        if rng.gen::<bool>() { 1.0 } else { -1.0 },
        if rng.gen::<bool>() { 1.0 } else { -1.0 },
    ];
    let coeffs = [signs[0] * theta.cos(), signs[1] * theta.sin()];
    let modes = [pool[i], pool[j]];
    let mut field = Field::zeros(grid);
    let mut terms = Vec::with_capacity(2);
    for k in 0..2 {
        let sine = rng.gen::<bool>();
        let m = modes[k];
        let msq = (m[0] * m[0] + m[1] * m[1]) as u64;
        let amp = coeffs[k] * 2.0f64.sqrt();
        let part = if sine {
            Field::sine(grid, m, amp)
        } else {
            Field::cosine(grid, m, amp)
        };
        field = field.add(&part).map_err(Error::Core)?;
        terms.push(EigenTerm {
            m,
            coeff: coeffs[k],
            sine,
            lambda: nodal_core::spectral::eigenvalue_of(msq),
        });
    }
    Ok(TwoTermCombo {
        terms: [terms[0], terms[1]],
        field,
    })
}

/// A pair of random disjoint boxes on the grid.
pub fn gen_mask_pair(seed: u64, grid: TorusGrid) -> Result<(GridMask, GridMask)> {
    let mut rng = stream(
        "gen-masks",
        seed,
        grid.n() as u64 ^ ((grid.dim() as u64) << 60),
    );
    for _ in 0..64 {
        let draw_box = |rng: &mut rand_chacha::ChaCha8Rng| {
            let lo = [rng.gen::<f64>(), rng.gen::<f64>()];
            let side = |rng: &mut rand_chacha::ChaCha8Rng| 0.02 + 0.18 * rng.gen::<f64>();
            let hi = [lo[0] + side(rng), lo[1] + side(rng)];
            (lo, hi)
        };
        let (alo, ahi) = draw_box(&mut rng);
        let (blo, bhi) = draw_box(&mut rng);
        let a = GridMask::from_box(
            grid,
            alo,
            [ahi[0], if grid.dim() == 1 { 1.0 } else { ahi[1] }],
        );
        let b = GridMask::from_box(
            grid,
            blo,
            [bhi[0], if grid.dim() == 1 { 1.0 } else { bhi[1] }],
        );
        let (Ok(a), Ok(b)) = (a, b) else { continue };
        if !a.overlaps(&b) {
            return Ok((a, b));
        }
    }
    Err(Error::Config(
        "could not draw disjoint masks after 64 attempts".into(),
    ))
}

/// A random field supported on a mask (standard-normal values inside,
/// exactly zero outside).
pub fn gen_masked_field(seed: u64, mask: &GridMask) -> Result<Field> {
    let mut rng = stream("gen-masked-field", seed, 0);
    let values = mask
        .members()
        .iter()
        .map(|&m| {
            if m {
                rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            }
        })
        .collect();
    Field::from_values(mask.grid(), values).map_err(Error::Core)
}
