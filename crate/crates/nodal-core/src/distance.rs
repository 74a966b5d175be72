//! Distance to the nodal set, ε-tube volumes and the volume-expansion
//! profile behind the regularity hypothesis.
//!
//! Distances are exact Euclidean torus distances: to the root set in 1D and
//! to the segment soup in 2D (point-to-segment, located through a bucket
//! grid with expanding ring search). Tube volumes use partial-volume
//! weighting, which is exact for flat tubes once `ε ≥ h/2` and second-order
//! accurate in general.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{torus_delta, TorusGrid};
use crate::nodal::{self, NodalSet, Segment};

/// Per-grid-point distance to a nodal set.
#[derive(Debug, Clone)]
pub struct DistanceField {
    grid: TorusGrid,
    values: Vec<f64>,
    /// Set when the source nodal set was empty; all distances are infinite.
    pub empty_nodal: bool,
}

impl DistanceField {
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Exact Euclidean torus distance from every grid point to the nodal set.
/// An empty nodal set yields an all-infinite field with `empty_nodal` set.
pub fn distance_transform(nodal: &NodalSet, grid: &TorusGrid) -> DistanceField {
    if nodal.is_empty() {
        return DistanceField {
            grid: *grid,
            values: vec![f64::INFINITY; grid.len()],
            empty_nodal: true,
        };
    }
    let values = match nodal.dim {
        1 => distances_to_roots(&nodal.roots, grid),
        _ => distances_to_segments(&nodal.segments, grid),
    };
    DistanceField {
        grid: *grid,
        values,
        empty_nodal: false,
    }
}

fn distances_to_roots(roots: &[f64], grid: &TorusGrid) -> Vec<f64> {
    let n = grid.n();
    let h = grid.spacing();
    let mut out = vec![f64::INFINITY; n];
    for (i, d) in out.iter_mut().enumerate() {
        let x = i as f64 * h;
        // roots are sorted; candidates are the two bracketing roots plus wrap
        let idx = roots.partition_point(|&r| r < x);
        let candidates = [
            roots[idx % roots.len()],
            roots[(idx + roots.len() - 1) % roots.len()],
        ];
        for r in candidates {
            *d = d.min(torus_delta(x, r).abs());
        }
    }
    out
}

/// Distance from a point to a segment, with the segment translated into the
/// query's wrap frame (segments are shorter than half the torus).
fn point_segment_dist(q: [f64; 2], seg: &Segment) -> f64 {
    let mid = seg.midpoint();
    let shift = [torus_delta(mid[0], q[0]), torus_delta(mid[1], q[1])];
    let half = [(seg.b[0] - seg.a[0]) / 2.0, (seg.b[1] - seg.a[1]) / 2.0];
    // endpoints relative to q
    let a = [shift[0] - half[0], shift[1] - half[1]];
    let b = [shift[0] + half[0], shift[1] + half[1]];
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (-(a[0] * ab[0] + a[1] * ab[1]) / len_sq).clamp(0.0, 1.0)
    };
    let p = [a[0] + t * ab[0], a[1] + t * ab[1]];
    (p[0] * p[0] + p[1] * p[1]).sqrt()
}

fn distances_to_segments(segments: &[Segment], grid: &TorusGrid) -> Vec<f64> {
    let n = grid.n();
    let h = grid.spacing();
    // bucket grid over the torus; a segment is registered in its midpoint's
    // bucket and sticks out at most h·√2/2 beyond it
    let buckets_per_axis = (n / 8).clamp(8, 256);
    let bw = 1.0 / buckets_per_axis as f64;
    let slack = h * 2.0f64.sqrt();
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); buckets_per_axis * buckets_per_axis];
    let bucket_of = |p: [f64; 2]| -> usize {
        let bi = ((p[0] / bw) as usize).min(buckets_per_axis - 1);
        let bj = ((p[1] / bw) as usize).min(buckets_per_axis - 1);
        bi * buckets_per_axis + bj
    };
    for (s, seg) in segments.iter().enumerate() {
        let mid = seg.midpoint();
        let wrapped = [
            crate::grid::wrap_unit(mid[0]),
            crate::grid::wrap_unit(mid[1]),
        ];
        buckets[bucket_of(wrapped)].push(s as u32);
    }

    let bpa = buckets_per_axis as i64;
    let max_ring = buckets_per_axis / 2 + 1;
    let mut out = vec![f64::INFINITY; grid.len()];
    for idx in 0..grid.len() {
        let q = grid.coords(idx);
        let qb = [
            ((q[0] / bw) as i64).min(bpa - 1),
            ((q[1] / bw) as i64).min(bpa - 1),
        ];
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            // anything in an unscanned ring is at least this far away
            let lower = (ring as f64 - 1.0) * bw - slack;
            if lower > best {
                break;
            }
            let r = ring as i64;
            for di in -r..=r {
                for dj in -r..=r {
                    if di.abs().max(dj.abs()) != r {
                        continue;
                    }
                    let bi = (qb[0] + di).rem_euclid(bpa) as usize;
                    let bj = (qb[1] + dj).rem_euclid(bpa) as usize;
                    for &s in &buckets[bi * buckets_per_axis + bj] {
                        let d = point_segment_dist(q, &segments[s as usize]);
                        if d < best {
                            best = d;
                        }
                    }
                }
            }
        }
        out[idx] = best;
    }
    out
}

/// Fraction of the torus within distance `eps` of the nodal set, estimated
/// with partial-volume weights `clamp((ε − d)/h + 1/2, 0, 1)` per grid cell.
pub fn tube_volume(df: &DistanceField, eps: f64) -> Result<f64> {
    let h = df.grid.spacing();
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Invalid(format!("eps must be positive, got {eps}")));
    }
    if eps < h {
        let required_n = ((1.0 / eps).ceil() as usize).next_power_of_two().max(16);
        return Err(Error::ResolutionTooCoarse { eps, required_n });
    }
    if df.empty_nodal {
        return Ok(0.0);
    }
    let sum: f64 = df
        .values
        .iter()
        .map(|&d| ((eps - d) / h + 0.5).clamp(0.0, 1.0))
        .sum();
    Ok(sum / df.values.len() as f64)
}

/// Volume-expansion profile of a nodal set: tube volumes across a list of
/// radii and their ratios to `ε · measure`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionProfile {
    pub epsilons: Vec<f64>,
    pub tube_volumes: Vec<f64>,
    /// `tube_volume / (ε · measure)` per radius.
    pub ratios: Vec<f64>,
    /// Maximum ratio over the tested range.
    pub c_fit: f64,
    pub measure: f64,
}

/// Evaluate the expansion profile of the zero set of `f` over `eps_list`.
pub fn expansion_profile(f: &Field, eps_list: &[f64]) -> Result<ExpansionProfile> {
    let grid = f.grid();
    let nodal = match grid.dim() {
        1 => nodal::sign_changes(f)?,
        _ => nodal::nodal_segments(f)?,
    };
    expansion_profile_of(&nodal, &grid, eps_list)
}

/// Same as [`expansion_profile`] for an already extracted nodal set.
pub fn expansion_profile_of(
    nodal: &NodalSet,
    grid: &TorusGrid,
    eps_list: &[f64],
) -> Result<ExpansionProfile> {
    if nodal.is_empty() || nodal.measure == 0.0 {
        return Err(Error::DegenerateNodal);
    }
    if eps_list.is_empty() {
        return Err(Error::EmptyEpsilonRange);
    }
    let df = distance_transform(nodal, grid);
    let mut epsilons = eps_list.to_vec();
    epsilons.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut tube_volumes = Vec::with_capacity(epsilons.len());
    let mut ratios = Vec::with_capacity(epsilons.len());
    for &eps in &epsilons {
        let vol = tube_volume(&df, eps)?;
        tube_volumes.push(vol);
        ratios.push(vol / (eps * nodal.measure));
    }
    let c_fit = ratios.iter().fold(0.0f64, |m, &r| m.max(r));
    Ok(ExpansionProfile {
        epsilons,
        tube_volumes,
        ratios,
        c_fit,
        measure: nodal.measure,
    })
}
