//! Zero-set extraction and its (n−1)-dimensional measure.
//!
//! In 1D the measure is the number of sign changes (distinct crossings); in
//! 2D the zero level set is extracted by marching squares on the periodic
//! grid and the measure is the total segment length. Exact zeros at grid
//! points are treated as positive, which resolves ties deterministically.
//! Ambiguous saddle cells (alternating corner signs) are split according to
//! the sign of the band-limited interpolant at the cell center, recovered
//! from the spectrum by a half-spacing phase shift.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;

/// Key of a grid edge carrying a crossing. `axis` is the direction the edge
/// runs along; `(i, j)` is the multi-index of its lower endpoint (mod N).
pub(crate) type EdgeKey = (u8, u32, u32);

/// A straight piece of the extracted zero set, contained in one grid cell.
/// Coordinates lie in `[0,1]` (an endpoint on the upper wrap boundary keeps
/// coordinate 1.0, which is the same torus point as 0.0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub(crate) a_key: EdgeKey,
    pub(crate) b_key: EdgeKey,
}

impl Segment {
    pub fn length(&self) -> f64 {
        let dx = self.a[0] - self.b[0];
        let dy = self.a[1] - self.b[1];
        (dx * dx + dy * dy).sqrt()
    }

    pub fn midpoint(&self) -> [f64; 2] {
        [(self.a[0] + self.b[0]) / 2.0, (self.a[1] + self.b[1]) / 2.0]
    }
}

/// Extracted zero set of a field.
#[derive(Debug, Clone)]
pub struct NodalSet {
    pub dim: usize,
    /// Sorted crossing positions in `[0,1)` (1D only).
    pub roots: Vec<f64>,
    /// Segment soup (2D only).
    pub segments: Vec<Segment>,
    /// Sign-change count in 1D; total segment length in 2D.
    pub measure: f64,
}

impl NodalSet {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty() && self.segments.is_empty()
    }

    /// Chain segments sharing edge crossings into polylines, splitting where
    /// a chain jumps across the wrap boundary. Deterministic output order.
    pub fn polylines(&self) -> Vec<Vec<[f64; 2]>> {
        let mut adjacency: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
        for (i, seg) in self.segments.iter().enumerate() {
            adjacency.entry(seg.a_key).or_default().push(i);
            adjacency.entry(seg.b_key).or_default().push(i);
        }
        let mut used = vec![false; self.segments.len()];
        let mut chains: Vec<Vec<[f64; 2]>> = Vec::new();

        // open chains first (crossings of degree 1), then remaining cycles
        let open_starts: Vec<EdgeKey> = adjacency
            .iter()
            .filter(|(_, v)| v.len() == 1)
            .map(|(k, _)| *k)
            .collect();
        for start in open_starts.into_iter().chain(adjacency.keys().copied()) {
            let Some(first) = adjacency[&start].iter().find(|&&s| !used[s]).copied() else {
                continue;
            };
            let mut points: Vec<[f64; 2]> = Vec::new();
            let mut key = start;
            let mut seg_idx = first;
            {
                let seg = &self.segments[seg_idx];
                points.push(if seg.a_key == key { seg.a } else { seg.b });
            }
            loop {
                used[seg_idx] = true;
                let seg = &self.segments[seg_idx];
                let (next_key, next_pos) = if seg.a_key == key {
                    (seg.b_key, seg.b)
                } else {
                    (seg.a_key, seg.a)
                };
                points.push(next_pos);
                key = next_key;
                match adjacency
                    .get(&key)
                    .and_then(|v| v.iter().find(|&&s| !used[s]))
                {
                    Some(&next) => seg_idx = next,
                    None => break,
                }
            }
            // split at wrap jumps
            let mut current: Vec<[f64; 2]> = Vec::new();
            for p in points {
                if let Some(&prev) = current.last() {
                    if (p[0] - prev[0]).abs() > 0.5 || (p[1] - prev[1]).abs() > 0.5 {
                        if current.len() > 1 {
                            chains.push(std::mem::take(&mut current));
                        } else {
                            current.clear();
                        }
                    }
                }
                current.push(p);
            }
            if current.len() > 1 {
                chains.push(current);
            }
        }
        chains
    }
}

/// Exact zeros count as positive.
#[inline]
pub(crate) fn is_pos(v: f64) -> bool {
    v >= 0.0
}

/// Count cyclic sign changes of a 1D field and locate the crossings by
/// linear interpolation.
pub fn sign_changes(f: &Field) -> Result<NodalSet> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: grid.dim(),
        });
    }
    if f.is_zero() {
        return Err(Error::DegenerateNodal);
    }
    let n = grid.n();
    let h = grid.spacing();
    let v = f.values();
    let mut roots: Vec<f64> = Vec::new();
    let mut changes = 0usize;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        if is_pos(a) != is_pos(b) {
            changes += 1;
            let t = a / (a - b);
            roots.push(crate::grid::wrap_unit((i as f64 + t) * h));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup();
    Ok(NodalSet {
        dim: 1,
        roots,
        segments: Vec::new(),
        measure: changes as f64,
    })
}

/// Marching-squares contour extraction of the zero level set of a 2D field
/// on the periodic grid. The measure is the total segment length. Cell
/// centers for saddle disambiguation are evaluated spectrally.
pub fn nodal_segments(f: &Field) -> Result<NodalSet> {
    let grid = f.grid();
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: grid.dim(),
        });
    }
    if f.is_zero() {
        return Err(Error::DegenerateNodal);
    }
    let centers = f.decompose().values_at_cell_centers()?;
    nodal_segments_with_centers(f, &centers)
}

/// Marching squares with caller-provided cell-center samples (row-major,
/// center of cell `(i,j)` at index `i*N + j`).
pub fn nodal_segments_with_centers(f: &Field, centers: &[f64]) -> Result<NodalSet> {
    let grid = f.grid();
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: grid.dim(),
        });
    }
    if centers.len() != grid.len() {
        return Err(Error::LengthMismatch {
            got: centers.len(),
            expected: grid.len(),
        });
    }
    if f.is_zero() {
        return Err(Error::DegenerateNodal);
    }
    let n = grid.n();
    let h = grid.spacing();
    let v = f.values();
    let at = |i: usize, j: usize| v[(i % n) * n + (j % n)];

    // crossing point on every sign-changing edge, computed once
    let mut crossings: BTreeMap<EdgeKey, [f64; 2]> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let a = at(i, j);
            let bx = at(i + 1, j);
            if is_pos(a) != is_pos(bx) {
                let t = a / (a - bx);
                crossings.insert((0, i as u32, j as u32), [(i as f64 + t) * h, j as f64 * h]);
            }
            let by = at(i, j + 1);
            if is_pos(a) != is_pos(by) {
                let t = a / (a - by);
                crossings.insert((1, i as u32, j as u32), [i as f64 * h, (j as f64 + t) * h]);
            }
        }
    }

    // Re-express a stored crossing in the frame of cell (i,j): the top edge
    // of the last column and the right edge of the last row wrap to index 0
    // but sit at coordinate 1.0 within the cell.
    let anchored = |key: EdgeKey, i: usize, j: usize| -> [f64; 2] {
        let mut p = crossings[&key];
        if key.0 == 0 && key.2 == 0 && j + 1 == n {
            p[1] = 1.0;
        }
        if key.0 == 1 && key.1 == 0 && i + 1 == n {
            p[0] = 1.0;
        }
        p
    };

    let mut segments: Vec<Segment> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let b0 = is_pos(at(i, j));
            let b1 = is_pos(at(i + 1, j));
            let b2 = is_pos(at(i + 1, j + 1));
            let b3 = is_pos(at(i, j + 1));
            let case = (b0 as u8) | (b1 as u8) << 1 | (b2 as u8) << 2 | (b3 as u8) << 3;
            if case == 0 || case == 15 {
                continue;
            }
            let e_b: EdgeKey = (0, i as u32, j as u32);
            let e_t: EdgeKey = (0, i as u32, ((j + 1) % n) as u32);
            let e_l: EdgeKey = (1, i as u32, j as u32);
            let e_r: EdgeKey = (1, ((i + 1) % n) as u32, j as u32);
            let pairs: &[(EdgeKey, EdgeKey)] = match case {
                1 | 14 => &[(e_b, e_l)],
                2 | 13 => &[(e_b, e_r)],
                4 | 11 => &[(e_r, e_t)],
                8 | 7 => &[(e_t, e_l)],
                3 | 12 => &[(e_l, e_r)],
                6 | 9 => &[(e_b, e_t)],
                // saddles: connect across the center according to its sign
                5 => {
                    if is_pos(centers[i * n + j]) {
                        &[(e_b, e_r), (e_t, e_l)]
                    } else {
                        &[(e_b, e_l), (e_r, e_t)]
                    }
                }
                10 => {
                    if is_pos(centers[i * n + j]) {
                        &[(e_b, e_l), (e_r, e_t)]
                    } else {
                        &[(e_b, e_r), (e_t, e_l)]
                    }
                }
                _ => unreachable!(),
            };
            for &(ka, kb) in pairs {
                let seg = Segment {
                    a: anchored(ka, i, j),
                    b: anchored(kb, i, j),
                    a_key: ka,
                    b_key: kb,
                };
                if seg.length() > 0.0 {
                    segments.push(seg);
                }
            }
        }
    }

    let measure = segments.iter().map(|s| s.length()).sum();
    Ok(NodalSet {
        dim: 2,
        roots: Vec::new(),
        segments,
        measure,
    })
}
