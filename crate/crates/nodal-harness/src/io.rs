//! File formats and rendering: RFC-4180 CSV with LF line endings, JSON
//! reports, field serialization (JSON header plus CSV or raw little-endian
//! f64 payload), and SVG output with a unit viewbox. All numeric output is
//! printed with 17 significant digits and every writer is byte-deterministic
//! for fixed input.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nodal_core::nodal::NodalSet;
use nodal_core::{Field, TorusGrid};

use crate::error::{Error, Result};

/// Render a float with 17 significant digits. Negative zero (the identity
/// of empty float sums) is canonicalized to positive zero.
pub fn sig17(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Quote a CSV field per RFC 4180 when it contains a comma, quote or
/// newline.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row of a sweep output with fixed, documented columns.
pub trait Row {
    fn header() -> &'static [&'static str];
    fn values(&self) -> Vec<String>;
}

pub fn csv_string<R: Row>(rows: &[R]) -> String {
    let mut out = String::new();
    out.push_str(&R::header().join(","));
    out.push('\n');
    for row in rows {
        let values = row.values();
        debug_assert_eq!(values.len(), R::header().len());
        let line: Vec<String> = values.iter().map(|v| csv_field(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
    }
    fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

/// Payload encoding of a serialized field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldEncoding {
    /// One value per line, row-major, 17 significant digits.
    Csv,
    /// Raw little-endian IEEE-754 doubles, row-major.
    F64le,
}

/// JSON header written next to the payload file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub dim: usize,
    pub n: usize,
    pub encoding: FieldEncoding,
    /// Payload file name, relative to the header's directory.
    pub data: String,
}

/// Write `<base>.json` plus `<base>.csv` or `<base>.bin` under `dir`.
/// Returns the header path.
pub fn write_field(
    dir: &Path,
    base: &str,
    field: &Field,
    encoding: FieldEncoding,
) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let (payload_name, payload): (String, Vec<u8>) = match encoding {
        FieldEncoding::Csv => {
            let mut text = String::new();
            for v in field.values() {
                text.push_str(&sig17(*v));
                text.push('\n');
            }
            (format!("{base}.csv"), text.into_bytes())
        }
        FieldEncoding::F64le => {
            let mut bytes = Vec::with_capacity(field.values().len() * 8);
            for v in field.values() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            (format!("{base}.bin"), bytes)
        }
    };
    let payload_path = dir.join(&payload_name);
    let mut file = fs::File::create(&payload_path)
        .map_err(|e| Error::io(payload_path.display().to_string(), e))?;
    file.write_all(&payload)
        .map_err(|e| Error::io(payload_path.display().to_string(), e))?;
    let header = FieldHeader {
        dim: field.grid().dim(),
        n: field.grid().n(),
        encoding,
        data: payload_name,
    };
    let header_path = dir.join(format!("{base}.json"));
    write_json(&header_path, &header)?;
    Ok(header_path)
}

/// Read a field from its JSON header path.
pub fn read_field(header_path: &Path) -> Result<Field> {
    let text = fs::read_to_string(header_path)
        .map_err(|e| Error::io(header_path.display().to_string(), e))?;
    let header: FieldHeader = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("bad field header {}: {e}", header_path.display())))?;
    let grid = TorusGrid::new(header.dim, header.n)?;
    let dir = header_path.parent().unwrap_or_else(|| Path::new("."));
    let payload_path = dir.join(&header.data);
    let values = match header.encoding {
        FieldEncoding::Csv => {
            let text = fs::read_to_string(&payload_path)
                .map_err(|e| Error::io(payload_path.display().to_string(), e))?;
            let mut values = Vec::with_capacity(grid.len());
            for (ln, line) in text.lines().enumerate() {
                let v: f64 = line.trim().parse().map_err(|e| {
                    Error::Config(format!(
                        "bad value on line {} of {}: {e}",
                        ln + 1,
                        payload_path.display()
                    ))
                })?;
                values.push(v);
            }
            values
        }
        FieldEncoding::F64le => {
            let bytes = fs::read(&payload_path)
                .map_err(|e| Error::io(payload_path.display().to_string(), e))?;
            if bytes.len() % 8 != 0 {
                return Err(Error::Config(format!(
                    "payload {} is not a whole number of f64 values",
                    payload_path.display()
                )));
            }
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect()
        }
    };
    Ok(Field::from_values(grid, values)?)
}

/// One row per cube: `i,j,mass_f,mass_heat,local_mean,label`.
pub fn cube_rows_csv(part: &nodal_core::diagnostics::CubePartition) -> String {
    let mut out = String::from("i,j,mass_f,mass_heat,local_mean,label\n");
    for cube in &part.cubes {
        let label = match cube.label {
            nodal_core::diagnostics::CubeLabel::A => "A",
            nodal_core::diagnostics::CubeLabel::B => "B",
            nodal_core::diagnostics::CubeLabel::C => "C",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            cube.index[0],
            cube.index[1],
            sig17(cube.mass_f),
            sig17(cube.mass_heat),
            sig17(cube.local_mean),
            label
        ));
    }
    out
}

/// One row per region: `region,mass,volume` for the far-negative (a),
/// near-negative (b), near-positive (c) and far-positive (d) regions.
pub fn region_rows_csv(rm: &nodal_core::diagnostics::RegionMasses) -> String {
    let mut out = String::from("region,mass,volume\n");
    for (name, mass, vol) in [
        ("a", rm.mass_a, rm.vol_a),
        ("b", rm.mass_b, rm.vol_b),
        ("c", rm.mass_c, rm.vol_c),
        ("d", rm.mass_d, rm.vol_d),
    ] {
        out.push_str(&format!("{},{},{}\n", name, sig17(mass), sig17(vol)));
    }
    out
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

/// Render a nodal set into an SVG document with a unit viewbox. 2D segments
/// are merged into black polylines of width 0.002; 1D roots become tick
/// circles of radius 0.004 on the horizontal midline.
pub fn svg_nodal(nodal: &NodalSet) -> String {
    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" \
         preserveAspectRatio=\"xMidYMid meet\">\n",
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"white\"/>\n");
    if nodal.dim == 1 {
        for r in &nodal.roots {
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"0.5\" r=\"0.004\" fill=\"black\"/>\n",
                fmt6(*r)
            ));
        }
    } else {
        for chain in nodal.polylines() {
            let points: Vec<String> = chain
                .iter()
                .map(|p| format!("{},{}", fmt6(p[0]), fmt6(p[1])))
                .collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.002\"/>\n",
                points.join(" ")
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Log-log scatter plot of positive (x, y) points in a unit viewbox with
/// labeled axes.
pub fn svg_scatter(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .collect();
    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" \
         preserveAspectRatio=\"xMidYMid meet\" font-size=\"0.03\">\n",
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"white\"/>\n");
    out.push_str("<line x1=\"0.1\" y1=\"0.9\" x2=\"0.95\" y2=\"0.9\" stroke=\"black\" stroke-width=\"0.002\"/>\n");
    out.push_str("<line x1=\"0.1\" y1=\"0.9\" x2=\"0.1\" y2=\"0.05\" stroke=\"black\" stroke-width=\"0.002\"/>\n");
    out.push_str(&format!(
        "<text x=\"0.5\" y=\"0.97\" text-anchor=\"middle\">{} (log)</text>\n",
        x_label
    ));
    out.push_str(&format!(
        "<text x=\"0.03\" y=\"0.5\" text-anchor=\"middle\" transform=\"rotate(-90 0.03 0.5)\">{} (log)</text>\n",
        y_label
    ));
    if !finite.is_empty() {
        let lx: Vec<f64> = finite.iter().map(|(x, _)| x.ln()).collect();
        let ly: Vec<f64> = finite.iter().map(|(_, y)| y.ln()).collect();
        let (x0, x1) = bounds(&lx);
        let (y0, y1) = bounds(&ly);
        let sx = |v: f64| 0.1 + 0.85 * (v - x0) / (x1 - x0).max(1e-12);
        let sy = |v: f64| 0.9 - 0.85 * (v - y0) / (y1 - y0).max(1e-12);
        for ((x, y), (lx, ly)) in finite.iter().zip(lx.iter().zip(&ly)) {
            let _ = (x, y);
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"0.008\" fill=\"black\"/>\n",
                fmt6(sx(*lx)),
                fmt6(sy(*ly))
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
