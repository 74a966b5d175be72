//! Single-shot commands: decomposition report, frequency scale, heat
//! evolution, nodal extraction and the three bound verdicts.

use std::path::Path;

use serde_json::json;

use nodal_core::bounds::{cor1_rhs, verify_thm1, verify_thm2, BoundReport, Thm2Options};
use nodal_core::nodal::{nodal_segments, sign_changes, NodalSet};
use nodal_core::spectral::{FrequencyScaleOptions, RhsNorm};
use nodal_core::Field;

use crate::config::{ExperimentConfig, TrigBasis};
use crate::error::{Error, Result};
use crate::io::{csv_field, sig17, svg_nodal, Row};

/// Artifacts of one unary command, ready to be written by the CLI.
#[derive(Debug)]
pub struct CommandOutput {
    /// (default file name, content) CSV pairs.
    pub csv: Vec<(String, String)>,
    pub json: serde_json::Value,
    pub svg: Option<String>,
    /// One-line summary for stdout.
    pub stdout: String,
}

struct LevelRow {
    msq: u64,
    eigenvalue: f64,
    mass: f64,
    cum_mass_sqrt: f64,
}

impl Row for LevelRow {
    fn header() -> &'static [&'static str] {
        &["msq", "eigenvalue", "mass", "cum_mass_sqrt"]
    }

    fn values(&self) -> Vec<String> {
        vec![
            self.msq.to_string(),
            sig17(self.eigenvalue),
            sig17(self.mass),
            sig17(self.cum_mass_sqrt),
        ]
    }
}

pub fn spectrum(cfg: &ExperimentConfig, config_dir: &Path) -> Result<CommandOutput> {
    let f = cfg.field(config_dir)?;
    let s = f.decompose();
    let mut cum = 0.0;
    let rows: Vec<LevelRow> = s
        .levels()
        .into_iter()
        .map(|l| {
            cum += l.mass;
            LevelRow {
                msq: l.msq,
                eigenvalue: l.eigenvalue,
                mass: l.mass,
                cum_mass_sqrt: cum.sqrt(),
            }
        })
        .collect();
    let json = json!({
        "dim": f.grid().dim(),
        "n": f.grid().n(),
        "l1": f.norm_l1(),
        "l2": f.norm_l2(),
        "linf": f.norm_linf(),
        "total_energy": s.total_energy(),
        "levels": rows.len(),
    });
    let stdout = format!(
        "spectrum: {} levels, total energy {}",
        rows.len(),
        sig17(s.total_energy())
    );
    Ok(CommandOutput {
        csv: vec![("spectrum.csv".into(), crate::io::csv_string(&rows))],
        json,
        svg: None,
        stdout,
    })
}

pub fn freqscale(cfg: &ExperimentConfig, config_dir: &Path) -> Result<CommandOutput> {
    let f = cfg.field(config_dir)?;
    let opts = FrequencyScaleOptions {
        c: cfg.params.c.unwrap_or(1e-2),
        rhs_norm: cfg.params.rhs_norm.unwrap_or(RhsNorm::L1),
    };
    let r = f.frequency_scale(opts)?;
    let json =
        serde_json::to_value(r).map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    let stdout = format!(
        "frequency scale lambda = {} (c = {})",
        sig17(r.lambda),
        sig17(r.c_used)
    );
    Ok(CommandOutput {
        csv: Vec::new(),
        json,
        svg: None,
        stdout,
    })
}

/// Heat evolution; the evolved field is returned so the CLI can write it in
/// the field file format next to the JSON report.
pub fn heat(cfg: &ExperimentConfig, config_dir: &Path) -> Result<(CommandOutput, Field)> {
    let f = cfg.field(config_dir)?;
    let t = cfg
        .params
        .t
        .ok_or_else(|| Error::Config("heat needs params.t".into()))?;
    let evolved = f.heat_evolve(t)?;
    let json = json!({
        "t": t,
        "l1_before": f.norm_l1(),
        "l1_after": evolved.norm_l1(),
        "linf_before": f.norm_linf(),
        "linf_after": evolved.norm_linf(),
        "mean_before": f.mean(),
        "mean_after": evolved.mean(),
    });
    let stdout = format!(
        "heat t = {}: linf {} -> {}",
        sig17(t),
        sig17(f.norm_linf()),
        sig17(evolved.norm_linf())
    );
    Ok((
        CommandOutput {
            csv: Vec::new(),
            json,
            svg: None,
            stdout,
        },
        evolved,
    ))
}

struct SegmentRow {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

impl Row for SegmentRow {
    fn header() -> &'static [&'static str] {
        &["x1", "y1", "x2", "y2"]
    }

    fn values(&self) -> Vec<String> {
        vec![
            sig17(self.x1),
            sig17(self.y1),
            sig17(self.x2),
            sig17(self.y2),
        ]
    }
}

struct RootRow {
    x: f64,
}

impl Row for RootRow {
    fn header() -> &'static [&'static str] {
        &["x"]
    }

    fn values(&self) -> Vec<String> {
        vec![sig17(self.x)]
    }
}

fn extract_nodal(f: &Field) -> Result<NodalSet> {
    Ok(match f.grid().dim() {
        1 => sign_changes(f)?,
        _ => nodal_segments(f)?,
    })
}

pub fn nodal(cfg: &ExperimentConfig, config_dir: &Path) -> Result<CommandOutput> {
    let f = cfg.field(config_dir)?;
    let ns = extract_nodal(&f)?;
    let csv = if ns.dim == 1 {
        let rows: Vec<RootRow> = ns.roots.iter().map(|&x| RootRow { x }).collect();
        ("roots.csv".to_string(), crate::io::csv_string(&rows))
    } else {
        let rows: Vec<SegmentRow> = ns
            .segments
            .iter()
            .map(|s| SegmentRow {
                x1: s.a[0],
                y1: s.a[1],
                x2: s.b[0],
                y2: s.b[1],
            })
            .collect();
        ("segments.csv".to_string(), crate::io::csv_string(&rows))
    };
    let json = json!({
        "dim": ns.dim,
        "measure": ns.measure,
        "roots": ns.roots.len(),
        "segments": ns.segments.len(),
    });
    let stdout = format!("nodal measure = {}", sig17(ns.measure));
    Ok(CommandOutput {
        csv: vec![csv],
        json,
        svg: Some(svg_nodal(&ns)),
        stdout,
    })
}

/// Flatten a [`BoundReport`] into the documented one-row CSV:
/// `theorem,measured_measure,rhs_value,ratio,lambda,l1,linf,c_used,hypothesis_pass,params`.
pub fn bound_report_csv(report: &BoundReport) -> String {
    let header =
        "theorem,measured_measure,rhs_value,ratio,lambda,l1,linf,c_used,hypothesis_pass,params";
    let hypothesis = match report.hypothesis_pass {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    };
    let params: Vec<String> = report
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let row = [
        report.theorem.as_str().to_string(),
        sig17(report.measured_measure),
        sig17(report.rhs_value),
        sig17(report.ratio),
        sig17(report.lambda),
        sig17(report.l1),
        sig17(report.linf),
        sig17(report.c_used),
        hypothesis.to_string(),
        params.join(";"),
    ];
    let quoted: Vec<String> = row.iter().map(|v| csv_field(v)).collect();
    format!("{header}\n{}\n", quoted.join(","))
}

fn report_output(report: BoundReport) -> Result<CommandOutput> {
    let csv = bound_report_csv(&report);
    let stdout = format!(
        "{}: measured = {}, rhs = {}, ratio = {}",
        report.theorem.as_str(),
        sig17(report.measured_measure),
        sig17(report.rhs_value),
        sig17(report.ratio)
    );
    let json = serde_json::to_value(&report)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    Ok(CommandOutput {
        csv: vec![("report.csv".into(), csv)],
        json,
        svg: None,
        stdout,
    })
}

pub fn verify_thm1_cmd(cfg: &ExperimentConfig, config_dir: &Path) -> Result<CommandOutput> {
    let f = cfg.field(config_dir)?;
    let report = verify_thm1(&f, cfg.params.c.unwrap_or(1e-2))?;
    report_output(report)
}

pub fn verify_thm2_cmd(cfg: &ExperimentConfig, config_dir: &Path) -> Result<CommandOutput> {
    let f = cfg.field(config_dir)?;
    let opts = Thm2Options {
        c_reg: cfg.params.c_reg.unwrap_or(2.5),
        c: cfg.params.c.unwrap_or(1e-2),
        range_constant: cfg.params.range_constant.unwrap_or(1.0),
    };
    let report = verify_thm2(&f, opts)?;
    // four-region accounting at the range limit and the natural time scale
    let eps_max: f64 = report
        .params
        .get("eps_max")
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.0);
    let delta = eps_max.max(f.grid().spacing());
    let t = nodal_core::diagnostics::natural_time(report.lambda, report.l1 / report.linf, 1.0)?;
    let regions = nodal_core::diagnostics::thm2_regions(&f, delta, t)?;
    let mut out = report_output(report)?;
    out.csv
        .push(("regions.csv".into(), crate::io::region_rows_csv(&regions)));
    if let serde_json::Value::Object(map) = &mut out.json {
        map.insert(
            "regions".into(),
            serde_json::to_value(&regions)
                .map_err(|e| Error::Config(format!("serialization failed: {e}")))?,
        );
    }
    Ok(out)
}

/// The combination bound. The field must be a `trig_sum`; each term
/// `amplitude·cos/sin(2πm·x)` is `amplitude/√2` times the L²-normalized
/// eigenfunction, which fixes the coefficients of the bound.
pub fn verify_cor1_cmd(cfg: &ExperimentConfig, config_dir: &Path) -> Result<CommandOutput> {
    let crate::config::FieldSource::TrigSum { terms } = cfg
        .field
        .as_ref()
        .ok_or_else(|| Error::Config("verify cor1 needs a trig_sum field".into()))?
    else {
        return Err(Error::Config(
            "verify cor1 needs a trig_sum field (explicit eigenfunction terms)".into(),
        ));
    };
    let grid = cfg.grid()?;
    let f = cfg.field(config_dir)?;
    let eps = cfg.params.cor1_eps.unwrap_or(0.1);
    let mut coeffs = Vec::new();
    let mut lambdas = Vec::new();
    let mut phis = Vec::new();
    for term in terms {
        let msq = (term.m[0] * term.m[0] + term.m[1] * term.m[1]) as u64;
        if msq == 0 {
            return Err(Error::Config(
                "cor1 terms must be nonconstant eigenfunctions (m != 0)".into(),
            ));
        }
        coeffs.push(term.amplitude / 2.0f64.sqrt());
        lambdas.push(nodal_core::spectral::eigenvalue_of(msq));
        phis.push(2.0f64.sqrt());
        let _ = TrigBasis::Cos;
    }
    let rhs = cor1_rhs(&coeffs, &lambdas, &phis, grid.dim(), eps)?;
    let ns = extract_nodal(&f)?;
    let sum_sq: f64 = coeffs.iter().map(|a| a * a).sum();
    let (l1, linf) = (f.norm_l1(), f.norm_linf());
    let mut params = std::collections::BTreeMap::new();
    params.insert("dim".to_string(), grid.dim().to_string());
    params.insert("n_grid".to_string(), grid.n().to_string());
    params.insert("eps".to_string(), format!("{eps}"));
    params.insert("terms".to_string(), terms.len().to_string());
    params.insert(
        "chain_ok".to_string(),
        (sum_sq <= l1 * linf * (1.0 + 1e-9)).to_string(),
    );
    let report = BoundReport {
        theorem: nodal_core::bounds::TheoremId::Cor1,
        measured_measure: ns.measure,
        rhs_value: rhs,
        ratio: ns.measure / rhs,
        lambda: lambdas.iter().cloned().fold(f64::INFINITY, f64::min),
        l1,
        linf,
        c_used: eps,
        hypothesis_pass: None,
        params,
    };
    report_output(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn cfg(value: serde_json::Value) -> ExperimentConfig {
        serde_json::from_value(value).unwrap()
    }

    #[test]
    fn nodal_command_on_cosine() {
        let c = cfg(json!({
            "grid": {"dim": 2, "n": 64},
            "field": {"kind": "cosine", "m": [2, 0]},
        }));
        let out = nodal(&c, Path::new(".")).unwrap();
        let svg = out.svg.unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!((out.json["measure"].as_f64().unwrap() - 4.0).abs() < 0.04);
    }

    #[test]
    fn verify_cor1_requires_trig_sum() {
        let c = cfg(json!({
            "grid": {"dim": 2, "n": 64},
            "field": {"kind": "cosine", "m": [2, 0]},
        }));
        let err = verify_cor1_cmd(&c, Path::new(".")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn verify_cor1_two_terms() {
        let c = cfg(json!({
            "grid": {"dim": 2, "n": 256},
            "field": {"kind": "trig_sum", "terms": [
                {"m": [1, 0], "amplitude": 1.0},
                {"m": [0, 1], "amplitude": 1.0},
            ]},
        }));
        let out = verify_cor1_cmd(&c, Path::new(".")).unwrap();
        let measured = out.json["measured_measure"].as_f64().unwrap();
        let rhs = out.json["rhs_value"].as_f64().unwrap();
        assert!((measured - 2.0 * 2.0f64.sqrt()).abs() < 0.03);
        assert!(measured >= rhs, "measured {measured} < rhs {rhs}");
    }

    #[test]
    fn freqscale_command() {
        let c = cfg(json!({
            "grid": {"dim": 1, "n": 64},
            "field": {"kind": "cosine", "m": [3, 0]},
        }));
        let out = freqscale(&c, Path::new(".")).unwrap();
        let lambda = out.json["lambda"].as_f64().unwrap();
        assert!((lambda - nodal_core::spectral::eigenvalue_of(9)).abs() < 1e-9);
    }

    #[test]
    fn bound_report_csv_shape() {
        let c = cfg(json!({
            "grid": {"dim": 2, "n": 64},
            "field": {"kind": "cosine", "m": [4, 0]},
        }));
        let out = verify_thm1_cmd(&c, Path::new(".")).unwrap();
        let (name, csv) = &out.csv[0];
        assert_eq!(name, "report.csv");
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "theorem,measured_measure,rhs_value,ratio,lambda,l1,linf,c_used,hypothesis_pass,params"
        );
        assert!(lines.next().unwrap().starts_with("thm1,"));
    }
}
