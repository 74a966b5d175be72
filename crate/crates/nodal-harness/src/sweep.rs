//! Parameter sweeps reproducing the verification experiments. Every sweep
//! is a pure function of (config, build): rows are emitted in lexicographic
//! order over the parameter grid and then the seed, and all output strings
//! are byte-deterministic. A failing parameter point becomes a row with an
//! error column, never an abort; asserted-property violations are collected
//! and reported (the CLI exits with code 3 when any are present).

use serde_json::json;

use nodal_core::bounds::{verify_thm1, verify_thm2, Thm2Options};
use nodal_core::diagnostics::{
    classify_cubes, conjectured_cn, davies_gaffney_check, davies_gaffney_function_check,
    min_negative_mass_radius, natural_time, proof_faithful_cn, snap_delta, CubeLabel,
};
use nodal_core::nodal::{nodal_segments, sign_changes};
use nodal_core::spectral::FrequencyScaleOptions;
use nodal_core::Field;

use crate::config::{CnMode, Experiment, ExperimentConfig};
use crate::error::{Error, Result};
use crate::gen;
use crate::io::{csv_string, sig17, svg_scatter, Row};

/// Rendered artifacts of one sweep.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub experiment: Experiment,
    pub csv: String,
    pub summary: serde_json::Value,
    pub svg: Option<String>,
    /// Human-readable description of every asserted-property violation.
    pub violations: Vec<String>,
    /// Additional named CSV artifacts (e.g. per-cube rows).
    pub extra_csv: Vec<(String, String)>,
}

fn fmt_bool(b: bool) -> String {
    if b { "true" } else { "false" }.to_string()
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    cov / var
}

// ---------------------------------------------------------------------------
// sharpness

struct SharpnessRow {
    k: u32,
    lambda: f64,
    l1: f64,
    linf: f64,
    measured: f64,
    thm1_rhs: f64,
    thm1_ratio: f64,
    ratio_over_log: f64,
    thm2_rhs: f64,
    thm2_ratio: f64,
    c_fit: f64,
    hypothesis_pass: bool,
    range_at_floor: bool,
}

impl Row for SharpnessRow {
    fn header() -> &'static [&'static str] {
        &[
            "k",
            "lambda",
            "l1",
            "linf",
            "measured",
            "thm1_rhs",
            "thm1_ratio",
            "ratio_over_log",
            "thm2_rhs",
            "thm2_ratio",
            "c_fit",
            "hypothesis_pass",
            "range_at_floor",
        ]
    }

    fn values(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            sig17(self.lambda),
            sig17(self.l1),
            sig17(self.linf),
            sig17(self.measured),
            sig17(self.thm1_rhs),
            sig17(self.thm1_ratio),
            sig17(self.ratio_over_log),
            sig17(self.thm2_rhs),
            sig17(self.thm2_ratio),
            sig17(self.c_fit),
            fmt_bool(self.hypothesis_pass),
            fmt_bool(self.range_at_floor),
        ]
    }
}

/// `f = cos(2πk·x₁)` on the 2-torus across `k_list`: measured nodal length
/// against both bounds. Asserted properties: positive ratios, ratio ≥ 1 and
/// nondecreasing in k.
pub fn run_sharpness(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let grid = cfg.grid()?;
    if grid.dim() != 2 {
        return Err(Error::Config("sharpness sweep runs on dim = 2".into()));
    }
    let k_list = cfg.params.k_list.clone().unwrap_or(vec![4, 8, 16, 32]);
    let c = cfg.params.c.unwrap_or(1e-2);
    let c_reg = cfg.params.c_reg.unwrap_or(2.5);
    let range_constant = cfg.params.range_constant.unwrap_or(1.0);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &k in &k_list {
        let f = Field::cosine(grid, [k as i64, 0], 1.0);
        let r1 = verify_thm1(&f, c)?;
        let r2 = verify_thm2(
            &f,
            Thm2Options {
                c_reg,
                c,
                range_constant,
            },
        )?;
        let c_fit: f64 = r2.params["c_fit"].parse().unwrap_or(f64::NAN);
        let range_at_floor = r2.params["range_at_floor"] == "true";
        if r1.ratio <= 0.0 {
            violations.push(format!(
                "sharpness k={k}: nonpositive thm1 ratio {}",
                r1.ratio
            ));
        }
        if r1.ratio < 1.0 {
            violations.push(format!("sharpness k={k}: thm1 ratio {} < 1", r1.ratio));
        }
        if let Some(prev) = rows.last() {
            let prev: &SharpnessRow = prev;
            if r1.ratio < prev.thm1_ratio {
                violations.push(format!(
                    "sharpness k={k}: thm1 ratio {} decreased from {}",
                    r1.ratio, prev.thm1_ratio
                ));
            }
        }
        rows.push(SharpnessRow {
            k,
            lambda: r1.lambda,
            l1: r1.l1,
            linf: r1.linf,
            measured: r1.measured_measure,
            thm1_rhs: r1.rhs_value,
            thm1_ratio: r1.ratio,
            ratio_over_log: r1.ratio / r1.lambda.ln(),
            thm2_rhs: r2.rhs_value,
            thm2_ratio: r2.ratio,
            c_fit,
            hypothesis_pass: r2.hypothesis_pass.unwrap_or(false),
            range_at_floor,
        });
    }
    let band: Vec<f64> = rows.iter().map(|r| r.ratio_over_log).collect();
    let band_spread = band.iter().cloned().fold(0.0f64, f64::max)
        / band.iter().cloned().fold(f64::INFINITY, f64::min);
    let svg = svg_scatter(
        &rows
            .iter()
            .map(|r| (r.lambda, r.thm1_ratio))
            .collect::<Vec<_>>(),
        "lambda",
        "thm1 ratio",
    );
    let summary = json!({
        "experiment": "sharpness",
        "k_list": k_list,
        "c": c,
        "c_reg": c_reg,
        "thm1_ratios": rows.iter().map(|r| r.thm1_ratio).collect::<Vec<_>>(),
        "thm2_ratios": rows.iter().map(|r| r.thm2_ratio).collect::<Vec<_>>(),
        "ratio_over_log_spread": band_spread,
        "violations": violations.len(),
    });
    Ok(SweepOutput {
        experiment: Experiment::Sharpness,
        csv: csv_string(&rows),
        summary,
        svg: Some(svg),
        violations,
        extra_csv: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// sturm

struct SturmRow {
    n_cut: u32,
    n_max: u32,
    seed: u64,
    roots: u64,
    required: u64,
    pass: bool,
    error: String,
}

impl Row for SturmRow {
    fn header() -> &'static [&'static str] {
        &[
            "n_cut", "n_max", "seed", "roots", "required", "pass", "error",
        ]
    }

    fn values(&self) -> Vec<String> {
        vec![
            self.n_cut.to_string(),
            self.n_max.to_string(),
            self.seed.to_string(),
            self.roots.to_string(),
            self.required.to_string(),
            fmt_bool(self.pass),
            self.error.clone(),
        ]
    }
}

/// Root counts of seeded trig polynomials orthogonal to the first `n` modes
/// must reach `2n + 2`.
pub fn run_sturm(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let grid = cfg.grid()?;
    if grid.dim() != 1 {
        return Err(Error::Config("sturm sweep runs on dim = 1".into()));
    }
    let n_list = cfg
        .params
        .n_list
        .clone()
        .unwrap_or_else(|| (1..=32).collect());
    let seeds = cfg.params.seeds.unwrap_or(100) as u64;
    let seed0 = cfg.params.seed.unwrap_or(0);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut min_margin = i64::MAX;
    for &n_cut in &n_list {
        let n_max = cfg
            .params
            .n_max
            .unwrap_or((2 * n_cut + 8).min((grid.n() / 4) as u32));
        for seed in seed0..seed0 + seeds {
            let required = 2 * n_cut as u64 + 2;
            match gen::gen_highpass(seed, n_cut, n_max, grid).and_then(|f| Ok(sign_changes(&f)?)) {
                Ok(ns) => {
                    let roots = ns.measure as u64;
                    let pass = roots >= required;
                    if !pass {
                        violations.push(format!(
                            "sturm n={n_cut} seed={seed}: {roots} roots < {required}"
                        ));
                    }
                    min_margin = min_margin.min(roots as i64 - required as i64);
                    rows.push(SturmRow {
                        n_cut,
                        n_max,
                        seed,
                        roots,
                        required,
                        pass,
                        error: String::new(),
                    });
                }
                Err(e) => rows.push(SturmRow {
                    n_cut,
                    n_max,
                    seed,
                    roots: 0,
                    required,
                    pass: false,
                    error: e.to_string(),
                }),
            }
        }
    }
    let summary = json!({
        "experiment": "sturm",
        "points": rows.len(),
        "seeds": seeds,
        "violations": violations.len(),
        "min_margin": min_margin,
    });
    Ok(SweepOutput {
        experiment: Experiment::Sturm,
        csv: csv_string(&rows),
        summary,
        svg: None,
        violations,
        extra_csv: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// dirac

struct DiracRow {
    variant: &'static str,
    n_points: u32,
    r: f64,
    t: f64,
    seed: u64,
    measured: f64,
    linf: f64,
    l1: f64,
    mean: f64,
    error: String,
}

impl Row for DiracRow {
    fn header() -> &'static [&'static str] {
        &[
            "variant", "n_points", "r", "t", "seed", "measured", "linf", "l1", "mean", "error",
        ]
    }

    fn values(&self) -> Vec<String> {
        vec![
            self.variant.to_string(),
            self.n_points.to_string(),
            sig17(self.r),
            sig17(self.t),
            self.seed.to_string(),
            sig17(self.measured),
            sig17(self.linf),
            sig17(self.l1),
            sig17(self.mean),
            self.error.clone(),
        ]
    }
}

/// Smoothed point masses: nodal measure scales like `n^{1/2}` at fixed `r`
/// and the sup norm like `r^{-2}` at fixed `n` (asserted per seed within the
/// documented bands). The r grid sits in the small-r regime where the
/// subtracted baseline is negligible against the bump height.
pub fn run_dirac(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let grid = cfg.grid()?;
    if grid.dim() != 2 {
        return Err(Error::Config("dirac sweep runs on dim = 2".into()));
    }
    let n_list = cfg.params.n_list.clone().unwrap_or(vec![16, 64, 256]);
    let r_fixed = cfg.params.r.unwrap_or(0.1);
    let r_list = cfg.params.r_list.clone().unwrap_or(vec![0.02, 0.04, 0.08]);
    let n_fixed = cfg.params.n_points.unwrap_or(64);
    let seeds = cfg.params.seeds.unwrap_or(5) as u64;
    let seed0 = cfg.params.seed.unwrap_or(0);
    let mut rows: Vec<DiracRow> = Vec::new();
    let mut violations = Vec::new();
    let mut measure_slopes = Vec::new();
    let mut linf_slopes = Vec::new();

    let eval = |variant: &'static str, n_points: u32, r: f64, seed: u64| -> Option<DiracRow> {
        match gen::gen_dirac_field(n_points, r, seed, grid) {
            Ok(df) => match nodal_segments(&df.field) {
                Ok(ns) => Some(DiracRow {
                    variant,
                    n_points,
                    r,
                    t: df.t,
                    seed,
                    measured: ns.measure,
                    linf: df.field.norm_linf(),
                    l1: df.field.norm_l1(),
                    mean: df.field.mean(),
                    error: String::new(),
                }),
                Err(e) => Some(DiracRow {
                    variant,
                    n_points,
                    r,
                    t: df.t,
                    seed,
                    measured: f64::NAN,
                    linf: 0.0,
                    l1: 0.0,
                    mean: 0.0,
                    error: e.to_string(),
                }),
            },
            Err(e) => Some(DiracRow {
                variant,
                n_points,
                r,
                t: 0.0,
                seed,
                measured: f64::NAN,
                linf: 0.0,
                l1: 0.0,
                mean: 0.0,
                error: e.to_string(),
            }),
        }
    };

    for seed in seed0..seed0 + seeds {
        let mut pts = Vec::new();
        for &n_points in &n_list {
            if let Some(row) = eval("n_sweep", n_points, r_fixed, seed) {
                if row.error.is_empty() {
                    pts.push((n_points as f64, row.measured));
                }
                rows.push(row);
            }
        }
        if pts.len() >= 2 {
            let slope = loglog_slope(&pts);
            if !(0.35..=0.65).contains(&slope) {
                violations.push(format!(
                    "dirac seed={seed}: measure-vs-n slope {slope:.3} outside 0.5 ± 0.15"
                ));
            }
            measure_slopes.push(slope);
        }
    }
    for seed in seed0..seed0 + seeds {
        let mut pts = Vec::new();
        for &r in &r_list {
            if let Some(row) = eval("r_sweep", n_fixed, r, seed) {
                if row.error.is_empty() {
                    pts.push((r, row.linf));
                }
                rows.push(row);
            }
        }
        if pts.len() >= 2 {
            let slope = loglog_slope(&pts);
            if !(-2.3..=-1.7).contains(&slope) {
                violations.push(format!(
                    "dirac seed={seed}: linf-vs-r slope {slope:.3} outside -2 ± 0.3"
                ));
            }
            linf_slopes.push(slope);
        }
    }
    let svg = svg_scatter(
        &rows
            .iter()
            .filter(|r| r.variant == "n_sweep" && r.error.is_empty())
            .map(|r| (r.n_points as f64, r.measured))
            .collect::<Vec<_>>(),
        "n points",
        "nodal measure",
    );
    let summary = json!({
        "experiment": "dirac",
        "n_list": n_list,
        "r_fixed": r_fixed,
        "r_list": r_list,
        "n_fixed": n_fixed,
        "measure_slopes": measure_slopes,
        "linf_slopes": linf_slopes,
        "violations": violations.len(),
        "note": "points are drawn on a jittered lattice; orthogonality to the first ~n eigenfunctions is heuristic, not constructed",
    });
    Ok(SweepOutput {
        experiment: Experiment::Dirac,
        csv: csv_string(&rows),
        summary,
        svg: Some(svg),
        violations,
        extra_csv: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// cubes

struct CubesRow {
    seed: u64,
    lambda: f64,
    l1: f64,
    t: f64,
    delta: f64,
    decay_ratio: f64,
    premise: bool,
    c_mass_ratio: f64,
    c_mass_ok: bool,
    count_a: usize,
    count_b: usize,
    count_c: usize,
    beta: f64,
    min_neg_r_median: f64,
    error: String,
}

impl Row for CubesRow {
    fn header() -> &'static [&'static str] {
        &[
            "seed",
            "lambda",
            "l1",
            "t",
            "delta",
            "decay_ratio",
            "premise",
            "c_mass_ratio",
            "c_mass_ok",
            "count_a",
            "count_b",
            "count_c",
            "beta",
            "min_neg_r_median",
            "error",
        ]
    }

    fn values(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            sig17(self.lambda),
            sig17(self.l1),
            sig17(self.t),
            sig17(self.delta),
            sig17(self.decay_ratio),
            fmt_bool(self.premise),
            sig17(self.c_mass_ratio),
            fmt_bool(self.c_mass_ok),
            self.count_a.to_string(),
            self.count_b.to_string(),
            self.count_c.to_string(),
            sig17(self.beta),
            sig17(self.min_neg_r_median),
            self.error.clone(),
        ]
    }
}

/// Cube-partition accounting for seeded high-pass fields at the natural
/// time scale: the global L¹ decay premise must imply the C-mass bound, and
/// the normalized dense-cube count β must stay positive and stable.
pub fn run_cubes(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let grid = cfg.grid()?;
    let seeds = cfg.params.seeds.unwrap_or(20) as u64;
    let seed0 = cfg.params.seed.unwrap_or(0);
    let n_cut = cfg.params.n_cut.unwrap_or(8);
    let n_max = cfg.params.n_max.unwrap_or(16);
    let kappa = cfg.params.kappa.unwrap_or(12.0);
    let c = cfg.params.c.unwrap_or(1e-2);
    let cn = match cfg.params.cn_mode.unwrap_or(CnMode::Conjectured) {
        CnMode::Conjectured => conjectured_cn(grid.dim()),
        CnMode::ProofFaithful => proof_faithful_cn(grid.dim()),
    };
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut betas = Vec::new();
    let mut first_partition = None;
    for seed in seed0..seed0 + seeds {
        let run = || -> Result<(CubesRow, nodal_core::diagnostics::CubePartition)> {
            let f = gen::gen_highpass(seed, n_cut, n_max, grid)?;
            let l1 = f.norm_l1();
            let scale = f.frequency_scale(FrequencyScaleOptions::with_c(c))?;
            let t = natural_time(scale.lambda, l1, kappa)?;
            let delta = snap_delta(grid, t.sqrt());
            let part = classify_cubes(&f, t, delta, cn)?;
            let decay_ratio = f.heat_evolve(t)?.norm_l1() / l1;
            let premise = decay_ratio <= cn / 1e4;
            let c_mass_ratio = part.c_mass() / l1;
            let c_mass_ok = c_mass_ratio <= 0.01;
            let b_cubes: Vec<usize> = part
                .cubes
                .iter()
                .enumerate()
                .filter(|(_, cube)| cube.label == CubeLabel::B)
                .map(|(i, _)| i)
                .take(8)
                .collect();
            let mut radii: Vec<f64> = b_cubes
                .iter()
                .filter_map(|&i| min_negative_mass_radius(&f, &part, i))
                .collect();
            radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = if radii.is_empty() {
                f64::NAN
            } else {
                radii[radii.len() / 2]
            };
            let row = CubesRow {
                seed,
                lambda: scale.lambda,
                l1,
                t,
                delta,
                decay_ratio,
                premise,
                c_mass_ratio,
                c_mass_ok,
                count_a: part.count_a,
                count_b: part.count_b,
                count_c: part.count_c,
                beta: part.beta(),
                min_neg_r_median: median,
                error: String::new(),
            };
            Ok((row, part))
        };
        match run() {
            Ok((row, part)) => {
                if first_partition.is_none() {
                    first_partition = Some(part);
                }
                if !row.premise {
                    violations.push(format!(
                        "cubes seed={seed}: decay premise failed (ratio {:.3e} > {:.3e})",
                        row.decay_ratio,
                        cn / 1e4
                    ));
                } else if !row.c_mass_ok {
                    violations.push(format!(
                        "cubes seed={seed}: C-mass {:.4} of l1 exceeds 1/100 under the premise",
                        row.c_mass_ratio
                    ));
                }
                if row.beta > 0.0 {
                    betas.push(row.beta);
                } else {
                    violations.push(format!(
                        "cubes seed={seed}: no dense decaying cubes (beta = 0)"
                    ));
                }
                rows.push(row);
            }
            Err(e) => rows.push(CubesRow {
                seed,
                lambda: f64::NAN,
                l1: f64::NAN,
                t: f64::NAN,
                delta: f64::NAN,
                decay_ratio: f64::NAN,
                premise: false,
                c_mass_ratio: f64::NAN,
                c_mass_ok: false,
                count_a: 0,
                count_b: 0,
                count_c: 0,
                beta: 0.0,
                min_neg_r_median: f64::NAN,
                error: e.to_string(),
            }),
        }
    }
    let beta_spread = if betas.is_empty() {
        f64::NAN
    } else {
        betas.iter().cloned().fold(0.0f64, f64::max)
            / betas.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    if beta_spread.is_finite() && beta_spread > 2.0 {
        violations.push(format!(
            "cubes: beta spread {beta_spread:.3} exceeds factor 2"
        ));
    }
    let summary = json!({
        "experiment": "cubes",
        "seeds": seeds,
        "n_cut": n_cut,
        "n_max": n_max,
        "kappa": kappa,
        "c_n": cn,
        "beta_spread": beta_spread,
        "betas": betas,
        "violations": violations.len(),
    });
    // per-cube rows of the first partition, one row per cube
    let extra_csv = first_partition
        .map(|part| {
            vec![(
                "cubes_cells.csv".to_string(),
                crate::io::cube_rows_csv(&part),
            )]
        })
        .unwrap_or_default();
    Ok(SweepOutput {
        experiment: Experiment::Cubes,
        csv: csv_string(&rows),
        summary,
        svg: None,
        violations,
        extra_csv,
    })
}

// ---------------------------------------------------------------------------
// davies-gaffney

struct DgRow {
    t: f64,
    pair: u64,
    vol_a: f64,
    vol_b: f64,
    distance: f64,
    lhs: f64,
    rhs: f64,
    pass: bool,
    form_lhs: String,
    form_rhs: String,
    form_pass: String,
    error: String,
}

impl Row for DgRow {
    fn header() -> &'static [&'static str] {
        &[
            "t",
            "pair",
            "vol_a",
            "vol_b",
            "distance",
            "lhs",
            "rhs",
            "pass",
            "form_lhs",
            "form_rhs",
            "form_pass",
            "error",
        ]
    }

    fn values(&self) -> Vec<String> {
        vec![
            sig17(self.t),
            self.pair.to_string(),
            sig17(self.vol_a),
            sig17(self.vol_b),
            sig17(self.distance),
            sig17(self.lhs),
            sig17(self.rhs),
            fmt_bool(self.pass),
            self.form_lhs.clone(),
            self.form_rhs.clone(),
            self.form_pass.clone(),
            self.error.clone(),
        ]
    }
}

/// Off-diagonal heat-mass estimates over random disjoint mask pairs, plus
/// the L² function form on a quarter of the pairs.
pub fn run_dg(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let grid = cfg.grid()?;
    let pairs = cfg.params.pairs.unwrap_or(200) as u64;
    let seed0 = cfg.params.seed.unwrap_or(0);
    let t_list = cfg.params.t_list.clone().unwrap_or(vec![1e-3, 1e-2]);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &t in &t_list {
        for pair in 0..pairs {
            let mut run = || -> Result<DgRow> {
                let (a, b) = gen::gen_mask_pair(seed0 + pair, grid)?;
                let check = davies_gaffney_check(&a, &b, t)?;
                if !check.pass {
                    violations.push(format!(
                        "dg t={t} pair={pair}: lhs {:.6e} exceeds rhs {:.6e}",
                        check.lhs, check.rhs
                    ));
                }
                let (form_lhs, form_rhs, form_pass) = if pair % 4 == 0 {
                    let f1 = gen::gen_masked_field(seed0 + 2 * pair + 1, &a)?;
                    let f2 = gen::gen_masked_field(seed0 + 2 * pair + 2, &b)?;
                    let fc = davies_gaffney_function_check(&f1, &f2, t)?;
                    if !fc.pass {
                        violations.push(format!(
                            "dg function form t={t} pair={pair}: lhs {:.6e} exceeds rhs {:.6e}",
                            fc.lhs, fc.rhs
                        ));
                    }
                    (sig17(fc.lhs), sig17(fc.rhs), fmt_bool(fc.pass))
                } else {
                    (String::new(), String::new(), String::new())
                };
                Ok(DgRow {
                    t,
                    pair,
                    vol_a: check.vol_a,
                    vol_b: check.vol_b,
                    distance: check.distance,
                    lhs: check.lhs,
                    rhs: check.rhs,
                    pass: check.pass,
                    form_lhs,
                    form_rhs,
                    form_pass,
                    error: String::new(),
                })
            };
            match run() {
                Ok(row) => rows.push(row),
                Err(e) => rows.push(DgRow {
                    t,
                    pair,
                    vol_a: f64::NAN,
                    vol_b: f64::NAN,
                    distance: f64::NAN,
                    lhs: f64::NAN,
                    rhs: f64::NAN,
                    pass: false,
                    form_lhs: String::new(),
                    form_rhs: String::new(),
                    form_pass: String::new(),
                    error: e.to_string(),
                }),
            }
        }
    }
    let summary = json!({
        "experiment": "davies_gaffney",
        "dim": grid.dim(),
        "pairs": pairs,
        "t_list": t_list,
        "violations": violations.len(),
    });
    Ok(SweepOutput {
        experiment: Experiment::DaviesGaffney,
        csv: csv_string(&rows),
        summary,
        svg: None,
        violations,
        extra_csv: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// cor1

struct Cor1Row {
    seed: u64,
    m1: String,
    basis1: &'static str,
    a1: f64,
    m2: String,
    basis2: &'static str,
    a2: f64,
    lambda_min: f64,
    lambda_max: f64,
    energy_ratio: f64,
    sum_sq: f64,
    l1: f64,
    linf: f64,
    chain_ok: bool,
    measured: f64,
    rhs: f64,
    measured_ok: bool,
    two_term_display: f64,
    error: String,
}

impl Row for Cor1Row {
    fn header() -> &'static [&'static str] {
        &[
            "seed",
            "m1",
            "basis1",
            "a1",
            "m2",
            "basis2",
            "a2",
            "lambda_min",
            "lambda_max",
            "energy_ratio",
            "sum_sq",
            "l1",
            "linf",
            "chain_ok",
            "measured",
            "rhs",
            "measured_ok",
            "two_term_display",
            "error",
        ]
    }

    fn values(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.m1.clone(),
            self.basis1.to_string(),
            sig17(self.a1),
            self.m2.clone(),
            self.basis2.to_string(),
            sig17(self.a2),
            sig17(self.lambda_min),
            sig17(self.lambda_max),
            sig17(self.energy_ratio),
            sig17(self.sum_sq),
            sig17(self.l1),
            sig17(self.linf),
            fmt_bool(self.chain_ok),
            sig17(self.measured),
            sig17(self.rhs),
            fmt_bool(self.measured_ok),
            sig17(self.two_term_display),
            self.error.clone(),
        ]
    }
}

/// Two-term eigenfunction combinations: the Parseval/Hölder chain
/// `Σa² ≤ ‖f‖₁‖f‖∞` and the combination bound against the measured length.
pub fn run_cor1(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let grid = cfg.grid()?;
    if grid.dim() != 2 {
        return Err(Error::Config("cor1 sweep runs on dim = 2".into()));
    }
    let seeds = cfg.params.seeds.unwrap_or(20) as u64;
    let seed0 = cfg.params.seed.unwrap_or(0);
    let level_max = cfg.params.level_max.unwrap_or(8);
    let eps = cfg.params.cor1_eps.unwrap_or(0.1);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for seed in seed0..seed0 + seeds {
        let mut run = || -> Result<Cor1Row> {
            let combo = gen::gen_two_term(seed, level_max, grid)?;
            let [t1, t2] = combo.terms;
            let coeffs = [t1.coeff, t2.coeff];
            let lambdas = [t1.lambda, t2.lambda];
            let phis = [2.0f64.sqrt(), 2.0f64.sqrt()];
            let f = &combo.field;
            let (l1, linf) = (f.norm_l1(), f.norm_linf());
            let sum_sq: f64 = coeffs.iter().map(|a| a * a).sum();
            let chain_ok = sum_sq <= l1 * linf * (1.0 + 1e-9);
            let rhs = nodal_core::bounds::cor1_rhs(&coeffs, &lambdas, &phis, 2, eps)?;
            let measured = nodal_segments(f)?.measure;
            let measured_ok = measured >= rhs;
            let abs_sum: f64 = coeffs.iter().map(|a| a.abs()).sum();
            let energy_ratio = sum_sq / (abs_sum * abs_sum);
            let (lo, hi) = (t1.lambda.min(t2.lambda), t1.lambda.max(t2.lambda));
            // the specialized two-eigenfunction display
            // min(λ,μ)^{1/2−ε} / max(λ,μ)^{n − 3/2 + 1/(2n) + ε}, n = 2
            let display = lo.powf(0.5 - eps) / hi.powf(2.0 - 1.5 + 0.25 + eps);
            if !chain_ok {
                violations.push(format!("cor1 seed={seed}: Parseval/Hölder chain failed"));
            }
            if !measured_ok {
                violations.push(format!(
                    "cor1 seed={seed}: measured {measured:.4} below rhs {rhs:.4}"
                ));
            }
            Ok(Cor1Row {
                seed,
                m1: format!("({} {})", t1.m[0], t1.m[1]),
                basis1: if t1.sine { "sin" } else { "cos" },
                a1: t1.coeff,
                m2: format!("({} {})", t2.m[0], t2.m[1]),
                basis2: if t2.sine { "sin" } else { "cos" },
                a2: t2.coeff,
                lambda_min: lo,
                lambda_max: hi,
                energy_ratio,
                sum_sq,
                l1,
                linf,
                chain_ok,
                measured,
                rhs,
                measured_ok,
                two_term_display: display,
                error: String::new(),
            })
        };
        match run() {
            Ok(row) => rows.push(row),
            Err(e) => rows.push(Cor1Row {
                seed,
                m1: String::new(),
                basis1: "",
                a1: f64::NAN,
                m2: String::new(),
                basis2: "",
                a2: f64::NAN,
                lambda_min: f64::NAN,
                lambda_max: f64::NAN,
                energy_ratio: f64::NAN,
                sum_sq: f64::NAN,
                l1: f64::NAN,
                linf: f64::NAN,
                chain_ok: false,
                measured: f64::NAN,
                rhs: f64::NAN,
                measured_ok: false,
                two_term_display: f64::NAN,
                error: e.to_string(),
            }),
        }
    }
    let summary = json!({
        "experiment": "cor1",
        "seeds": seeds,
        "level_max": level_max,
        "eps": eps,
        "violations": violations.len(),
    });
    Ok(SweepOutput {
        experiment: Experiment::Cor1,
        csv: csv_string(&rows),
        summary,
        svg: None,
        violations,
        extra_csv: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// smoothed

struct SmoothedRow {
    t: f64,
    measure: f64,
}

impl Row for SmoothedRow {
    fn header() -> &'static [&'static str] {
        &["t", "measure"]
    }

    fn values(&self) -> Vec<String> {
        vec![sig17(self.t), sig17(self.measure)]
    }
}

/// Nodal measure of the heat-smoothed field along `t_j = t0·2^{-j}`, with
/// the minimum reported as the small-time proxy.
pub fn run_smoothed(cfg: &ExperimentConfig, config_dir: &std::path::Path) -> Result<SweepOutput> {
    let f = cfg.field(config_dir)?;
    let t_list = match &cfg.params.t_list {
        Some(list) => list.clone(),
        None => {
            let t0 = cfg.params.t0.unwrap_or(4e-3);
            let steps = cfg.params.t_steps.unwrap_or(6);
            (0..steps).map(|j| t0 / 2f64.powi(j as i32)).collect()
        }
    };
    let sm = nodal_core::bounds::smoothed_nodal_measure(&f, &t_list)?;
    let rows: Vec<SmoothedRow> = sm
        .series
        .iter()
        .map(|&(t, measure)| SmoothedRow { t, measure })
        .collect();
    let summary = json!({
        "experiment": "smoothed",
        "t_list": t_list,
        "liminf_proxy": sm.liminf_proxy,
        "series": sm.series,
    });
    Ok(SweepOutput {
        experiment: Experiment::Smoothed,
        csv: csv_string(&rows),
        summary,
        svg: None,
        violations: Vec::new(),
        extra_csv: Vec::new(),
    })
}

/// Grid for acceptance-style default runs of each experiment.
pub fn default_grid(experiment: Experiment) -> (usize, usize) {
    match experiment {
        Experiment::Sharpness => (2, 512),
        Experiment::Sturm => (1, 8192),
        Experiment::Dirac => (2, 512),
        Experiment::Thm2 => (2, 512),
        Experiment::Cubes => (2, 256),
        Experiment::DaviesGaffney => (1, 1024),
        Experiment::Cor1 => (2, 256),
        Experiment::Smoothed => (1, 4096),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(experiment: Experiment, dim: usize, n: usize) -> ExperimentConfig {
        serde_json::from_value(json!({
            "experiment": experiment.as_str(),
            "grid": {"dim": dim, "n": n},
        }))
        .unwrap()
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x| (x, 3.0 * x.powf(-2.0)))
            .collect();
        assert!((loglog_slope(&pts) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn sturm_small_run_has_no_violations() {
        let mut c = cfg(Experiment::Sturm, 1, 1024);
        c.params.n_list = Some(vec![1, 3, 5]);
        c.params.seeds = Some(5);
        let out = run_sturm(&c).unwrap();
        assert!(out.violations.is_empty(), "{:?}", out.violations);
        assert_eq!(out.csv.lines().count(), 1 + 15);
    }

    #[test]
    fn sharpness_small_run() {
        let mut c = cfg(Experiment::Sharpness, 2, 256);
        c.params.k_list = Some(vec![4, 8]);
        let out = run_sharpness(&c).unwrap();
        assert!(out.violations.is_empty(), "{:?}", out.violations);
        assert!(out.svg.is_some());
    }

    #[test]
    fn dg_small_run() {
        let mut c = cfg(Experiment::DaviesGaffney, 1, 256);
        c.params.pairs = Some(20);
        c.params.t_list = Some(vec![1e-2]);
        let out = run_dg(&c).unwrap();
        assert!(out.violations.is_empty(), "{:?}", out.violations);
    }

    #[test]
    fn sweeps_are_deterministic() {
        let mut c = cfg(Experiment::Cor1, 2, 64);
        c.params.seeds = Some(4);
        c.params.level_max = Some(4);
        let a = run_cor1(&c).unwrap();
        let b = run_cor1(&c).unwrap();
        assert_eq!(a.csv, b.csv);
        assert_eq!(a.summary, b.summary);
    }
}
