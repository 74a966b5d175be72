//! JSON experiment configuration. Unknown keys are rejected so typos fail
//! fast; the schema is documented in `schema/config.schema.json` and the
//! README. A config plus a build fully determines every output byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use nodal_core::spectral::RhsNorm;
use nodal_core::{Field, TorusGrid};

use crate::error::{Error, Result};
use crate::gen;
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Sharpness,
    Sturm,
    Dirac,
    Thm2,
    Cubes,
    DaviesGaffney,
    Cor1,
    Smoothed,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Sharpness => "sharpness",
            Experiment::Sturm => "sturm",
            Experiment::Dirac => "dirac",
            Experiment::Thm2 => "thm2",
            Experiment::Cubes => "cubes",
            Experiment::DaviesGaffney => "davies_gaffney",
            Experiment::Cor1 => "cor1",
            Experiment::Smoothed => "smoothed",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.dim, self.n).map_err(|e| Error::Config(e.to_string()))
    }
}

/// How the input field of a unary command (or of the smoothed/thm2 runs) is
/// obtained.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum FieldSource {
    /// Read from a field header written by this tool.
    File {
        path: String,
    },
    Cosine {
        m: [i64; 2],
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    Sine {
        m: [i64; 2],
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// Sum of plain cosine/sine terms `amplitude · cos/sin(2π m·x)`.
    TrigSum {
        terms: Vec<TrigTerm>,
    },
    Highpass {
        n_cut: u32,
        n_max: u32,
        seed: u64,
    },
    Dirac {
        n_points: u32,
        r: f64,
        seed: u64,
    },
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub m: [i64; 2],
    pub amplitude: f64,
    #[serde(default)]
    pub basis: TrigBasis,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigBasis {
    #[default]
    Cos,
    Sin,
}

impl FieldSource {
    pub fn build(&self, grid: TorusGrid, config_dir: &Path) -> Result<Field> {
        match self {
            FieldSource::File { path } => {
                let resolved = config_dir.join(path);
                let f = io::read_field(&resolved)?;
                if f.grid() != grid {
                    return Err(Error::Config(format!(
                        "field file grid ({}d, N={}) does not match config grid ({}d, N={})",
                        f.grid().dim(),
                        f.grid().n(),
                        grid.dim(),
                        grid.n()
                    )));
                }
                Ok(f)
            }
            FieldSource::Cosine { m, amplitude } => Ok(Field::cosine(grid, *m, *amplitude)),
            FieldSource::Sine { m, amplitude } => Ok(Field::sine(grid, *m, *amplitude)),
            FieldSource::TrigSum { terms } => {
                if terms.is_empty() {
                    return Err(Error::Config("trig_sum needs at least one term".into()));
                }
                let mut f = Field::zeros(grid);
                for t in terms {
                    let part = match t.basis {
                        TrigBasis::Cos => Field::cosine(grid, t.m, t.amplitude),
                        TrigBasis::Sin => Field::sine(grid, t.m, t.amplitude),
                    };
                    f = f.add(&part)?;
                }
                Ok(f)
            }
            FieldSource::Highpass { n_cut, n_max, seed } => {
                gen::gen_highpass(*seed, *n_cut, *n_max, grid)
            }
            FieldSource::Dirac { n_points, r, seed } => {
                Ok(gen::gen_dirac_field(*n_points, *r, *seed, grid)?.field)
            }
        }
    }
}

/// Typed parameter bag; every field is optional and the sweeps fill in the
/// documented defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Almost-orthogonality constant of the frequency scale (default 1e-2).
    pub c: Option<f64>,
    /// Regularity constant for the volume-expansion hypothesis (default 2.5).
    pub c_reg: Option<f64>,
    /// Implicit constant of the ε-range upper limit (default 1).
    pub range_constant: Option<f64>,
    /// Exponent ε of the combination bound (default 0.1).
    pub cor1_eps: Option<f64>,
    /// Right-hand-side norm of the frequency-scale condition (default l1).
    pub rhs_norm: Option<RhsNorm>,
    pub k_list: Option<Vec<u32>>,
    pub n_list: Option<Vec<u32>>,
    pub r_list: Option<Vec<f64>>,
    pub t_list: Option<Vec<f64>>,
    pub t: Option<f64>,
    /// Leading time of the smoothed-measure sequence t_j = t0·2^{-j}.
    pub t0: Option<f64>,
    pub t_steps: Option<u32>,
    /// Number of seeds per parameter point.
    pub seeds: Option<u32>,
    /// Base seed offset.
    pub seed: Option<u64>,
    pub n_cut: Option<u32>,
    pub n_max: Option<u32>,
    /// Natural-time multiplier K in t = K/λ·ln(e/l1).
    pub kappa: Option<f64>,
    pub r: Option<f64>,
    pub n_points: Option<u32>,
    /// Retention-constant mode for cube classification.
    pub cn_mode: Option<CnMode>,
    /// Sup-norm bound of the wave vectors in the cor1 pool.
    pub level_max: Option<i64>,
    /// Mask pairs per time for the off-diagonal sweep.
    pub pairs: Option<u32>,
    /// Band edges for the `spectrum`/`heat` commands.
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CnMode {
    /// Numerically evaluated conjectured closed form.
    Conjectured,
    /// With the artificial-smallness override (values ≥ 1/1000 become 1e-4).
    ProofFaithful,
}

/// Output file names, relative to the `--out` directory. Defaults are
/// derived from the experiment name.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputNames {
    pub csv: Option<String>,
    pub json: Option<String>,
    pub svg: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional sanity tag; when present it must match the CLI subcommand.
    pub experiment: Option<Experiment>,
    pub grid: GridConfig,
    #[serde(default)]
    pub field: Option<FieldSource>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputNames,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.grid.build()?;
        Ok(cfg)
    }

    pub fn check_experiment(&self, invoked: Experiment) -> Result<()> {
        if let Some(tagged) = self.experiment {
            if tagged != invoked {
                return Err(Error::Config(format!(
                    "config is tagged for experiment '{}' but '{}' was invoked",
                    tagged.as_str(),
                    invoked.as_str()
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        self.grid.build()
    }

    /// Build the configured field; errors when no source is given.
    pub fn field(&self, config_dir: &Path) -> Result<Field> {
        let grid = self.grid()?;
        match &self.field {
            Some(src) => src.build(grid, config_dir),
            None => Err(Error::Config(
                "this command needs a 'field' section in the config".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"grid": {"dim": 1, "n": 64}}"#).unwrap();
        assert_eq!(cfg.grid.dim, 1);
        assert!(cfg.field.is_none());
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = r#"{"grid": {"dim": 1, "n": 64}, "grids": 3}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(bad).is_err());
        let bad_nested = r#"{"grid": {"dim": 1, "n": 64, "typo": true}}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(bad_nested).is_err());
        let bad_params = r#"{"grid": {"dim": 1, "n": 64}, "params": {"kappas": 1}}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(bad_params).is_err());
    }

    #[test]
    fn builds_trig_sum_field() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{
                "grid": {"dim": 1, "n": 64},
                "field": {"kind": "trig_sum", "terms": [
                    {"m": [1, 0], "amplitude": 1.0},
                    {"m": [4, 0], "amplitude": 0.5, "basis": "sin"}
                ]}
            }"#,
        )
        .unwrap();
        let f = cfg.field(Path::new(".")).unwrap();
        assert_eq!(f.grid().n(), 64);
        assert!(f.norm_linf() > 0.9);
    }

    #[test]
    fn experiment_tag_mismatch_is_config_error() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"experiment": "sturm", "grid": {"dim": 1, "n": 64}}"#)
                .unwrap();
        assert!(cfg.check_experiment(Experiment::Sturm).is_ok());
        let err = cfg.check_experiment(Experiment::Dirac).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
