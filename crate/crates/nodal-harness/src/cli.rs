//! Command-line interface. Exit codes: 0 on success, 2 on configuration
//! errors, 3 when a sweep records an asserted-property violation, 1 for
//! anything else.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::cmd::{self, CommandOutput};
use crate::config::{Experiment, ExperimentConfig};
use crate::error::Result;
use crate::io::{write_field, write_json, write_text, FieldEncoding};
use crate::sweep::{self, SweepOutput};

#[derive(Parser, Debug)]
#[command(
    name = "nodal",
    about = "Nodal-set verification toolkit on flat tori",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoremArg {
    Thm1,
    Thm2,
    Cor1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    Sharpness,
    Sturm,
    Dirac,
    Cubes,
    Dg,
    Cor1,
    Smoothed,
}

impl SweepArg {
    fn experiment(self) -> Experiment {
        match self {
            SweepArg::Sharpness => Experiment::Sharpness,
            SweepArg::Sturm => Experiment::Sturm,
            SweepArg::Dirac => Experiment::Dirac,
            SweepArg::Cubes => Experiment::Cubes,
            SweepArg::Dg => Experiment::DaviesGaffney,
            SweepArg::Cor1 => Experiment::Cor1,
            SweepArg::Smoothed => Experiment::Smoothed,
        }
    }
}

#[derive(Debug, Clone, Parser)]
struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/JSON/SVG artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose the configured field and report its spectral levels.
    Spectrum(CommonArgs),
    /// Compute the frequency scale of the configured field.
    Freqscale(CommonArgs),
    /// Heat-evolve the configured field by params.t and write the result.
    Heat(CommonArgs),
    /// Extract the nodal set (roots or segments) with CSV and SVG output.
    Nodal(CommonArgs),
    /// Evaluate a measured-vs-bound verdict.
    Verify {
        #[arg(value_enum)]
        theorem: TheoremArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a parameter sweep.
    Sweep {
        #[arg(value_enum)]
        which: SweepArg,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn config_dir(config: &Path) -> PathBuf {
    config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_command_output(
    out_dir: &Path,
    prefix: &str,
    cfg: &ExperimentConfig,
    output: &CommandOutput,
) -> Result<()> {
    for (i, (default_name, content)) in output.csv.iter().enumerate() {
        // a configured name renames the primary CSV; extras keep their own
        let name = match (&cfg.output.csv, i) {
            (Some(name), 0) => name.clone(),
            _ => default_name.clone(),
        };
        write_text(&out_dir.join(name), content)?;
    }
    let json_name = cfg
        .output
        .json
        .clone()
        .unwrap_or_else(|| format!("{prefix}.json"));
    write_json(&out_dir.join(json_name), &output.json)?;
    if let Some(svg) = &output.svg {
        let svg_name = cfg
            .output
            .svg
            .clone()
            .unwrap_or_else(|| format!("{prefix}.svg"));
        write_text(&out_dir.join(svg_name), svg)?;
    }
    println!("{}", output.stdout);
    Ok(())
}

fn write_sweep_output(out_dir: &Path, cfg: &ExperimentConfig, output: &SweepOutput) -> Result<()> {
    let name = output.experiment.as_str();
    let csv_name = cfg
        .output
        .csv
        .clone()
        .unwrap_or_else(|| format!("{name}.csv"));
    write_text(&out_dir.join(csv_name), &output.csv)?;
    for (extra_name, content) in &output.extra_csv {
        write_text(&out_dir.join(extra_name), content)?;
    }
    let json_name = cfg
        .output
        .json
        .clone()
        .unwrap_or_else(|| format!("{name}.json"));
    write_json(&out_dir.join(json_name), &output.summary)?;
    if let Some(svg) = &output.svg {
        let svg_name = cfg
            .output
            .svg
            .clone()
            .unwrap_or_else(|| format!("{name}.svg"));
        write_text(&out_dir.join(svg_name), svg)?;
    }
    Ok(())
}

/// Run a sweep against a loaded config; shared by the CLI and tests.
pub fn run_sweep(
    experiment: Experiment,
    cfg: &ExperimentConfig,
    dir: &Path,
) -> Result<SweepOutput> {
    cfg.check_experiment(experiment)?;
    match experiment {
        Experiment::Sharpness => sweep::run_sharpness(cfg),
        Experiment::Sturm => sweep::run_sturm(cfg),
        Experiment::Dirac => sweep::run_dirac(cfg),
        Experiment::Cubes => sweep::run_cubes(cfg),
        Experiment::DaviesGaffney => sweep::run_dg(cfg),
        Experiment::Cor1 => sweep::run_cor1(cfg),
        Experiment::Smoothed => sweep::run_smoothed(cfg, dir),
        Experiment::Thm2 => Err(crate::error::Error::Config(
            "thm2 is a verify command, not a sweep".into(),
        )),
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Spectrum(common) => {
            let cfg = ExperimentConfig::load(&common.config)?;
            let out = cmd::spectrum(&cfg, &config_dir(&common.config))?;
            write_command_output(&common.out, "spectrum", &cfg, &out)?;
            Ok(0)
        }
        Command::Freqscale(common) => {
            let cfg = ExperimentConfig::load(&common.config)?;
            let out = cmd::freqscale(&cfg, &config_dir(&common.config))?;
            write_command_output(&common.out, "freqscale", &cfg, &out)?;
            Ok(0)
        }
        Command::Heat(common) => {
            let cfg = ExperimentConfig::load(&common.config)?;
            let (out, evolved) = cmd::heat(&cfg, &config_dir(&common.config))?;
            write_command_output(&common.out, "heat", &cfg, &out)?;
            write_field(&common.out, "heat_out", &evolved, FieldEncoding::F64le)?;
            Ok(0)
        }
        Command::Nodal(common) => {
            let cfg = ExperimentConfig::load(&common.config)?;
            let out = cmd::nodal(&cfg, &config_dir(&common.config))?;
            write_command_output(&common.out, "nodal", &cfg, &out)?;
            Ok(0)
        }
        Command::Verify { theorem, common } => {
            let cfg = ExperimentConfig::load(&common.config)?;
            let dir = config_dir(&common.config);
            let (prefix, out) = match theorem {
                TheoremArg::Thm1 => ("verify_thm1", cmd::verify_thm1_cmd(&cfg, &dir)?),
                TheoremArg::Thm2 => {
                    cfg.check_experiment(Experiment::Thm2)?;
                    ("verify_thm2", cmd::verify_thm2_cmd(&cfg, &dir)?)
                }
                TheoremArg::Cor1 => ("verify_cor1", cmd::verify_cor1_cmd(&cfg, &dir)?),
            };
            write_command_output(&common.out, prefix, &cfg, &out)?;
            Ok(0)
        }
        Command::Sweep { which, common } => {
            let cfg = ExperimentConfig::load(&common.config)?;
            let experiment = which.experiment();
            let started = std::time::Instant::now();
            let output = run_sweep(experiment, &cfg, &config_dir(&common.config))?;
            write_sweep_output(&common.out, &cfg, &output)?;
            eprintln!(
                "sweep {} finished in {:.1} ms",
                experiment.as_str(),
                started.elapsed().as_secs_f64() * 1e3
            );
            if output.violations.is_empty() {
                println!("sweep {}: ok", experiment.as_str());
                Ok(0)
            } else {
                for v in &output.violations {
                    eprintln!("violation: {v}");
                }
                println!(
                    "sweep {}: {} violation(s)",
                    experiment.as_str(),
                    output.violations.len()
                );
                Ok(3)
            }
        }
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
