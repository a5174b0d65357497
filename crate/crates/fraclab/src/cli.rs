//! Command-line front end: experiment runners, corpus generation, the norm
//! battery, and report merging.
//!
//! Exit codes: `0` — every checked criterion passed; `1` — the run completed
//! but a criterion failed; `2` — configuration or input error.

use crate::corpus::{self, CorpusSpec, ALL_FAMILIES};
use crate::grid::read_grid;
use crate::harness::{merge_reports, run, ExperimentConfig, ExperimentReport};
use crate::norms::{
    bmo_norm, lp_norm, morrey_norm, vmo_modulus, weak_lp_norm, MorreyParams, OscillationMode,
};
use crate::Result;
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "fraclab",
    version,
    about = "Fractional powers of semigroup generators: kernel-bound fits and \
             Morrey/BMO/VMO-type norm experiments on grid data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON); omit for the calibrated frozen defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one CSV per decay/refinement series into this directory.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the seeded test-function corpus (grid files + manifest).
    GenCorpus {
        /// Corpus spec (JSON); omit for the default: seed 42, every family,
        /// 2 functions each, 1-D grid N = 256, L = 16.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "corpus-out")]
        out: PathBuf,
    },
    /// Run one verification experiment and report pass/fail.
    Verify {
        /// One of: thm1, thm2, cor3, adams, examples, kernel-suite.
        experiment: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the kernel-estimate suite (alias for `verify kernel-suite`).
    KernelSuite {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compute the norm battery of a stored grid function.
    Norms {
        /// Grid-function file (MGF1 format).
        file: PathBuf,
        /// Write the JSON battery here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge experiment reports into one document (pass = conjunction).
    ReportMerge {
        /// Report files produced by `verify --out`.
        inputs: Vec<PathBuf>,
        /// Write the merged JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point used by the `fraclab` binary; returns the process exit code.
pub fn cli_main<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let argv = std::iter::once("fraclab".to_string()).chain(args);
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successful exits; parse errors are
            // usage errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(pass) => {
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenCorpus { config, out } => {
            let cs: CorpusSpec = match config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None => CorpusSpec::new(
                    42,
                    ALL_FAMILIES.to_vec(),
                    2,
                    crate::grid::GridSpec::new(1, 256, 16.0, 2)?,
                ),
            };
            let corpus = corpus::generate(&cs)?;
            corpus::write_corpus(&cs, &corpus, &out)?;
            println!(
                "wrote {} functions and manifest.json to {}",
                corpus.len(),
                out.display()
            );
            Ok(true)
        }
        Command::Verify { experiment, run } => run_experiment(Some(&experiment), run),
        Command::KernelSuite { run } => run_experiment(Some("kernel-suite"), run),
        Command::Norms { file, out } => {
            let battery = norm_battery(&file)?;
            let text = format!("{}\n", serde_json::to_string_pretty(&battery)?);
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::ReportMerge { inputs, out } => {
            if inputs.is_empty() {
                return Err(crate::Error::Config(
                    "report-merge needs input files".into(),
                ));
            }
            let mut reports = Vec::new();
            for path in &inputs {
                let rep: ExperimentReport = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                reports.push(rep);
            }
            let merged = merge_reports(&reports);
            let pass = merged["pass"].as_bool().unwrap_or(false);
            let text = format!("{}\n", serde_json::to_string_pretty(&merged)?);
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(pass)
        }
    }
}

fn run_experiment(name: Option<&str>, args: RunArgs) -> Result<bool> {
    let cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::frozen(name.expect("subcommand supplies a name"))?,
    };
    if let Some(name) = name {
        if cfg.experiment != name {
            return Err(crate::Error::Config(format!(
                "config is for \"{}\" but the subcommand asked for \"{name}\"",
                cfg.experiment
            )));
        }
    }
    let report = run(&cfg)?;
    for note in &report.notes {
        println!("{note}");
    }
    println!(
        "{}: {}",
        report.experiment,
        if report.pass { "PASS" } else { "FAIL" }
    );
    if let Some(path) = &args.out {
        report.write_json(path)?;
        println!("report: {}", path.display());
    }
    if let Some(dir) = &args.csv {
        report.write_csv_series(dir)?;
        println!("series CSVs: {}", dir.display());
    }
    Ok(report.pass)
}

/// The standard battery: Lebesgue, weak, Morrey, BMO, and the VMO decay
/// series over the grid's dyadic radii.
fn norm_battery(path: &std::path::Path) -> Result<serde_json::Value> {
    let f = read_grid(path)?;
    let spec = f.spec;
    let radii = spec.dyadic_radii();
    let morrey_params = MorreyParams::new(2.0, spec.dim as f64 / 2.0, spec.dim)?;
    let bmo = bmo_norm(&f, OscillationMode::MeanAbs, &radii)?;
    let morrey = morrey_norm(&f, &morrey_params, &radii)?;
    let vmo: Vec<f64> = radii
        .iter()
        .map(|&r| vmo_modulus(&f, r))
        .collect::<Result<_>>()?;
    Ok(json!({
        "file": path.display().to_string(),
        "grid": {
            "dim": spec.dim,
            "points_per_axis": spec.points_per_axis,
            "side": spec.side,
            "support": f.support,
        },
        "l1": lp_norm(&f, 1.0)?,
        "l2": lp_norm(&f, 2.0)?,
        "weak_l2": weak_lp_norm(&f, 2.0)?,
        "morrey_p2_lambda_half_n": {
            "value": morrey.value,
            "argmax_center": morrey.argmax_center,
            "argmax_radius": morrey.argmax_radius,
        },
        "bmo_mean_abs": {
            "value": bmo.value,
            "argmax_center": bmo.argmax_center,
            "argmax_radius": bmo.argmax_radius,
        },
        "vmo_series": {
            "radii": radii,
            "eta": vmo,
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{write_grid, GridFunction, GridSpec, Support};

    #[test]
    fn unknown_subcommand_exits_2() {
        assert_eq!(cli_main(vec!["frobnicate".to_string()]), 2);
        assert_eq!(cli_main(Vec::new()), 2);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(cli_main(vec!["--help".to_string()]), 0);
    }

    #[test]
    fn missing_config_file_exits_2() {
        assert_eq!(
            cli_main(vec![
                "verify".into(),
                "thm1".into(),
                "--config".into(),
                "/nonexistent/cfg.json".into(),
            ]),
            2
        );
    }

    #[test]
    fn config_experiment_mismatch_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        let cfg = ExperimentConfig::frozen_thm2();
        std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(
            cli_main(vec![
                "verify".into(),
                "thm1".into(),
                "--config".into(),
                path.display().to_string(),
            ]),
            2
        );
    }

    #[test]
    fn norms_battery_on_written_function() {
        let dir = tempfile::tempdir().unwrap();
        let spec = GridSpec::new(1, 64, 16.0, 2).unwrap();
        let f = GridFunction::sample(spec, Support::Compact, |x| {
            (-(x[0] - 0.5) * (x[0] - 0.5)).exp() * crate::corpus::smooth_window(x[0], 16.0)
        })
        .unwrap();
        let path = dir.path().join("f.mgf1");
        write_grid(&f, &path).unwrap();
        let battery = norm_battery(&path).unwrap();
        assert!(battery["l2"].as_f64().unwrap() > 0.0);
        assert!(battery["bmo_mean_abs"]["value"].as_f64().unwrap() > 0.0);
        let out = dir.path().join("battery.json");
        assert_eq!(
            cli_main(vec![
                "norms".into(),
                path.display().to_string(),
                "--out".into(),
                out.display().to_string(),
            ]),
            0
        );
        let text = std::fs::read_to_string(out).unwrap();
        assert!(text.contains("vmo_series"));
    }

    #[test]
    fn gen_corpus_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let cs = CorpusSpec::new(
            7,
            vec![crate::corpus::Family::SmoothBump],
            1,
            GridSpec::new(1, 64, 16.0, 2).unwrap(),
        );
        let cfg_path = dir.path().join("corpus.json");
        std::fs::write(&cfg_path, serde_json::to_string(&cs).unwrap()).unwrap();
        let out = dir.path().join("corpus");
        assert_eq!(
            cli_main(vec![
                "gen-corpus".into(),
                "--config".into(),
                cfg_path.display().to_string(),
                "--out".into(),
                out.display().to_string(),
            ]),
            0
        );
        assert!(out.join("manifest.json").exists());
    }
}
