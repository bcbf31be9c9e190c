//! Experiment runner for circle-measure asymptotics.
//!
//! Exit codes: 0 all checks pass, 1 check failure, 2 configuration error,
//! 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opuc::config::ExperimentConfig;
use opuc::error::Error;
use opuc::runner;

#[derive(Parser)]
#[command(
    name = "opuc",
    version,
    about = "Verblunsky coefficients, CMV matrices, sum rules and Szegő asymptotics at desk scale"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a measure-spec file and echo the effective settings.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the configured tasks and write reports.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Output directory for report files.
        #[arg(long, default_value = "opuc-out")]
        out: PathBuf,
    },
    /// Repeat a run while varying one parameter.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "opuc-out")]
        out: PathBuf,
        /// Parameter to vary: beta | n-max | grid-m.
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values.
        #[arg(long)]
        values: String,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Measure-spec file (TOML).
    #[arg(long)]
    spec: PathBuf,
    /// Tasks to run, comma separated; empty = all.
    #[arg(long, default_value = "")]
    tasks: String,
    /// Override the grid size from the spec file.
    #[arg(long)]
    grid_m: Option<usize>,
    /// Largest polynomial degree in the sweeps.
    #[arg(long, default_value_t = 200)]
    n_max: usize,
    /// Seed for randomized candidate generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for task-level parallelism.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Config(_) | Error::Contract(_) | Error::Parse(_) | Error::Class(_) => {
            ExitCode::from(2)
        }
        _ => ExitCode::from(3),
    }
}

fn resolve(common: &CommonArgs, out: &std::path::Path) -> Result<ExperimentConfig, Error> {
    ExperimentConfig::resolve(
        &common.spec,
        &common.tasks,
        common.grid_m,
        common.n_max,
        common.seed,
        out,
        common.workers,
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { common } => {
            let out = PathBuf::from(".");
            match resolve(&common, &out) {
                Ok(config) => match config.spec.build_measure(config.grid_m) {
                    Ok(measure) => {
                        print!("{}", config.echo());
                        println!(
                            "classes: szego={} poly_szego={} atoms={}",
                            measure.is_szego,
                            measure.is_poly_szego,
                            measure.atoms().len()
                        );
                        ExitCode::SUCCESS
                    }
                    Err(e) => {
                        eprintln!("{e}");
                        exit_code_for(&e)
                    }
                },
                Err(e) => {
                    eprintln!("{e}");
                    exit_code_for(&e)
                }
            }
        }
        Command::Run { common, out } => match resolve(&common, &out) {
            Ok(config) => match runner::run_experiment(&config) {
                Ok(result) => {
                    print!("{}", result.summary_text);
                    if result.all_passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("{e}");
                    exit_code_for(&e)
                }
            },
            Err(e) => {
                eprintln!("{e}");
                exit_code_for(&e)
            }
        },
        Command::Sweep {
            common,
            out,
            param,
            values,
        } => {
            let tokens: Vec<&str> = values.split(',').map(str::trim).collect();
            if tokens.is_empty() || tokens.iter().any(|t| t.is_empty()) {
                eprintln!("configuration error: --values must be a nonempty comma list");
                return ExitCode::from(2);
            }
            let mut summary = String::from("# opuc sweep summary\n");
            let mut all = true;
            for token in tokens {
                let sub_out = out.join(format!("sweep_{param}_{token}"));
                let config = match sweep_config(&common, &param, token, &sub_out) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("{e}");
                        return exit_code_for(&e);
                    }
                };
                match runner::run_experiment(&config) {
                    Ok(result) => {
                        summary.push_str(&format!(
                            "{param}={token} {}\n",
                            if result.all_passed { "PASS" } else { "FAIL" }
                        ));
                        all &= result.all_passed;
                    }
                    Err(e) => {
                        eprintln!("{param}={token}: {e}");
                        return exit_code_for(&e);
                    }
                }
            }
            if let Err(e) = std::fs::create_dir_all(&out)
                .and_then(|_| std::fs::write(out.join("sweep_summary.txt"), &summary))
            {
                eprintln!("i/o error: {e}");
                return ExitCode::from(3);
            }
            print!("{summary}");
            if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn sweep_config(
    common: &CommonArgs,
    param: &str,
    token: &str,
    out: &std::path::Path,
) -> Result<ExperimentConfig, Error> {
    let mut config = resolve(common, out)?;
    match param {
        "beta" => {
            let beta: f64 = token
                .parse()
                .map_err(|_| Error::Config(format!("sweep: bad beta value {token:?}")))?;
            match &mut config.spec.density.beta {
                Some(betas) => betas.iter_mut().for_each(|b| *b = beta),
                None => {
                    return Err(Error::Config(
                        "sweep over beta needs a ps_family density".into(),
                    ))
                }
            }
        }
        "n-max" => {
            config.n_max = token
                .parse()
                .map_err(|_| Error::Config(format!("sweep: bad n-max value {token:?}")))?;
            if config.n_max > opuc::config::MAX_N {
                return Err(Error::Config(format!(
                    "sweep: n_max {} exceeds the cap {}",
                    config.n_max,
                    opuc::config::MAX_N
                )));
            }
        }
        "grid-m" => {
            config.grid_m = Some(
                token
                    .parse()
                    .map_err(|_| Error::Config(format!("sweep: bad grid-m value {token:?}")))?,
            );
        }
        other => {
            return Err(Error::Config(format!(
                "sweep: unknown parameter {other:?} (expected beta, n-max or grid-m)"
            )))
        }
    }
    Ok(config)
}
