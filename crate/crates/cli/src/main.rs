use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nvinit_cli::commands::{self, SweepSegment};
use nvinit_cli::output::write_output;
use nvinit_cli::{parse_config, CliError, Config, Result};
use nvinit_core::PopulationVector;

/// Population-trapping initialization of an NV electron/nuclear spin register.
#[derive(Debug, Parser)]
#[command(name = "nvinit", version)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir` in the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Reserved; the model is deterministic and ignores it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transition frequencies against the reference table.
    Transitions,
    /// Sweep the laser duration of one segment.
    Sweep {
        #[arg(long, value_enum)]
        segment: SweepSegment,
        /// Longest laser duration in µs.
        #[arg(long, default_value_t = 4.0)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        steps: usize,
    },
    /// Synthesize the FID of a state and read its line amplitudes back.
    Spectrum {
        /// Six comma-separated populations in basis order.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        state: Vec<f64>,
    },
    /// Optimize the multi-cycle laser schedule.
    Optimize,
    /// Run a pulse sequence document.
    Simulate {
        /// TOML file with `[[pulse]]` entries.
        sequence: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let mut config = match &cli.config {
        Some(path) => parse_config(&read(path)?)?,
        None => Config::default(),
    };
    if let Some(out) = cli.out {
        config.output_dir = out;
    }
    let dir = config.output_dir.clone();
    let written = match cli.command {
        Command::Transitions => {
            vec![write_output(
                &dir,
                "transitions.csv",
                &commands::cmd_transitions(&config),
            )?]
        }
        Command::Sweep {
            segment,
            t_max,
            steps,
        } => {
            let rows = commands::cmd_sweep(segment, t_max, steps, &config)?;
            let name = match segment {
                SweepSegment::Seg1 => "sweep_seg1.csv",
                SweepSegment::Seg2 => "sweep_seg2.csv",
            };
            vec![write_output(&dir, name, &commands::sweep_csv(&rows))?]
        }
        Command::Spectrum { state } => {
            let arr: [f64; 6] = state.as_slice().try_into().map_err(|_| {
                CliError::Usage(format!("--state needs 6 populations, got {}", state.len()))
            })?;
            let state = PopulationVector::new(arr)?;
            let report = commands::cmd_spectrum(&state, &config)?;
            vec![
                write_output(&dir, "fid.csv", &commands::fid_csv(&report.fid))?,
                write_output(
                    &dir,
                    "spectrum.csv",
                    &commands::spectrum_csv(&report.spectrum),
                )?,
                write_output(
                    &dir,
                    "spectrum.toml",
                    &commands::spectrum_document(&report, &config)?,
                )?,
            ]
        }
        Command::Optimize => {
            let schedule = commands::cmd_optimize(&config)?;
            vec![
                write_output(
                    &dir,
                    "schedule.toml",
                    &commands::schedule_document(&schedule, &config)?,
                )?,
                write_output(&dir, "schedule.csv", &commands::schedule_csv(&schedule))?,
            ]
        }
        Command::Simulate { sequence } => {
            let report = commands::cmd_simulate(&read(&sequence)?, &config)?;
            vec![write_output(
                &dir,
                "simulation.toml",
                &commands::simulation_document(&report)?,
            )?]
        }
    };
    Ok(written)
}

fn one_line(message: &str) -> String {
    message.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            eprintln!(
                "{}",
                one_line(rendered.lines().next().unwrap_or("invalid arguments"))
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let mut message = e.to_string();
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                message.push_str(": ");
                message.push_str(&s.to_string());
                source = s.source();
            }
            eprintln!("error: {}", one_line(&message));
            ExitCode::FAILURE
        }
    }
}
