//! Command-line front end for the thermal-subsystem engine.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical
//! precondition failure. Thread count comes from `--threads`, the
//! config file, or the `SUBTHERM_THREADS` environment variable.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_kv, parse_range, resolve_model, FileConfig};
use output::OutputSet;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(PathBuf, std::io::Error),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(..) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(path, e) => write!(f, "io error at {}: {e}", path.display()),
            CliError::Numerical(msg) => write!(f, "numerical precondition failure: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "subtherm",
    about = "Thermal reduced density matrices of lower-dimensional subsystems of gapped Dirac fermion ground states",
    version
)]
struct Cli {
    /// JSON configuration document; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: out/<command>)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Artifact kinds to write: csv, svg, json (default all)
    #[arg(long, global = true, value_delimiter = ',')]
    formats: Option<Vec<String>>,
    /// Worker thread count (also SUBTHERM_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Effective subsystem Hamiltonian records over a kept-axis grid
    Esh {
        /// Model name: qwz | qh4d | wti | continuum_dirac
        #[arg(long)]
        model: Option<String>,
        /// Model parameter, e.g. --param m=1.4 (repeatable)
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
        /// Kept axis
        #[arg(long, default_value_t = 0)]
        axis: usize,
        #[arg(long)]
        kept_points: Option<usize>,
        #[arg(long)]
        transverse_points: Option<usize>,
    },
    /// Correlation spectrum ξ(k) with ESH energies and occupations
    CorrSpectrum {
        #[arg(long)]
        model: Option<String>,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
        #[arg(long, default_value_t = 0)]
        axis: usize,
        #[arg(long)]
        kept_points: Option<usize>,
        #[arg(long)]
        transverse_points: Option<usize>,
    },
    /// ΔN²(m) of a QWZ chain subsystem, with the constant-mean-T curve
    VarianceScan {
        #[arg(long)]
        model: Option<String>,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
        /// Mass sweep start:stop:step
        #[arg(long, allow_hyphen_values = true)]
        m: Option<String>,
        #[arg(long)]
        chain: Option<usize>,
        #[arg(long)]
        transverse_points: Option<usize>,
        /// Diagonalize the finite lattice from the config `geometry`
        /// section instead of the momentum-space chain
        #[arg(long)]
        lattice: bool,
    },
    /// ℤ invariants ν_d(m) of the 4D model's descendants (0 = mass sign)
    Topo {
        /// Comma-separated dimensions, e.g. 0,1,2,3,4
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Mass sweep start:stop:step
        #[arg(long, allow_hyphen_values = true)]
        m: Option<String>,
    },
    /// Weak indices and window spectra of the SSH stack
    Wti {
        #[arg(long, default_value_t = 1.0)]
        t_x: f64,
        #[arg(long, default_value_t = 4.0)]
        t_x_prime: f64,
        #[arg(long, default_value_t = 1.0)]
        t_y: f64,
        #[arg(long, default_value_t = 60)]
        ring: usize,
        #[arg(long, default_value_t = 30)]
        window: usize,
    },
    /// Time-dependent correlation operator distance to the thermal form
    TimeCorr {
        #[arg(long)]
        model: Option<String>,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
        #[arg(long, default_value_t = 0)]
        axis: usize,
        /// Subsystem momentum
        #[arg(long, default_value_t = 0.9)]
        k: f64,
        #[arg(long, default_value_t = 20.0)]
        t_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long)]
        transverse_points: Option<usize>,
    },
    /// Mass shift and entanglement temperature curves (QWZ)
    Fig2,
    /// Correlation spectra against constant-temperature Fermi-Dirac fits
    Fig3,
    /// Invariants ν_d(m) for d = 1..4
    Fig4 {
        #[arg(long, default_value_t = 0.1)]
        m_step: f64,
    },
    /// Spectra and particle-number variances of QWZ subsystems
    Fig5 {
        /// Restrict to one panel: a..f
        #[arg(long)]
        panel: Option<String>,
    },
    /// Window spectra of the SSH stack across its phase diagram
    Fig6,
    /// Deterministic invariant suite
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Esh { .. } => "esh",
            Command::CorrSpectrum { .. } => "corr-spectrum",
            Command::VarianceScan { .. } => "variance-scan",
            Command::Topo { .. } => "topo",
            Command::Wti { .. } => "wti",
            Command::TimeCorr { .. } => "time-corr",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 { .. } => "fig4",
            Command::Fig5 { .. } => "fig5",
            Command::Fig6 => "fig6",
            Command::Selftest => "selftest",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_ref())?;

    let threads = cli.threads.or(file.threads).or_else(|| {
        std::env::var("SUBTHERM_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }

    if matches!(cli.command, Command::Selftest) {
        return commands::cmd_selftest();
    }

    let name = cli.command.name();
    let out_dir = cli
        .out_dir
        .or_else(|| file.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(name));
    let formats = config::resolve_formats(&file, cli.formats.as_ref())?;
    let mut out = OutputSet::new(&out_dir, formats)?;

    let inputs = match &cli.command {
        Command::Esh {
            model,
            params,
            axis,
            kept_points,
            transverse_points,
        } => {
            let model = resolve_model(&file, model.as_deref(), params)?;
            let kept = kept_points.or(file.kept_points).unwrap_or(64);
            let transverse = transverse_points.or(file.transverse_points);
            commands::cmd_esh(&mut out, &model, *axis, kept, transverse)?
        }
        Command::CorrSpectrum {
            model,
            params,
            axis,
            kept_points,
            transverse_points,
        } => {
            let model = resolve_model(&file, model.as_deref(), params)?;
            let kept = kept_points.or(file.kept_points).unwrap_or(64);
            let transverse = transverse_points.or(file.transverse_points);
            commands::cmd_corr_spectrum(&mut out, &model, *axis, kept, transverse)?
        }
        Command::VarianceScan {
            model,
            params,
            m,
            chain,
            transverse_points,
            lattice,
        } => {
            let model = if model.is_some() || file.model.is_some() {
                resolve_model(&file, model.as_deref(), params)?
            } else {
                resolve_model(&file, Some("qwz"), params)?
            };
            let range = parse_range(
                m.as_deref()
                    .or(file.m_range.as_deref())
                    .unwrap_or("-3:3:0.05"),
            )?;
            if *lattice {
                let geom = file.geometry()?.ok_or_else(|| {
                    CliError::Config(
                        "--lattice needs a `geometry` section in the config document".into(),
                    )
                })?;
                commands::cmd_variance_scan_lattice(&mut out, &model, range, &geom)?
            } else {
                let chain = chain.or(file.chain_length).unwrap_or(64);
                let transverse = transverse_points.or(file.transverse_points).unwrap_or(512);
                commands::cmd_variance_scan(&mut out, &model, range, chain, transverse)?
            }
        }
        Command::Topo { dims, m } => {
            let dims = dims
                .clone()
                .or_else(|| file.dims.clone())
                .unwrap_or(vec![1, 2, 3, 4]);
            for &d in &dims {
                if d > 4 {
                    return Err(CliError::Config(format!(
                        "dimension {d} out of range 0..=4"
                    )));
                }
            }
            let range = parse_range(
                m.as_deref()
                    .or(file.m_range.as_deref())
                    .unwrap_or("-5:5:0.05"),
            )?;
            commands::cmd_topo(&mut out, &dims, range)?
        }
        Command::Wti {
            t_x,
            t_x_prime,
            t_y,
            ring,
            window,
        } => {
            if window > ring {
                return Err(CliError::Config(format!(
                    "window {window} exceeds ring {ring}"
                )));
            }
            commands::cmd_wti(&mut out, *t_x, *t_x_prime, *t_y, *ring, *window)?
        }
        Command::TimeCorr {
            model,
            params,
            axis,
            k,
            t_max,
            steps,
            transverse_points,
        } => {
            let model = if model.is_some() || file.model.is_some() {
                resolve_model(&file, model.as_deref(), params)?
            } else {
                resolve_model(&file, Some("qwz"), params)?
            };
            let transverse = transverse_points.or(file.transverse_points);
            commands::cmd_time_corr(&mut out, &model, *axis, *k, *t_max, *steps, transverse)?
        }
        Command::Fig2 => commands::cmd_fig2(&mut out)?,
        Command::Fig3 => commands::cmd_fig3(&mut out)?,
        Command::Fig4 { m_step } => {
            if *m_step <= 0.0 {
                return Err(CliError::Config("m_step must be positive".into()));
            }
            commands::cmd_fig4(&mut out, *m_step)?
        }
        Command::Fig5 { panel } => {
            if let Some(p) = panel {
                if !["a", "b", "c", "d", "e", "f"].contains(&p.as_str()) {
                    return Err(CliError::Config(format!("unknown panel `{p}`")));
                }
            }
            commands::cmd_fig5(&mut out, panel.as_deref())?
        }
        Command::Fig6 => commands::cmd_fig6(&mut out)?,
        Command::Selftest => unreachable!("handled above"),
    };
    commands::finish(out, name, inputs)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's help/version on stdout with success status
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
