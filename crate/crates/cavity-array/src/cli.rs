//! Command-line front end. A thin shell over the library: every file it
//! writes is the rendering of exactly one library call.
//!
//! Exit codes are stable API: 0 success, 2 bad configuration or
//! request, 3 unwritable output, 4 numerical blow-up, 5 missing branch.
//! Worker count is controlled by the `RAYON_NUM_THREADS` environment
//! variable; results are byte-identical at any setting.

use clap::{Parser, Subcommand, ValueEnum};
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::config::{OutputFormat, RunConfig};
use crate::dynamics::{initial_all_in_site, initial_vacuum, integrate, AtomState, Convention};
use crate::io;
use crate::model::SignConvention;
use crate::scatter::{transmission_roots, DispersionMode};
use crate::stability::{build_heff, stability_spectrum, stationary_background, STABILITY_TOL_DEFAULT};
use crate::sweep::{sweep1d, sweep2d, sweep_stability_default, Axis, AxisName};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_BLOWUP: i32 = 4;
pub const EXIT_NO_BRANCH: i32 = 5;

const DEFAULT_SPECTRUM_STEPS: usize = 500;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: msg.into() }
    }
    fn io(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_IO, message: msg.into() }
    }
    fn blowup(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_BLOWUP, message: msg.into() }
    }
    fn no_branch(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_NO_BRANCH, message: msg.into() }
    }
}

fn cfg_err(e: Error) -> CliError {
    CliError::config(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    FixedIntensity,
    SelfConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignArg {
    Eq8,
    Eq9,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Conjugate,
    Verbatim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AtomArg {
    Excited,
    Ground,
}

#[derive(Debug, Parser)]
#[command(name = "cavity-array", version, about = "Photon transport in a Kerr-nonlinear cavity array with an embedded two-level system")]
pub struct Cli {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Dispersion closure for the scattering solver.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Fixed intensity for --mode fixed-intensity.
    #[arg(long, global = true)]
    i0: Option<f64>,
    /// Detuning sign convention.
    #[arg(long, global = true, value_enum)]
    sign: Option<SignArg>,
    /// Atomic-equation closure for the integrator.
    #[arg(long, global = true, value_enum)]
    convention: Option<ConventionArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmission roots over a momentum axis.
    Spectrum {
        /// Momentum axis as start:stop:steps (accepts a pi suffix,
        /// e.g. 0.002pi:0.998pi:500). Defaults to 500 interior points.
        #[arg(long)]
        axis: Option<String>,
        /// Attach a stability report to every valid root.
        #[arg(long)]
        stability: bool,
    },
    /// Transmission roots over a two-parameter grid.
    Sweep2d {
        /// Outer axis as name:start:stop:steps with name in
        /// {k, g, J, xi, omega, Omega}.
        #[arg(long = "axis-a")]
        axis_a: String,
        /// Inner axis, same syntax.
        #[arg(long = "axis-b")]
        axis_b: String,
        /// Attach a stability report to every valid root.
        #[arg(long)]
        stability: bool,
    },
    /// Integrate the mean-field equations of motion.
    Dynamics {
        /// Site initially holding the whole field (default -1).
        #[arg(long, allow_hyphen_values = true)]
        site: Option<i64>,
        /// Initial atomic state (default excited).
        #[arg(long, value_enum)]
        atom: Option<AtomArg>,
        /// Start from the empty field instead of a filled site.
        #[arg(long)]
        vacuum: bool,
        /// Photon count M for the observable rescaling.
        #[arg(long)]
        photons: Option<f64>,
        /// Override the configured final time.
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        /// Override the configured step (rk4) or tolerance (rk45).
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Stability spectrum of one scattering branch.
    Stability {
        /// Momentum of the background (default: config k, then pi/2).
        #[arg(long)]
        k: Option<f64>,
        /// Branch index at that momentum (default 0).
        #[arg(long)]
        branch: Option<usize>,
    },
}

/// Plain float or a multiple of pi ("pi", "-pi", "0.5pi").
fn parse_real(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    if let Some(head) = t.strip_suffix("pi") {
        let factor = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("cannot parse {t:?} as a number")))?,
        };
        return Ok(factor * PI);
    }
    t.parse::<f64>()
        .map_err(|_| CliError::config(format!("cannot parse {t:?} as a number")))
}

fn parse_span(name: AxisName, s: &str) -> Result<Axis, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::config(format!("axis {s:?} must be start:stop:steps")));
    }
    let start = parse_real(parts[0])?;
    let stop = parse_real(parts[1])?;
    let steps: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("cannot parse step count {:?}", parts[2])))?;
    Axis::new(name, start, stop, steps).map_err(cfg_err)
}

fn parse_named_axis(s: &str) -> Result<Axis, CliError> {
    let (name, rest) = s
        .split_once(':')
        .ok_or_else(|| CliError::config(format!("axis {s:?} must be name:start:stop:steps")))?;
    let name: AxisName = name.trim().parse().map_err(cfg_err)?;
    parse_span(name, rest)
}

fn default_spectrum_axis() -> Axis {
    let n = DEFAULT_SPECTRUM_STEPS;
    let start = PI / (n + 1) as f64;
    let stop = n as f64 * PI / (n + 1) as f64;
    Axis::new(AxisName::K, start, stop, n).expect("default axis is valid")
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(cfg_err)?,
        None => RunConfig::default(),
    };

    if let Some(mode) = cli.mode {
        config.scatter.dispersion_mode = match mode {
            ModeArg::SelfConsistent => DispersionMode::SelfConsistent,
            ModeArg::FixedIntensity => {
                let i0 = match config.scatter.dispersion_mode {
                    DispersionMode::FixedIntensity { i0 } => i0,
                    DispersionMode::SelfConsistent => 1.0,
                };
                DispersionMode::FixedIntensity { i0 }
            }
        };
    }
    if let Some(i0) = cli.i0 {
        match &mut config.scatter.dispersion_mode {
            DispersionMode::FixedIntensity { i0: slot } => *slot = i0,
            DispersionMode::SelfConsistent => {
                return Err(CliError::config("--i0 applies only to --mode fixed-intensity"));
            }
        }
    }
    if let Some(sign) = cli.sign {
        config.scatter.sign_convention = match sign {
            SignArg::Eq8 => SignConvention::Eq8,
            SignArg::Eq9 => SignConvention::Eq9,
        };
    }
    if let Some(conv) = cli.convention {
        config.dyn_opts.convention = match conv {
            ConventionArg::Conjugate => Convention::ConjugateConsistent,
            ConventionArg::Verbatim => Convention::VerbatimEq4,
        };
    }
    if let Some(format) = cli.format {
        config.format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    if let Some(out) = &cli.out {
        config.output_path = Some(out.clone());
    }
    config.validate().map_err(cfg_err)?;
    Ok(config)
}

fn resolve_out(config: &RunConfig, stem: &str) -> PathBuf {
    config
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.{}", config.format.extension())))
}

fn write_out(path: &PathBuf, content: &str) -> Result<(), CliError> {
    io::write_file(path, content).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn base_k(config: &RunConfig) -> f64 {
    config.k.unwrap_or(PI / 2.0)
}

pub fn run(cli: Cli) -> Result<String, CliError> {
    let config = load_config(&cli)?;
    match &cli.command {
        Command::Spectrum { axis, stability } => {
            let axis = match axis {
                Some(text) => parse_span(AxisName::K, text)?,
                None => default_spectrum_axis(),
            };
            let mut grid = sweep1d(&config.params, base_k(&config), &axis, &config.scatter).map_err(cfg_err)?;
            if *stability {
                grid = sweep_stability_default(grid)
                    .map_err(|e| CliError::blowup(format!("stability pass failed: {e}")))?;
            }
            let content = match config.format {
                OutputFormat::Csv => io::render_sweep_csv(&grid),
                OutputFormat::Json => io::render_sweep_json(&grid),
            };
            let path = resolve_out(&config, "spectrum");
            write_out(&path, &content)?;
            Ok(format!("wrote {} ({} cells)", path.display(), grid.cells.len()))
        }
        Command::Sweep2d { axis_a, axis_b, stability } => {
            let a = parse_named_axis(axis_a)?;
            let b = parse_named_axis(axis_b)?;
            let mut grid = sweep2d(&config.params, base_k(&config), &a, &b, &config.scatter).map_err(cfg_err)?;
            if *stability {
                grid = sweep_stability_default(grid)
                    .map_err(|e| CliError::blowup(format!("stability pass failed: {e}")))?;
            }
            let content = match config.format {
                OutputFormat::Csv => io::render_sweep_csv(&grid),
                OutputFormat::Json => io::render_sweep_json(&grid),
            };
            let path = resolve_out(&config, "sweep2d");
            write_out(&path, &content)?;
            Ok(format!("wrote {} ({} cells)", path.display(), grid.cells.len()))
        }
        Command::Dynamics { site, atom, vacuum, photons, t_end, dt } => {
            let mut opts = config.dyn_opts;
            if let Some(m) = photons {
                opts.photons = *m;
            }
            if let Some(t) = t_end {
                opts.t_end = *t;
            }
            if let Some(h) = dt {
                opts.dt = *h;
            }
            opts.validate().map_err(cfg_err)?;
            let atom = match atom.unwrap_or(AtomArg::Excited) {
                AtomArg::Excited => AtomState::Excited,
                AtomArg::Ground => AtomState::Ground,
            };
            let initial = if *vacuum {
                initial_vacuum(atom, config.params.half_len)
            } else {
                initial_all_in_site(site.unwrap_or(-1), atom, config.params.half_len).map_err(cfg_err)?
            };
            let path = resolve_out(&config, "dynamics");
            match integrate(&initial, &config.params, &opts) {
                Ok(traj) => {
                    let content = match config.format {
                        OutputFormat::Csv => io::render_trajectory_csv(&traj, &config.params, &opts),
                        OutputFormat::Json => io::render_trajectory_json(&traj, &config.params, &opts),
                    };
                    write_out(&path, &content)?;
                    Ok(format!("wrote {} ({} samples)", path.display(), traj.samples.len()))
                }
                Err(Error::NonFinite { t, partial }) => {
                    // Flush everything recorded before the blow-up so the
                    // run is inspectable, then report failure.
                    let content = match config.format {
                        OutputFormat::Csv => io::render_trajectory_csv(&partial, &config.params, &opts),
                        OutputFormat::Json => io::render_trajectory_json(&partial, &config.params, &opts),
                    };
                    write_out(&path, &content)?;
                    let n = partial.samples.len();
                    let noun = if n == 1 { "sample" } else { "samples" };
                    Err(CliError::blowup(format!(
                        "state became non-finite at t = {t}; {n} finite {noun} flushed to {}",
                        path.display()
                    )))
                }
                Err(e @ Error::StepUnderflow { .. }) => Err(CliError::blowup(e.to_string())),
                Err(e) => Err(cfg_err(e)),
            }
        }
        Command::Stability { k, branch } => {
            let k = k.or(config.k).unwrap_or(PI / 2.0);
            let branch = branch.unwrap_or(0);
            let roots = transmission_roots(&config.params, k, &config.scatter).map_err(cfg_err)?;
            let root = roots.iter().find(|r| r.branch == branch).ok_or_else(|| {
                CliError::no_branch(format!(
                    "branch {branch} does not exist: {} valid branches at k = {k}",
                    roots.len()
                ))
            })?;
            let background = stationary_background(&config.params, k, root, &config.scatter).map_err(cfg_err)?;
            let matrix = build_heff(&background, &config.params).map_err(cfg_err)?;
            let report = stability_spectrum(&matrix, STABILITY_TOL_DEFAULT)
                .map_err(|e| CliError::blowup(e.to_string()))?;
            let content = io::render_stability_json(&report, &config.params, &config.scatter, k, branch);
            let path = resolve_out(&config, "stability");
            write_out(&path, &content)?;
            Ok(format!(
                "wrote {} (dim {}, max_im {:.3e}, {})",
                path.display(),
                report.dim,
                report.max_im,
                if report.stable { "stable" } else { "unstable" }
            ))
        }
    }
}

/// Entry point for the binary: parse, run, map errors to exit codes.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(message) => {
            println!("{message}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
