mod commands;
mod document;
mod error;
mod output;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use layerstack::bragg::BraggMethod;
use layerstack::Polarization;

use commands::casimir::{Hold, Route};
use document::Source;
use error::{code, CliError};
use output::{Format, Table};
use sweep::{Axis, SweepSpec};

#[derive(Parser)]
#[command(
    name = "layerstack",
    version,
    about = "Generalized Fresnel coefficients, Bragg mirrors and Casimir forces of planar multilayers"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, global = true, default_value = "csv", value_parser = parse::<Format>)]
    format: Format,
    /// Relative quadrature tolerance (casimir), residual threshold (validate)
    /// or agreement bound (bragg --compare).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the random modes of `validate`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Reflection and transmission of a stack document over a sweep.
    ///
    /// Columns: the axis, then per polarization re/im of r and t for
    /// incidence from the left, R = |r|^2 and the transmittance T (NaN when
    /// an ambient absorbs or the wave is evanescent in it). Angle sweeps and
    /// --angle use k = Re n_left(omega) * (omega/c) * sin(theta).
    Reflect {
        stack: PathBuf,
        /// AXIS:MIN:MAX:POINTS[:lin|log] with AXIS wavelength (m),
        /// frequency (rad/s), angle (degrees) or k (1/m).
        #[arg(long, value_parser = parse::<SweepSpec>)]
        sweep: SweepSpec,
        /// p, s or both.
        #[arg(long, default_value = "both")]
        pol: String,
        /// Vacuum wavelength (m) for angle and k sweeps.
        #[arg(long)]
        wavelength: Option<f64>,
        /// Incidence angle (degrees) for wavelength and frequency sweeps; default 0.
        #[arg(long)]
        angle: Option<f64>,
        /// Transverse wavenumber (1/m) for wavelength and frequency sweeps.
        #[arg(long)]
        k: Option<f64>,
    },
    /// Normal-incidence reflection R_N of a quarter-wave Bragg segment.
    ///
    /// The segment is n1 | n2 n1 n2 ... n2 | n1 with N layers of index n2.
    Bragg {
        #[arg(long)]
        n1: f64,
        #[arg(long)]
        n2: f64,
        /// Design vacuum wavelength, m (used by the direct method).
        #[arg(long, default_value_t = 1e-6)]
        wavelength: f64,
        /// Single layer count.
        #[arg(long, conflicts_with = "sweep")]
        count: Option<usize>,
        /// N:MIN:MAX:POINTS[:lin|log]; values are rounded to integers.
        #[arg(long, value_parser = parse::<SweepSpec>)]
        sweep: Option<SweepSpec>,
        /// step, double, closed or direct.
        #[arg(long, default_value = "step", value_parser = parse::<BraggMethod>)]
        method: BraggMethod,
        /// Run all methods and report the largest pairwise deviation.
        #[arg(long)]
        compare: bool,
    },
    /// Casimir force on the slab of a cavity document (Pa, positive towards
    /// mirror 2), or between two mirrors when the document has no [slab].
    Casimir {
        cavity: PathBuf,
        /// separation:MIN:MAX:POINTS[:lin|log], sweeping d1 (m).
        #[arg(long, value_parser = parse::<SweepSpec>)]
        sweep: Option<SweepSpec>,
        /// direct, closed or both.
        #[arg(long, default_value = "direct", value_parser = parse::<Route>)]
        route: Route,
        /// Kept fixed while d1 is swept: total (d1 + d2) or d2.
        #[arg(long, default_value = "total", value_parser = parse::<Hold>)]
        hold: Hold,
    },
    /// Checks the coefficient identities of a stack at random modes.
    ///
    /// Exits 0 when every identity holds within the threshold, 1 otherwise.
    Validate {
        stack: PathBuf,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Sample imaginary frequencies xi instead of real omega.
        #[arg(long)]
        imaginary: bool,
        /// MIN:MAX range of omega (or xi), rad/s, sampled log-uniformly.
        #[arg(long, default_value = "6e14:6e15")]
        omega: String,
        /// k is drawn from [0, K_FRAC * Re n_left * omega/c).
        #[arg(long, default_value_t = 0.99)]
        k_frac: f64,
        /// Absolute upper bound for k (1/m), overriding --k-frac.
        #[arg(long)]
        k_max: Option<f64>,
    },
}

fn parse<T>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

fn pols(s: &str) -> Result<Vec<Polarization>, CliError> {
    match s {
        "p" => Ok(vec![Polarization::P]),
        "s" => Ok(vec![Polarization::S]),
        "both" => Ok(Polarization::BOTH.to_vec()),
        other => Err(CliError::usage(format!("unknown polarization `{other}` (p|s|both)"))),
    }
}

fn range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::usage(format!("range `{s}`: expected MIN:MAX"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn emit(table: &Table, format: Format) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    table.write(&mut out, format)?;
    out.flush()?;
    Ok(())
}

fn tolerance(global: &Global, default: f64) -> Result<f64, CliError> {
    match global.tolerance {
        None => Ok(default),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(CliError::usage(format!("--tolerance must be positive, got {t}"))),
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Reflect {
            stack,
            sweep,
            pol,
            wavelength,
            angle,
            k,
        } => {
            let stack = document::load_stack(&Source::read(&stack)?)?;
            let fixed = commands::reflect::Fixed { wavelength, angle, k };
            let table = commands::reflect::run(&stack, &sweep, &fixed, &pols(&pol)?)?;
            emit(&table, g.format)?;
            Ok(code::OK)
        }
        Command::Bragg {
            n1,
            n2,
            wavelength,
            count,
            sweep,
            method,
            compare,
        } => {
            let counts = match (count, sweep) {
                (Some(n), None) => vec![n],
                (None, Some(s)) if s.axis == Axis::Count => s.counts(),
                (None, Some(s)) => return Err(CliError::usage(format!("bragg sweeps N, not {}", s.axis))),
                _ => return Err(CliError::usage("give --count or --sweep N:MIN:MAX:POINTS")),
            };
            let params = commands::bragg::Params { n1, n2, wavelength };
            if compare {
                let bound = tolerance(g, 1e-10)?;
                let (table, worst) = commands::bragg::compare(&params, &counts, bound)?;
                emit(&table, g.format)?;
                eprintln!("max pairwise deviation {}", output::float(worst));
                Ok(if worst <= bound { code::OK } else { code::VALIDATION })
            } else {
                emit(&commands::bragg::run(&params, &counts, method)?, g.format)?;
                Ok(code::OK)
            }
        }
        Command::Casimir {
            cavity,
            sweep,
            route,
            hold,
        } => {
            let mut cavity = document::load_cavity(&Source::read(&cavity)?)?;
            if let Some(t) = g.tolerance {
                cavity.settings_mut().rel_tol = tolerance(g, t)?;
            }
            let run = commands::casimir::run(&cavity, sweep.as_ref(), route, hold)?;
            emit(&run.table, g.format)?;
            for note in &run.notes {
                eprintln!("{note}");
            }
            Ok(if run.notes.is_empty() {
                code::OK
            } else {
                code::CONVERGENCE
            })
        }
        Command::Validate {
            stack,
            samples,
            imaginary,
            omega,
            k_frac,
            k_max,
        } => {
            let stack = document::load_stack(&Source::read(&stack)?)?;
            let sampling = commands::validate::Sampling {
                samples,
                imaginary,
                omega: range(&omega)?,
                k_frac,
                k_max,
                seed: g.seed,
                threshold: tolerance(g, 1e-12)?,
            };
            let (table, ok, errors) = commands::validate::run(&stack, &sampling)?;
            emit(&table, g.format)?;
            for e in errors {
                eprintln!("evaluation failed at {e}");
            }
            Ok(if ok { code::OK } else { code::VALIDATION })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(code::PARSE as u8);
        }
    }
    match execute(cli) {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
