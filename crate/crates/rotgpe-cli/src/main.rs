//! `rotgpe`: a command-line laboratory for the planar rotating
//! Gross-Pitaevskii equation with logarithmic nonlinearity and optional
//! three-body damping.
//!
//! Every run is driven by an INI configuration (see [`config`]) and leaves a
//! re-parseable `manifest.txt` next to its products, so results stay
//! reproducible from the run directory alone.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;

use clap::{value_parser, Arg, ArgMatches, Command};

use error::{CliError, CliResult};

fn config_arg() -> Arg {
    Arg::new("config")
        .long("config")
        .value_name("PATH")
        .value_parser(value_parser!(PathBuf))
        .required(true)
        .help("Run configuration (INI format)")
}

fn out_arg(help: &'static str) -> Arg {
    Arg::new("out")
        .long("out")
        .value_name("PATH")
        .value_parser(value_parser!(PathBuf))
        .help(help)
}

fn cli() -> Command {
    Command::new("rotgpe")
        .version(env!("CARGO_PKG_VERSION"))
        .about(
            "Laboratory for the planar rotating Gross-Pitaevskii equation \
             with logarithmic nonlinearity",
        )
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(
            Command::new("evolve")
                .about("Integrate the time-dependent equation and log observables")
                .arg(config_arg())
                .arg(out_arg("Trajectory CSV path (default: <out_dir>/trajectory.csv)"))
                .arg(
                    Arg::new("init")
                        .long("init")
                        .value_name("PATH")
                        .value_parser(value_parser!(PathBuf))
                        .help("Resume from a state dump instead of seeding fresh"),
                )
                .arg(
                    Arg::new("dump-every")
                        .long("dump-every")
                        .value_name("N")
                        .value_parser(value_parser!(usize))
                        .help("Dump the state every N logged records"),
                )
                .arg(
                    Arg::new("dump-dir")
                        .long("dump-dir")
                        .value_name("DIR")
                        .value_parser(value_parser!(PathBuf))
                        .help("Directory for state dumps (default: <out_dir>/dumps)"),
                ),
        )
        .subcommand(
            Command::new("decay")
                .about("Run a damped evolution and log the mass-decay curve")
                .arg(config_arg())
                .arg(out_arg("Decay CSV path (default: <out_dir>/decay.csv)")),
        )
        .subcommand(
            Command::new("minimize")
                .about("Solve the mass-constrained ground-state problem")
                .arg(config_arg())
                .arg(
                    Arg::new("regime")
                        .long("regime")
                        .value_name("REGIME")
                        .value_parser(["sub", "critical", "critical-radial"])
                        .required(true)
                        .help(
                            "Solver family: rotating-frame grid flow (sub), \
                             magnetic grid flow (critical), or the radial \
                             profile solver (critical-radial)",
                        ),
                )
                .arg(
                    Arg::new("rho")
                        .long("rho")
                        .value_name("MASS")
                        .value_parser(value_parser!(f64))
                        .help("Override the mass constraint from [params]"),
                )
                .arg(
                    Arg::new("seed")
                        .long("seed")
                        .value_name("SPEC")
                        .help(
                            "Override the flow seed: gaussian:<b>, vortex:<m>, \
                             random:<n>, or random",
                        ),
                )
                .arg(out_arg("Override [run] out_dir")),
        )
        .subcommand(
            Command::new("trial-sweep")
                .about("Tabulate vortex trial energies across winding numbers")
                .arg(config_arg())
                .arg(
                    Arg::new("m-max")
                        .long("m-max")
                        .value_name("M")
                        .value_parser(value_parser!(usize))
                        .default_value("20")
                        .help("Largest winding number in the sweep"),
                )
                .arg(out_arg("Curve CSV path (default: <out_dir>/trials.csv)")),
        )
        .subcommand(
            Command::new("stability")
                .about("Evolve a perturbed ground state and track its orbit distance")
                .arg(config_arg())
                .arg(
                    Arg::new("delta")
                        .long("delta")
                        .value_name("SIZE")
                        .value_parser(value_parser!(f64))
                        .default_value("0.001")
                        .help("Relative size of the initial perturbation"),
                )
                .arg(
                    Arg::new("t-end")
                        .long("t-end")
                        .value_name("T")
                        .value_parser(value_parser!(f64))
                        .default_value("10")
                        .help("Evolution horizon"),
                )
                .arg(out_arg("Trace CSV path (default: <out_dir>/stability.csv)")),
        )
        .subcommand(
            Command::new("verify")
                .about("Check closed forms, thresholds, and inequalities against independent routes")
                .arg(
                    Arg::new("filter")
                        .long("filter")
                        .value_name("SUBSTR")
                        .help("Run only checks whose name contains this substring"),
                ),
        )
}

/// Thread cap from `ROTGPE_THREADS`: absent means 1, anything else must be an
/// integer >= 1. The compute kernels are single-threaded today, so a larger
/// cap only earns a note.
// TODO: honor the cap in the spectral transforms once a parallel FFT path
// exists; the manifest already records the requested value.
fn thread_cap() -> CliResult<usize> {
    let Ok(raw) = std::env::var("ROTGPE_THREADS") else {
        return Ok(1);
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => {
            if n > 1 {
                eprintln!(
                    "note: compute kernels are single-threaded; \
                     ROTGPE_THREADS={n} is recorded but changes nothing yet"
                );
            }
            Ok(n)
        }
        _ => Err(CliError::Config(format!(
            "ROTGPE_THREADS must be an integer >= 1, got '{raw}'"
        ))),
    }
}

fn config_path(m: &ArgMatches) -> PathBuf {
    m.get_one::<PathBuf>("config")
        .expect("--config is required")
        .clone()
}

fn run() -> CliResult<()> {
    let matches = cli().get_matches();
    let threads = thread_cap()?;
    match matches.subcommand() {
        Some(("evolve", m)) => commands::evolve::run(
            &commands::evolve::EvolveArgs {
                config: config_path(m),
                out: m.get_one::<PathBuf>("out").cloned(),
                init: m.get_one::<PathBuf>("init").cloned(),
                dump_every: m.get_one::<usize>("dump-every").copied(),
                dump_dir: m.get_one::<PathBuf>("dump-dir").cloned(),
            },
            threads,
        ),
        Some(("decay", m)) => commands::decay::run(
            &commands::decay::DecayArgs {
                config: config_path(m),
                out: m.get_one::<PathBuf>("out").cloned(),
            },
            threads,
        ),
        Some(("minimize", m)) => commands::minimize::run(
            &commands::minimize::MinimizeArgs {
                config: config_path(m),
                regime: m.get_one::<String>("regime").expect("required").clone(),
                rho: m.get_one::<f64>("rho").copied(),
                seed: m.get_one::<String>("seed").cloned(),
                out: m.get_one::<PathBuf>("out").cloned(),
            },
            threads,
        ),
        Some(("trial-sweep", m)) => commands::trial_sweep::run(
            &commands::trial_sweep::TrialSweepArgs {
                config: config_path(m),
                m_max: *m.get_one::<usize>("m-max").expect("defaulted"),
                out: m.get_one::<PathBuf>("out").cloned(),
            },
            threads,
        ),
        Some(("stability", m)) => commands::stability::run(
            &commands::stability::StabilityArgs {
                config: config_path(m),
                delta: *m.get_one::<f64>("delta").expect("defaulted"),
                t_end: *m.get_one::<f64>("t-end").expect("defaulted"),
                out: m.get_one::<PathBuf>("out").cloned(),
            },
            threads,
        ),
        Some(("verify", m)) => commands::verify::run(
            &commands::verify::VerifyArgs {
                filter: m.get_one::<String>("filter").cloned(),
            },
            threads,
        ),
        _ => unreachable!("subcommand_required guarantees a match"),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
