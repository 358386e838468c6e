//! `rotgpe evolve`: integrate the time-dependent equation and log observables.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rotgpe_core::{seed_field, ComplexField, CoreError, CoreResult, SeedKind};

use crate::config::{load_config, RunConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::write_manifest;

pub struct EvolveArgs {
    pub config: PathBuf,
    /// Trajectory CSV path; defaults to `<out_dir>/trajectory.csv`.
    pub out: Option<PathBuf>,
    /// State dump to resume from instead of a fresh seed.
    pub init: Option<PathBuf>,
    /// Dump the state every this many logged records.
    pub dump_every: Option<usize>,
    pub dump_dir: Option<PathBuf>,
}

pub fn run(args: &EvolveArgs, threads: usize) -> CliResult<()> {
    let cfg = load_config(&args.config)?;
    let Some(evolve_cfg) = cfg.evolve.clone() else {
        return Err(CliError::Config(
            "evolve needs an [evolve] section (t_end at minimum)".into(),
        ));
    };
    if args.dump_dir.is_some() && args.dump_every.is_none() {
        return Err(CliError::Config(
            "--dump-dir has no effect without --dump-every".into(),
        ));
    }
    if args.dump_every == Some(0) {
        return Err(CliError::Config("--dump-every must be at least 1".into()));
    }

    let f0 = initial_state(&cfg, args.init.as_deref())?;
    let out_path = super::product_path(&cfg.out_dir, args.out.as_ref(), "trajectory.csv");

    let traj = match args.dump_every {
        None => rotgpe_core::evolve::evolve(&f0, &cfg.params, &evolve_cfg)?,
        Some(every) => {
            let dump_dir = args
                .dump_dir
                .clone()
                .unwrap_or_else(|| cfg.out_dir.join("dumps"));
            fs::create_dir_all(&dump_dir).map_err(CliError::io(&dump_dir))?;
            let mut record_index = 0usize;
            // Io failures cross the core callback boundary stripped of their
            // path; remember it here and reattach when reporting.
            let mut failed_dump: Option<PathBuf> = None;
            let result = rotgpe_core::evolve::evolve_with_callback(
                &f0,
                &cfg.params,
                &evolve_cfg,
                |step, state| {
                    if record_index % every == 0 {
                        let path = dump_dir.join(format!("state_{step:07}.rotgpe"));
                        if let Err(e) = dump_state(state, &path) {
                            failed_dump = Some(path);
                            return Err(e);
                        }
                    }
                    record_index += 1;
                    Ok(())
                },
            );
            let traj = match (result, failed_dump) {
                (Err(CoreError::Io(source)), Some(path)) => {
                    return Err(CliError::Io { path, source })
                }
                (other, _) => other?,
            };
            write_state(&traj.final_state, &dump_dir.join("state_final.rotgpe"))?;
            traj
        }
    };

    super::write_text(&out_path, &traj.csv())?;

    let mut extras = vec![("threads", threads.to_string())];
    extras.push(("trajectory", out_path.display().to_string()));
    if let Some(init) = &args.init {
        extras.push(("init", init.display().to_string()));
    }
    if let Some(every) = args.dump_every {
        extras.push(("dump_every", every.to_string()));
    }
    write_manifest(&cfg, "evolve", &extras)?;

    let last = traj
        .records
        .last()
        .expect("a trajectory always logs its initial record");
    println!(
        "evolve: {} records to {}; at t = {}: mass = {:.12}, energy = {:.12}",
        traj.records.len(),
        out_path.display(),
        last.t,
        last.mass,
        last.energy,
    );
    Ok(())
}

/// Initial datum: a state dump when `--init` is given, otherwise the seed
/// from `[flow]` (default Gaussian) normalized to the mass constraint.
pub fn initial_state(cfg: &RunConfig, init: Option<&Path>) -> CliResult<ComplexField> {
    match init {
        Some(path) => {
            let file = File::open(path).map_err(CliError::io(path))?;
            let f = ComplexField::load(&mut BufReader::new(file))?;
            let g = f.grid();
            if g.n() != cfg.grid.n() || g.half_width() != cfg.grid.half_width() {
                return Err(CliError::Config(format!(
                    "initial state grid (n = {}, half_width = {}) does not match \
                     [grid] (n = {}, half_width = {})",
                    g.n(),
                    g.half_width(),
                    cfg.grid.n(),
                    cfg.grid.half_width()
                )));
            }
            Ok(f)
        }
        None => {
            let kind = cfg
                .flow
                .as_ref()
                .map(|f| f.seed)
                .unwrap_or(SeedKind::Gaussian(0.5));
            Ok(seed_field(&cfg.grid, &cfg.params, kind)?)
        }
    }
}

fn dump_state(state: &ComplexField, path: &Path) -> CoreResult<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    state.dump(&mut writer)?;
    writer.flush()?;
    Ok(())
}

fn write_state(state: &ComplexField, path: &Path) -> CliResult<()> {
    match dump_state(state, path) {
        Err(CoreError::Io(source)) => Err(CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        other => Ok(other?),
    }
}
