//! `rotgpe stability`: evolve a perturbed ground state and track its distance
//! to the minimizer's phase orbit.

use std::path::PathBuf;

use rotgpe_core::stability_probe;

use crate::config::load_config;
use crate::error::{CliError, CliResult};
use crate::manifest::write_manifest;

pub struct StabilityArgs {
    pub config: PathBuf,
    /// Relative size of the initial perturbation.
    pub delta: f64,
    pub t_end: f64,
    /// Trace CSV path; defaults to `<out_dir>/stability.csv`.
    pub out: Option<PathBuf>,
}

pub fn run(args: &StabilityArgs, threads: usize) -> CliResult<()> {
    let cfg = load_config(&args.config)?;
    let Some(flow) = cfg.flow.clone() else {
        return Err(CliError::Config(
            "stability needs a [flow] section (an empty one selects the defaults)".into(),
        ));
    };

    let probe = stability_probe(cfg.grid.clone(), &cfg.params, &flow, args.delta, args.t_end)?;

    let out_path = super::product_path(&cfg.out_dir, args.out.as_ref(), "stability.csv");
    let mut csv = String::from("t,distance\n");
    for (t, d) in &probe.trace {
        csv.push_str(&format!("{t},{d}\n"));
    }
    super::write_text(&out_path, &csv)?;

    let extras = vec![
        ("threads", threads.to_string()),
        ("delta", args.delta.to_string()),
        ("t_end", args.t_end.to_string()),
        ("trace_csv", out_path.display().to_string()),
    ];
    write_manifest(&cfg, "stability", &extras)?;

    println!(
        "stability: sup orbit distance {:.6e} over t <= {} (delta = {}, ground residual {:.3e}); \
         trace to {}",
        probe.sup_distance,
        args.t_end,
        args.delta,
        probe.ground_residual,
        out_path.display(),
    );
    Ok(())
}
