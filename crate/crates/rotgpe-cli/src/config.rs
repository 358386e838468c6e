//! INI-style run configuration.
//!
//! A run is described by up to five sections; `[params]` is always required,
//! the rest depend on the subcommand:
//!
//! ```ini
//! [params]
//! gamma = 1.0        ; trap rate, > 0 (required)
//! rho = 1.0          ; mass constraint, > 0 (required)
//! gamma0 = 1.0       ; bump rate, defaults to gamma
//! v0 = 0.0           ; bump amplitude, >= 0
//! omega = 0.5        ; rotation speed, >= 0; the literal `critical`
//!                    ; sets omega = gamma exactly
//! k3 = 0.0           ; three-body loss rate, >= 0
//!
//! [grid]
//! half_width = 12    ; box is [-w, w)^2
//! n = 256            ; samples per axis, a power of two
//!
//! [evolve]
//! t_end = 5.0        ; required when the section is present
//! dt = 1e-3
//! log_every = 100
//!
//! [flow]
//! tau = 0.5
//! tol_energy = 1e-9
//! tol_residual = 1e-6
//! max_iter = 5000
//! seed = gaussian:0.5   ; or vortex:<m>, random:<u64>, random
//!
//! [run]
//! rng_seed = 0       ; used by `seed = random` without an explicit stream
//! out_dir = .
//! ```
//!
//! Lines starting with `;` or `#` are comments; inline comments are not
//! supported. Unknown sections and keys are errors, as are duplicates, each
//! reported with its line number.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rotgpe_core::{EvolveConfig, FlowConfig, GridSpec, Params, SeedKind};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Params,
    pub grid: GridSpec,
    pub evolve: Option<EvolveConfig>,
    pub flow: Option<FlowConfig>,
    pub rng_seed: u64,
    pub out_dir: PathBuf,
}

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(message) => CliError::Config(format!("{}: {message}", path.display())),
        other => other,
    })
}

pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let doc = split_sections(text)?;
    for section in doc.keys() {
        if !matches!(section.as_str(), "params" | "grid" | "evolve" | "flow" | "run") {
            let line = doc[section].line;
            return Err(CliError::Config(format!(
                "line {line}: unknown section [{section}]"
            )));
        }
    }

    let params = parse_params(doc.get("params"))?;
    let grid = parse_grid(doc.get("grid"))?;
    let evolve = doc.get("evolve").map(parse_evolve).transpose()?;
    let (rng_seed, out_dir) = parse_run(doc.get("run"))?;
    let flow = doc
        .get("flow")
        .map(|s| parse_flow(s, rng_seed))
        .transpose()?;

    Ok(RunConfig {
        params,
        grid,
        evolve,
        flow,
        rng_seed,
        out_dir,
    })
}

/// One parsed `[section]`: the header's line number and `key = value`
/// entries with theirs.
struct Section {
    line: usize,
    entries: BTreeMap<String, (String, usize)>,
}

impl Section {
    fn value_of(&self, key: &str) -> Option<(String, usize)> {
        self.entries.get(key).cloned()
    }

    /// Error on any key the caller did not consume.
    fn reject_unknown(&self, name: &str, known: &[&str]) -> CliResult<()> {
        for (key, (_, line)) in &self.entries {
            if !known.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "line {line}: unknown key '{key}' in [{name}]"
                )));
            }
        }
        Ok(())
    }
}

fn split_sections(text: &str) -> CliResult<BTreeMap<String, Section>> {
    let mut doc: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| {
                    CliError::Config(format!("line {line_no}: unterminated section header"))
                })?
                .trim()
                .to_string();
            if doc.contains_key(&name) {
                return Err(CliError::Config(format!(
                    "line {line_no}: section [{name}] appears twice"
                )));
            }
            doc.insert(
                name.clone(),
                Section {
                    line: line_no,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {line_no}: expected `key = value` or a [section] header, got '{line}'"
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let Some(section) = &current else {
            return Err(CliError::Config(format!(
                "line {line_no}: '{key}' appears before any [section] header"
            )));
        };
        let entries = &mut doc.get_mut(section).expect("section was inserted").entries;
        if entries.contains_key(&key) {
            return Err(CliError::Config(format!(
                "line {line_no}: duplicate key '{key}' in [{section}]"
            )));
        }
        entries.insert(key, (value, line_no));
    }
    Ok(doc)
}

fn parse_f64(key: &str, value: &str, line: usize) -> CliResult<f64> {
    value.parse::<f64>().map_err(|_| {
        CliError::Config(format!(
            "line {line}: {key} = {value} is not a valid number"
        ))
    })
}

fn parse_usize(key: &str, value: &str, line: usize) -> CliResult<usize> {
    value.parse::<usize>().map_err(|_| {
        CliError::Config(format!(
            "line {line}: {key} = {value} is not a valid nonnegative integer"
        ))
    })
}

fn require(section: &Section, name: &str, key: &str) -> CliResult<(String, usize)> {
    section.value_of(key).ok_or_else(|| {
        CliError::Config(format!(
            "[{name}] (line {}) is missing the required key '{key}'",
            section.line
        ))
    })
}

fn check(ok: bool, line: usize, key: &str, value: f64, constraint: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "line {line}: {key} = {value} {constraint}"
        )))
    }
}

fn parse_params(section: Option<&Section>) -> CliResult<Params> {
    let Some(section) = section else {
        return Err(CliError::Config(
            "the config has no [params] section".to_string(),
        ));
    };
    section.reject_unknown(
        "params",
        &["gamma", "gamma0", "v0", "omega", "k3", "rho"],
    )?;

    let (raw, line) = require(section, "params", "gamma")?;
    let gamma = parse_f64("gamma", &raw, line)?;
    check(
        gamma > 0.0 && gamma.is_finite(),
        line,
        "gamma",
        gamma,
        "must be finite and > 0",
    )?;

    let (raw, line) = require(section, "params", "rho")?;
    let rho = parse_f64("rho", &raw, line)?;
    check(
        rho > 0.0 && rho.is_finite(),
        line,
        "rho",
        rho,
        "must be finite and > 0",
    )?;

    let gamma0 = match section.value_of("gamma0") {
        Some((raw, line)) => {
            let v = parse_f64("gamma0", &raw, line)?;
            check(
                v > 0.0 && v.is_finite(),
                line,
                "gamma0",
                v,
                "must be finite and > 0",
            )?;
            v
        }
        None => gamma,
    };

    let v0 = match section.value_of("v0") {
        Some((raw, line)) => {
            let v = parse_f64("v0", &raw, line)?;
            check(
                v >= 0.0 && v.is_finite(),
                line,
                "v0",
                v,
                "must be finite and >= 0 (the bump amplitude is nonnegative)",
            )?;
            v
        }
        None => 0.0,
    };

    let k3 = match section.value_of("k3") {
        Some((raw, line)) => {
            let v = parse_f64("k3", &raw, line)?;
            check(
                v >= 0.0 && v.is_finite(),
                line,
                "k3",
                v,
                "must be finite and >= 0",
            )?;
            v
        }
        None => 0.0,
    };

    // The literal `critical` exists so the rotation speed can hit the trap
    // rate bit-exactly; regime classification compares with ==.
    let omega_rot = match section.value_of("omega") {
        Some((raw, line)) => {
            if raw == "critical" {
                gamma
            } else {
                let v = parse_f64("omega", &raw, line)?;
                check(
                    v >= 0.0 && v.is_finite(),
                    line,
                    "omega",
                    v,
                    "must be finite and >= 0, or the literal `critical`",
                )?;
                v
            }
        }
        None => 0.0,
    };

    let params = Params {
        gamma,
        gamma0,
        v0,
        omega_rot,
        k3,
        rho,
    };
    params.validate()?;
    Ok(params)
}

fn parse_grid(section: Option<&Section>) -> CliResult<GridSpec> {
    let (half_width, n) = match section {
        None => (12.0, 256),
        Some(section) => {
            section.reject_unknown("grid", &["half_width", "n"])?;
            let half_width = match section.value_of("half_width") {
                Some((raw, line)) => parse_f64("half_width", &raw, line)?,
                None => 12.0,
            };
            let n = match section.value_of("n") {
                Some((raw, line)) => parse_usize("n", &raw, line)?,
                None => 256,
            };
            (half_width, n)
        }
    };
    Ok(GridSpec::new(half_width, n)?)
}

fn parse_evolve(section: &Section) -> CliResult<EvolveConfig> {
    section.reject_unknown("evolve", &["dt", "t_end", "log_every"])?;
    let (raw, line) = require(section, "evolve", "t_end")?;
    let t_end = parse_f64("t_end", &raw, line)?;
    let dt = match section.value_of("dt") {
        Some((raw, line)) => parse_f64("dt", &raw, line)?,
        None => 1e-3,
    };
    let log_every = match section.value_of("log_every") {
        Some((raw, line)) => parse_usize("log_every", &raw, line)?,
        None => 100,
    };
    Ok(EvolveConfig::new(dt, t_end, log_every)?)
}

fn parse_flow(section: &Section, rng_seed: u64) -> CliResult<FlowConfig> {
    section.reject_unknown(
        "flow",
        &["tau", "tol_energy", "tol_residual", "max_iter", "seed"],
    )?;
    let mut cfg = FlowConfig::default();
    if let Some((raw, line)) = section.value_of("tau") {
        cfg.tau = parse_f64("tau", &raw, line)?;
    }
    if let Some((raw, line)) = section.value_of("tol_energy") {
        cfg.tol_energy = parse_f64("tol_energy", &raw, line)?;
    }
    if let Some((raw, line)) = section.value_of("tol_residual") {
        cfg.tol_residual = parse_f64("tol_residual", &raw, line)?;
    }
    if let Some((raw, line)) = section.value_of("max_iter") {
        cfg.max_iter = parse_usize("max_iter", &raw, line)?;
    }
    if let Some((raw, line)) = section.value_of("seed") {
        cfg.seed = parse_seed(&raw, rng_seed)
            .map_err(|m| CliError::Config(format!("line {line}: {m}")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_run(section: Option<&Section>) -> CliResult<(u64, PathBuf)> {
    let Some(section) = section else {
        return Ok((0, PathBuf::from(".")));
    };
    section.reject_unknown("run", &["rng_seed", "out_dir"])?;
    let rng_seed = match section.value_of("rng_seed") {
        Some((raw, line)) => raw.parse::<u64>().map_err(|_| {
            CliError::Config(format!(
                "line {line}: rng_seed = {raw} is not a valid u64"
            ))
        })?,
        None => 0,
    };
    let out_dir = match section.value_of("out_dir") {
        Some((raw, _)) => PathBuf::from(raw),
        None => PathBuf::from("."),
    };
    Ok((rng_seed, out_dir))
}

/// Seed specs: `gaussian:<b>`, `vortex:<m>`, `random:<u64>`, or bare
/// `random` to draw from the `[run] rng_seed` stream.
pub fn parse_seed(spec: &str, rng_seed: u64) -> Result<SeedKind, String> {
    if spec == "random" {
        return Ok(SeedKind::Random(rng_seed));
    }
    let Some((kind, arg)) = spec.split_once(':') else {
        return Err(format!(
            "seed spec '{spec}' is not gaussian:<b>, vortex:<m>, random:<seed>, or random"
        ));
    };
    match kind {
        "gaussian" => arg
            .parse::<f64>()
            .map(SeedKind::Gaussian)
            .map_err(|_| format!("gaussian seed width '{arg}' is not a number")),
        "vortex" => arg
            .parse::<usize>()
            .map(SeedKind::Vortex)
            .map_err(|_| format!("vortex winding '{arg}' is not a nonnegative integer")),
        "random" => arg
            .parse::<u64>()
            .map(SeedKind::Random)
            .map_err(|_| format!("random stream '{arg}' is not a u64")),
        other => Err(format!("unknown seed kind '{other}'")),
    }
}

/// Render a seed spec back to its config syntax.
pub fn seed_spec(seed: SeedKind) -> String {
    match seed {
        SeedKind::Gaussian(b) => format!("gaussian:{b}"),
        SeedKind::Vortex(m) => format!("vortex:{m}"),
        SeedKind::Random(s) => format!("random:{s}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rotgpe_core::Regime;

    const MINIMAL: &str = "[params]\ngamma = 1.0\nrho = 1.0\nomega = 0.5\n";

    #[test]
    fn minimal_config_defaults_everything_else() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.params.regime(), Regime::Subcritical);
        assert_eq!(cfg.params.gamma0, 1.0);
        assert_eq!(cfg.params.v0, 0.0);
        assert_eq!(cfg.grid.n(), 256);
        assert_eq!(cfg.grid.half_width(), 12.0);
        assert!(cfg.evolve.is_none());
        assert!(cfg.flow.is_none());
        assert_eq!(cfg.rng_seed, 0);
        assert_eq!(cfg.out_dir, PathBuf::from("."));
    }

    #[test]
    fn critical_keyword_hits_the_trap_rate_exactly() {
        let text = "[params]\ngamma = 0.30000000000000004\nrho = 1.0\nomega = critical\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.params.omega_rot, cfg.params.gamma);
        assert_eq!(cfg.params.regime(), Regime::Critical);
    }

    #[test]
    fn errors_carry_key_names_and_line_numbers() {
        let text = "[params]\ngamma = 1.0\nrho = 1.0\nv0 = -0.1\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
        assert!(err.contains("v0"), "{err}");

        let text = "[params]\ngamma = 1.0\nrho = 1.0\ngama = 2\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("unknown key 'gama'"), "{err}");
        assert!(err.contains("line 4"), "{err}");

        let text = "[params]\nrho = 1.0\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("missing the required key 'gamma'"), "{err}");
    }

    #[test]
    fn sections_reject_duplicates_and_strays() {
        let text = "[params]\ngamma = 1\ngamma = 2\nrho = 1\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("duplicate key 'gamma'"), "{err}");

        let text = "gamma = 1\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("before any [section]"), "{err}");

        let text = "[params]\ngamma = 1\nrho = 1\n[spectra]\nkind = full\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("unknown section [spectra]"), "{err}");
    }

    #[test]
    fn evolve_and_flow_sections_round_trip() {
        let text = "\
[params]
gamma = 1.0
rho = 2.0
k3 = 0.1

[grid]
half_width = 10
n = 128

[evolve]
t_end = 2.0
dt = 1e-2
log_every = 5

[flow]
tol_residual = 1e-5
seed = vortex:3

[run]
rng_seed = 7
out_dir = /tmp/sweep
";
        let cfg = parse_config(text).unwrap();
        let evolve = cfg.evolve.unwrap();
        assert_eq!(evolve.dt, 1e-2);
        assert_eq!(evolve.t_end, 2.0);
        assert_eq!(evolve.log_every, 5);
        let flow = cfg.flow.unwrap();
        assert_eq!(flow.tol_residual, 1e-5);
        assert!(matches!(flow.seed, SeedKind::Vortex(3)));
        assert_eq!(cfg.rng_seed, 7);
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/sweep"));
    }

    #[test]
    fn bare_random_seed_uses_the_run_stream() {
        let text = "\
[params]
gamma = 1.0
rho = 1.0

[flow]
seed = random

[run]
rng_seed = 99
";
        let cfg = parse_config(text).unwrap();
        assert!(matches!(cfg.flow.unwrap().seed, SeedKind::Random(99)));
    }
}
