//! Plain-text key-value scenario configuration.
//!
//! Grammar (one entry per line):
//!
//! ```text
//! # comment — blank lines and everything after '#' are ignored
//! key = value
//! ```
//!
//! Keys and accepted values:
//!
//! | key           | value                                              | default    |
//! |---------------|----------------------------------------------------|------------|
//! | `name`        | run name (used for output file names)              | `run`      |
//! | `model`       | `dispersive-jc` \| `rabi` \| `jc`                  | required   |
//! | `omega`       | qubit frequency ω > 0                              | required   |
//! | `big_omega`   | boson frequency Ω > 0                              | required   |
//! | `g`           | coupling ≥ 0                                       | required   |
//! | `gamma`       | decay rate γ ≥ 0                                   | required   |
//! | `temperature` | bath temperature T ≥ 0 (exclusive with `nbar`)     | required*  |
//! | `nbar`        | bath occupation n̄ ≥ 0 (exclusive with `temperature`)| required* |
//! | `qubit`       | `excited` \| `ground` \| `plus` \| `bloch(x,y,z)`  | `excited`  |
//! | `boson`       | `thermal` \| `vacuum` \| `coherent(re[,im])`       | `thermal`  |
//! | `t_max`       | final time (model units, t > 0)                    | required   |
//! | `n_points`    | grid size ≥ 2                                      | `201`      |
//! | `log_time`    | `true` \| `false` (geometric grid 0,1,2,4,…)       | `false`    |
//! | `method`      | `analytic` \| `numeric` \| `both`                  | `both`     |
//! | `n_trunc`     | Fock truncation N ≥ 1                              | `12`       |
//! | `tol`         | integrator tolerance > 0                           | `1e-10`    |
//! | `observables` | comma-separated: `coherence_measure`, `photon_number`, `sigma_x`, `sigma_y`, `sigma_z`, `sminus_adag_abs2_over_g2` | required |
//!
//! All numeric values are decimal literals (`1.5`, `1e-9`). Unknown keys and
//! malformed values are reported with their line number.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use openrabi::lindblad::BosonInit;
use openrabi::params::{BathSpec, Model, PhysicalParams};
use openrabi::scenario::{Method, ObsKind, QubitInit, Scenario};

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(n) => write!(f, "config error at line {n}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

/// A parsed config: key → (value, source line). Later assignments win, so
/// `--set` overrides can be appended after file entries.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Option<usize>)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RawConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(Some(lineno), format!("expected `key = value`, got `{line}`")));
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(err(Some(lineno), "empty key"));
            }
            if value.is_empty() {
                return Err(err(Some(lineno), format!("empty value for key `{key}`")));
            }
            cfg.entries.insert(key.to_string(), (value.to_string(), Some(lineno)));
        }
        Ok(cfg)
    }

    /// Apply a `--set key=value` override (no source line).
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let Some((key, value)) = assignment.split_once('=') else {
            return Err(err(None, format!("--set expects key=value, got `{assignment}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(err(None, format!("--set expects key=value, got `{assignment}`")));
        }
        self.entries.insert(key.to_string(), (value.to_string(), None));
        Ok(())
    }

    fn take(&mut self, key: &str) -> Option<(String, Option<usize>)> {
        self.entries.remove(key)
    }

    pub fn into_scenario(mut self) -> Result<Scenario, ConfigError> {
        let name = self.take("name").map(|(v, _)| v).unwrap_or_else(|| "run".into());

        let require = |slot: Option<(String, Option<usize>)>, key: &str| {
            slot.ok_or_else(|| err(None, format!("missing required key `{key}`")))
        };
        let parse_f64 = |(v, line): (String, Option<usize>), key: &str| {
            v.parse::<f64>()
                .map_err(|_| err(line, format!("`{key}` must be a decimal literal, got `{v}`")))
        };
        let parse_usize = |(v, line): (String, Option<usize>), key: &str| {
            v.parse::<usize>()
                .map_err(|_| err(line, format!("`{key}` must be a nonnegative integer, got `{v}`")))
        };

        let model_slot = require(self.take("model"), "model")?;
        let model = match model_slot.0.as_str() {
            "dispersive-jc" => Model::DispersiveJC,
            "rabi" => Model::Rabi,
            "jc" => Model::JC,
            other => {
                return Err(err(
                    model_slot.1,
                    format!("unknown model `{other}` (expected dispersive-jc | rabi | jc)"),
                ));
            }
        };

        let omega = parse_f64(require(self.take("omega"), "omega")?, "omega")?;
        let big_omega = parse_f64(require(self.take("big_omega"), "big_omega")?, "big_omega")?;
        let g = parse_f64(require(self.take("g"), "g")?, "g")?;
        let gamma = parse_f64(require(self.take("gamma"), "gamma")?, "gamma")?;
        let bath = match (self.take("temperature"), self.take("nbar")) {
            (Some(t), None) => BathSpec::Temperature(parse_f64(t, "temperature")?),
            (None, Some(n)) => BathSpec::MeanOccupation(parse_f64(n, "nbar")?),
            (Some(_), Some((_, line))) => {
                return Err(err(line, "`temperature` and `nbar` are mutually exclusive"));
            }
            (None, None) => {
                return Err(err(None, "missing bath: set `temperature` or `nbar`"));
            }
        };
        let params = PhysicalParams::new(omega, big_omega, g, gamma, bath)
            .map_err(|e| err(None, e.to_string()))?;

        let qubit = match self.take("qubit") {
            None => QubitInit::Excited,
            Some((v, line)) => parse_qubit(&v, line)?,
        };
        let boson = match self.take("boson") {
            None => BosonInit::Thermal,
            Some((v, line)) => parse_boson(&v, line)?,
        };

        let t_max = parse_f64(require(self.take("t_max"), "t_max")?, "t_max")?;
        if !(t_max > 0.0) {
            return Err(err(None, format!("`t_max` must be positive, got {t_max}")));
        }
        let n_points = match self.take("n_points") {
            None => 201,
            Some(slot) => {
                let n = parse_usize(slot, "n_points")?;
                if n < 2 {
                    return Err(err(None, format!("`n_points` must be at least 2, got {n}")));
                }
                n
            }
        };
        let log_time = match self.take("log_time") {
            None => false,
            Some((v, line)) => match v.as_str() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(err(line, format!("`log_time` must be true or false, got `{other}`")));
                }
            },
        };
        let method = match self.take("method") {
            None => Method::Both,
            Some((v, line)) => match v.as_str() {
                "analytic" => Method::Analytic,
                "numeric" => Method::Numeric,
                "both" => Method::Both,
                other => {
                    return Err(err(
                        line,
                        format!("unknown method `{other}` (expected analytic | numeric | both)"),
                    ));
                }
            },
        };
        let n_trunc = match self.take("n_trunc") {
            None => 12,
            Some(slot) => {
                let n = parse_usize(slot, "n_trunc")?;
                if n == 0 {
                    return Err(err(None, "`n_trunc` must be at least 1"));
                }
                n
            }
        };
        let tol = match self.take("tol") {
            None => 1e-10,
            Some(slot) => {
                let t = parse_f64(slot, "tol")?;
                if !(t > 0.0) {
                    return Err(err(None, format!("`tol` must be positive, got {t}")));
                }
                t
            }
        };

        let obs_slot = require(self.take("observables"), "observables")?;
        let mut observables = Vec::new();
        for item in obs_slot.0.split(',') {
            let item = item.trim();
            observables.push(parse_observable(item, obs_slot.1)?);
        }

        if let Some((key, (_, line))) = self.entries.into_iter().next() {
            return Err(err(line, format!("unknown key `{key}`")));
        }

        Ok(Scenario {
            name,
            model,
            params,
            qubit,
            boson,
            t_max,
            n_points,
            log_time,
            method,
            n_trunc,
            tol,
            observables,
            notes: vec![],
        })
    }
}

fn parse_paren_args(v: &str, head: &str) -> Option<Vec<f64>> {
    let inner = v.strip_prefix(head)?.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|s| s.trim().parse::<f64>().ok()).collect()
}

fn parse_qubit(v: &str, line: Option<usize>) -> Result<QubitInit, ConfigError> {
    match v {
        "excited" => return Ok(QubitInit::Excited),
        "ground" => return Ok(QubitInit::Ground),
        "plus" => return Ok(QubitInit::Plus),
        _ => {}
    }
    if let Some(args) = parse_paren_args(v, "bloch") {
        if args.len() == 3 {
            return Ok(QubitInit::Bloch { x: args[0], y: args[1], z: args[2] });
        }
    }
    Err(err(
        line,
        format!("unknown qubit init `{v}` (expected excited | ground | plus | bloch(x,y,z))"),
    ))
}

fn parse_boson(v: &str, line: Option<usize>) -> Result<BosonInit, ConfigError> {
    match v {
        "thermal" => return Ok(BosonInit::Thermal),
        "vacuum" => return Ok(BosonInit::Vacuum),
        _ => {}
    }
    if let Some(args) = parse_paren_args(v, "coherent") {
        match args.len() {
            1 => return Ok(BosonInit::Coherent(C64::new(args[0], 0.0))),
            2 => return Ok(BosonInit::Coherent(C64::new(args[0], args[1]))),
            _ => {}
        }
    }
    Err(err(
        line,
        format!("unknown boson init `{v}` (expected thermal | vacuum | coherent(re[,im]))"),
    ))
}

fn parse_observable(v: &str, line: Option<usize>) -> Result<ObsKind, ConfigError> {
    for kind in [
        ObsKind::CoherenceMeasure,
        ObsKind::PhotonNumber,
        ObsKind::SigmaX,
        ObsKind::SigmaY,
        ObsKind::SigmaZ,
        ObsKind::SminusAdagAbs2OverG2,
    ] {
        if v == kind.name() {
            return Ok(kind);
        }
    }
    Err(err(line, format!("unknown observable `{v}`")))
}

/// Render a scenario back into config text; `RawConfig::parse` on the result
/// reproduces the scenario exactly (float formatting round-trips).
pub fn to_text(sc: &Scenario) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "name = {}", sc.name);
    let _ = writeln!(s, "model = {}", sc.model);
    let _ = writeln!(s, "omega = {}", sc.params.omega);
    let _ = writeln!(s, "big_omega = {}", sc.params.big_omega);
    let _ = writeln!(s, "g = {}", sc.params.g);
    let _ = writeln!(s, "gamma = {}", sc.params.gamma);
    match sc.params.bath {
        BathSpec::Temperature(t) => {
            let _ = writeln!(s, "temperature = {t}");
        }
        BathSpec::MeanOccupation(n) => {
            let _ = writeln!(s, "nbar = {n}");
        }
    }
    let qubit = match sc.qubit {
        QubitInit::Excited => "excited".to_string(),
        QubitInit::Ground => "ground".to_string(),
        QubitInit::Plus => "plus".to_string(),
        QubitInit::Bloch { x, y, z } => format!("bloch({x},{y},{z})"),
    };
    let _ = writeln!(s, "qubit = {qubit}");
    let boson = match sc.boson {
        BosonInit::Thermal => "thermal".to_string(),
        BosonInit::Vacuum => "vacuum".to_string(),
        BosonInit::Coherent(a) => format!("coherent({},{})", a.re, a.im),
    };
    let _ = writeln!(s, "boson = {boson}");
    let _ = writeln!(s, "t_max = {}", sc.t_max);
    let _ = writeln!(s, "n_points = {}", sc.n_points);
    let _ = writeln!(s, "log_time = {}", sc.log_time);
    let method = match sc.method {
        Method::Analytic => "analytic",
        Method::Numeric => "numeric",
        Method::Both => "both",
    };
    let _ = writeln!(s, "method = {method}");
    let _ = writeln!(s, "n_trunc = {}", sc.n_trunc);
    let _ = writeln!(s, "tol = {}", sc.tol);
    let obs: Vec<&str> = sc.observables.iter().map(|o| o.name()).collect();
    let _ = writeln!(s, "observables = {}", obs.join(","));
    s
}
