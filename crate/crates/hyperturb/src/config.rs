//! Run configuration in a line-oriented text format.
//!
//! ```text
//! mode = sweep          # optional; must match the subcommand
//! seed = 7
//!
//! [model]
//! epsilon = 0.1
//! [time]
//! scheme = spectral
//! ```
//!
//! Top-level keys: `mode`, `seed`. Sections: `model`, `grid`, `time`,
//! `sweep`, `init`, `output`, plus `check` (sample count) and `eigen`
//! (state and direction). Lists are comma separated. Unknown keys and
//! repeated keys are errors; missing keys keep their defaults.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use hyperturb_core::solver::{RelaxationStrategy, TimeControls, TransportScheme};
use hyperturb_core::{Grid, ModelParams, RescaledState, Sym6};
use thiserror::Error;

use crate::output::fmt_f64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate key '{key}' on lines {first} and {second}")]
    Duplicate { key: String, first: usize, second: usize },
    #[error("{0}")]
    Invalid(String),
}

impl From<hyperturb_core::Error> for ConfigError {
    fn from(e: hyperturb_core::Error) -> Self {
        match e {
            hyperturb_core::Error::Config(msg) => ConfigError::Invalid(msg.to_string()),
            other => ConfigError::Invalid(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    Sweep,
    Check,
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    Rest,
    AcousticPulse,
    ShearLayer,
    TaylorGreen,
}

macro_rules! keyword_enum {
    ($ty:ty, $what:literal, $($variant:expr => $name:literal),+ $(,)?) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                $(if *self == $variant { return $name; })+
                unreachable!()
            }
        }

        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok($variant),)+
                    _ => Err(format!(concat!("unknown ", $what, " '{}' (expected one of: {})"), s, [$($name),+].join(", "))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(Mode, "mode", Mode::Run => "run", Mode::Sweep => "sweep", Mode::Check => "check", Mode::Eigen => "eigen");
keyword_enum!(
    InitKind, "initial condition",
    InitKind::Rest => "rest",
    InitKind::AcousticPulse => "acoustic-pulse",
    InitKind::ShearLayer => "shear-layer",
    InitKind::TaylorGreen => "taylor-green",
);

fn scheme_name(s: TransportScheme) -> &'static str {
    match s {
        TransportScheme::Rusanov => "rusanov",
        TransportScheme::Spectral => "spectral",
    }
}

fn parse_scheme(s: &str) -> Result<TransportScheme, String> {
    match s {
        "rusanov" => Ok(TransportScheme::Rusanov),
        "spectral" => Ok(TransportScheme::Spectral),
        _ => Err(format!("unknown scheme '{s}' (expected one of: rusanov, spectral)")),
    }
}

fn relaxation_name(r: RelaxationStrategy) -> &'static str {
    match r {
        RelaxationStrategy::Exponential => "exponential",
        RelaxationStrategy::Off => "off",
    }
}

fn parse_relaxation(s: &str) -> Result<RelaxationStrategy, String> {
    match s {
        "exponential" => Ok(RelaxationStrategy::Exponential),
        "off" => Ok(RelaxationStrategy::Off),
        _ => Err(format!("unknown relaxation '{s}' (expected one of: exponential, off)")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    /// Strictly decreasing Mach numbers.
    pub epsilons: Vec<f64>,
    /// Step controls of the incompressible reference run.
    pub reference_cfl: f64,
    pub reference_dt_max: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { epsilons: vec![0.2, 0.1, 0.05], reference_cfl: 0.5, reference_dt_max: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitSettings {
    pub kind: InitKind,
    pub amplitude: f64,
}

impl Default for InitSettings {
    fn default() -> Self {
        Self { kind: InitKind::Rest, amplitude: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSettings {
    pub samples: usize,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self { samples: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSettings {
    pub state: RescaledState,
    pub direction: [f64; 3],
}

impl Default for EigenSettings {
    fn default() -> Self {
        Self { state: RescaledState::default(), direction: [1.0, 0.0, 0.0] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub dir: PathBuf,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` until fixed by the file or the subcommand.
    pub mode: Option<Mode>,
    pub seed: u64,
    pub model: ModelParams,
    pub grid: Grid,
    pub time: TimeControls,
    pub sweep: SweepSettings,
    pub init: InitSettings,
    pub check: CheckSettings,
    pub eigen: EigenSettings,
    pub output: OutputSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tau = 2.0 * std::f64::consts::PI;
        Self {
            mode: None,
            seed: 1,
            model: ModelParams::default(),
            grid: Grid { dim: 2, nx: 32, ny: 32, lx: tau, ly: tau },
            time: TimeControls::default(),
            sweep: SweepSettings::default(),
            init: InitSettings::default(),
            check: CheckSettings::default(),
            eigen: EigenSettings::default(),
            output: OutputSettings::default(),
        }
    }
}

const SECTIONS: [&str; 8] = ["model", "grid", "time", "sweep", "init", "check", "eigen", "output"];

fn parse_num<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("invalid number '{v}'"))
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse_num(x.trim())).collect()
}

fn parse_array<const N: usize>(v: &str) -> Result<[f64; N], String> {
    let list = parse_list(v)?;
    list.try_into().map_err(|l: Vec<f64>| format!("expected {N} comma-separated values, got {}", l.len()))
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    fn assign(&mut self, section: &str, key: &str, v: &str) -> Result<(), String> {
        let m = &mut self.model;
        let t = &mut self.time;
        match (section, key) {
            ("", "mode") => self.mode = Some(v.parse()?),
            ("", "seed") => self.seed = parse_num(v)?,
            ("model", "alpha1") => m.alpha1 = parse_num(v)?,
            ("model", "alpha2") => m.alpha2 = parse_num(v)?,
            ("model", "alpha3") => m.alpha3 = parse_num(v)?,
            ("model", "xi") => m.xi = parse_num(v)?,
            ("model", "beta") => m.beta = parse_num(v)?,
            ("model", "c_d") => m.c_d = parse_num(v)?,
            ("model", "l") => m.l = parse_num(v)?,
            ("model", "nu") => m.nu = parse_num(v)?,
            ("model", "epsilon") => m.epsilon = parse_num(v)?,
            ("model", "c") => m.eos.c = parse_num(v)?,
            ("model", "rho0") => m.eos.rho0 = parse_num(v)?,
            ("grid", "dim") => self.grid.dim = parse_num(v)?,
            ("grid", "nx") => self.grid.nx = parse_num(v)?,
            ("grid", "ny") => self.grid.ny = parse_num(v)?,
            ("grid", "lx") => self.grid.lx = parse_num(v)?,
            ("grid", "ly") => self.grid.ly = parse_num(v)?,
            ("time", "cfl") => t.cfl = parse_num(v)?,
            ("time", "t_final") => t.t_final = parse_num(v)?,
            ("time", "max_steps") => t.max_steps = parse_num(v)?,
            ("time", "scheme") => t.scheme = parse_scheme(v)?,
            ("time", "relaxation") => t.relaxation = parse_relaxation(v)?,
            ("time", "relax_dt_fraction") => t.relax_dt_fraction = Some(parse_num(v)?),
            ("time", "snapshot_times") => t.snapshot_times = parse_list(v)?,
            ("sweep", "epsilons") => self.sweep.epsilons = parse_list(v)?,
            ("sweep", "reference_cfl") => self.sweep.reference_cfl = parse_num(v)?,
            ("sweep", "reference_dt_max") => self.sweep.reference_dt_max = parse_num(v)?,
            ("init", "kind") => self.init.kind = v.parse()?,
            ("init", "amplitude") => self.init.amplitude = parse_num(v)?,
            ("check", "samples") => self.check.samples = parse_num(v)?,
            ("eigen", "phi") => self.eigen.state.phi = parse_num(v)?,
            ("eigen", "u") => self.eigen.state.u = parse_array(v)?,
            ("eigen", "sigma") => self.eigen.state.sigma = Sym6(parse_array(v)?),
            ("eigen", "k") => self.eigen.state.k = parse_num(v)?,
            ("eigen", "y") => self.eigen.state.y = parse_array(v)?,
            ("eigen", "direction") => self.eigen.direction = parse_array(v)?,
            ("output", "dir") => self.output.dir = PathBuf::from(v),
            ("", _) => return Err(format!("unknown top-level key '{key}'")),
            _ => return Err(format!("unknown key '{key}' in [{section}]")),
        }
        Ok(())
    }

    /// Check every invariant that applies to `self.mode`.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        self.model.validate()?;
        self.grid.validate()?;
        self.time.validate()?;
        if self.time.max_steps == 0 {
            return invalid("max_steps must be > 0".into());
        }
        if !self.init.amplitude.is_finite() {
            return invalid("amplitude must be finite".into());
        }
        if matches!(self.init.kind, InitKind::ShearLayer | InitKind::TaylorGreen) && self.grid.dim != 2 {
            return invalid(format!("initial condition {} requires dim = 2", self.init.kind));
        }
        match self.mode {
            Some(Mode::Sweep) => self.validate_sweep(),
            Some(Mode::Check) if self.check.samples == 0 => invalid("samples must be > 0".into()),
            Some(Mode::Eigen) => {
                let n = &self.eigen.direction;
                let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                if !((norm - 1.0).abs() <= 1e-12) {
                    return invalid(format!("eigen direction must have |n| = 1 (got {norm})"));
                }
                self.eigen.state.validate(&self.model)?;
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn validate_sweep(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.into()));
        let s = &self.sweep;
        if s.epsilons.len() < 3 {
            return invalid("sweep requires ≥ 3 values");
        }
        for &e in &s.epsilons {
            self.model.with_epsilon(e).validate()?;
        }
        if s.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return invalid("sweep epsilons must be strictly decreasing");
        }
        if !self.model.is_limit_compatible() {
            return invalid("sweep requires limit-compatible parameters (alpha2 = beta = xi^2, rho0 = 1)");
        }
        if !(s.reference_cfl > 0.0 && s.reference_cfl <= 1.0) {
            return invalid("reference_cfl must be in (0, 1]");
        }
        if !(s.reference_dt_max > 0.0 && s.reference_dt_max.is_finite()) {
            return invalid("reference_dt_max must be > 0");
        }
        Ok(())
    }

    /// Text that [`parse_config`] maps back to `self` exactly.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        if let Some(mode) = self.mode {
            line("mode", mode.to_string());
        }
        line("seed", self.seed.to_string());
        let m = &self.model;
        let t = &self.time;
        let g = &self.grid;
        let e = &self.eigen;
        let sections: [(&str, Vec<(&str, String)>); 8] = [
            (
                "model",
                vec![
                    ("alpha1", fmt_f64(m.alpha1)),
                    ("alpha2", fmt_f64(m.alpha2)),
                    ("alpha3", fmt_f64(m.alpha3)),
                    ("xi", fmt_f64(m.xi)),
                    ("beta", fmt_f64(m.beta)),
                    ("c_d", fmt_f64(m.c_d)),
                    ("l", fmt_f64(m.l)),
                    ("nu", fmt_f64(m.nu)),
                    ("epsilon", fmt_f64(m.epsilon)),
                    ("c", fmt_f64(m.eos.c)),
                    ("rho0", fmt_f64(m.eos.rho0)),
                ],
            ),
            (
                "grid",
                vec![
                    ("dim", g.dim.to_string()),
                    ("nx", g.nx.to_string()),
                    ("ny", g.ny.to_string()),
                    ("lx", fmt_f64(g.lx)),
                    ("ly", fmt_f64(g.ly)),
                ],
            ),
            ("time", {
                let mut v = vec![
                    ("cfl", fmt_f64(t.cfl)),
                    ("t_final", fmt_f64(t.t_final)),
                    ("max_steps", t.max_steps.to_string()),
                    ("scheme", scheme_name(t.scheme).to_string()),
                    ("relaxation", relaxation_name(t.relaxation).to_string()),
                ];
                if let Some(f) = t.relax_dt_fraction {
                    v.push(("relax_dt_fraction", fmt_f64(f)));
                }
                v.push(("snapshot_times", fmt_list(&t.snapshot_times)));
                v
            }),
            (
                "sweep",
                vec![
                    ("epsilons", fmt_list(&self.sweep.epsilons)),
                    ("reference_cfl", fmt_f64(self.sweep.reference_cfl)),
                    ("reference_dt_max", fmt_f64(self.sweep.reference_dt_max)),
                ],
            ),
            ("init", vec![("kind", self.init.kind.to_string()), ("amplitude", fmt_f64(self.init.amplitude))]),
            ("check", vec![("samples", self.check.samples.to_string())]),
            (
                "eigen",
                vec![
                    ("phi", fmt_f64(e.state.phi)),
                    ("u", fmt_list(&e.state.u)),
                    ("sigma", fmt_list(&e.state.sigma.0)),
                    ("k", fmt_f64(e.state.k)),
                    ("y", fmt_list(&e.state.y)),
                    ("direction", fmt_list(&e.direction)),
                ],
            ),
            ("output", vec![("dir", self.output.dir.display().to_string())]),
        ];
        for (name, keys) in sections {
            let _ = write!(out, "\n[{name}]\n");
            for (k, v) in keys {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut section = String::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let syntax = |message: String| ConfigError::Syntax { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| syntax("unterminated section header".into()))?.trim();
            if !SECTIONS.contains(&name) {
                return Err(syntax(format!("unknown section [{name}]")));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected 'key = value', found '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(syntax("missing key before '='".into()));
        }
        let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        if let Some(&first) = seen.get(&full) {
            return Err(ConfigError::Duplicate { key: full, first, second: line });
        }
        cfg.assign(&section, key, value).map_err(|m| syntax(format!("{full}: {m}")))?;
        seen.insert(full, line);
    }

    // a 1D grid has a single row unless the file says otherwise
    if cfg.grid.dim == 1 {
        if !seen.contains_key("grid.ny") {
            cfg.grid.ny = 1;
        }
        if !seen.contains_key("grid.ly") {
            cfg.grid.ly = 1.0;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
