//! Run configuration and the `key = value` config-file format.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cases::{CaseName, CaseSpec, Resolution, SolverOptions};
use crate::error::{Result, SolverError};
use crate::limiter::LimiterMode;
use crate::low_order::{DEFAULT_ALPHA, DEFAULT_P};
use crate::physics::PhysParams;
use crate::reference::NodeFamily;
use crate::time::DEFAULT_CFL;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub case: CaseName,
    pub degree: Option<usize>,
    pub resolution: Option<Resolution>,
    pub limiter: LimiterMode,
    pub cfl: f64,
    pub family: NodeFamily,
    pub alpha: f64,
    pub p: f64,
    pub momentum_cutoff: f64,
    pub t_end: Option<f64>,
    pub g: Option<f64>,
    pub out: Option<PathBuf>,
    pub snapshots: Vec<f64>,
    pub vtk: bool,
    pub strict_sine: bool,
    pub threads: Option<usize>,
}

impl SimulationConfig {
    pub fn new(case: CaseName) -> Self {
        SimulationConfig {
            case,
            degree: None,
            resolution: None,
            limiter: if case == CaseName::SineWave {
                LimiterMode::Low
            } else {
                LimiterMode::Nodewise
            },
            cfl: DEFAULT_CFL,
            family: NodeFamily::GaussLegendreEdge,
            alpha: DEFAULT_ALPHA,
            p: DEFAULT_P,
            momentum_cutoff: PhysParams::DEFAULT_MOMENTUM_CUTOFF,
            t_end: None,
            g: None,
            out: None,
            snapshots: Vec::new(),
            vtk: false,
            strict_sine: false,
            threads: None,
        }
    }

    /// Case defaults with this configuration's overrides applied.
    pub fn case_spec(&self) -> CaseSpec {
        let mut c = CaseSpec::new(self.case);
        if let Some(n) = self.degree {
            c.degree = n;
        }
        if let Some(r) = self.resolution {
            c.resolution = r;
        }
        if let Some(t) = self.t_end {
            c.t_end = t;
        }
        if let Some(g) = self.g {
            c.g = g;
        }
        c.strict_sine = self.strict_sine;
        c
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            family: self.family,
            alpha: self.alpha,
            p: self.p,
            momentum_cutoff: self.momentum_cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SolverError::Config(m));
        if !(self.cfl > 0.0) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if !(self.momentum_cutoff >= 0.0) {
            return bad(format!(
                "momentum cutoff must be nonnegative, got {}",
                self.momentum_cutoff
            ));
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0) {
                return bad(format!("end time must be positive, got {t}"));
            }
        }
        if self.snapshots.iter().any(|t| !(*t >= 0.0)) {
            return bad("snapshot times must be nonnegative".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_f = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| SolverError::Config(format!("{key}: '{v}' is not a number")))
        };
        let parse_u = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| SolverError::Config(format!("{key}: '{v}' is not a count")))
        };
        match key {
            "case" => self.case = value.parse()?,
            "N" | "degree" => self.degree = Some(parse_u(value)?),
            "K" => self.resolution = Some(Resolution::Elements(parse_u(value)?)),
            "grid" => self.resolution = Some(parse_grid(value)?),
            "limiter" => self.limiter = value.parse()?,
            "cfl" => self.cfl = parse_f(value)?,
            "family" => self.family = value.parse()?,
            "alpha" => self.alpha = parse_f(value)?,
            "p" => self.p = parse_f(value)?,
            "momentum_cutoff" => self.momentum_cutoff = parse_f(value)?,
            "T" | "t_end" => self.t_end = Some(parse_f(value)?),
            "g" => self.g = Some(parse_f(value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "snapshots" => {
                self.snapshots = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_f(s.trim()))
                    .collect::<Result<_>>()?
            }
            "vtk" => self.vtk = parse_bool(key, value)?,
            "strict" | "strict_sine" => self.strict_sine = parse_bool(key, value)?,
            "threads" => self.threads = Some(parse_u(value)?),
            _ => return Err(SolverError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Reads a config file; `case` must be present.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SolverError::io(path, e))?;
        Self::from_str_pairs(&text)
    }

    pub fn from_str_pairs(text: &str) -> Result<Self> {
        let pairs = parse_key_values(text)?;
        let case = pairs
            .get("case")
            .ok_or_else(|| SolverError::Config("config has no 'case'".into()))?;
        let mut cfg = SimulationConfig::new(case.parse()?);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `nx,ny` or `nxXny`.
pub fn parse_grid(s: &str) -> Result<Resolution> {
    let parts: Vec<&str> = s.split([',', 'x', 'X']).map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse(), b.parse()) {
            (Ok(nx), Ok(ny)) => Ok(Resolution::Grid(nx, ny)),
            _ => Err(SolverError::Config(format!("bad grid '{s}'"))),
        },
        _ => Err(SolverError::Config(format!("bad grid '{s}'"))),
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(SolverError::Config(format!("{key}: '{v}' is not a boolean"))),
    }
}

/// Lines of `key = value`; `#` starts a comment. Duplicate keys are errors.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| SolverError::Config(format!("line {}: expected key = value", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(SolverError::Config(format!("line {}: empty key", n + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(SolverError::Config(format!("line {}: duplicate key '{k}'", n + 1)));
        }
    }
    Ok(out)
}
