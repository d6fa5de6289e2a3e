use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spinstat_core::dynamics::RotationSchedule;
use spinstat_core::spinrep::Vec3;

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 20;
pub const DEFAULT_OUTPUT_DIR: &str = "spinstat-out";
/// Largest 2S accepted on the command line.
pub const MAX_TWO_S: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    LlCheck,
    SpinRep,
    ExchangePhase,
    Interferometer,
    EntangleSweep,
    CorrelatorCheck,
    GravitoCheck,
    All,
}

impl Command {
    pub const SINGLE: [Command; 7] = [
        Command::LlCheck,
        Command::SpinRep,
        Command::ExchangePhase,
        Command::Interferometer,
        Command::EntangleSweep,
        Command::CorrelatorCheck,
        Command::GravitoCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::LlCheck => "ll-check",
            Command::SpinRep => "spin-rep",
            Command::ExchangePhase => "exchange-phase",
            Command::Interferometer => "interferometer",
            Command::EntangleSweep => "entangle-sweep",
            Command::CorrelatorCheck => "correlator-check",
            Command::GravitoCheck => "gravito-check",
            Command::All => "all",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::SINGLE
            .into_iter()
            .chain([Command::All])
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown subcommand '{s}'"))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every knob a subcommand can take. Unset fields fall back to the
/// subcommand's defaults; fields a subcommand does not use are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Inclusive grid `start:stop:step`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Coaxial segments `t0:t1:omega_z,...`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
    /// JSON file holding `{"samples": [[t, wx, wy, wz], ...]}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

impl Parameters {
    /// Names of the fields that are set, tolerances excluded.
    pub fn set_fields(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut push = |name, set: bool| {
            if set {
                out.push(name);
            }
        };
        push("two_s", self.two_s.is_some());
        push("alpha", self.alpha.is_some());
        push("alphas", self.alphas.is_some());
        push("model", self.model.is_some());
        push("schedule", self.schedule.is_some());
        push("schedule_file", self.schedule_file.is_some());
        push("omega", self.omega.is_some());
        push("grid_h", self.grid_h.is_some());
        push("dt", self.dt.is_some());
        push("mass", self.mass.is_some());
        out
    }

    pub fn only(&self, command: Command, allowed: &[&str]) -> CliResult<()> {
        for field in self.set_fields() {
            if !allowed.contains(&field) {
                return Err(CliError::usage(format!(
                    "parameter '{field}' is not used by {command}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Command,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    pub fn new(subcommand: Command, parameters: Parameters, seed: u64) -> Self {
        Self {
            subcommand,
            parameters,
            seed,
            output_dir: None,
        }
    }

    /// Reads a `.json` config, or TOML for any other extension.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let is_json = path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        }
    }
}

pub fn check_two_s(two_s: u32) -> CliResult<u32> {
    if two_s > MAX_TWO_S {
        return Err(CliError::usage(format!(
            "--two-s {two_s} exceeds the supported maximum {MAX_TWO_S}"
        )));
    }
    Ok(two_s)
}

fn parse_f64(field: &str, s: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{field}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::usage(format!("{field}: '{s}' is not finite")));
    }
    Ok(v)
}

/// `start:stop:step`.
pub fn parse_grid(spec: &str) -> CliResult<(f64, f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(CliError::usage(format!(
            "alpha grid '{spec}' must look like start:stop:step"
        )));
    };
    Ok((
        parse_f64("alphas", a)?,
        parse_f64("alphas", b)?,
        parse_f64("alphas", step)?,
    ))
}

/// `t0:t1:wz,t1:t2:wz,...`.
pub fn parse_segments(spec: &str) -> CliResult<Vec<(f64, f64, f64)>> {
    spec.split(',')
        .map(|seg| {
            let parts: Vec<&str> = seg.split(':').collect();
            let [t0, t1, wz] = parts.as_slice() else {
                return Err(CliError::usage(format!(
                    "schedule segment '{seg}' must look like t0:t1:omega_z"
                )));
            };
            Ok((
                parse_f64("schedule", t0)?,
                parse_f64("schedule", t1)?,
                parse_f64("schedule", wz)?,
            ))
        })
        .collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    samples: Vec<[f64; 4]>,
}

pub fn load_schedule_file(path: &Path) -> CliResult<RotationSchedule> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: ScheduleFile = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let samples = file
        .samples
        .into_iter()
        .map(|[t, x, y, z]| (t, Vec3::new(x, y, z)))
        .collect();
    Ok(RotationSchedule::new(samples)?)
}

/// `x,y,z`.
pub fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [x, y, z] = parts.as_slice() else {
        return Err(format!("'{s}' must look like x,y,z"));
    };
    let p = |v: &str| {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|f| f.is_finite())
            .ok_or_else(|| format!("'{v}' is not a finite number"))
    };
    Ok([p(x)?, p(y)?, p(z)?])
}

/// `name=value`.
pub fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("tolerance '{s}' must look like name=value"))?;
    let v: f64 = value
        .parse()
        .map_err(|_| format!("tolerance value '{value}' is not a number"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("tolerance {name} must be positive"));
    }
    Ok((name.to_string(), v))
}
