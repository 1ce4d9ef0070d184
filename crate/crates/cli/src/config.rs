//! Run configuration: command-line flags layered over an optional
//! `key = value` file.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use degwave_core::semigroup::InitialKind;
use degwave_core::transfer::BesselArg;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("alpha must lie in [1, 2), got {0}")]
    Alpha(f64),
    #[error("alpha is required (--alpha or `alpha = ...` in the config file)")]
    MissingAlpha,
    #[error("{0}")]
    Invalid(String),
    #[error("config file {path}: line {line}: {msg}")]
    File { path: String, line: usize, msg: String },
    #[error("cannot read config file {0}: {1}")]
    Read(String, std::io::Error),
}

/// Every setting optional, as read from one source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub alpha: Option<f64>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub resolution: Option<f64>,
    pub gamma: Option<f64>,
    pub theta: Option<Vec<f64>>,
    pub cutoff: Option<f64>,
    pub bessel_arg: Option<BesselArg>,
    pub samples: Option<usize>,
    pub modes: Option<usize>,
    pub initial: Option<InitialKind>,
    pub json: Option<bool>,
    pub export_coo: Option<bool>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        RawConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RawConfig {
    /// Settings in `top` win.
    pub fn overlay(self, top: RawConfig) -> RawConfig {
        overlay!(
            self, top, alpha, grid, out, dt, horizon, lambda_min, lambda_max, resolution, gamma, theta, cutoff,
            bessel_arg, samples, modes, initial, json, export_coo
        )
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read(path.display().to_string(), e))?;
        Self::parse(&text).map_err(|(line, msg)| ConfigError::File {
            path: path.display().to_string(),
            line,
            msg,
        })
    }

    /// Parses `key = value` lines; `#` starts a comment. Keys are the long
    /// flag names, with `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, (usize, String)> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or((i + 1, "expected `key = value`".to_string()))?;
            raw.set(&key.trim().replace('-', "_"), value.trim())
                .map_err(|m| (i + 1, m))?;
        }
        Ok(raw)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<Option<T>, String> {
            v.parse()
                .map(Some)
                .map_err(|_| format!("invalid value `{v}` for `{key}`"))
        }
        match key {
            "alpha" => self.alpha = num(key, value)?,
            "grid" => self.grid = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "dt" => self.dt = num(key, value)?,
            "horizon" => self.horizon = num(key, value)?,
            "lambda_min" => self.lambda_min = num(key, value)?,
            "lambda_max" => self.lambda_max = num(key, value)?,
            "resolution" => self.resolution = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "theta" => self.theta = Some(parse_angle_list(value)?),
            "cutoff" => self.cutoff = num(key, value)?,
            "bessel_arg" => self.bessel_arg = Some(parse_bessel_arg(value)?),
            "samples" => self.samples = num(key, value)?,
            "modes" => self.modes = num(key, value)?,
            "initial" => self.initial = Some(parse_initial(value)?),
            "json" => self.json = num(key, value)?,
            "export_coo" => self.export_coo = num(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }
}

pub fn parse_bessel_arg(s: &str) -> Result<BesselArg, String> {
    BesselArg::parse(s).ok_or_else(|| format!("bessel argument must be `treee` or `besfu`, got `{s}`"))
}

pub fn parse_initial(s: &str) -> Result<InitialKind, String> {
    InitialKind::parse(s).map_err(|e| format!("{e} (`{s}`)"))
}

/// An angle as a number of radians or `[k]pi[/d]`, e.g. `pi/6`, `2pi/3`, `0.5`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let bad = || format!("cannot parse angle `{s}`");
    let Some(idx) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let head = t[..idx].trim().trim_end_matches('*');
    let tail = t[idx + 2..].trim();
    let k: f64 = match head {
        "" => 1.0,
        "-" => -1.0,
        h => h.parse().map_err(|_| bad())?,
    };
    let d: f64 = match tail.strip_prefix('/') {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None if tail.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(k * PI / d)
}

pub fn parse_angle_list(s: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s.split(',').map(parse_angle).collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty angle list".into());
    }
    Ok(v)
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub grid: usize,
    pub out: PathBuf,
    pub dt: f64,
    pub horizon: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub resolution: f64,
    pub gamma: f64,
    pub thetas: Vec<f64>,
    pub cutoff: f64,
    pub bessel_arg: BesselArg,
    pub samples: usize,
    pub modes: usize,
    pub initial: InitialKind,
    pub json: bool,
    pub export_coo: bool,
}

pub const DEFAULT_GRID: usize = 1000;
pub const MIN_GRID: usize = 16;

pub fn default_thetas() -> Vec<f64> {
    vec![PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0]
}

impl RunConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let alpha = raw.alpha.ok_or(ConfigError::MissingAlpha)?;
        if !(1.0..2.0).contains(&alpha) {
            return Err(ConfigError::Alpha(alpha));
        }
        let cfg = RunConfig {
            alpha,
            grid: raw.grid.unwrap_or(DEFAULT_GRID),
            out: raw.out.unwrap_or_else(|| PathBuf::from("out")),
            dt: raw.dt.unwrap_or(1e-3),
            horizon: raw.horizon.unwrap_or(100.0),
            lambda_min: raw.lambda_min.unwrap_or(1.0),
            lambda_max: raw.lambda_max.unwrap_or(100.0),
            resolution: raw.resolution.unwrap_or(0.5),
            gamma: raw.gamma.unwrap_or(1.0),
            thetas: raw.theta.unwrap_or_else(default_thetas),
            cutoff: raw.cutoff.unwrap_or(degwave_core::transfer::DEFAULT_CUTOFF),
            bessel_arg: raw.bessel_arg.unwrap_or(BesselArg::Besfu),
            samples: raw.samples.unwrap_or(200),
            modes: raw.modes.unwrap_or(10),
            initial: raw.initial.unwrap_or(InitialKind::Bump),
            json: raw.json.unwrap_or(false),
            export_coo: raw.export_coo.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.grid < MIN_GRID {
            return bad("grid must be at least 16 cells");
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return bad("horizon must be positive");
        }
        if !(self.lambda_min > 0.0 && self.lambda_max > self.lambda_min && self.lambda_max.is_finite()) {
            return bad("lambda range must satisfy 0 < lambda-min < lambda-max");
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return bad("resolution must be positive");
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad("gamma must be positive");
        }
        if self.thetas.iter().any(|t| !(*t > -PI / 2.0 && *t <= PI / 2.0)) {
            return bad("every theta must lie in (-pi/2, pi/2]");
        }
        if !(self.cutoff > 0.0 && self.cutoff <= 0.1) {
            return bad("cutoff must lie in (0, 0.1]");
        }
        if self.samples < 2 {
            return bad("samples must be at least 2");
        }
        if self.modes == 0 {
            return bad("modes must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/6").unwrap(), PI / 6.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("pi6").is_err());
        assert_eq!(parse_angle_list("pi/6, pi/2").unwrap().len(), 2);
    }

    #[test]
    fn file_then_flags() {
        let file = RawConfig::parse("alpha = 1.5 # comment\ngrid=200\nlambda-max = 40\n\n").unwrap();
        let flags = RawConfig {
            grid: Some(64),
            ..Default::default()
        };
        let cfg = RunConfig::from_raw(file.overlay(flags)).unwrap();
        assert_eq!((cfg.alpha, cfg.grid, cfg.lambda_max), (1.5, 64, 40.0));
        assert!(RawConfig::parse("nope = 1").is_err());
        assert!(RawConfig::parse("alpha 1").is_err());
    }

    #[test]
    fn alpha_range() {
        for a in [0.5, 2.0, f64::NAN] {
            let e = RunConfig::from_raw(RawConfig {
                alpha: Some(a),
                ..Default::default()
            })
            .unwrap_err();
            assert!(e.to_string().contains("[1, 2)"));
        }
    }
}
