//! Configuration ingestion. Values are layered in order of precedence:
//! built-in defaults, then the `QSZILARD_TOL` environment variable, then an
//! optional `key=value` config file, then command-line flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use qszilard::{PointParams, Spacing, SweepAxis, SweepParam};

pub const TOL_ENV: &str = "QSZILARD_TOL";

/// A rejected key and why, printed verbatim before exiting with code 1.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Effective settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Settings {
    pub params: PointParams,
    pub axes: Vec<SweepAxis>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            params: PointParams::default(),
            axes: Vec::new(),
            workers: None,
            out: None,
        }
    }
}

fn parse_f64(key: &str, raw: &str) -> Result<f64, ConfigError> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| ConfigError::new(key, format!("expected a number, got `{raw}`")))
}

fn parse_usize(key: &str, raw: &str) -> Result<usize, ConfigError> {
    raw.trim()
        .parse::<usize>()
        .map_err(|_| ConfigError::new(key, format!("expected a non-negative integer, got `{raw}`")))
}

/// `NAME:MIN:MAX:COUNT[:lin|log]`, with names matching the sweep keys.
pub fn parse_axis(spec: &str) -> Result<SweepAxis, ConfigError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(ConfigError::new(
            "axis",
            format!("expected NAME:MIN:MAX:COUNT[:lin|log], got `{spec}`"),
        ));
    }
    let param = SweepParam::parse(parts[0]).ok_or_else(|| {
        let known: Vec<&str> = SweepParam::ALL.iter().map(|p| p.key()).collect();
        ConfigError::new(
            "axis",
            format!(
                "unknown parameter `{}`; axes may range over {}",
                parts[0],
                known.join(", ")
            ),
        )
    })?;
    let min = parse_f64("axis", parts[1])?;
    let max = parse_f64("axis", parts[2])?;
    let count = parse_usize("axis", parts[3])?;
    let spacing = match parts.get(4) {
        None => Spacing::Linear,
        Some(&"lin") => Spacing::Linear,
        Some(&"log") => Spacing::Log,
        Some(other) => {
            return Err(ConfigError::new(
                "axis",
                format!("spacing must be `lin` or `log`, got `{other}`"),
            ))
        }
    };
    SweepAxis::new(param, min, max, count, spacing)
        .map_err(|e| ConfigError::new("axis", e.to_string()))
}

impl Settings {
    /// Built-in defaults plus the environment tolerance, if set.
    pub fn from_env() -> Result<Self, ConfigError> {
        let mut settings = Self::default();
        if let Ok(raw) = std::env::var(TOL_ENV) {
            let tol = parse_f64(TOL_ENV, &raw)?;
            if !tol.is_finite() || tol <= 0.0 || tol >= 1.0 {
                return Err(ConfigError::new(
                    TOL_ENV,
                    format!("tolerance must lie in (0, 1), got {tol}"),
                ));
            }
            settings.params.tol = tol;
        }
        Ok(settings)
    }

    /// Applies one `key = value` pair from a config file.
    pub fn apply_pair(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "l" => self.params.insertion = Some(parse_f64(key, value)?),
            "L" => self.params.box_length = parse_f64(key, value)?,
            "beta" => self.params.system_beta = parse_f64(key, value)?,
            "beta_D" => self.params.bath_beta = parse_f64(key, value)?,
            "Delta" => self.params.gap = parse_f64(key, value)?,
            "F" => self.params.coherence = parse_f64(key, value)?,
            "l_g" => self.params.expand_ground = Some(parse_f64(key, value)?),
            "l_e" => self.params.expand_excited = Some(parse_f64(key, value)?),
            "tol" => self.params.tol = parse_f64(key, value)?,
            "guard_frac" => self.params.guard_frac = parse_f64(key, value)?,
            "workers" => self.workers = Some(parse_usize(key, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "axis" => self.axes.push(parse_axis(value.trim())?),
            _ => {
                return Err(ConfigError::new(
                    key,
                    "unknown key; expected one of l, L, beta, beta_D, Delta, F, l_g, l_e, \
                     tol, guard_frac, workers, out, axis",
                ))
            }
        }
        Ok(())
    }

    /// Loads a config file: one `key = value` per line, `#` comments.
    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| {
            ConfigError::new("config", format!("cannot read {}: {e}", path.display()))
        })?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(
                    "config",
                    format!(
                        "{}:{}: expected `key = value`, got `{line}`",
                        path.display(),
                        lineno + 1
                    ),
                ));
            };
            self.apply_pair(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_spec_round_trip() {
        let axis = parse_axis("beta_D:1:5:41").unwrap();
        assert_eq!(axis.param(), SweepParam::BathBeta);
        assert_eq!(axis.count(), 41);
        assert_eq!(axis.spacing(), Spacing::Linear);
        let axis = parse_axis("Delta:1e-3:1:20:log").unwrap();
        assert_eq!(axis.spacing(), Spacing::Log);
    }

    #[test]
    fn axis_spec_rejections_name_the_key() {
        for bad in ["l:0:1", "x:0:1:5", "l:0:1:5:weird", "l:a:1:5", "l:0:1:1"] {
            let err = parse_axis(bad).unwrap_err();
            assert_eq!(err.key, "axis", "{bad}");
        }
    }

    #[test]
    fn unknown_file_key_is_named() {
        let mut settings = Settings::default();
        let err = settings.apply_pair("bogus", "1").unwrap_err();
        assert_eq!(err.key, "bogus");
    }

    #[test]
    fn infinite_bath_spelling() {
        let mut settings = Settings::default();
        settings.apply_pair("beta_D", "inf").unwrap();
        assert!(settings.params.bath_beta.is_infinite());
    }
}
