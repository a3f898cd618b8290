//! Run configuration and its `key = value` file format.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub const ORDER_ENV: &str = "SPECTRAL_PF_ORDER";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("invalid value for `{key}`: {reason}")]
    Value { key: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "text" => Ok(Self::Text),
            _ => Err(format!("`{s}` is not one of json, csv, text")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
            Self::Text => "text",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub order: i64,
    pub float_tol: f64,
    pub output: OutputFormat,
    pub a: u64,
    pub b: u64,
    pub grid: usize,
    pub gap_threshold: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            order: 40,
            float_tol: 1e-12,
            output: OutputFormat::Json,
            a: 2,
            b: 3,
            grid: 16,
            gap_threshold: 1e-6,
        }
    }
}

const KEYS: [&str; 7] = ["order", "float_tol", "output", "a", "b", "grid", "gap_threshold"];

fn value_err(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.into(), reason: reason.into() }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e: T::Err| value_err(key, e.to_string()))
}

impl Config {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::default().merge_str(text)
    }

    /// Overrides fields of `self` with the keys present in `text`.
    pub fn merge_str(&self, text: &str) -> Result<Self, ConfigError> {
        let mut cfg = self.clone();
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: line_no })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line: line_no });
            }
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(ConfigError::UnknownKey { line: line_no, key: key.into() });
            };
            if seen.contains(&known) {
                return Err(ConfigError::DuplicateKey { line: line_no, key: key.into() });
            }
            seen.push(known);
            cfg.set(known, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "order" => self.order = parse_value(key, value)?,
            "float_tol" => self.float_tol = parse_value(key, value)?,
            "output" => self.output = parse_value(key, value)?,
            "a" => self.a = parse_value(key, value)?,
            "b" => self.b = parse_value(key, value)?,
            "grid" => self.grid = parse_value(key, value)?,
            "gap_threshold" => self.gap_threshold = parse_value(key, value)?,
            _ => unreachable!("key list is closed"),
        }
        Ok(())
    }

    /// Applies the order override from [`ORDER_ENV`], if set.
    pub fn with_env_order(&self, value: Option<&str>) -> Result<Self, ConfigError> {
        let mut cfg = self.clone();
        if let Some(v) = value {
            cfg.order = parse_value(ORDER_ENV, v.trim())?;
            cfg.validate()?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.order < 8 {
            return Err(value_err("order", "must be at least 8"));
        }
        if !(self.float_tol > 0.0 && self.float_tol <= 1e-6) {
            return Err(value_err("float_tol", "must lie in (0, 1e-6]"));
        }
        if self.a == 0 || self.b == 0 {
            return Err(value_err("a/b", "must be positive"));
        }
        if self.grid < 4 {
            return Err(value_err("grid", "must be at least 4"));
        }
        if !(self.gap_threshold >= 0.0 && self.gap_threshold.is_finite()) {
            return Err(value_err("gap_threshold", "must be finite and nonnegative"));
        }
        Ok(())
    }
}
