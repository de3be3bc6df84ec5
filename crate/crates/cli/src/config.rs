//! `key = value` configuration files with `[section]` headers.
//!
//! Keys are addressed as `section.key`; keys before the first header live
//! in the empty section and are addressed by their bare name. Every value
//! read is recorded together with any default used, which gives the
//! resolved configuration echoed into output files.

use std::sync::Mutex;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{key}: {msg}")]
    Value { key: String, msg: String },
    #[error("missing required key {0}")]
    Missing(String),
    #[error("unknown key(s): {0}")]
    Unknown(String),
    #[error("unknown preset {0}")]
    UnknownPreset(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    resolved: Mutex<BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut cfg = Self::default();
        cfg.merge(text)?;
        Ok(cfg)
    }

    /// Adds the entries of `text`, overriding existing keys.
    pub fn merge(&mut self, text: &str) -> ConfigResult<()> {
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: i + 1,
                    msg: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    msg: "empty key".into(),
                });
            }
            let key = if section.is_empty() {
                k.to_string()
            } else {
                format!("{section}.{k}")
            };
            self.values.insert(key, v.trim().to_string());
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.lock().expect("config lock").insert(key.to_string(), value);
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn string(&self, key: &str, default: Option<&str>) -> ConfigResult<String> {
        let v = match (self.raw(key), default) {
            (Some(v), _) => v.to_string(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(ConfigError::Missing(key.into())),
        };
        self.record(key, v.clone());
        Ok(v)
    }

    pub fn parsed<T>(&self, key: &str, default: Option<T>) -> ConfigResult<T>
    where
        T: std::str::FromStr + ToString,
    {
        match self.raw(key) {
            Some(v) => {
                let parsed = v.parse::<T>().map_err(|_| ConfigError::Value {
                    key: key.into(),
                    msg: format!("cannot parse {v:?}"),
                })?;
                self.record(key, v.to_string());
                Ok(parsed)
            }
            None => {
                let d = default.ok_or_else(|| ConfigError::Missing(key.into()))?;
                self.record(key, d.to_string());
                Ok(d)
            }
        }
    }

    pub fn f64(&self, key: &str, default: Option<f64>) -> ConfigResult<f64> {
        let v: f64 = self.parsed(key, default)?;
        if !v.is_finite() {
            return Err(ConfigError::Value {
                key: key.into(),
                msg: "must be finite".into(),
            });
        }
        Ok(v)
    }

    pub fn usize(&self, key: &str, default: Option<usize>) -> ConfigResult<usize> {
        self.parsed(key, default)
    }

    pub fn bool(&self, key: &str, default: Option<bool>) -> ConfigResult<bool> {
        self.parsed(key, default)
    }

    /// Comma-separated list of unsigned integers.
    pub fn usize_list(&self, key: &str, default: Option<&str>) -> ConfigResult<Vec<usize>> {
        let text = self.string(key, default)?;
        text.split(',')
            .map(|s| {
                s.trim().parse::<usize>().map_err(|_| ConfigError::Value {
                    key: key.into(),
                    msg: format!("cannot parse list entry {s:?}"),
                })
            })
            .collect()
    }

    /// Fails if the file contains keys no command parameter consumed. The
    /// top-level `command` key only labels presets and is exempt.
    pub fn ensure_all_used(&self) -> ConfigResult<()> {
        let used = self.resolved.lock().expect("config lock");
        let unknown: BTreeSet<&String> = self
            .values
            .keys()
            .filter(|k| *k != "command" && !used.contains_key(*k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Unknown(
                unknown.into_iter().cloned().collect::<Vec<_>>().join(", "),
            ))
        }
    }

    /// Resolved entries as `key = value` lines, sorted by key.
    pub fn resolved_lines(&self) -> Vec<String> {
        self.resolved
            .lock()
            .expect("config lock")
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect()
    }
}
