//! Flat `key = value` configuration files.
//!
//! One entry per line, `#` starts a comment, booleans are `true`/`false` and
//! arrays are comma-separated. Later entries override earlier ones, which is
//! how case defaults are layered under a user file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

/// Ordered set of entries; keys are unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: Vec<Entry>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(Error::Config {
                    line,
                    message: format!("expected `key = value`, found `{body}`"),
                });
            };
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::Config {
                    line,
                    message: format!("invalid key `{key}`"),
                });
            }
            cfg.insert(key, value.trim(), line);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    fn insert(&mut self, key: &str, value: &str, line: usize) {
        match self.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => {
                e.value = value.to_string();
                e.line = line;
            }
            None => self.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            }),
        }
    }

    /// Sets a value programmatically (line 0 marks an override).
    pub fn set(&mut self, key: &str, value: impl fmt::Display) {
        self.insert(key, &value.to_string(), 0);
    }

    /// Entries of `other` override those of `self`.
    pub fn merged(mut self, other: &Config) -> Config {
        for e in &other.entries {
            self.insert(&e.key, &e.value, e.line);
        }
        self
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.iter().any(|e| e.key == key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.key.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .map(|e| (e.key.as_str(), e.value.as_str()))
    }

    fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.entry(key)
            .map(|e| e.value.as_str())
            .ok_or_else(|| Error::Config {
                line: 0,
                message: format!("missing key `{key}`"),
            })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let e = self.entry(key).ok_or_else(|| Error::Config {
            line: 0,
            message: format!("missing key `{key}`"),
        })?;
        parse_value(&e.value, key, e.line)
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.contains(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        let e = self.entry(key).ok_or_else(|| Error::Config {
            line: 0,
            message: format!("missing key `{key}`"),
        })?;
        match e.value.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(Error::Config {
                line: e.line,
                message: format!("`{key}` must be true or false, got `{other}`"),
            }),
        }
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let e = self.entry(key).ok_or_else(|| Error::Config {
            line: 0,
            message: format!("missing key `{key}`"),
        })?;
        e.value
            .split(',')
            .map(|s| parse_value(s.trim(), key, e.line))
            .collect()
    }
}

fn parse_value<T: FromStr>(value: &str, key: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        message: format!("cannot parse `{value}` for `{key}`"),
    })
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{} = {}", e.key, e.value)?;
        }
        Ok(())
    }
}
