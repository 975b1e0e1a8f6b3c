//! Line-based `key = value` run configuration with per-command key sets.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;

use crate::error::CliError;

/// A configurable key with its default and a one-line description.
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

pub const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default,
        help,
    }
}

/// Resolved values for one command, defaults filled in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: String,
    pub values: BTreeMap<String, String>,
}

fn parse_line(line: &str, lineno: usize) -> Result<Option<(String, String)>, CliError> {
    let t = line.split('#').next().unwrap_or("").trim();
    if t.is_empty() {
        return Ok(None);
    }
    let (k, v) = t.split_once('=').ok_or_else(|| {
        CliError::Usage(format!(
            "config line {lineno}: expected key = value, got '{t}'"
        ))
    })?;
    Ok(Some((k.trim().to_string(), v.trim().to_string())))
}

impl RunConfig {
    /// Defaults, then the config file, then `--set` overrides. Unknown keys are rejected.
    pub fn resolve(
        command: &str,
        keys: &[Key],
        file: Option<&Path>,
        overrides: &[String],
    ) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, String> = keys
            .iter()
            .map(|k| (k.name.to_string(), k.default.to_string()))
            .collect();
        let mut set = |k: String, v: String| -> Result<(), CliError> {
            if !values.contains_key(&k) {
                let known: Vec<&str> = keys.iter().map(|k| k.name).collect();
                return Err(CliError::Usage(format!(
                    "unknown key '{k}' for {command}; known keys: {}",
                    known.join(", ")
                )));
            }
            values.insert(k, v);
            Ok(())
        };
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Data(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (i, line) in text.lines().enumerate() {
                if let Some((k, v)) = parse_line(line, i + 1)? {
                    set(k, v)?;
                }
            }
        }
        for o in overrides {
            let (k, v) =
                parse_line(o, 0)?.ok_or_else(|| CliError::Usage(format!("empty --set '{o}'")))?;
            set(k, v)?;
        }
        Ok(RunConfig {
            command: command.to_string(),
            values,
        })
    }

    /// `key=value` lines in key order, the input to the config hash.
    pub fn canonical(&self) -> String {
        let mut s = format!("command={}\n", self.command);
        for (k, v) in &self.values {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }

    pub fn str(&self, k: &str) -> &str {
        self.values
            .get(k)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("key '{k}' is not declared"))
    }

    fn parsed<T: std::str::FromStr>(&self, k: &str, what: &str) -> Result<T, CliError> {
        self.str(k)
            .parse()
            .map_err(|_| CliError::Usage(format!("{k} = '{}' is not {what}", self.str(k))))
    }

    pub fn u64(&self, k: &str) -> Result<u64, CliError> {
        self.parsed(k, "a non-negative integer")
    }

    pub fn f64(&self, k: &str) -> Result<f64, CliError> {
        self.parsed(k, "a number")
    }

    pub fn bool(&self, k: &str) -> Result<bool, CliError> {
        self.parsed(k, "true or false")
    }

    /// Exact rational such as `1/16`, `3` or `0.25`.
    pub fn rational(&self, k: &str) -> Result<BigRational, CliError> {
        let s = self.str(k);
        if let Some((int, frac)) = s.split_once('.') {
            let digits = format!("{int}{frac}");
            let num: num_rational::BigRational = format!("{digits}/1{}", "0".repeat(frac.len()))
                .parse()
                .map_err(|_| CliError::Usage(format!("{k} = '{s}' is not a rational")))?;
            return Ok(num);
        }
        self.parsed(k, "a rational")
    }

    pub fn u64_list(&self, k: &str) -> Result<Vec<u64>, CliError> {
        self.str(k)
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("{k}: '{t}' is not an integer")))
            })
            .collect()
    }

    /// One of the listed words.
    pub fn choice<'a>(&self, k: &str, options: &[&'a str]) -> Result<&'a str, CliError> {
        let v = self.str(k);
        options.iter().find(|o| **o == v).copied().ok_or_else(|| {
            CliError::Usage(format!("{k} = '{v}' must be one of {}", options.join(", ")))
        })
    }
}
