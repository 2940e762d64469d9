//! Flat `key = value` config files merged under command-line flags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Config-file values, with a record of which keys a command consumed.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    seen: BTreeSet<String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Settings, CliError> {
        let Some(path) = path else { return Ok(Settings::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Settings::parse(&text)
    }

    /// Blank lines and lines starting with `#` are skipped; keys may use `-` or `_`.
    pub fn parse(text: &str) -> Result<Settings, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected `key = value`", i + 1)))?;
            let key = k.trim().replace('_', "-");
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::usage(format!("config line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Settings { values, seen: BTreeSet::new() })
    }

    /// The flag value if given, else the config value, else `None`.
    pub fn get<T: FromStr>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        self.seen.insert(key.to_string());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::usage(format!("config key `{key}`: {e}"))),
        }
    }

    pub fn get_or<T: FromStr>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        Ok(self.get(key, flag)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.get(key, flag)?.ok_or_else(|| CliError::usage(format!("missing required `{key}`")))
    }

    /// Fails on config keys the command never asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        match self.values.keys().find(|k| !self.seen.contains(*k)) {
            Some(k) => Err(CliError::usage(format!("unknown config key `{k}`"))),
            None => Ok(()),
        }
    }
}

/// Comma-separated list.
pub fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| CliError::usage(format!("bad {what} `{}`", s.trim()))))
        .collect()
}

/// `a:b` with `a <= b`.
pub fn parse_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::usage(format!("range must look like a:b, got `{text}`"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}
