//! Experiment configuration: a `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use pi_ocrs::rational::parse_rational;
use pi_ocrs::Rational;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(invalid("format", other, "expected csv or json")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Experiment parameters and how their values are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Rational,
    Count,
}

const PARAMETERS: &[(&str, Kind)] = &[
    ("b", Kind::Rational),
    ("eps", Kind::Rational),
    ("k", Kind::Count),
    ("n", Kind::Count),
    ("t", Kind::Count),
    ("tmax", Kind::Count),
    ("trials", Kind::Count),
];

const GLOBALS: &[&str] = &["seed", "out", "format"];

/// A parameter value the experiment derives from the others.
pub const AUTO: &str = "auto";

fn invalid(key: &str, value: &str, reason: &str) -> CliError {
    CliError::InvalidValue { key: key.into(), value: value.into(), reason: reason.into() }
}

/// Validated parameter overrides keyed by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params(BTreeMap<&'static str, String>);

impl Params {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (name, kind) = PARAMETERS.iter().find(|(k, _)| *k == key).ok_or_else(|| CliError::UnknownKey(key.into()))?;
        let value = value.trim();
        match kind {
            _ if value == AUTO => {}
            Kind::Rational => {
                parse_rational(value).ok_or_else(|| invalid(key, value, "expected a rational such as 3/10 or 0.3"))?;
            }
            Kind::Count => {
                value.parse::<u64>().map_err(|e| invalid(key, value, &e.to_string()))?;
            }
        }
        self.0.insert(name, value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &str)> {
        self.0.iter().map(|(k, v)| (*k, v.as_str()))
    }

    /// Entries of `over` replace those of `self`.
    pub fn overlay(mut self, over: &Params) -> Params {
        for (k, v) in &over.0 {
            self.0.insert(k, v.clone());
        }
        self
    }
}

/// Everything a config file or the flags may set; unset fields fall back to defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    pub params: Params,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "seed" => self.seed = Some(value.parse().map_err(|e: std::num::ParseIntError| invalid(key, value, &e.to_string()))?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            _ => self.params.set(key, value)?,
        }
        Ok(())
    }

    /// Lines `key = value` (or `key value`); `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = Settings::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or_else(|| CliError::ConfigSyntax { line: idx + 1, msg: format!("expected `key = value`, got `{line}`") })?;
            let key = key.trim();
            if !GLOBALS.contains(&key) && !PARAMETERS.iter().any(|(k, _)| *k == key) {
                return Err(CliError::UnknownKey(key.into()));
            }
            settings.set(key, value)?;
        }
        Ok(settings)
    }

    /// `over` wins wherever it sets a value.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            params: self.params.overlay(&over.params),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
        }
    }
}

/// A named experiment with its overrides, seed and output target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub name: String,
    pub params: Params,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(name: &str, settings: Settings) -> Self {
        Self {
            name: name.to_string(),
            params: settings.params,
            seed: settings.seed.unwrap_or(0),
            out: settings.out,
            format: settings.format.unwrap_or_default(),
        }
    }

    pub fn with_param(mut self, key: &str, value: &str) -> Result<Self> {
        self.params.set(key, value)?;
        Ok(self)
    }
}

/// Parameters resolved against an experiment's defaults.
#[derive(Clone, Debug)]
pub struct Args {
    experiment: &'static str,
    values: Params,
}

impl Args {
    /// Rejects overrides the experiment does not declare.
    pub fn resolve(experiment: &'static str, defaults: &[(&'static str, &'static str)], overrides: &Params) -> Result<Self> {
        if let Some(key) = overrides.keys().find(|k| !defaults.iter().any(|(d, _)| d == k)) {
            return Err(CliError::UnusedKey { experiment: experiment.into(), key: key.into() });
        }
        let mut values = Params::default();
        for (k, v) in defaults {
            values.set(k, v)?;
        }
        Ok(Self { experiment, values: values.overlay(overrides) })
    }

    fn raw(&self, key: &str) -> &str {
        self.values.get(key).unwrap_or_else(|| panic!("experiment `{}` declares no default for `{key}`", self.experiment))
    }

    pub fn rational(&self, key: &str) -> Rational {
        self.maybe_rational(key).unwrap_or_else(|| panic!("`{key}` has no automatic value"))
    }

    pub fn count(&self, key: &str) -> usize {
        self.maybe_count(key).unwrap_or_else(|| panic!("`{key}` has no automatic value"))
    }

    /// `None` when the value is `auto`.
    pub fn maybe_rational(&self, key: &str) -> Option<Rational> {
        Some(self.raw(key)).filter(|v| *v != AUTO).map(|v| parse_rational(v).expect("validated on insertion"))
    }

    pub fn maybe_count(&self, key: &str) -> Option<usize> {
        Some(self.raw(key)).filter(|v| *v != AUTO).map(|v| v.parse().expect("validated on insertion"))
    }

    pub fn trials(&self) -> u64 {
        self.raw("trials").parse().expect("validated on insertion")
    }

    pub fn entries(&self) -> Vec<(String, String)> {
        self.values.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Settings::parse("# defaults\nb = 1/4\nseed 3\nformat = json\n").unwrap();
        let mut flags = Settings::default();
        flags.set("b", "0.3").unwrap();
        let merged = file.overlay(flags);
        assert_eq!(merged.params.get("b"), Some("0.3"));
        assert_eq!(merged.seed, Some(3));
        assert_eq!(merged.format, Some(Format::Json));
    }

    #[test]
    fn unknown_and_malformed_keys() {
        assert!(matches!(Settings::parse("beta = 2"), Err(CliError::UnknownKey(k)) if k == "beta"));
        assert!(matches!(Settings::parse("b = x"), Err(CliError::InvalidValue { .. })));
        assert!(matches!(Settings::parse("k = -1"), Err(CliError::InvalidValue { .. })));
        assert!(matches!(Settings::parse("orphan"), Err(CliError::ConfigSyntax { line: 1, .. })));
    }

    #[test]
    fn defaults_and_unused_overrides() {
        let mut over = Params::default();
        over.set("n", "12").unwrap();
        let args = Args::resolve("demo", &[("n", "4"), ("b", "1/2")], &over).unwrap();
        assert_eq!(args.count("n"), 12);
        assert_eq!(args.rational("b"), pi_ocrs::rational::rat(1, 2));
        over.set("b", "auto").unwrap();
        assert_eq!(Args::resolve("demo", &[("n", "4"), ("b", "1/2")], &over).unwrap().maybe_rational("b"), None);
        over.set("t", "2").unwrap();
        assert!(matches!(Args::resolve("demo", &[("n", "4")], &over), Err(CliError::UnusedKey { .. })));
    }
}
