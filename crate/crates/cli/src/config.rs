//! `key = value` settings files and the precedence between flags, the
//! environment and the file.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

pub const BUDGET_ENV: &str = "SLHASH_BUDGET";

/// Default state and candidate budget for enumerations.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: HashMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "n", "p", "a", "b", "ell", "seed", "workers", "budget", "min_segment", "radius", "kmax", "k", "trials",
    "table", "mode",
];

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", no + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key `{key}`", no + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Settings { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))))
            .transpose()
    }

    /// Flag, then config file, then `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.parsed(key)?.unwrap_or(default)),
        }
    }

    /// Flag, then `SLHASH_BUDGET`, then config file, then the default.
    pub fn budget(&self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(b) = flag {
            return Ok(b);
        }
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            return v
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("{BUDGET_ENV}: {e}")));
        }
        Ok(self.parsed("budget")?.unwrap_or(DEFAULT_BUDGET))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves() {
        let s = Settings::parse("# params\np = 11\nmin-segment = 8 # trits\n\nseed=7").unwrap();
        assert_eq!(s.raw("p"), Some("11"));
        assert_eq!(s.resolve::<u64>(None, "p", 3).unwrap(), 11);
        assert_eq!(s.resolve::<u64>(Some(5), "p", 3).unwrap(), 5);
        assert_eq!(s.resolve::<usize>(None, "min_segment", 64).unwrap(), 8);
        assert_eq!(s.resolve::<u64>(None, "n", 3).unwrap(), 3);
        assert!(Settings::parse("bogus = 1").is_err());
        assert!(Settings::parse("p 11").is_err());
        assert!(Settings::parse("p = x").unwrap().resolve::<u64>(None, "p", 3).is_err());
    }
}
