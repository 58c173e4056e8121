use anyhow::{bail, Context};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

pub const KEYS: &[&str] = &[
    "seed",
    "threads",
    "lattice",
    "tol",
    "t_lo",
    "t_hi",
    "points",
    "k",
    "rhos",
    "bins",
    "rho",
    "n",
    "rho_primes",
    "basis_size",
    "grid",
    "cases",
];

/// `key = value` lines; `#` starts a comment. Lists are comma- or
/// space-separated.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`, got {raw:?}", i + 1);
            };
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                bail!("config line {}: unknown key {key:?}", i + 1);
            }
            entries.insert(key, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key {key}: {e}")),
        }
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|e| anyhow::anyhow!("config key {key}: {e}")))
                .collect::<anyhow::Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Flag, then config, then `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> anyhow::Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    pub fn resolve_list<T: FromStr>(&self, flag: Option<Vec<T>>, key: &str, default: Vec<T>) -> anyhow::Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        Ok(match flag {
            Some(v) => v,
            None => self.get_list(key)?.unwrap_or(default),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values_lists_and_comments() {
        let c = Config::parse("# sweep\nrho = 12\nrho-primes = 2, 4 6\n\nseed = 7 # fixed\n").unwrap();
        assert_eq!(c.get::<f64>("rho").unwrap(), Some(12.0));
        assert_eq!(c.get_list::<f64>("rho_primes").unwrap(), Some(vec![2.0, 4.0, 6.0]));
        assert_eq!(c.resolve(Some(3u64), "seed", 0).unwrap(), 3);
        assert_eq!(c.resolve(None, "seed", 0u64).unwrap(), 7);
        assert_eq!(c.resolve(None, "bins", 32usize).unwrap(), 32);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Config::parse("rho 12").is_err());
        assert!(Config::parse("radius = 12").is_err());
        assert!(Config::parse("rho = twelve").unwrap().get::<f64>("rho").is_err());
    }
}
