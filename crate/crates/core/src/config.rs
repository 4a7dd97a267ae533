//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are
//! lower_snake_case and may carry a dotted suffix (`rating_max.2020 = 8`)
//! for per-year overrides.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", i + 1)));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(KeyValues { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.insert(key.into(), value.into());
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| Error::Config(format!("`{key}` = `{v}`: {e}"))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Canonical serialization, sorted by key.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub min: i64,
    pub max: i64,
}

impl Bounds {
    pub fn contains(&self, v: i64) -> bool {
        self.min <= v && v <= self.max
    }
}

/// Structural limits the corpus loader and validator enforce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusConfig {
    pub year_min: i32,
    pub year_max: i32,
    pub rating: Bounds,
    pub confidence: Bounds,
    pub rating_by_year: BTreeMap<i32, Bounds>,
    pub confidence_by_year: BTreeMap<i32, Bounds>,
    pub embedding_dim: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            year_min: 2017,
            year_max: 2022,
            rating: Bounds { min: 1, max: 10 },
            confidence: Bounds { min: 1, max: 5 },
            rating_by_year: BTreeMap::new(),
            confidence_by_year: BTreeMap::new(),
            embedding_dim: 768,
        }
    }
}

impl CorpusConfig {
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let mut cfg = CorpusConfig::default();
        if let Some(v) = kv.parsed("year_min")? {
            cfg.year_min = v;
        }
        if let Some(v) = kv.parsed("year_max")? {
            cfg.year_max = v;
        }
        if let Some(v) = kv.parsed("rating_min")? {
            cfg.rating.min = v;
        }
        if let Some(v) = kv.parsed("rating_max")? {
            cfg.rating.max = v;
        }
        if let Some(v) = kv.parsed("confidence_min")? {
            cfg.confidence.min = v;
        }
        if let Some(v) = kv.parsed("confidence_max")? {
            cfg.confidence.max = v;
        }
        if let Some(v) = kv.parsed("embedding_dim")? {
            cfg.embedding_dim = v;
        }
        for (key, _) in kv.iter() {
            let Some((base, year)) = key.split_once('.') else {
                continue;
            };
            let Ok(year) = year.parse::<i32>() else {
                continue;
            };
            let (table, default) = match base {
                "rating_min" | "rating_max" => (&mut cfg.rating_by_year, cfg.rating),
                "confidence_min" | "confidence_max" => {
                    (&mut cfg.confidence_by_year, cfg.confidence)
                }
                _ => continue,
            };
            let value: i64 = kv.parsed(key)?.expect("key present");
            let entry = table.entry(year).or_insert(default);
            if base.ends_with("_min") {
                entry.min = value;
            } else {
                entry.max = value;
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_key_values(&KeyValues::read(path)?)
    }

    fn check(&self) -> Result<()> {
        if self.year_min > self.year_max {
            return Err(Error::Config(format!(
                "year_min {} exceeds year_max {}",
                self.year_min, self.year_max
            )));
        }
        let all = std::iter::once(self.rating)
            .chain(std::iter::once(self.confidence))
            .chain(self.rating_by_year.values().copied())
            .chain(self.confidence_by_year.values().copied());
        for b in all {
            if b.min > b.max {
                return Err(Error::Config(format!("empty bound {}..={}", b.min, b.max)));
            }
        }
        Ok(())
    }

    pub fn rating_bounds(&self, year: i32) -> Bounds {
        self.rating_by_year.get(&year).copied().unwrap_or(self.rating)
    }

    pub fn confidence_bounds(&self, year: i32) -> Bounds {
        self.confidence_by_year
            .get(&year)
            .copied()
            .unwrap_or(self.confidence)
    }

    pub fn contains_year(&self, year: i32) -> bool {
        self.year_min <= year && year <= self.year_max
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.set("year_min", self.year_min.to_string());
        kv.set("year_max", self.year_max.to_string());
        kv.set("rating_min", self.rating.min.to_string());
        kv.set("rating_max", self.rating.max.to_string());
        kv.set("confidence_min", self.confidence.min.to_string());
        kv.set("confidence_max", self.confidence.max.to_string());
        kv.set("embedding_dim", self.embedding_dim.to_string());
        for (year, b) in &self.rating_by_year {
            kv.set(format!("rating_min.{year}"), b.min.to_string());
            kv.set(format!("rating_max.{year}"), b.max.to_string());
        }
        for (year, b) in &self.confidence_by_year {
            kv.set(format!("confidence_min.{year}"), b.min.to_string());
            kv.set(format!("confidence_max.{year}"), b.max.to_string());
        }
        kv
    }
}
