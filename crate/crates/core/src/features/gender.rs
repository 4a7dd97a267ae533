//! Perceived gender from a first-name dictionary of "male" scores.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GenderDictionary {
    scores: BTreeMap<String, f64>,
}

fn fold_name(name: &str) -> String {
    name.trim().to_lowercase()
}

impl GenderDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `name,male_score` rows; a header row is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut d = GenderDictionary::new();
        for (i, row) in reader.records().enumerate() {
            let row = row.map_err(|e| Error::Parse(format!("gender dictionary: {e}")))?;
            if i == 0 && &row[0] == "name" {
                continue;
            }
            let score = row
                .get(1)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("gender dictionary row {}: expected `name,score`", i + 1)))?;
            d.insert(&row[0], score)?;
        }
        Ok(d)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, name: &str, male_score: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&male_score) {
            return Err(Error::Parse(format!("score {male_score} for `{name}` outside [0, 1]")));
        }
        self.scores.insert(fold_name(name), male_score);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

pub fn perceived_gender(first_name: &str, dict: &GenderDictionary) -> Option<f64> {
    dict.scores.get(&fold_name(first_name)).copied()
}

/// A score below one half reads as female, above as male; exactly one half
/// is left undecided.
pub fn perceived_female(male_score: f64) -> Option<bool> {
    if male_score < 0.5 {
        Some(true)
    } else if male_score > 0.5 {
        Some(false)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        let d = GenderDictionary::parse("name,male_score\nalex,0.8\nMaria,0.03\nsam,0.5\n").unwrap();
        assert_eq!(perceived_gender("Alex", &d), Some(0.8));
        assert_eq!(perceived_gender("MARIA", &d), Some(0.03));
        assert_eq!(perceived_gender("Zed", &d), None);
        let mut d2 = GenderDictionary::new();
        d2.insert("Kim", 0.97).unwrap();
        assert_eq!(perceived_gender("kim", &d2), Some(0.97));
    }

    #[test]
    fn threshold() {
        assert_eq!(perceived_female(0.03), Some(true));
        assert_eq!(perceived_female(0.5), None);
        assert_eq!(perceived_female(0.51), Some(false));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(GenderDictionary::parse("a,1.2\n").is_err());
        assert!(GenderDictionary::parse("a,x\n").is_err());
    }
}
