//! Country of an author from the registered suffix of their email domain.

use std::collections::BTreeMap;
use std::path::Path;

use crate::corpus::Author;
use crate::error::{Error, Result};

const BUNDLED_TLDS: &str = include_str!("../../data/tld_country.csv");
const BUNDLED_OVERRIDES: &str = include_str!("../../data/domain_overrides.csv");

/// Countries counted as North America.
pub const NORTH_AMERICA: [&str; 3] = ["US", "CA", "MX"];

/// Domain suffix to ISO country code, resolved by longest matching suffix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TldTable {
    suffixes: BTreeMap<String, String>,
}

fn fold_domain(domain: &str) -> String {
    let d = domain.rsplit('@').next().unwrap_or(domain);
    d.trim().trim_end_matches('.').to_lowercase()
}

impl TldTable {
    /// Country-code TLDs plus the bundled institutional overrides.
    pub fn bundled() -> Self {
        let mut t = Self::parse(BUNDLED_TLDS).expect("bundled TLD table parses");
        t.extend(Self::parse(BUNDLED_OVERRIDES).expect("bundled overrides parse"));
        t
    }

    /// Parses `suffix,country` rows; a header row is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut suffixes = BTreeMap::new();
        for (i, row) in reader.records().enumerate() {
            let row = row.map_err(|e| Error::Parse(format!("TLD table: {e}")))?;
            if i == 0 && &row[0] == "suffix" {
                continue;
            }
            if row.len() != 2 || row[0].is_empty() || row[1].len() != 2 {
                return Err(Error::Parse(format!("TLD table row {}: expected `suffix,XX`", i + 1)));
            }
            suffixes.insert(fold_domain(&row[0]), row[1].to_uppercase());
        }
        Ok(TldTable { suffixes })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Adds entries, replacing existing suffixes.
    pub fn extend(&mut self, other: TldTable) {
        self.suffixes.extend(other.suffixes);
    }

    pub fn len(&self) -> usize {
        self.suffixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty()
    }

    /// Accepts a bare domain or a full address.
    pub fn country_of(&self, domain: &str) -> Option<&str> {
        let d = fold_domain(domain);
        let mut rest = d.as_str();
        loop {
            if let Some(c) = self.suffixes.get(rest) {
                return Some(c);
            }
            rest = rest.split_once('.')?.1;
        }
    }
}

/// The email domain recorded for `year`, else the most recent one on file.
pub fn email_domain_at(author: &Author, year: i32) -> Option<&str> {
    author
        .email_domains
        .get(&year)
        .or_else(|| author.email_domains.values().next_back())
        .map(String::as_str)
}

pub fn geography_of_author(author: &Author, year: i32, table: &TldTable) -> Option<String> {
    table.country_of(email_domain_at(author, year)?).map(str::to_string)
}

pub fn is_north_america(country: &str) -> bool {
    NORTH_AMERICA.contains(&country)
}
