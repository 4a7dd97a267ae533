use std::collections::BTreeMap;

use super::similarity::normalized_levenshtein_folded;
use crate::corpus::{Author, ScholarProfile};
use crate::error::{Error, Result};

pub const DEFAULT_SCHOLAR_THRESHOLD: f64 = 0.8;

fn fold(s: &str) -> Vec<char> {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
        .chars()
        .collect()
}

struct Folded<'a> {
    profile: &'a ScholarProfile,
    name: Vec<char>,
    name_institution: Vec<char>,
}

/// Profile table with search strings pre-folded.
pub struct ScholarMatcher<'a> {
    by_id: &'a BTreeMap<String, ScholarProfile>,
    folded: Vec<Folded<'a>>,
    threshold: f64,
}

impl<'a> ScholarMatcher<'a> {
    pub fn new(profiles: &'a BTreeMap<String, ScholarProfile>, threshold: f64) -> Self {
        let folded = profiles
            .values()
            .map(|p| Folded {
                profile: p,
                name: fold(&p.name),
                name_institution: fold(&format!("{} {}", p.name, p.institution)),
            })
            .collect();
        ScholarMatcher {
            by_id: profiles,
            folded,
            threshold,
        }
    }

    fn search(&self, query: &[char], with_institution: bool) -> Option<&'a ScholarProfile> {
        let mut best: Option<(&'a ScholarProfile, f64)> = None;
        for f in &self.folded {
            let target: &[char] = if with_institution { &f.name_institution } else { &f.name };
            let longest = query.len().max(target.len());
            let diff = query.len().abs_diff(target.len());
            if longest > 0 && 1.0 - (diff as f64 / longest as f64) < self.threshold {
                continue;
            }
            let s = normalized_levenshtein_folded(query, target).value();
            // Profiles iterate in id order, so strict `>` keeps the smallest id on ties.
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((f.profile, s));
            }
        }
        best.filter(|(_, s)| *s >= self.threshold).map(|(p, _)| p)
    }

    /// Explicit scholar id first, then "name + latest institution", then the
    /// name alone.
    pub fn find(&self, author: &Author) -> Result<Option<&'a ScholarProfile>> {
        if let Some(id) = &author.scholar_id {
            return self.by_id.get(id).map(Some).ok_or_else(|| {
                Error::DanglingReference(format!(
                    "author `{}` names scholar profile `{id}` which is absent",
                    author.id
                ))
            });
        }
        if let Some(inst) = author.latest_institution() {
            let q = fold(&format!("{} {}", author.full_name, inst));
            if let Some(p) = self.search(&q, true) {
                return Ok(Some(p));
            }
        }
        Ok(self.search(&fold(&author.full_name), false))
    }
}

pub fn match_scholar<'a>(
    author: &Author,
    profiles: &'a BTreeMap<String, ScholarProfile>,
) -> Result<Option<&'a ScholarProfile>> {
    ScholarMatcher::new(profiles, DEFAULT_SCHOLAR_THRESHOLD).find(author)
}
