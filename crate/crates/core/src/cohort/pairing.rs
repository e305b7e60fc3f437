use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest cohort for which a ring has no mutual pair or triple.
pub const MIN_COHORT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingAssignment {
    pub rng_seed: u64,
    /// Shuffled roster; each name audits the next, the last audits the first.
    pub ring: Vec<String>,
    /// Auditor to auditee.
    pub edges: BTreeMap<String, String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairingError {
    #[error("roster is empty")]
    Empty,
    #[error(
        "cannot pair {0} participants: at least {MIN_COHORT} are needed to avoid mutual audits"
    )]
    TooFew(usize),
    #[error("duplicate name `{0}` in roster")]
    Duplicate(String),
}

impl PairingAssignment {
    pub fn auditee_of(&self, auditor: &str) -> Option<&str> {
        self.edges.get(auditor).map(String::as_str)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pairing serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<PairingAssignment> {
        serde_json::from_str(text)
    }
}

/// Shuffles `names` with a seeded Fisher-Yates and closes the result into
/// a ring.
pub fn make_pairing<S: AsRef<str>>(
    names: &[S],
    rng_seed: u64,
) -> Result<PairingAssignment, PairingError> {
    if names.is_empty() {
        return Err(PairingError::Empty);
    }
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_ref()) {
            return Err(PairingError::Duplicate(n.as_ref().to_string()));
        }
    }
    if names.len() < MIN_COHORT {
        return Err(PairingError::TooFew(names.len()));
    }
    let mut ring: Vec<String> = names.iter().map(|n| n.as_ref().to_string()).collect();
    ring.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let edges = ring
        .iter()
        .zip(ring.iter().cycle().skip(1))
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();
    Ok(PairingAssignment {
        rng_seed,
        ring,
        edges,
    })
}

/// One name per line; blank lines and `#` comments are skipped.
pub fn parse_roster(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}
