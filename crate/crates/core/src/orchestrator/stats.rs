//! Per-trial seed derivation and acceptance statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Seed for trial `index` under `master`, tagged so independent streams
/// (registers, verifier, each prover) never coincide.
pub fn derive_seed(master: u64, index: u64, tag: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    h.update(tag.as_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("32-byte digest"))
}

/// Wilson score interval at 95%.
pub fn wilson(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub trials: u64,
    pub accepted: u64,
}

impl Tally {
    pub fn add(&mut self, accept: bool) {
        self.trials += 1;
        self.accepted += accept as u64;
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.accepted as f64 / self.trials as f64
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentStats {
    pub trials: u64,
    pub accepted: u64,
    pub rate: f64,
    pub wilson95: (f64, f64),
    /// Keyed by sub-round name.
    pub breakdown: BTreeMap<String, Tally>,
}

impl ExperimentStats {
    pub fn record(&mut self, sub_round: &str, accept: bool) {
        self.trials += 1;
        self.accepted += accept as u64;
        self.breakdown.entry(sub_round.to_string()).or_default().add(accept);
        self.rate = self.accepted as f64 / self.trials as f64;
        self.wilson95 = wilson(self.accepted, self.trials);
    }

    pub fn sub(&self, name: &str) -> Tally {
        self.breakdown.get(name).cloned().unwrap_or_default()
    }
}

/// Total-variation distance between two empirical distributions.
pub fn tv_distance<K: Ord + Clone>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> f64 {
    let (na, nb) = (a.values().sum::<u64>() as f64, b.values().sum::<u64>() as f64);
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let pa = |k: &K| a.get(k).copied().unwrap_or(0) as f64 / na.max(1.0);
    let pb = |k: &K| b.get(k).copied().unwrap_or(0) as f64 / nb.max(1.0);
    0.5 * keys.iter().map(|k| (pa(k) - pb(k)).abs()).sum::<f64>()
}
