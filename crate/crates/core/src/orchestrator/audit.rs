//! Blindness audit for the leash protocol: compare what each prover
//! receives when the input is 0^n against 1^n.
//!
//! The delegation game is where x enters (through the correction bits);
//! the rigidity game never sees x, so the audit runs delegation only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuits::CompiledCircuit;
use crate::leash::LeashParams;
use crate::orchestrator::experiment::leash_trial;
use crate::orchestrator::stats::{derive_seed, tv_distance};
use crate::orchestrator::strategy::{PpMode, PvMode};
use crate::orchestrator::transcript::{Role, Transcript};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindnessReport {
    pub trials: u64,
    /// TV per feature, keyed "<prover>/<feature>".
    pub tv: BTreeMap<String, f64>,
    pub max_pv: f64,
    pub max_pp: f64,
}

/// Coarse, x-sensitive summaries of a prover's incoming messages.
pub fn features(tr: &Transcript) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (role, tag) in [(Role::PV, "pv"), (Role::PP, "pp")] {
        let d = tr.incoming_digest(role);
        out.push((format!("{tag}/digest4"), (d[0] % 4).to_string()));
        let msgs: Vec<_> = tr.incoming(role).collect();
        out.push((format!("{tag}/messages"), msgs.len().to_string()));
        if let Some(first) = msgs.first() {
            out.push((format!("{tag}/first_word4"), (first.data.get(1).copied().unwrap_or(0) % 4).to_string()));
        }
    }
    let z: Vec<u32> = tr.incoming(Role::PP).filter(|m| m.kind == "z").flat_map(|m| m.data.iter().copied()).collect();
    out.push(("pp/z_weight".into(), z.iter().sum::<u32>().to_string()));
    out.push(("pp/z_parity".into(), (z.iter().sum::<u32>() % 2).to_string()));
    if let Some(&z0) = z.first() {
        out.push(("pp/z_first".into(), z0.to_string()));
    }
    out
}

/// Per-feature TV between x = 0^n and x = 1^n over `trials` delegation
/// runs each.
pub fn blindness_audit(circ: &CompiledCircuit, params: &LeashParams, trials: u64, master: u64) -> BlindnessReport {
    let params = LeashParams { p_r: 0.0, ..*params };
    let mut hist: [BTreeMap<String, BTreeMap<String, u64>>; 2] = Default::default();
    for (b, h) in hist.iter_mut().enumerate() {
        let x = vec![b as u8; circ.n];
        let m = derive_seed(master, b as u64, "blindness");
        for i in 0..trials {
            let r = leash_trial(circ, &x, &params, PvMode::Honest, PpMode::Honest, m, i);
            for (k, v) in features(&r.transcript) {
                *h.entry(k).or_default().entry(v).or_insert(0) += 1;
            }
        }
    }
    let keys: Vec<String> = hist[0].keys().chain(hist[1].keys()).cloned().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let empty = BTreeMap::new();
    let tv: BTreeMap<String, f64> = keys
        .into_iter()
        .map(|k| {
            let d = tv_distance(hist[0].get(&k).unwrap_or(&empty), hist[1].get(&k).unwrap_or(&empty));
            (k, d)
        })
        .collect();
    let max_of = |p: &str| tv.iter().filter(|(k, _)| k.starts_with(p)).map(|(_, v)| *v).fold(0.0, f64::max);
    BlindnessReport { trials, max_pv: max_of("pv/"), max_pp: max_of("pp/"), tv }
}
