//! Sequential amplification: κ copies on (Q, x) and κ on (Q', x), where Q'
//! flips the output wire.  The verifier outputs 1 when only the Q copies
//! clear the threshold (c - Δ/2)κ, 0 when only the Q' copies do, and
//! aborts on accept-accept or reject-reject.

use serde::{Deserialize, Serialize};

use crate::circuits::{compile, Circuit, CompiledCircuit};
use crate::leash::{self, LeashParams};
use crate::orchestrator::experiment::{leash_trial, ConfigError, ExperimentSetup};
use crate::orchestrator::stats::derive_seed;

/// Rigidity probability used by the wrapper when none is configured: the
/// honest gap between f(x) = 1 and f(x) = 0 is (1 - p_r)/3.
pub const SEQ_P_R: f64 = 0.5;
/// Target failure probability 2 exp(-Δ²κ/2) when κ is derived.
pub const SEQ_FAILURE: f64 = 0.05;
pub const CALIBRATION_TRIALS: u64 = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqOutcome {
    One,
    Zero,
    Abort,
}

pub fn threshold(c: f64, delta: f64, kappa: usize) -> f64 {
    (c - delta / 2.0) * kappa as f64
}

/// The decision rule on the two acceptance counts.
pub fn decide(wt: usize, wt_prime: usize, c: f64, delta: f64, kappa: usize) -> SeqOutcome {
    let th = threshold(c, delta, kappa);
    match (wt as f64 >= th, wt_prime as f64 >= th) {
        (true, false) => SeqOutcome::One,
        (false, true) => SeqOutcome::Zero,
        _ => SeqOutcome::Abort,
    }
}

/// Smallest κ with 2 exp(-Δ²κ/2) <= failure.
pub fn kappa_for(delta: f64, failure: f64) -> usize {
    ((2.0 * (2.0 / failure).ln()) / (delta * delta)).ceil().max(1.0) as usize
}

/// Seq(P, c, Δ, κ) around a single-trial closure: `trial(prime, k)` runs
/// copy k on Q (prime = false) or Q' (prime = true) and returns the verdict.
pub fn run_seq(c: f64, delta: f64, kappa: usize, mut trial: impl FnMut(bool, usize) -> bool) -> (SeqOutcome, usize, usize) {
    let wt = (0..kappa).filter(|&k| trial(false, k)).count();
    let wt_prime = (0..kappa).filter(|&k| trial(true, k)).count();
    (decide(wt, wt_prime, c, delta, kappa), wt, wt_prime)
}

/// The leash instances on Q and Q' with a common m, so the rigidity branch
/// behaves identically on both.
#[derive(Clone, Debug)]
pub struct LeashPair {
    pub q: CompiledCircuit,
    pub q_prime: CompiledCircuit,
    pub params: LeashParams,
}

impl LeashPair {
    pub fn new(circuit: &Circuit, params: LeashParams) -> Result<LeashPair, ConfigError> {
        let q = compile(circuit)?;
        let q_prime = compile(&circuit.append_x_to_output())?;
        let m = params.m.unwrap_or(0).max(leash::min_m(&q)).max(leash::min_m(&q_prime));
        Ok(LeashPair { q, q_prime, params: LeashParams { m: Some(m), ..params } })
    }

    pub fn trial(&self, x: &[u8], setup: &ExperimentSetup, prime: bool, master: u64, index: u64) -> bool {
        let circ = if prime { &self.q_prime } else { &self.q };
        leash_trial(circ, x, &self.params, setup.pv, setup.pp, master, index).accept
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Acceptance on Q and on Q'.
    pub rate_q: f64,
    pub rate_q_prime: f64,
    pub c_hat: f64,
    pub s_hat: f64,
    pub delta_hat: f64,
    pub trials: u64,
}

/// ĉ and ŝ as the larger and smaller of the two measured acceptance rates.
pub fn calibrate(pair: &LeashPair, x: &[u8], setup: &ExperimentSetup, trials: u64, master: u64) -> Calibration {
    let rate = |prime: bool, tag: &str| {
        let m = derive_seed(master, 0, tag);
        (0..trials).filter(|&i| pair.trial(x, setup, prime, m, i)).count() as f64 / trials as f64
    };
    let (rq, rp) = (rate(false, "calibrate-q"), rate(true, "calibrate-q-prime"));
    let (c_hat, s_hat) = (rq.max(rp), rq.min(rp));
    Calibration { rate_q: rq, rate_q_prime: rp, c_hat, s_hat, delta_hat: c_hat - s_hat, trials }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqReport {
    pub c: f64,
    pub delta: f64,
    pub kappa: usize,
    pub threshold: f64,
    pub p_r: f64,
    pub m: usize,
    pub calibration: Option<Calibration>,
    pub runs: u64,
    pub one: u64,
    pub zero: u64,
    pub abort: u64,
    /// f(x) from the statevector oracle: 1 iff ||Pi_0 Q|x>||^2 >= 2/3,
    /// 0 iff it is <= 1/3.
    pub expected: Option<u8>,
}

/// `runs` independent executions of Seq around the leash protocol.  Unset
/// (c, Δ) are calibrated first; unset κ follows from Δ.
pub fn run_seq_experiment(setup: &ExperimentSetup, runs: u64, master: u64) -> Result<SeqReport, ConfigError> {
    if runs == 0 {
        return Err(ConfigError::Invalid("trials must be at least 1".into()));
    }
    let mut lp = setup.params.leash();
    lp.p_r = setup.params.p_r.unwrap_or(SEQ_P_R);
    let pair = LeashPair::new(&setup.circuit, lp)?;
    if setup.input.len() != pair.q.n {
        return Err(ConfigError::Invalid(format!("input has {} bits, circuit has {} wires", setup.input.len(), pair.q.n)));
    }
    let x = &setup.input;
    let calibration = match (setup.params.c, setup.params.delta) {
        (Some(_), Some(_)) => None,
        _ => Some(calibrate(&pair, x, setup, CALIBRATION_TRIALS, master)),
    };
    let c = setup.params.c.or(calibration.as_ref().map(|k| k.c_hat)).expect("calibrated");
    let delta = setup.params.delta.or(calibration.as_ref().map(|k| k.delta_hat)).expect("calibrated");
    if delta <= 0.0 {
        return Err(ConfigError::Invalid("calibrated gap is zero; the wrapper cannot separate Q from Q'".into()));
    }
    let kappa = setup.params.kappa.unwrap_or_else(|| kappa_for(delta, SEQ_FAILURE));
    let mut rep = SeqReport {
        c,
        delta,
        kappa,
        threshold: threshold(c, delta, kappa),
        p_r: pair.params.p_r,
        m: pair.params.m.expect("fixed m"),
        calibration,
        runs,
        one: 0,
        zero: 0,
        abort: 0,
        expected: expected_output(setup.circuit.output_probability(x)?),
    };
    for r in 0..runs {
        let run_master = derive_seed(master, r, "seq-run");
        let (out, _, _) = run_seq(c, delta, kappa, |prime, k| {
            let index = 2 * k as u64 + prime as u64;
            pair.trial(x, setup, prime, run_master, index)
        });
        match out {
            SeqOutcome::One => rep.one += 1,
            SeqOutcome::Zero => rep.zero += 1,
            SeqOutcome::Abort => rep.abort += 1,
        }
    }
    Ok(rep)
}

pub fn expected_output(p: f64) -> Option<u8> {
    if p >= 2.0 / 3.0 {
        Some(1)
    } else if p <= 1.0 / 3.0 {
        Some(0)
    } else {
        None
    }
}
