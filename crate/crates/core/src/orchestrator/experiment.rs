//! Monte Carlo runner: per-trial seeding, one-trial drivers for each
//! protocol, and acceptance statistics.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::{compile, Circuit, CompiledCircuit};
use crate::dogwalker::{self, run_dogwalker, DwParams, DwResult};
use crate::epr::{run_epr, EprResult, RoundChoice};
use crate::games::{GameConfig, GameKind};
use crate::keys::RoundType;
use crate::leash::{self, run_leash, LeashParams, LeashResult};
use crate::orchestrator::stats::{derive_seed, ExperimentStats};
use crate::orchestrator::strategy::{Pp, PpMode, Pv, PvMode};
use crate::qsim::{Party, Registers};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Epr,
    Leash,
    Dogwalker,
    Seq,
}

impl Protocol {
    pub fn parse(s: &str) -> Result<Protocol, ConfigError> {
        match s {
            "epr" => Ok(Protocol::Epr),
            "leash" => Ok(Protocol::Leash),
            "dogwalker" => Ok(Protocol::Dogwalker),
            "seq" => Ok(Protocol::Seq),
            other => Err(ConfigError::Invalid(format!("unknown protocol '{other}'"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("circuit: {0}")]
    Circuit(#[from] crate::circuits::CircuitError),
    #[error("adversary: {0}")]
    Adversary(#[from] crate::orchestrator::strategy::AdversaryError),
}

/// Tunables shared by every protocol; unset keys keep protocol defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Probability of a computation round (EPR protocol and leash delegation).
    pub p: f64,
    /// Leash: probability of the rigidity game (protocol default when unset).
    pub p_r: Option<f64>,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub m: Option<usize>,
    pub kappa: Option<usize>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    /// Fix the EPR / delegation round type.
    pub round: Option<RoundType>,
}

impl Default for Params {
    fn default() -> Self {
        let dw = DwParams::default();
        Params {
            p: 1.0 / 3.0,
            p_r: None,
            p1: dw.p1,
            p2: dw.p2,
            p3: dw.p3,
            p4: dw.p4,
            m: None,
            kappa: None,
            c: None,
            delta: None,
            round: None,
        }
    }
}

impl Params {
    /// `key=val,key=val`.  Keys: p, p_r, p1..p4, m, kappa (or κ), c,
    /// delta, round.  Giving three of p1..p4 fixes the fourth.
    pub fn parse(s: &str) -> Result<Params, ConfigError> {
        let mut out = Params::default();
        let mut dw_given = [false; 4];
        let bad = |k: &str, v: &str| ConfigError::Invalid(format!("bad value '{v}' for '{k}'"));
        for kv in s.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::Invalid(format!("expected key=val, got '{kv}'")))?;
            let (k, v) = (k.trim(), v.trim());
            let f = || v.parse::<f64>().map_err(|_| bad(k, v));
            let u = || v.parse::<usize>().map_err(|_| bad(k, v));
            match k {
                "p" => out.p = f()?,
                "p_r" => out.p_r = Some(f()?),
                "p1" | "p₁" => (out.p1, dw_given[0]) = (f()?, true),
                "p2" | "p₂" => (out.p2, dw_given[1]) = (f()?, true),
                "p3" | "p₃" => (out.p3, dw_given[2]) = (f()?, true),
                "p4" | "p₄" => (out.p4, dw_given[3]) = (f()?, true),
                "m" => out.m = Some(u()?),
                "kappa" | "κ" => out.kappa = Some(u()?),
                "c" => out.c = Some(f()?),
                "delta" | "Δ" => out.delta = Some(f()?),
                "round" => {
                    out.round = Some(match v {
                        "computation" => RoundType::Computation,
                        "x_test" | "x" => RoundType::XTest,
                        "z_test" | "z" => RoundType::ZTest,
                        _ => return Err(bad(k, v)),
                    })
                }
                other => return Err(ConfigError::Invalid(format!("unknown parameter '{other}'"))),
            }
        }
        if dw_given.iter().filter(|g| **g).count() == 3 {
            let ps = [out.p1, out.p2, out.p3, out.p4];
            let rest = 1.0 - (0..4).filter(|&i| dw_given[i]).map(|i| ps[i]).sum::<f64>();
            match dw_given.iter().position(|g| !g) {
                Some(0) => out.p1 = rest,
                Some(1) => out.p2 = rest,
                Some(2) => out.p3 = rest,
                _ => out.p4 = rest,
            }
        }
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (k, v) in [("p", self.p), ("p_r", self.p_r.unwrap_or(0.0))] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::Invalid(format!("{k} = {v} is not a probability")));
            }
        }
        self.dw().validate().map_err(ConfigError::Invalid)?;
        if let Some(c) = self.c {
            if !(c > 0.0 && c <= 1.0) {
                return Err(ConfigError::Invalid(format!("c = {c} must lie in (0, 1]")));
            }
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d <= 1.0) {
                return Err(ConfigError::Invalid(format!("delta = {d} must lie in (0, 1]")));
            }
        }
        if self.kappa == Some(0) {
            return Err(ConfigError::Invalid("kappa must be at least 1".into()));
        }
        Ok(())
    }

    pub fn rounds(&self) -> RoundChoice {
        match self.round {
            Some(r) => RoundChoice::Fixed(r),
            None => RoundChoice::Random { p: self.p },
        }
    }

    pub fn leash(&self) -> LeashParams {
        let p_r = self.p_r.unwrap_or(LeashParams::default().p_r);
        LeashParams { p_r, m: self.m, rounds: self.rounds(), ..Default::default() }
    }

    pub fn dw(&self) -> DwParams {
        DwParams { p1: self.p1, p2: self.p2, p3: self.p3, p4: self.p4, m: self.m, ..Default::default() }
    }
}

/// Independent rng streams of one trial.
pub struct TrialRngs {
    pub regs: u64,
    pub verifier: ChaCha8Rng,
    pub pv: Pv,
    pub pp: Pp,
}

pub fn trial_rngs(master: u64, index: u64, pv: PvMode, pp: PpMode) -> TrialRngs {
    TrialRngs {
        regs: derive_seed(master, index, "registers"),
        verifier: ChaCha8Rng::seed_from_u64(derive_seed(master, index, "verifier")),
        pv: Pv::new(pv, derive_seed(master, index, "pv")),
        pp: Pp::new(pp, derive_seed(master, index, "pp")),
    }
}

pub fn epr_trial(circ: &CompiledCircuit, x: &[u8], rounds: RoundChoice, pp: PpMode, master: u64, index: u64) -> EprResult {
    let mut s = trial_rngs(master, index, PvMode::Honest, pp);
    let mut regs = Registers::epr_pairs(circ.n + circ.t(), s.regs);
    run_epr(circ, x, rounds, &mut s.pp, &mut regs, &mut s.verifier)
}

pub fn leash_trial(circ: &CompiledCircuit, x: &[u8], params: &LeashParams, pv: PvMode, pp: PpMode, master: u64, index: u64) -> LeashResult {
    let mut s = trial_rngs(master, index, pv, pp);
    let mut regs = Registers::epr_pairs(leash::effective_m(circ, params) + 2, s.regs);
    run_leash(circ, x, params, &mut s.pv, &mut s.pp, &mut regs, &mut s.verifier)
}

pub fn dw_trial(circ: &CompiledCircuit, x: &[u8], params: &DwParams, pv: PvMode, pp: PpMode, master: u64, index: u64) -> DwResult {
    let mut s = trial_rngs(master, index, pv, pp);
    let mut regs = Registers::epr_pairs(dogwalker::effective_m(circ, params) + 2, s.regs);
    run_dogwalker(circ, x, params, &mut s.pv, &mut s.pp, &mut regs, &mut s.verifier)
}

/// One standalone game round with the given strategies.
pub fn game_trial(kind: GameKind, cfg: &GameConfig, pv: PvMode, pp: PpMode, master: u64, index: u64) -> (String, bool) {
    let mut s = trial_rngs(master, index, pv, pp);
    let round = kind.sample(cfg, &mut s.verifier);
    let mut regs = Registers::epr_pairs(kind.pairs(cfg), s.regs);
    let a1 = s.pv.answer(&round.q[0], &mut regs.view(Party::A));
    let a2 = s.pp.answer(&round.q[1], &mut regs.view(Party::B));
    (round.name.clone(), round.accepts(&a1, &a2))
}

/// Outcome of one trial in protocol-neutral form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub sub_round: String,
    pub accept: bool,
    pub output: Option<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentSetup {
    pub protocol: Protocol,
    pub circuit: Circuit,
    pub input: Vec<u8>,
    pub params: Params,
    pub pv: PvMode,
    pub pp: PpMode,
}

impl ExperimentSetup {
    pub fn compiled(&self) -> Result<CompiledCircuit, ConfigError> {
        let c = compile(&self.circuit)?;
        if self.input.len() != c.n {
            return Err(ConfigError::Invalid(format!("input has {} bits, circuit has {} wires", self.input.len(), c.n)));
        }
        if self.protocol == Protocol::Epr && 2 * c.n + c.t() > crate::qsim::MAX_QUBITS {
            return Err(ConfigError::Invalid(format!(
                "EPR protocol needs 2n + t = {} <= {} simulated qubits",
                2 * c.n + c.t(),
                crate::qsim::MAX_QUBITS
            )));
        }
        Ok(c)
    }

    pub fn trial(&self, circ: &CompiledCircuit, master: u64, index: u64) -> TrialSummary {
        match self.protocol {
            Protocol::Epr => {
                let r = epr_trial(circ, &self.input, self.params.rounds(), self.pp, master, index);
                TrialSummary { sub_round: r.round.name().into(), accept: r.accept, output: r.output }
            }
            Protocol::Leash | Protocol::Seq => {
                let r = leash_trial(circ, &self.input, &self.params.leash(), self.pv, self.pp, master, index);
                TrialSummary { sub_round: r.sub_round, accept: r.accept, output: r.output }
            }
            Protocol::Dogwalker => {
                let r = dw_trial(circ, &self.input, &self.params.dw(), self.pv, self.pp, master, index);
                TrialSummary { sub_round: r.scenario.name().into(), accept: r.accept, output: r.output }
            }
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TrialReport {
    pub stats: ExperimentStats,
    /// Decoded outputs of computation rounds, keyed "0" / "1".
    pub outputs: BTreeMap<String, u64>,
    /// ||Pi_0 Q|x>||^2 by direct simulation.
    pub oracle_p: f64,
}

/// `n_trials` independent trials; trial i is seeded from (master, i).
pub fn run_trials(setup: &ExperimentSetup, n_trials: u64, master: u64) -> Result<TrialReport, ConfigError> {
    if n_trials == 0 {
        return Err(ConfigError::Invalid("trials must be at least 1".into()));
    }
    let circ = setup.compiled()?;
    let mut rep = TrialReport { oracle_p: setup.circuit.output_probability(&setup.input)?, ..Default::default() };
    for i in 0..n_trials {
        let t = setup.trial(&circ, master, i);
        rep.stats.record(&t.sub_round, t.accept);
        if let Some(o) = t.output {
            *rep.outputs.entry(o.to_string()).or_insert(0) += 1;
        }
    }
    Ok(rep)
}

/// Honest (or scripted) play of a standalone game.
pub fn run_game(kind: GameKind, cfg: &GameConfig, pv: PvMode, pp: PpMode, n_trials: u64, master: u64) -> ExperimentStats {
    let mut stats = ExperimentStats::default();
    for i in 0..n_trials {
        let (name, win) = game_trial(kind, cfg, pv, pp, master, i);
        stats.record(&name, win);
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(protocol: Protocol, text: &str, x: &[u8]) -> ExperimentSetup {
        ExperimentSetup {
            protocol,
            circuit: Circuit::parse(text).unwrap(),
            input: x.to_vec(),
            params: Params::default(),
            pv: PvMode::Honest,
            pp: PpMode::Honest,
        }
    }

    #[test]
    fn params_parse_and_validate() {
        let p = Params::parse("p=0.5, p_r=0.2, m=40, κ=12, c=0.9, delta=0.2, round=x_test").unwrap();
        assert_eq!((p.p, p.p_r, p.m, p.kappa, p.c, p.delta), (0.5, Some(0.2), Some(40), Some(12), Some(0.9), Some(0.2)));
        assert_eq!(p.round, Some(RoundType::XTest));
        let q = Params::parse("p1=0.1,p2=0.2,p3=0.3").unwrap();
        assert!((q.p4 - 0.4).abs() < 1e-12);
        assert!(Params::parse("p1=0.5,p2=0.5,p3=0.5,p4=0.5").is_err());
        assert!(Params::parse("p=2").is_err());
        assert!(Params::parse("nope=1").is_err());
        assert!(Params::parse("m=x").is_err());
        assert_eq!(Params::parse("").unwrap(), Params::default());
    }

    #[test]
    fn identity_test_rounds_always_accept() {
        let mut s = setup(Protocol::Epr, "wires 1", &[0]);
        s.params.p = 0.0;
        let r = run_trials(&s, 1000, 3).unwrap();
        assert_eq!(r.stats.accepted, 1000);
    }

    #[test]
    fn same_seed_same_stats() {
        let s = setup(Protocol::Leash, "T 1", &[0]);
        let a = serde_json::to_string(&run_trials(&s, 30, 9).unwrap()).unwrap();
        let b = serde_json::to_string(&run_trials(&s, 30, 9).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn leash_delegation_on_a_deterministic_circuit() {
        // p = 1: (2 + p)/3 = 1
        let mut s = setup(Protocol::Leash, "H 1\nH 1", &[0]);
        s.params.p_r = Some(0.0);
        let r = run_trials(&s, 200, 4).unwrap();
        assert!(r.stats.rate >= 0.97, "{}", r.stats.rate);
    }

    #[test]
    fn config_errors() {
        let s = setup(Protocol::Epr, "wires 2", &[0]);
        assert!(run_trials(&s, 10, 0).is_err());
        let s = setup(Protocol::Epr, "wires 1", &[0]);
        assert!(run_trials(&s, 0, 0).is_err());
    }

    #[test]
    fn games_run_honestly() {
        let cfg = GameConfig::default();
        for kind in [GameKind::Ms, GameKind::Bell, GameKind::Tom, GameKind::Conj] {
            let st = run_game(kind, &cfg, PvMode::Honest, PpMode::Honest, 50, 1);
            assert_eq!(st.accepted, 50, "{}", kind.name());
        }
    }
}
