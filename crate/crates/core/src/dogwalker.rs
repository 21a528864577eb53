//! The Dog-Walker protocol: one round of interaction with each prover, PP
//! first.  Four scenarios: Rigidity-Clifford (a RIGID round), EPR-Test and
//! EPR-Computation (PV plays V_EPR^r, PP plays P_EPR) and
//! Rigidity-Tomography (PP answers a RIGID question, PV runs V_EPR^0 on
//! random inputs and the pair is scored as a TOM round).
//!
//! PV holds the A halves, PP the B halves of m + 2 EPR pairs; the last two
//! pairs are the control and ancilla of the RIGID game.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::CompiledCircuit;
use crate::epr::{reconstruct_adaptive_w, v_epr_r, verdict};
use crate::games::{GameConfig, GameKind, Question};
use crate::keys::RoundType;
use crate::leash::IndexSets;
use crate::orchestrator::strategy::{Pp, Pv};
use crate::orchestrator::transcript::{Role, Transcript};
use crate::qsim::{Label, Party, Registers, SIGMA};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DwParams {
    /// Rigidity-Clifford.
    pub p1: f64,
    /// EPR-Test.
    pub p2: f64,
    /// EPR-Computation.
    pub p3: f64,
    /// Rigidity-Tomography.
    pub p4: f64,
    /// Requested m; raised to the minimum the circuit needs.
    pub m: Option<usize>,
    pub window: usize,
}

impl Default for DwParams {
    fn default() -> Self {
        DwParams { p1: 0.25, p2: 0.45, p3: 0.05, p4: 0.25, m: None, window: 5 }
    }
}

impl DwParams {
    pub fn validate(&self) -> Result<(), String> {
        let ps = [self.p1, self.p2, self.p3, self.p4];
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err("Dog-Walker probabilities must lie in [0, 1]".into());
        }
        if (ps.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(format!("Dog-Walker probabilities sum to {}, not 1", ps.iter().sum::<f64>()));
        }
        Ok(())
    }
}

/// m = 5(n + t) + 10: every symbol is expected n + t + 2 times.
pub fn min_m(circ: &CompiledCircuit) -> usize {
    5 * (circ.n + circ.t()) + 10
}

pub fn effective_m(circ: &CompiledCircuit, params: &DwParams) -> usize {
    params.m.unwrap_or(0).max(min_m(circ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    RigidityClifford,
    EprTest(RoundType),
    EprComputation,
    RigidityTomography,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::RigidityClifford => "rigidity_clifford",
            Scenario::EprTest(RoundType::XTest) => "epr_x_test",
            Scenario::EprTest(_) => "epr_z_test",
            Scenario::EprComputation => "epr_computation",
            Scenario::RigidityTomography => "rigidity_tomography",
        }
    }

    pub fn draw<R: Rng + ?Sized>(params: &DwParams, rng: &mut R) -> Scenario {
        let u: f64 = rng.gen();
        if u < params.p1 {
            Scenario::RigidityClifford
        } else if u < params.p1 + params.p2 {
            Scenario::EprTest(if rng.gen::<bool>() { RoundType::XTest } else { RoundType::ZTest })
        } else if u < params.p1 + params.p2 + params.p3 {
            Scenario::EprComputation
        } else {
            Scenario::RigidityTomography
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DwResult {
    pub accept: bool,
    pub scenario: Scenario,
    /// c_f + a_f in EPR-Computation.
    pub output: Option<u8>,
    /// PP's gadget bits and the verifier's z in EPR scenarios.
    pub c: Vec<u8>,
    pub z: Vec<u8>,
    pub transcript: Transcript,
}

/// Disjoint random N, T^0, T^1 inside 0..m.  T^0 (T^1) is sorted and
/// handed to the even (odd) gates of each layer in index order.
pub fn random_sets<R: Rng + ?Sized>(circ: &CompiledCircuit, m: usize, rng: &mut R) -> IndexSets {
    let counts = circ.layer_counts();
    let total = circ.n + circ.t();
    let mut pos = sample(rng, m, total).into_vec();
    let mut n: Vec<usize> = pos.drain(..circ.n).collect();
    n.sort_unstable();
    let (mut t0, mut t1) = (Vec::new(), Vec::new());
    for c in &counts {
        let mut a: Vec<usize> = pos.drain(..c.even).collect();
        let mut b: Vec<usize> = pos.drain(..c.odd).collect();
        a.sort_unstable();
        b.sort_unstable();
        t0.push(a);
        t1.push(b);
    }
    IndexSets { n, t0, t1 }
}

/// The constrained test-round string: N in the round's basis, checked T
/// qubits in Z, unchecked ones in X or Y following z (Y iff z_i = 1), and
/// every other position uniform over Sigma.
pub fn test_string<R: Rng + ?Sized>(
    circ: &CompiledCircuit,
    round: RoundType,
    sets: &IndexSets,
    z: &[u8],
    m: usize,
    rng: &mut R,
) -> Vec<Label> {
    let mut w: Vec<Label> = (0..m).map(|_| SIGMA[rng.gen_range(0..5)]).collect();
    let basis = if round == RoundType::ZTest { Label::X } else { Label::Z };
    for &i in &sets.n {
        w[i] = basis;
    }
    for (i, &p) in sets.aux(circ).iter().enumerate() {
        w[p] = if round.checks(circ.t_gates[i].parity) {
            Label::Z
        } else if z[i] == 1 {
            Label::Y
        } else {
            Label::X
        };
    }
    w
}

/// One run.  `regs` must hold effective_m + 2 fresh pairs.
pub fn run_dogwalker<R: Rng + ?Sized>(
    circ: &CompiledCircuit,
    x: &[u8],
    params: &DwParams,
    pv: &mut Pv,
    pp: &mut Pp,
    regs: &mut Registers,
    rng: &mut R,
) -> DwResult {
    assert_eq!(x.len(), circ.n, "input length");
    let m = effective_m(circ, params);
    assert_eq!(regs.n_pairs(), m + 2, "EPR pairs");
    let scenario = Scenario::draw(params, rng);
    let sets = random_sets(circ, m, rng);
    match scenario {
        Scenario::RigidityClifford | Scenario::RigidityTomography => rigidity(circ, scenario, m, params.window, &sets, pv, pp, regs, rng),
        _ => epr_round(circ, x, scenario, m, &sets, pv, pp, regs, rng),
    }
}

fn bundle(x: &[u8], z: &[u8], c: &[u8], sets: &IndexSets) -> Vec<u32> {
    let mut out = Transcript::bits(x);
    out.extend(Transcript::bits(z));
    out.extend(Transcript::bits(c));
    out.extend(sets.encode());
    out
}

#[allow(clippy::too_many_arguments)]
fn epr_round<R: Rng + ?Sized>(
    circ: &CompiledCircuit,
    x: &[u8],
    scenario: Scenario,
    m: usize,
    sets: &IndexSets,
    pv: &mut Pv,
    pp: &mut Pp,
    regs: &mut Registers,
    rng: &mut R,
) -> DwResult {
    let t = circ.t();
    let mut tr = Transcript::new();
    let aux = sets.aux(circ);
    let z: Vec<u8> = (0..t).map(|_| rng.gen_range(0..2)).collect();
    let mut msg = Transcript::bits(&z);
    msg.extend(sets.encode());
    tr.send(Role::V, Role::PP, "epr", msg);
    let (c, cf) = pp.run_epr(&mut regs.view(Party::B), circ, &sets.n, &aux, &z);
    let mut reply = Transcript::bits(&c);
    reply.push(cf as u32);
    tr.send(Role::PP, Role::V, "c", reply);
    let done = |accept, output, c, z, tr| DwResult { accept, scenario, output, c, z, transcript: tr };
    if c.len() != t || cf > 1 || c.iter().any(|&b| b > 1) {
        return done(false, None, c, z, tr);
    }
    let slots: Vec<usize> = sets.n.iter().chain(&aux).copied().collect();
    let mut view = regs.view(Party::A);
    match scenario {
        Scenario::EprComputation => {
            tr.send(Role::V, Role::PV, "bundle", bundle(x, &z, &c, sets));
            let (d, e) = pv.epr_computation(&mut view, circ, x, &c, &z, &sets.n, &aux);
            let mut reply = Transcript::bits(&d);
            reply.extend(Transcript::bits(&e));
            tr.send(Role::PV, Role::V, "answer", reply);
            if d.len() != circ.n || e.len() != t {
                return done(false, None, c, z, tr);
            }
            let walk = v_epr_r(circ, RoundType::Computation, x, &c, &z, |s, _| if s < circ.n { d[s] } else { e[s - circ.n] });
            let accept = verdict(circ, RoundType::Computation, &c, cf, &walk);
            done(accept, Some(cf ^ walk.a_f()), c, z, tr)
        }
        Scenario::EprTest(round) => {
            let w = test_string(circ, round, sets, &z, m, rng);
            let all: Vec<usize> = (0..m).collect();
            let q = Question::sigma(&all, &w);
            tr.send(Role::V, Role::PV, "question", q.encode());
            let a = pv.answer(&q, &mut view);
            tr.send(Role::PV, Role::V, "answer", Transcript::bits(&a.bits));
            if !a.fits(&q) {
                return done(false, None, c, z, tr);
            }
            let walk = v_epr_r(circ, round, x, &c, &z, |s, l| {
                debug_assert_eq!(w[slots[s]], l, "test string disagrees with the observable table");
                a.bits[slots[s]]
            });
            done(verdict(circ, round, &c, cf, &walk), None, c, z, tr)
        }
        _ => unreachable!("rigidity scenarios are handled separately"),
    }
}

#[allow(clippy::too_many_arguments)]
fn rigidity<R: Rng + ?Sized>(
    circ: &CompiledCircuit,
    scenario: Scenario,
    m: usize,
    window: usize,
    sets: &IndexSets,
    pv: &mut Pv,
    pp: &mut Pp,
    regs: &mut Registers,
    rng: &mut R,
) -> DwResult {
    let mut tr = Transcript::new();
    // W' ~ mu(.) for PP; in the Clifford sub-round PV's W follows mu(.|W')
    // because both come from one jointly sampled round.
    let round = GameKind::Rigid.sample(&GameConfig { m, m_prime: 1, window }, rng);
    tr.send(Role::V, Role::PP, "question", round.q[1].encode());
    let a_pp = pp.answer(&round.q[1], &mut regs.view(Party::B));
    tr.send(Role::PP, Role::V, "answer", Transcript::bits(&a_pp.bits));
    let done = |accept, tr| DwResult { accept, scenario, output: None, c: vec![], z: vec![], transcript: tr };
    if !a_pp.fits(&round.q[1]) {
        return done(false, tr);
    }
    let mut view = regs.view(Party::A);
    if scenario == Scenario::RigidityClifford {
        tr.send(Role::V, Role::PV, "question", round.q[0].encode());
        let a_pv = pv.answer(&round.q[0], &mut view);
        tr.send(Role::PV, Role::V, "answer", Transcript::bits(&a_pv.bits));
        return done(round.accepts(&a_pv, &a_pp), tr);
    }
    // Tomography
    let (n, t) = (circ.n, circ.t());
    let bits = |k: usize, rng: &mut R| -> Vec<u8> { (0..k).map(|_| rng.gen_range(0..2)).collect() };
    let (c, z, x) = (bits(t, rng), bits(t, rng), bits(n, rng));
    let aux = sets.aux(circ);
    tr.send(Role::V, Role::PV, "bundle", bundle(&x, &z, &c, sets));
    let (d, e) = pv.epr_computation(&mut view, circ, &x, &c, &z, &sets.n, &aux);
    let mut reply = Transcript::bits(&d);
    reply.extend(Transcript::bits(&e));
    tr.send(Role::PV, Role::V, "answer", reply);
    if d.len() != n || e.len() != t || d.iter().chain(&e).any(|&b| b > 1) {
        return done(false, tr);
    }
    let w = reconstruct_adaptive_w(circ, &x, &c, &z, &d, &e);
    let outcomes: Vec<u8> = d.iter().chain(&e).copied().collect();
    let slots: Vec<usize> = sets.n.iter().chain(&aux).copied().collect();
    done(tomography_check(&round.q[1].sigma_answers(&a_pp), &slots, &w, &outcomes), tr)
}

/// TOM winning criterion on S = N u T: wherever PP measured the same
/// single-pair observable as PV, the outcomes agree.
pub fn tomography_check(pp_answers: &BTreeMap<usize, (Label, u8)>, slots: &[usize], w: &[Label], outcomes: &[u8]) -> bool {
    slots.iter().zip(w).zip(outcomes).all(|((p, l), o)| match pp_answers.get(p) {
        Some((lp, op)) if lp == l => op == o,
        _ => true,
    })
}

/// Joint distribution of PP's gadget bits and the verifier's z over EPR
/// rounds, keyed by the concatenated bit string.
pub fn cz_histogram(results: &[DwResult]) -> BTreeMap<Vec<u8>, u64> {
    let mut h = BTreeMap::new();
    for r in results.iter().filter(|r| matches!(r.scenario, Scenario::EprTest(_) | Scenario::EprComputation)) {
        let key: Vec<u8> = r.c.iter().chain(&r.z).copied().collect();
        *h.entry(key).or_insert(0) += 1;
    }
    h
}

/// Total-variation distance of a (c, z) histogram from uniform on
/// {0,1}^t x {0,1}^t.
pub fn tv_from_uniform(hist: &BTreeMap<Vec<u8>, u64>, t: usize) -> f64 {
    let total = hist.values().sum::<u64>() as f64;
    if t == 0 || total == 0.0 {
        return 0.0;
    }
    let cells = 1u64 << (2 * t);
    let u = 1.0 / cells as f64;
    let seen: f64 = hist.values().map(|&k| (k as f64 / total - u).abs()).sum();
    let unseen = (cells - hist.len() as u64) as f64 * u;
    0.5 * (seen + unseen)
}
