//! The EPR protocol: a verifier holding halves of n + t EPR pairs, a
//! prover holding the other halves, gadgets for CNOT, H and T, and the
//! post-hoc choice of round type.
//!
//! Pair layout: pairs 0..n carry the input wires, pair n + i the auxiliary
//! of the i-th T gate.  The verifier holds the A halves, the prover the B
//! halves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{CompiledCircuit, Op, Parity};
use crate::keys::{PauliKeys, RoundType};
use crate::orchestrator::strategy::Pp;
use crate::orchestrator::transcript::{Role, Transcript};
use crate::qsim::{gates, Label, Operator, Party, Registers, StateVector};

/// The verifier's observable for the i-th T qubit.
pub fn choose_observable(round: RoundType, parity: Parity, z: u8, a_prime: u8, c: u8) -> Label {
    let xy = if z == 0 { Label::X } else { Label::Y };
    match round {
        RoundType::Computation => {
            if a_prime ^ c ^ z == 0 {
                Label::G
            } else {
                Label::F
            }
        }
        RoundType::XTest => match parity {
            Parity::Even => Label::Z,
            Parity::Odd => xy,
        },
        RoundType::ZTest => match parity {
            Parity::Odd => Label::Z,
            Parity::Even => xy,
        },
    }
}

/// Everything V_EPR^r produces: outcomes, the observables used, the X key
/// entering each T gate and the final keys.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub d: Vec<u8>,
    pub e: Vec<u8>,
    /// Observables on the n + t slots.
    pub w: Vec<Label>,
    pub a_prime: Vec<u8>,
    pub keys: PauliKeys,
}

impl Walk {
    pub fn a_f(&self) -> u8 {
        self.keys.a[0]
    }
}

/// V_EPR^r.  `measure(slot, label)` measures the verifier's half of slot
/// `slot` (0..n inputs, n + i the i-th T qubit) and returns the outcome.
pub fn v_epr_r(
    circ: &CompiledCircuit,
    round: RoundType,
    x: &[u8],
    c: &[u8],
    z: &[u8],
    mut measure: impl FnMut(usize, Label) -> u8,
) -> Walk {
    let n = circ.n;
    let basis = if round == RoundType::ZTest { Label::X } else { Label::Z };
    let d: Vec<u8> = (0..n).map(|j| measure(j, basis)).collect();
    let mut w = vec![basis; n];
    let mut keys = PauliKeys::initial(round, &d, x);
    let (mut e, mut a_prime) = (vec![0; circ.t()], vec![0; circ.t()]);
    w.resize(n + circ.t(), Label::I);
    for op in &circ.ops {
        match *op {
            Op::H(j) => keys.h(j),
            Op::Cnot(j, k) => keys.cnot(j, k),
            Op::T(i) => {
                let tg = circ.t_gates[i];
                a_prime[i] = keys.a[tg.wire];
                let obs = choose_observable(round, tg.parity, z[i], a_prime[i], c[i]);
                w[n + i] = obs;
                e[i] = measure(n + i, obs);
                keys.t(tg.wire, round, tg.parity, c[i], e[i], z[i]);
            }
        }
    }
    Walk { d, e, w, a_prime, keys }
}

/// The observables V_EPR^0 would have used, replayed from reported
/// outcomes.
pub fn reconstruct_adaptive_w(circ: &CompiledCircuit, x: &[u8], c: &[u8], z: &[u8], d: &[u8], e: &[u8]) -> Vec<Label> {
    let n = circ.n;
    v_epr_r(circ, RoundType::Computation, x, c, z, |s, _| if s < n { d[s] } else { e[s - n] }).w
}

/// Step 3 of the verifier: the test-round gadget checks and the output check.
pub fn verdict(circ: &CompiledCircuit, round: RoundType, c: &[u8], cf: u8, walk: &Walk) -> bool {
    let gadgets_ok = circ
        .t_gates
        .iter()
        .enumerate()
        .filter(|(_, tg)| round.checks(tg.parity))
        .all(|(i, _)| c[i] == walk.a_prime[i] ^ walk.e[i]);
    let output_ok = round == RoundType::ZTest || cf ^ walk.a_f() == 0;
    gadgets_ok && output_ok
}

/// Round-type selection: fixed, or computation with probability `p` and
/// the two tests evenly otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RoundChoice {
    Random { p: f64 },
    Fixed(RoundType),
}

impl Default for RoundChoice {
    fn default() -> Self {
        RoundChoice::Random { p: 1.0 / 3.0 }
    }
}

impl RoundChoice {
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> RoundType {
        match self {
            RoundChoice::Fixed(r) => r,
            RoundChoice::Random { p } => {
                let u: f64 = rng.gen();
                if u < p {
                    RoundType::Computation
                } else if u < p + (1.0 - p) / 2.0 {
                    RoundType::XTest
                } else {
                    RoundType::ZTest
                }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EprResult {
    pub accept: bool,
    pub round: RoundType,
    /// c_f + a_f in computation rounds.
    pub output: Option<u8>,
    /// Set when the prover's message had the wrong shape.
    pub aborted: bool,
    pub c: Vec<u8>,
    pub cf: u8,
    pub z: Vec<u8>,
    pub transcript: Transcript,
}

/// The prover-facing message: z only.  It takes no round argument, so the
/// prover's view cannot depend on the round type.
fn prover_message<R: Rng + ?Sized>(t: usize, rng: &mut R) -> Vec<u8> {
    (0..t).map(|_| rng.gen_range(0..2)).collect()
}

/// One run of the EPR protocol on `circ` and input `x`.  `regs` must hold
/// n + t fresh EPR pairs.
pub fn run_epr<R: Rng + ?Sized>(
    circ: &CompiledCircuit,
    x: &[u8],
    rounds: RoundChoice,
    pp: &mut Pp,
    regs: &mut Registers,
    rng: &mut R,
) -> EprResult {
    let (n, t) = (circ.n, circ.t());
    assert_eq!(x.len(), n, "input length");
    assert_eq!(regs.n_pairs(), n + t, "EPR pairs");
    let mut tr = Transcript::new();
    let z = prover_message(t, rng);
    tr.send(Role::V, Role::PP, "z", Transcript::bits(&z));
    let inputs: Vec<usize> = (0..n).collect();
    let aux: Vec<usize> = (n..n + t).collect();
    let (c, cf) = pp.run_epr(&mut regs.view(Party::B), circ, &inputs, &aux, &z);
    let mut reply = Transcript::bits(&c);
    reply.push(cf as u32);
    tr.send(Role::PP, Role::V, "c", reply);
    let round = rounds.draw(rng);
    if c.len() != t || cf > 1 || c.iter().any(|&b| b > 1) {
        return EprResult { accept: false, round, output: None, aborted: true, c, cf, z, transcript: tr };
    }
    let mut view = regs.view(Party::A);
    let walk = v_epr_r(circ, round, x, &c, &z, |s, l| {
        let q = view.half(s);
        view.measure(&Operator::label(q, l))
    });
    let accept = verdict(circ, round, &c, cf, &walk);
    let output = (round == RoundType::Computation).then_some(cf ^ walk.a_f());
    EprResult { accept, round, output, aborted: false, c, cf, z, transcript: tr }
}

/// The gadget's effect on one padded test-round qubit, computed exactly.
/// The data qubit starts in X^a Z^b|s> with |s> = |0> for a checked gate and
/// |+> otherwise; the auxiliary pair is fresh.  Over every outcome (c, e)
/// of non-zero probability, returns the least fidelity between the
/// relabelled output qubit and X^a' Z^b'|s> with (a', b') from the key rule.
pub fn test_gadget_fidelity(round: RoundType, parity: Parity, a: u8, b: u8, z: u8) -> f64 {
    assert!(round != RoundType::Computation);
    let checked = round.checks(parity);
    let s = padded(checked, a, b);
    // qubit 0: data, 1: prover's auxiliary half, 2: verifier's half
    let mut st = s.tensor(&StateVector::epr_pairs(1).expect("pair")).expect("3 qubits");
    st.apply_cnot(1, 0);
    if z == 1 {
        st.apply_1q(&gates::p(), 1);
    }
    let mut worst: f64 = 1.0;
    for c in 0..2u8 {
        let mut sc = st.clone();
        if sc.project(&Operator::label(0, Label::Z), c).map_or(true, |p| p < 1e-12) {
            continue;
        }
        let w = choose_observable(round, parity, z, a, c);
        for e in 0..2u8 {
            let mut se = sc.clone();
            if se.project(&Operator::label(2, w), e).map_or(true, |p| p < 1e-12) {
                continue;
            }
            let mut keys = PauliKeys { a: vec![a], b: vec![b] };
            keys.t(0, round, parity, c, e, z);
            let want = padded(checked, keys.a[0], keys.b[0]);
            worst = worst.min(qubit_fidelity(&se, 1, &want));
        }
    }
    worst
}

fn padded(computational: bool, a: u8, b: u8) -> StateVector {
    let mut s = StateVector::zero(1).expect("1 qubit");
    if !computational {
        s.apply_1q(&gates::h(), 0);
    }
    if b == 1 {
        s.apply_1q(&gates::z(), 0);
    }
    if a == 1 {
        s.apply_1q(&gates::x(), 0);
    }
    s
}

/// <psi| rho_q |psi> for the reduced state of qubit `q` of `state`.
pub fn qubit_fidelity(state: &StateVector, q: usize, psi: &StateVector) -> f64 {
    let n = state.n_qubits();
    let mask = 1usize << (n - 1 - q);
    let amps = state.amplitudes();
    let p = psi.amplitudes();
    let mut total = 0.0;
    for i in 0..amps.len() {
        if i & mask == 0 {
            let overlap = p[0].conj() * amps[i] + p[1].conj() * amps[i | mask];
            total += overlap.norm_sqr();
        }
    }
    total
}

/// The leash gadget versus the EPR gadget on one wire.  In the leash
/// protocol the verifier's half is measured first in a random W from
/// {X, Y, F, G}-type choices and z is derived from W; in the EPR protocol z
/// comes first and W follows from the table.  For every data state, c and
/// matching (W, z) the two produce the same post-gadget prover state.
/// Returns the least fidelity over the four (W, e) combinations for the
/// given input amplitudes.
pub fn leash_vs_epr_gadget_fidelity(round: RoundType, parity: Parity, data: &StateVector, a_prime: u8) -> f64 {
    let mut worst: f64 = 1.0;
    let labels: Vec<Label> = match round {
        RoundType::Computation => vec![Label::F, Label::G],
        _ if round.checks(parity) => vec![Label::Z],
        _ => vec![Label::X, Label::Y],
    };
    for &w in &labels {
        for e in 0..2u8 {
            for c in 0..2u8 {
                // leash order: measure W on the verifier half, then the gadget
                let mut leash = data.tensor(&StateVector::epr_pairs(1).expect("pair")).expect("3 qubits");
                if leash.project(&Operator::label(2, w), e).map_or(true, |p| p < 1e-12) {
                    continue;
                }
                leash.apply_cnot(1, 0);
                if leash.project(&Operator::label(0, Label::Z), c).map_or(true, |p| p < 1e-12) {
                    continue;
                }
                let zs: Vec<u8> = match crate::leash::z_rule(round, parity, w, a_prime, c) {
                    Some(z) => vec![z],
                    None => vec![0, 1],
                };
                for z in zs {
                    worst = worst.min(compare_orders(&leash, data, round, parity, w, a_prime, c, e, z));
                }
            }
        }
    }
    worst
}

#[allow(clippy::too_many_arguments)]
fn compare_orders(leash_prefix: &StateVector, data: &StateVector, round: RoundType, parity: Parity, w: Label, a_prime: u8, c: u8, e: u8, z: u8) -> f64 {
    let mut leash = leash_prefix.clone();
    if z == 1 {
        leash.apply_1q(&gates::p(), 1);
    }
    // EPR order: gadget with z, then the table's W
    let mut epr = data.tensor(&StateVector::epr_pairs(1).expect("pair")).expect("3 qubits");
    epr.apply_cnot(1, 0);
    if z == 1 {
        epr.apply_1q(&gates::p(), 1);
    }
    if epr.project(&Operator::label(0, Label::Z), c).is_err() {
        return 0.0;
    }
    let w_epr = choose_observable(round, parity, z, a_prime, c);
    if w_epr != w || epr.project(&Operator::label(2, w_epr), e).is_err() {
        return 0.0;
    }
    epr.fidelity(&leash)
}
