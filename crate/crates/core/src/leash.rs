//! The Verifier-on-a-Leash protocol.  With probability p_r the verifier
//! plays a sequential rigidity game; otherwise the delegation game, where PV
//! measures random Sigma observables block by block and PP runs the
//! computation guided by the verifier's correction bits.
//!
//! PV holds the A halves, PP the B halves of m + 2 EPR pairs; the last two
//! pairs are the control and ancilla of the rigidity game.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{CompiledCircuit, Op, Parity};
use crate::epr::RoundChoice;
use crate::games::{Answer, GameConfig, GameKind, Question, Round};
use crate::keys::{PauliKeys, RoundType};
use crate::orchestrator::strategy::{Pp, Pv};
use crate::orchestrator::transcript::{Role, Transcript};
use crate::qsim::{Label, Party, Registers, SIGMA};

/// Filler positions added to every B block.
pub const B_SLACK: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeashParams {
    /// Probability of the rigidity game.
    pub p_r: f64,
    /// Requested m; raised to the minimum the circuit needs.
    pub m: Option<usize>,
    /// Round types of the delegation game.
    pub rounds: RoundChoice,
    /// Cap on data pairs inside jointly measured rigidity observables.
    pub window: usize,
}

impl Default for LeashParams {
    fn default() -> Self {
        LeashParams { p_r: 0.9, m: None, rounds: RoundChoice::default(), window: 5 }
    }
}

/// |A| = 5n and |B_l| = 5 t_l + 10.
pub fn min_m(circ: &CompiledCircuit) -> usize {
    5 * circ.n + circ.layer_counts().iter().map(|c| 5 * c.total + B_SLACK).sum::<usize>()
}

pub fn effective_m(circ: &CompiledCircuit, params: &LeashParams) -> usize {
    params.m.unwrap_or(0).max(min_m(circ))
}

/// Disjoint blocks A, B_1..B_d covering 0..m, each sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn a(&self) -> &[usize] {
        &self.blocks[0]
    }

    pub fn b(&self, l: usize) -> &[usize] {
        &self.blocks[l]
    }

    fn sizes(circ: &CompiledCircuit, m: usize) -> Vec<usize> {
        let mut sizes = vec![5 * circ.n];
        sizes.extend(circ.layer_counts().iter().map(|c| 5 * c.total + B_SLACK));
        sizes[0] += m - sizes.iter().sum::<usize>();
        sizes
    }

    /// A gets exactly n copies of every symbol and B_l exactly t_l copies
    /// plus filler, so W_A and W_{B_l} meet the coverage condition.  None if
    /// some symbol occurs fewer than n + t times.
    pub fn covering<R: Rng + ?Sized>(circ: &CompiledCircuit, w: &[Label], rng: &mut R) -> Option<Partition> {
        let counts = circ.layer_counts();
        let need: Vec<usize> = std::iter::once(circ.n).chain(counts.iter().map(|c| c.total)).collect();
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); need.len()];
        let mut leftover = Vec::new();
        for s in SIGMA {
            let mut pos: Vec<usize> = (0..w.len()).filter(|&i| w[i] == s).collect();
            if pos.len() < need.iter().sum::<usize>() {
                return None;
            }
            pos.shuffle(rng);
            let mut it = pos.into_iter();
            for (b, &k) in blocks.iter_mut().zip(&need) {
                b.extend(it.by_ref().take(k));
            }
            leftover.extend(it);
        }
        leftover.extend((0..w.len()).filter(|&i| !SIGMA.contains(&w[i])));
        leftover.shuffle(rng);
        let mut it = leftover.into_iter();
        for b in blocks.iter_mut().skip(1) {
            b.extend(it.by_ref().take(B_SLACK));
        }
        blocks[0].extend(it);
        blocks.iter_mut().for_each(|b| b.sort_unstable());
        Some(Partition { blocks })
    }

    /// A uniformly random partition with the same block sizes.
    pub fn random<R: Rng + ?Sized>(circ: &CompiledCircuit, m: usize, rng: &mut R) -> Partition {
        let mut pos: Vec<usize> = (0..m).collect();
        pos.shuffle(rng);
        let mut it = pos.into_iter();
        let mut blocks: Vec<Vec<usize>> = Partition::sizes(circ, m).into_iter().map(|k| it.by_ref().take(k).collect()).collect();
        blocks.iter_mut().for_each(|b| b.sort_unstable());
        Partition { blocks }
    }

    /// Block index of every position (control and ancilla go last).
    fn rank(&self, m: usize) -> Vec<usize> {
        let mut r = vec![self.blocks.len() - 1; m + 2];
        for (k, b) in self.blocks.iter().enumerate() {
            for &i in b {
                r[i] = k;
            }
        }
        r
    }
}

/// W uniform over Sigma^m conditioned on every symbol appearing at least
/// n + t times.
pub fn sample_w<R: Rng + ?Sized>(circ: &CompiledCircuit, m: usize, rng: &mut R) -> (Vec<Label>, Partition) {
    loop {
        let w: Vec<Label> = (0..m).map(|_| SIGMA[rng.gen_range(0..5)]).collect();
        if let Some(p) = Partition::covering(circ, &w, rng) {
            return (w, p);
        }
    }
}

/// The correction bit when it is determined by W; None when the verifier
/// draws it uniformly (checked gates of test rounds).
pub fn z_rule(round: RoundType, parity: Parity, w: Label, a: u8, c: u8) -> Option<u8> {
    match round {
        RoundType::Computation => Some(a ^ c ^ u8::from(w == Label::F)),
        _ if round.checks(parity) => None,
        _ => Some(u8::from(w == Label::Y)),
    }
}

pub fn compute_z<R: Rng + ?Sized>(round: RoundType, parity: Parity, w: Label, a: u8, c: u8, rng: &mut R) -> u8 {
    z_rule(round, parity, w, a, c).unwrap_or_else(|| rng.gen_range(0..2))
}

/// Index sets sent to PP: N (wire j on N[j]) and per layer T^0, T^1
/// (ascending; assigned to the layer's even and odd gates in index order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSets {
    pub n: Vec<usize>,
    pub t0: Vec<Vec<usize>>,
    pub t1: Vec<Vec<usize>>,
}

impl IndexSets {
    /// The auxiliary pair of every T gate, in T-index order.
    pub fn aux(&self, circ: &CompiledCircuit) -> Vec<usize> {
        let mut aux = vec![0; circ.t()];
        for l in 1..=circ.d {
            let (even, odd) = circ.layer_t_by_parity(l);
            for (&i, &p) in even.iter().zip(&self.t0[l - 1]) {
                aux[i] = p;
            }
            for (&i, &p) in odd.iter().zip(&self.t1[l - 1]) {
                aux[i] = p;
            }
        }
        aux
    }

    pub fn encode(&self) -> Vec<u32> {
        let mut out = vec![self.n.len() as u32];
        out.extend(self.n.iter().map(|&i| i as u32));
        for (a, b) in self.t0.iter().zip(&self.t1) {
            out.push(a.len() as u32);
            out.extend(a.iter().map(|&i| i as u32));
            out.push(b.len() as u32);
            out.extend(b.iter().map(|&i| i as u32));
        }
        out
    }
}

fn choose<R: Rng + ?Sized>(from: &[usize], w: &[Label], allowed: &[Label], k: usize, rng: &mut R) -> Vec<usize> {
    let pool: Vec<usize> = from.iter().copied().filter(|&i| allowed.contains(&w[i])).collect();
    let mut s: Vec<usize> = pool.choose_multiple(rng, k).copied().collect();
    s.sort_unstable();
    s
}

/// Step 3 of the delegation game: N and T_l per the index-set table.
pub fn choose_sets<R: Rng + ?Sized>(circ: &CompiledCircuit, round: RoundType, w: &[Label], part: &Partition, rng: &mut R) -> IndexSets {
    use Label::*;
    let n_from: &[Label] = if round == RoundType::ZTest { &[X] } else { &[Z] };
    let n = choose(part.a(), w, n_from, circ.n, rng);
    let (mut t0, mut t1) = (Vec::new(), Vec::new());
    for (l, cnt) in circ.layer_counts().iter().enumerate() {
        let b = part.b(l + 1);
        match round {
            RoundType::Computation => {
                let both = choose(b, w, &[G, F], cnt.total, rng);
                let mut shuffled = both.clone();
                shuffled.shuffle(rng);
                let (mut a0, mut a1) = (shuffled[..cnt.even].to_vec(), shuffled[cnt.even..].to_vec());
                a0.sort_unstable();
                a1.sort_unstable();
                t0.push(a0);
                t1.push(a1);
            }
            RoundType::XTest => {
                t0.push(choose(b, w, &[Z], cnt.even, rng));
                t1.push(choose(b, w, &[X, Y], cnt.odd, rng));
            }
            RoundType::ZTest => {
                t0.push(choose(b, w, &[X, Y], cnt.even, rng));
                t1.push(choose(b, w, &[Z], cnt.odd, rng));
            }
        }
    }
    IndexSets { n, t0, t1 }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeashResult {
    pub accept: bool,
    /// "rigidity", or the delegation round type name.
    pub sub_round: String,
    /// c_f + a_f in computation rounds.
    pub output: Option<u8>,
    pub transcript: Transcript,
}

/// One run.  `regs` must hold effective_m + 2 fresh pairs.
pub fn run_leash<R: Rng + ?Sized>(
    circ: &CompiledCircuit,
    x: &[u8],
    params: &LeashParams,
    pv: &mut Pv,
    pp: &mut Pp,
    regs: &mut Registers,
    rng: &mut R,
) -> LeashResult {
    assert_eq!(x.len(), circ.n, "input length");
    let m = effective_m(circ, params);
    assert_eq!(regs.n_pairs(), m + 2, "EPR pairs");
    if rng.gen::<f64>() < params.p_r {
        rigidity(circ, m, params.window, pv, pp, regs, rng)
    } else {
        delegation(circ, x, m, params.rounds, pv, pp, regs, rng)
    }
}

/// Items of a question grouped so that items sharing a pair stay together;
/// each group goes in the latest block any of its pairs belongs to.
fn schedule(q: &Question, rank: &[usize], n_blocks: usize) -> Vec<Vec<usize>> {
    let k = q.items.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    let mut owner: std::collections::BTreeMap<usize, usize> = Default::default();
    for (i, it) in q.items.iter().enumerate() {
        for p in it.pairs() {
            if let Some(&j) = owner.get(&p) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            } else {
                owner.insert(p, i);
            }
        }
    }
    let mut group_rank = vec![0; k];
    for (i, it) in q.items.iter().enumerate() {
        let r = find(&mut parent, i);
        let top = it.pairs().iter().map(|&p| rank[p]).max().unwrap_or(0);
        group_rank[r] = group_rank[r].max(top);
    }
    let mut out = vec![Vec::new(); n_blocks];
    for i in 0..k {
        let r = find(&mut parent, i);
        out[group_rank[r]].push(i);
    }
    out
}

/// Ask `q` block by block through `ask`, reassembling the answer in item
/// order.
fn ask_sequentially(
    q: &Question,
    plan: &[Vec<usize>],
    to: Role,
    tr: &mut Transcript,
    mut ask: impl FnMut(&Question) -> Answer,
) -> Answer {
    let offsets: Vec<usize> = q.items.iter().scan(0, |o, it| {
        let here = *o;
        *o += it.bit_len();
        Some(here)
    }).collect();
    let mut bits = vec![0u8; q.bit_len()];
    for block in plan {
        let sub = Question::new(block.iter().map(|&i| q.items[i].clone()).collect());
        tr.send(Role::V, to, "question", sub.encode());
        let a = ask(&sub);
        tr.send(to, Role::V, "answer", Transcript::bits(&a.bits));
        if !a.fits(&sub) {
            return a;
        }
        let mut off = 0;
        for &i in block {
            let len = q.items[i].bit_len();
            bits[offsets[i]..offsets[i] + len].copy_from_slice(&a.bits[off..off + len]);
            off += len;
        }
    }
    Answer::new(bits)
}

/// The sequential rigidity game on m data pairs.
fn rigidity<R: Rng + ?Sized>(
    circ: &CompiledCircuit,
    m: usize,
    window: usize,
    pv: &mut Pv,
    pp: &mut Pp,
    regs: &mut Registers,
    rng: &mut R,
) -> LeashResult {
    let cfg = GameConfig { m, m_prime: 1, window };
    let round: Round = GameKind::Rigid.sample(&cfg, rng);
    let part = sigma_string(&round.q[0], m)
        .and_then(|w| Partition::covering(circ, &w, rng))
        .unwrap_or_else(|| Partition::random(circ, m, rng));
    let rank = part.rank(m);
    let nb = part.blocks.len();
    let mut tr = Transcript::new();
    let a1 = {
        let plan = schedule(&round.q[0], &rank, nb);
        let mut view = regs.view(Party::A);
        ask_sequentially(&round.q[0], &plan, Role::PV, &mut tr, |q| pv.answer(q, &mut view))
    };
    let a2 = {
        let plan = schedule(&round.q[1], &rank, nb);
        let mut view = regs.view(Party::B);
        ask_sequentially(&round.q[1], &plan, Role::PP, &mut tr, |q| pp.answer(q, &mut view))
    };
    LeashResult { accept: round.accepts(&a1, &a2), sub_round: "rigidity".into(), output: None, transcript: tr }
}

/// The labels of a question made only of Sigma items covering 0..m.
fn sigma_string(q: &Question, m: usize) -> Option<Vec<Label>> {
    let mut w = vec![Label::I; m];
    for it in &q.items {
        match it {
            crate::games::Item::Sigma { pair, label } if *pair < m => w[*pair] = *label,
            _ => return None,
        }
    }
    w.iter().all(|l| *l != Label::I).then_some(w)
}

#[allow(clippy::too_many_arguments)]
fn delegation<R: Rng + ?Sized>(
    circ: &CompiledCircuit,
    x: &[u8],
    m: usize,
    rounds: RoundChoice,
    pv: &mut Pv,
    pp: &mut Pp,
    regs: &mut Registers,
    rng: &mut R,
) -> LeashResult {
    let mut tr = Transcript::new();
    // steps 1-2: PV's questions never see x
    let (w, part) = sample_w(circ, m, rng);
    let mut e = vec![0u8; m];
    {
        let mut view = regs.view(Party::A);
        for block in &part.blocks {
            let labels: Vec<Label> = block.iter().map(|&i| w[i]).collect();
            let q = Question::sigma(block, &labels);
            tr.send(Role::V, Role::PV, "question", q.encode());
            let a = pv.answer(&q, &mut view);
            tr.send(Role::PV, Role::V, "answer", Transcript::bits(&a.bits));
            if !a.fits(&q) {
                return LeashResult { accept: false, sub_round: "malformed".into(), output: None, transcript: tr };
            }
            for (&i, &b) in block.iter().zip(&a.bits) {
                e[i] = b;
            }
        }
    }
    // step 3
    let round = rounds.draw(rng);
    let sets = choose_sets(circ, round, &w, &part, rng);
    let aux = sets.aux(circ);
    let e_n: Vec<u8> = sets.n.iter().map(|&i| e[i]).collect();
    let mut keys = PauliKeys::initial(round, &e_n, x);
    tr.send(Role::V, Role::PP, "sets", sets.encode());
    let mut view = regs.view(Party::B);
    pp.begin(circ, &sets.n, &aux);
    let reject = |tr: Transcript| LeashResult { accept: false, sub_round: round.name().into(), output: None, transcript: tr };
    // step 4
    for l in 1..=circ.d {
        let mut ts = Vec::new();
        for k in circ.layer_ops(l) {
            match circ.ops[k] {
                Op::H(j) => keys.h(j),
                Op::Cnot(j, k2) => keys.cnot(j, k2),
                Op::T(i) => ts.push(i),
            }
        }
        let c = pp.layer(&mut view, l);
        tr.send(Role::PP, Role::V, "c", Transcript::bits(&c));
        if c.len() != ts.len() || c.iter().any(|&b| b > 1) {
            return reject(tr);
        }
        let mut z = Vec::with_capacity(ts.len());
        for (&i, &ci) in ts.iter().zip(&c) {
            let tg = circ.t_gates[i];
            let (a, ei, wi) = (keys.a[tg.wire], e[aux[i]], w[aux[i]]);
            if round.checks(tg.parity) && ci != a ^ ei {
                return reject(tr);
            }
            z.push(compute_z(round, tg.parity, wi, a, ci, rng));
        }
        tr.send(Role::V, Role::PP, "z", Transcript::bits(&z));
        pp.correct(&mut view, l, &z);
        for ((&i, &ci), &zi) in ts.iter().zip(&c).zip(&z) {
            let tg = circ.t_gates[i];
            keys.t(tg.wire, round, tg.parity, ci, e[aux[i]], zi);
        }
    }
    for k in circ.layer_ops(circ.d + 1) {
        match circ.ops[k] {
            Op::H(j) => keys.h(j),
            Op::Cnot(j, k2) => keys.cnot(j, k2),
            Op::T(_) => unreachable!("no T gates after the last layer"),
        }
    }
    // step 5
    let cf = pp.finish(&mut view);
    tr.send(Role::PP, Role::V, "cf", vec![cf as u32]);
    let out = cf ^ keys.a[0];
    let accept = round == RoundType::ZTest || out == 0;
    let output = (round == RoundType::Computation).then_some(out);
    LeashResult { accept, sub_round: round.name().into(), output, transcript: tr }
}
