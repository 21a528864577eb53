use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Label, Mat2, Operator, QsimError, StateVector, MAX_QUBITS};

/// Holder of one half of each EPR pair.  Pair `i` occupies qubits
/// `(2i, 2i+1)`; `A` owns the even qubit, `B` the odd one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    A,
    B,
}

#[derive(Clone, Debug)]
struct Block {
    qubits: Vec<usize>,
    state: StateVector,
}

/// Joint quantum state kept as a product of dense blocks.  Blocks are merged
/// only when an operation couples them, and a qubit is split off into its
/// own block after a single-qubit measurement.
#[derive(Clone, Debug)]
pub struct Registers {
    blocks: Vec<Option<Block>>,
    loc: Vec<(usize, usize)>,
    owner: Vec<Party>,
    rng: ChaCha8Rng,
    peak: usize,
}

impl Registers {
    /// `k` EPR pairs; `seed` drives Born-rule sampling.
    pub fn epr_pairs(k: usize, seed: u64) -> Registers {
        let pair = StateVector::epr_pairs(1).expect("two qubits fit");
        let mut blocks = Vec::with_capacity(k);
        let mut loc = Vec::with_capacity(2 * k);
        let mut owner = Vec::with_capacity(2 * k);
        for i in 0..k {
            blocks.push(Some(Block { qubits: vec![2 * i, 2 * i + 1], state: pair.clone() }));
            loc.push((i, 0));
            loc.push((i, 1));
            owner.push(Party::A);
            owner.push(Party::B);
        }
        Registers { blocks, loc, owner, rng: ChaCha8Rng::seed_from_u64(seed), peak: if k > 0 { 2 } else { 0 } }
    }

    pub fn n_pairs(&self) -> usize {
        self.owner.len() / 2
    }

    pub fn owner(&self, q: usize) -> Party {
        self.owner[q]
    }

    /// Largest block size reached so far.
    pub fn peak_block(&self) -> usize {
        self.peak
    }

    pub fn view(&mut self, party: Party) -> PartyView<'_> {
        PartyView { regs: self, party }
    }

    /// The block containing `q`, as (qubit list, state).
    pub fn block_of(&self, q: usize) -> (&[usize], &StateVector) {
        let b = self.blocks[self.loc[q].0].as_ref().expect("live block");
        (&b.qubits, &b.state)
    }

    fn merge(&mut self, qs: &[usize]) -> Result<usize, QsimError> {
        let mut ids: Vec<usize> = qs.iter().map(|&q| self.loc[q].0).collect();
        ids.sort_unstable();
        ids.dedup();
        let total: usize = ids.iter().map(|&i| self.blocks[i].as_ref().unwrap().qubits.len()).sum();
        if total > MAX_QUBITS {
            return Err(QsimError::TooManyQubits { n: total, cap: MAX_QUBITS });
        }
        let first = ids[0];
        for &id in &ids[1..] {
            let other = self.blocks[id].take().unwrap();
            let base = self.blocks[first].as_mut().unwrap();
            base.state = base.state.tensor(&other.state)?;
            let offset = base.qubits.len();
            for (k, &q) in other.qubits.iter().enumerate() {
                self.loc[q] = (first, offset + k);
            }
            base.qubits.extend(other.qubits);
        }
        self.peak = self.peak.max(total);
        Ok(first)
    }

    fn pos(&self, q: usize) -> usize {
        self.loc[q].1
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let (b, p) = self.loc[q];
        self.blocks[b].as_mut().unwrap().state.apply_1q(m, p);
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let b = self.merge(&[control, target]).expect("CNOT block exceeds qubit cap");
        let (pc, pt) = (self.pos(control), self.pos(target));
        self.blocks[b].as_mut().unwrap().state.apply_cnot(pc, pt);
    }

    /// Measure a Hermitian involution on global qubits.
    pub fn measure(&mut self, op: &Operator) -> u8 {
        let support = op.support();
        if support.is_empty() {
            // scalar +-1
            return (op.terms()[0].coef.re < 0.0) as u8;
        }
        let b = self.merge(&support).expect("measurement block exceeds qubit cap");
        let local = op.remap(|q| self.loc[q].1);
        let block = self.blocks[b].as_mut().unwrap();
        let out = block.state.measure(&local, &mut self.rng);
        if support.len() == 1 {
            self.split_off(support[0]);
        }
        out
    }

    pub fn measure_label(&mut self, q: usize, l: Label) -> u8 {
        self.measure(&Operator::label(q, l))
    }

    pub fn measure_bell(&mut self, q1: usize, q2: usize) -> (u8, u8) {
        let a = self.measure(&Operator::zz(q1, q2));
        let b = self.measure(&Operator::xx(q1, q2));
        (a, b)
    }

    /// Probability of eigenvalue +1 without disturbing the state.
    pub fn prob_plus(&mut self, op: &Operator) -> f64 {
        let support = op.support();
        let b = self.merge(&support).expect("block exceeds qubit cap");
        let local = op.remap(|q| self.loc[q].1);
        self.blocks[b].as_ref().unwrap().state.prob_plus(&local)
    }

    fn split_off(&mut self, q: usize) {
        let (b, p) = self.loc[q];
        let block = self.blocks[b].as_mut().unwrap();
        if block.qubits.len() == 1 {
            return;
        }
        let (one, rest) = block.state.factor_out(p);
        block.state = rest;
        block.qubits.remove(p);
        for (k, &r) in block.qubits.iter().enumerate() {
            self.loc[r] = (b, k);
        }
        let id = self.blocks.iter().position(|x| x.is_none()).unwrap_or_else(|| {
            self.blocks.push(None);
            self.blocks.len() - 1
        });
        self.blocks[id] = Some(Block { qubits: vec![q], state: one });
        self.loc[q] = (id, 0);
    }
}

/// Restricted handle through which a party touches only its own halves.
pub struct PartyView<'a> {
    regs: &'a mut Registers,
    party: Party,
}

impl PartyView<'_> {
    pub fn party(&self) -> Party {
        self.party
    }

    /// This party's half of pair `i`.
    pub fn half(&self, pair: usize) -> usize {
        match self.party {
            Party::A => 2 * pair,
            Party::B => 2 * pair + 1,
        }
    }

    fn check(&self, q: usize) {
        assert_eq!(self.regs.owner(q), self.party, "party {:?} touched qubit {q} it does not own", self.party);
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) {
        self.check(q);
        self.regs.apply_1q(q, m);
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        self.check(control);
        self.check(target);
        self.regs.apply_cnot(control, target);
    }

    pub fn measure(&mut self, op: &Operator) -> u8 {
        for q in op.support() {
            self.check(q);
        }
        self.regs.measure(op)
    }

    pub fn measure_label(&mut self, q: usize, l: Label) -> u8 {
        self.check(q);
        self.regs.measure_label(q, l)
    }

    pub fn measure_bell(&mut self, q1: usize, q2: usize) -> (u8, u8) {
        self.check(q1);
        self.check(q2);
        self.regs.measure_bell(q1, q2)
    }
}
