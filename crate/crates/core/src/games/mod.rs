//! Self-testing games: question samplers, winning conditions, the honest
//! measurement strategy, and the Clifford-on-Pauli conjugation calculus.
//!
//! Operators inside questions act on *pair indices*; each player applies
//! them to its own half of the named EPR pairs.

mod cliff;
pub mod clifford;
mod conj;
mod elementary;
mod engine;
mod pbt;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qsim::{Label, Operator};

pub use cliff::{cliff, rigid, rigid_chsh, rigid_chsh_pass_probability, rigid_threshold, tom, tom_check};
pub use clifford::{pauli_labels, CliffordAction, SignedString};
pub use conj::{conj, conj_cliff, controlled_observable, swap_observable};
pub use elementary::{ac, bell, bell_expectation, com, id, magic_square, prod, Observable};
pub use engine::{measure_question, Representation};
pub use pbt::{pbt, pbt_xyz};

/// One requested measurement.
#[derive(Clone, Debug)]
pub enum Item {
    /// sigma_label on the player's half of `pair`; one bit.
    Sigma { pair: usize, label: Label },
    /// A named observable over pair indices; one bit.
    Obs { name: String, op: Operator },
    /// Bell-basis measurement of the halves of two pairs; two bits (ZZ, XX).
    Bell { p: usize, r: usize },
    /// The player picks a label from Sigma and reports it with the outcome.
    Free { pair: usize },
}

impl Item {
    pub fn bit_len(&self) -> usize {
        match self {
            Item::Bell { .. } => 2,
            _ => 1,
        }
    }

    pub fn pairs(&self) -> Vec<usize> {
        match self {
            Item::Sigma { pair, .. } | Item::Free { pair } => vec![*pair],
            Item::Obs { op, .. } => op.support(),
            Item::Bell { p, r } => vec![*p, *r],
        }
    }

    fn encode(&self, out: &mut Vec<u32>) {
        match self {
            Item::Sigma { pair, label } => out.extend([1, *pair as u32, label.code()]),
            Item::Obs { name, op } => {
                let sup = op.support();
                out.extend([2, fnv32(name), sup.len() as u32]);
                out.extend(sup.iter().map(|&p| p as u32));
            }
            Item::Bell { p, r } => out.extend([3, *p as u32, *r as u32]),
            Item::Free { pair } => out.extend([4, *pair as u32]),
        }
    }

    fn same(&self, other: &Item) -> bool {
        match (self, other) {
            (Item::Sigma { pair: p, label: l }, Item::Sigma { pair: q, label: k }) => p == q && l == k,
            (Item::Obs { name: a, op: x }, Item::Obs { name: b, op: y }) => a == b && x.support() == y.support(),
            (Item::Bell { p, r }, Item::Bell { p: p2, r: r2 }) => p == p2 && r == r2,
            (Item::Free { pair: p }, Item::Free { pair: q }) => p == q,
            _ => false,
        }
    }
}

fn fnv32(s: &str) -> u32 {
    s.bytes().fold(0x811c_9dc5u32, |h, b| (h ^ b as u32).wrapping_mul(0x0100_0193))
}

#[derive(Clone, Debug, Default)]
pub struct Question {
    pub items: Vec<Item>,
}

impl Question {
    pub fn new(items: Vec<Item>) -> Question {
        Question { items }
    }

    /// Sigma items for the non-identity entries of a label string.
    pub fn sigma(pairs: &[usize], labels: &[Label]) -> Question {
        let items = pairs
            .iter()
            .zip(labels)
            .filter(|(_, l)| **l != Label::I)
            .map(|(&pair, &label)| Item::Sigma { pair, label })
            .collect();
        Question { items }
    }

    pub fn bit_len(&self) -> usize {
        self.items.iter().map(Item::bit_len).sum()
    }

    pub fn free_len(&self) -> usize {
        self.items.iter().filter(|i| matches!(i, Item::Free { .. })).count()
    }

    pub fn pairs(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.items.iter().flat_map(Item::pairs).collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    pub fn encode(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for it in &self.items {
            it.encode(&mut out);
        }
        out
    }

    pub fn concat(qs: &[Question]) -> Question {
        Question { items: qs.iter().flat_map(|q| q.items.iter().cloned()).collect() }
    }

    pub fn same(&self, other: &Question) -> bool {
        self.items.len() == other.items.len() && self.items.iter().zip(&other.items).all(|(a, b)| a.same(b))
    }

    /// Answer bits of Sigma (and answered Free) items keyed by pair.
    pub fn sigma_answers(&self, ans: &Answer) -> BTreeMap<usize, (Label, u8)> {
        let mut out = BTreeMap::new();
        let (mut bit, mut lab) = (0, 0);
        for it in &self.items {
            match it {
                Item::Sigma { pair, label } => {
                    out.insert(*pair, (*label, ans.bits[bit]));
                }
                Item::Free { pair } => {
                    out.insert(*pair, (ans.labels[lab], ans.bits[bit]));
                    lab += 1;
                }
                _ => {}
            }
            bit += it.bit_len();
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub bits: Vec<u8>,
    pub labels: Vec<Label>,
}

impl Answer {
    pub fn new(bits: Vec<u8>) -> Answer {
        Answer { bits, labels: vec![] }
    }

    pub fn fits(&self, q: &Question) -> bool {
        self.bits.len() == q.bit_len() && self.labels.len() == q.free_len() && self.bits.iter().all(|&b| b <= 1)
    }

    pub fn parity(&self) -> u8 {
        self.bits.iter().fold(0, |a, b| a ^ b)
    }
}

pub type Check = Arc<dyn Fn(&Answer, &Answer) -> bool + Send + Sync>;

/// A sampled question pair together with its winning condition.
#[derive(Clone)]
pub struct Round {
    pub name: String,
    pub q: [Question; 2],
    check: Check,
}

impl std::fmt::Debug for Round {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Round").field("name", &self.name).field("q", &self.q).finish()
    }
}

impl Round {
    pub fn new(
        name: impl Into<String>,
        q1: Question,
        q2: Question,
        check: impl Fn(&Answer, &Answer) -> bool + Send + Sync + 'static,
    ) -> Round {
        Round { name: name.into(), q: [q1, q2], check: Arc::new(check) }
    }

    /// Malformed answers lose.
    pub fn accepts(&self, a1: &Answer, a2: &Answer) -> bool {
        a1.fits(&self.q[0]) && a2.fits(&self.q[1]) && (self.check)(a1, a2)
    }

    pub fn swapped(self) -> Round {
        let [q1, q2] = self.q;
        let check = self.check;
        Round { name: self.name, q: [q2, q1], check: Arc::new(move |a, b| check(b, a)) }
    }

    pub fn random_roles<R: Rng + ?Sized>(self, rng: &mut R) -> Round {
        if rng.gen::<bool>() {
            self.swapped()
        } else {
            self
        }
    }

    pub fn prefixed(mut self, prefix: &str) -> Round {
        self.name = format!("{prefix}/{}", self.name);
        self
    }

    /// Independent copies asked at once; accept iff all accept.
    pub fn parallel(name: impl Into<String>, rounds: Vec<Round>) -> Round {
        let q1 = Question::concat(&rounds.iter().map(|r| r.q[0].clone()).collect::<Vec<_>>());
        let q2 = Question::concat(&rounds.iter().map(|r| r.q[1].clone()).collect::<Vec<_>>());
        let shapes: Vec<[(usize, usize); 2]> = rounds
            .iter()
            .map(|r| [(r.q[0].bit_len(), r.q[0].free_len()), (r.q[1].bit_len(), r.q[1].free_len())])
            .collect();
        let checks: Vec<Check> = rounds.into_iter().map(|r| r.check).collect();
        Round::new(name, q1, q2, move |a1, a2| {
            let (mut o1, mut o2) = ((0, 0), (0, 0));
            for (sh, chk) in shapes.iter().zip(&checks) {
                let s1 = slice(a1, o1, sh[0]);
                let s2 = slice(a2, o2, sh[1]);
                o1 = (o1.0 + sh[0].0, o1.1 + sh[0].1);
                o2 = (o2.0 + sh[1].0, o2.1 + sh[1].1);
                if !chk(&s1, &s2) {
                    return false;
                }
            }
            true
        })
    }
}

fn slice(a: &Answer, off: (usize, usize), len: (usize, usize)) -> Answer {
    Answer { bits: a.bits[off.0..off.0 + len.0].to_vec(), labels: a.labels[off.1..off.1 + len.1].to_vec() }
}

/// The implicit consistency test: one player's question from `inner` is sent
/// to both players, whose answers must coincide.
pub fn consistency<R: Rng + ?Sized>(inner: Round, rng: &mut R) -> Round {
    let side = rng.gen_range(0..2);
    let q = inner.q[side].clone();
    Round::new(format!("consistency/{}", inner.name), q.clone(), q, |a, b| a == b)
}

/// With probability 1/2 the consistency test on a fresh sample, otherwise
/// the sample itself.
pub fn with_consistency<R: Rng + ?Sized>(rng: &mut R, sample: impl FnOnce(&mut R) -> Round) -> Round {
    let wrap = rng.gen::<bool>();
    let inner = sample(rng);
    if wrap {
        consistency(inner, rng)
    } else {
        inner
    }
}

/// Uniform choice among sub-test samplers.
pub(crate) fn pick<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    rng.gen_range(0..n)
}

pub(crate) fn random_sigma<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Label> {
    (0..m).map(|_| crate::qsim::SIGMA[rng.gen_range(0..5)]).collect()
}

pub(crate) fn random_bits<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<u8> {
    (0..m).map(|_| rng.gen_range(0..2)).collect()
}

/// A random window of at most `cap` positions from `positions`, in order.
pub(crate) fn window<R: Rng + ?Sized>(rng: &mut R, positions: &[usize], cap: usize) -> Vec<usize> {
    if positions.len() <= cap {
        return positions.to_vec();
    }
    let mut idx = rand::seq::index::sample(rng, positions.len(), cap).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| positions[i]).collect()
}

/// Standalone game families exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Ms,
    Bell,
    Id,
    Com,
    Ac,
    Prod,
    Pbt,
    PbtXyz,
    Conj,
    ConjCliff,
    Cliff,
    Rigid,
    Tom,
}

/// Sizes for standalone games.  `window` caps the number of data pairs
/// entering any jointly measured observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub m: usize,
    pub m_prime: usize,
    pub window: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { m: 8, m_prime: 4, window: 5 }
    }
}

impl GameKind {
    pub const ALL: [GameKind; 13] = [
        GameKind::Ms,
        GameKind::Bell,
        GameKind::Id,
        GameKind::Com,
        GameKind::Ac,
        GameKind::Prod,
        GameKind::Pbt,
        GameKind::PbtXyz,
        GameKind::Conj,
        GameKind::ConjCliff,
        GameKind::Cliff,
        GameKind::Rigid,
        GameKind::Tom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Ms => "ms",
            GameKind::Bell => "bell",
            GameKind::Id => "id",
            GameKind::Com => "com",
            GameKind::Ac => "ac",
            GameKind::Prod => "prod",
            GameKind::Pbt => "pbt",
            GameKind::PbtXyz => "pbtxyz",
            GameKind::Conj => "conj",
            GameKind::ConjCliff => "conjcliff",
            GameKind::Cliff => "cliff",
            GameKind::Rigid => "rigid",
            GameKind::Tom => "tom",
        }
    }

    pub fn parse(s: &str) -> Option<GameKind> {
        GameKind::ALL.into_iter().find(|g| g.name() == s.to_ascii_lowercase())
    }

    fn data(self, cfg: &GameConfig) -> usize {
        match self {
            GameKind::Ms | GameKind::Bell => 1,
            GameKind::Cliff | GameKind::Rigid | GameKind::Tom => cfg.m,
            _ => cfg.m.min(cfg.window).max(1),
        }
    }

    /// EPR pairs the honest players need.
    pub fn pairs(self, cfg: &GameConfig) -> usize {
        let k = self.data(cfg);
        match self {
            GameKind::Ms | GameKind::Bell => 2,
            GameKind::Id | GameKind::Com | GameKind::Prod | GameKind::Tom => k,
            GameKind::Ac | GameKind::Pbt | GameKind::PbtXyz => k + 1,
            GameKind::Conj | GameKind::ConjCliff | GameKind::Cliff | GameKind::Rigid => k + 2,
        }
    }

    /// One round, including the consistency wrapper (never for TOM).
    pub fn sample<R: Rng + ?Sized>(self, cfg: &GameConfig, rng: &mut R) -> Round {
        if self == GameKind::Tom {
            return tom(cfg.m, cfg.m_prime.min(cfg.m), rng);
        }
        with_consistency(rng, |rng| self.sample_inner(cfg, rng))
    }

    fn sample_inner<R: Rng + ?Sized>(self, cfg: &GameConfig, rng: &mut R) -> Round {
        let k = self.data(cfg);
        let pos: Vec<usize> = (0..k).collect();
        let pauli = |rng: &mut R| {
            let a = random_bits(rng, k);
            let b = random_bits(rng, k);
            Observable::from_string(&SignedString::on(&pos, &pauli_labels(&a, &b)))
        };
        match self {
            GameKind::Ms => magic_square(&Observable::label(0, Label::X), &Observable::label(0, Label::Z), 1, rng),
            GameKind::Bell => bell(0, 1, rng),
            GameKind::Id => {
                let a = pauli(rng);
                id(&a, &a.clone(), rng)
            }
            GameKind::Com | GameKind::Ac => {
                let want_commute = self == GameKind::Com;
                loop {
                    let (a, b) = (pauli(rng), pauli(rng));
                    if a.commutes_with(&b) == want_commute {
                        return if want_commute { com(&a, &b, rng) } else { ac(&a, &b, k, rng) };
                    }
                }
            }
            GameKind::Prod => {
                let p = random_sigma_pauli_letters(rng, k);
                let a_bits = random_bits(rng, k);
                let b_bits = random_bits(rng, k);
                let sub = |bits: &[u8]| -> Vec<Label> {
                    p.iter().zip(bits).map(|(&l, &b)| if b == 1 { l } else { Label::I }).collect()
                };
                let c_bits: Vec<u8> = a_bits.iter().zip(&b_bits).map(|(x, y)| x ^ y).collect();
                let a = Observable::from_string(&SignedString::on(&pos, &sub(&a_bits)));
                let b = Observable::from_string(&SignedString::on(&pos, &sub(&b_bits)));
                let c = Observable::from_string(&SignedString::on(&pos, &sub(&c_bits)));
                prod(&a, &b, &c, rng)
            }
            GameKind::Pbt => {
                let alph = vec![(Label::X, Label::Z); k];
                pbt(&pos, &alph, k, rng)
            }
            GameKind::PbtXyz => pbt_xyz(&pos, k, rng),
            GameKind::Conj => {
                let r = random_sigma(rng, k);
                let a_bits = random_bits(rng, k);
                let b_bits = random_bits(rng, k);
                let (sign, lb) = CliffordAction::new(r.clone()).conjugate_hermitian(&a_bits, &b_bits);
                let a = SignedString::on(&pos, &pauli_labels(&a_bits, &b_bits));
                let b = SignedString::new(sign, pos.iter().copied().zip(lb).collect());
                conj(&a, &b, &SignedString::on(&pos, &r), k, k + 1, rng)
            }
            GameKind::ConjCliff => {
                let r = random_sigma(rng, k);
                conj_cliff(&pos, &r, k, k + 1, rng)
            }
            GameKind::Cliff => cliff(cfg.m, cfg.window, rng),
            GameKind::Rigid => rigid(cfg.m, cfg.window, rng),
            GameKind::Tom => unreachable!("handled in sample"),
        }
    }
}

fn random_sigma_pauli_letters<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<Label> {
    (0..k).map(|_| [Label::X, Label::Y, Label::Z][rng.gen_range(0..3)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{Party, Registers};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn play(round: &Round, pairs: usize, seed: u64) -> bool {
        let mut regs = Registers::epr_pairs(pairs, seed);
        let mut r1 = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
        let mut r2 = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        let a1 = measure_question(&round.q[0], &mut regs.view(Party::A), Representation::Sigma, false, &mut r1);
        let a2 = measure_question(&round.q[1], &mut regs.view(Party::B), Representation::Conjugate, false, &mut r2);
        round.accepts(&a1, &a2)
    }

    #[test]
    fn honest_players_win_every_deterministic_game() {
        let cfg = GameConfig { m: 6, m_prime: 3, window: 4 };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in GameKind::ALL {
            if kind == GameKind::Rigid {
                continue;
            }
            for t in 0..150 {
                let round = kind.sample(&cfg, &mut rng);
                assert!(play(&round, kind.pairs(&cfg), t), "{} lost in {}", kind.name(), round.name);
            }
        }
    }

    #[test]
    fn malformed_answers_lose() {
        let round = Round::new("t", Question::sigma(&[0], &[Label::X]), Question::sigma(&[0], &[Label::X]), |_, _| true);
        assert!(!round.accepts(&Answer::new(vec![0, 1]), &Answer::new(vec![0])));
        assert!(!round.accepts(&Answer::new(vec![2]), &Answer::new(vec![0])));
        assert!(round.accepts(&Answer::new(vec![1]), &Answer::new(vec![0])));
    }

    #[test]
    fn parallel_slices_answers() {
        let mk = |p| Round::new("eq", Question::sigma(&[p], &[Label::Z]), Question::sigma(&[p], &[Label::Z]), |a, b| a == b);
        let r = Round::parallel("par", vec![mk(0), mk(1)]);
        assert!(r.accepts(&Answer::new(vec![0, 1]), &Answer::new(vec![0, 1])));
        assert!(!r.accepts(&Answer::new(vec![0, 1]), &Answer::new(vec![0, 0])));
        let s = r.swapped();
        assert!(s.accepts(&Answer::new(vec![1, 1]), &Answer::new(vec![1, 1])));
    }

    #[test]
    fn consistency_sends_identical_questions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let r = consistency(cliff(6, 4, &mut rng), &mut rng);
            assert!(r.q[0].same(&r.q[1]));
        }
    }
}
