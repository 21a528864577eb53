//! Elementary tests (id, com, prod, ac), the Magic Square game and the Bell
//! measurement test.

use rand::Rng;

use super::clifford::SignedString;
use super::{pick, Item, Question, Round};
use crate::qsim::{gates, Label, Operator, StateVector};

/// A named observable over pair indices.
#[derive(Clone, Debug)]
pub struct Observable {
    pub name: String,
    pub op: Operator,
}

impl Observable {
    pub fn new(name: impl Into<String>, op: Operator) -> Observable {
        Observable { name: name.into(), op }
    }

    pub fn label(pair: usize, l: Label) -> Observable {
        Observable::new(format!("{}{}", l.symbol(), pair), Operator::label(pair, l))
    }

    pub fn from_string(s: &SignedString) -> Observable {
        Observable::new(s.name(), s.operator())
    }

    pub fn item(&self) -> Item {
        Item::Obs { name: self.name.clone(), op: self.op.clone() }
    }

    pub fn question(&self) -> Question {
        Question::new(vec![self.item()])
    }

    pub fn mul(&self, o: &Observable) -> Observable {
        Observable::new(format!("({})({})", self.name, o.name), self.op.mul(&o.op))
    }

    pub fn commutes_with(&self, o: &Observable) -> bool {
        let mut sup = self.op.support();
        sup.extend(o.op.support());
        sup.sort_unstable();
        sup.dedup();
        let idx = |q: usize| sup.iter().position(|&s| s == q).unwrap();
        let (a, b) = (self.op.remap(idx), o.op.remap(idx));
        let diff = a.mul(&b).add(&b.mul(&a).neg()).to_dense(sup.len());
        diff.iter().flatten().all(|z| z.norm() < 1e-9)
    }
}

fn pair_q(a: &Observable, b: &Observable) -> Question {
    Question::new(vec![a.item(), b.item()])
}

/// id(A, B): equal answers whenever the questions coincide.
pub fn id<R: Rng + ?Sized>(a: &Observable, b: &Observable, rng: &mut R) -> Round {
    let w1 = pick(rng, 2);
    let w2 = pick(rng, 2);
    let obs = [a, b];
    Round::new("id", obs[w1].question(), obs[w2].question(), move |x, y| w1 != w2 || x.bits[0] == y.bits[0])
}

/// com(A, B): one player measures A or B, the other both jointly.
pub fn com<R: Rng + ?Sized>(a: &Observable, b: &Observable, rng: &mut R) -> Round {
    let w = pick(rng, 2);
    let q1 = [a, b][w].question();
    Round::new("com", q1, pair_q(a, b), move |x, y| x.bits[0] == y.bits[w]).random_roles(rng)
}

/// prod(A, B, C): as com, with the joint question labelled C; an answer to C
/// must equal the product of the joint answers.
pub fn prod<R: Rng + ?Sized>(a: &Observable, b: &Observable, c: &Observable, rng: &mut R) -> Round {
    let w = pick(rng, 3);
    let q1 = [a, b, c][w].question();
    Round::new("prod", q1, pair_q(a, b), move |x, y| {
        let want = if w == 2 { y.bits[0] ^ y.bits[1] } else { y.bits[w] };
        x.bits[0] == want
    })
    .random_roles(rng)
}

/// Line `l` of the square: rows 0..3, then columns 0..3, as cell coordinates.
fn cells(l: usize) -> [(usize, usize); 3] {
    if l < 3 {
        [(l, 0), (l, 1), (l, 2)]
    } else {
        let c = l - 3;
        [(0, c), (1, c), (2, c)]
    }
}

/// The Magic Square game with "A" in the XI cell and "B" in the ZI cell;
/// the second qubit of the square is the ancilla pair `anc`.  With
/// (A, B) = (X_p, Z_p) this is the standard game on pairs (p, anc); for
/// anticommuting A, B it is the test ac(A, B).
pub fn magic_square<R: Rng + ?Sized>(a: &Observable, b: &Observable, anc: usize, rng: &mut R) -> Round {
    let za = Observable::label(anc, Label::Z);
    let xa = Observable::label(anc, Label::X);
    let az = a.mul(&za);
    let bx = b.mul(&xa);
    let yy = az.mul(&bx);
    let grid = [[za.clone(), b.clone(), b.mul(&za)], [a.clone(), xa.clone(), a.mul(&xa)], [az, bx, yy]];
    let l1 = pick(rng, 6);
    let l2 = pick(rng, 6);
    let line = |l: usize| Question::new(cells(l).iter().map(|&(r, c)| grid[r][c].item()).collect());
    Round::new("ms", line(l1), line(l2), move |x, y| {
        let want = |l: usize| u8::from(l == 5);
        if x.bits.iter().fold(0, |s, b| s ^ b) != want(l1) || y.bits.iter().fold(0, |s, b| s ^ b) != want(l2) {
            return false;
        }
        let (c1, c2) = (cells(l1), cells(l2));
        c1.iter().enumerate().all(|(i, ci)| c2.iter().enumerate().all(|(j, cj)| ci != cj || x.bits[i] == y.bits[j]))
    })
}

/// ac(A, B) is the Magic Square game with A and B in the XI and ZI cells.
pub fn ac<R: Rng + ?Sized>(a: &Observable, b: &Observable, anc: usize, rng: &mut R) -> Round {
    let mut r = magic_square(a, b, anc, rng);
    r.name = "ac".into();
    r
}

fn bell_obs(p: usize, r: usize) -> [Observable; 3] {
    let xx = Observable::new(format!("X{p}X{r}"), Operator::xx(p, r));
    let zz = Observable::new(format!("Z{p}Z{r}"), Operator::zz(p, r));
    let yy = Observable::new(format!("Y{p}Y{r}"), Operator::product(&[(p, Label::Y), (r, Label::Y)]));
    [xx, zz, yy]
}

/// The two-qubit swap observable (I + XX + YY + ZZ)/2 on pairs (p, r).
pub fn swap_op(p: usize, r: usize) -> Operator {
    let [xx, zz, yy] = bell_obs(p, r);
    Operator::identity().add(&xx.op).add(&yy.op).add(&zz.op).scale(crate::qsim::C64::new(0.5, 0.0))
}

/// Bell(p, r): Magic Square on the two pairs, Bell measurement against the
/// last column, or Bell measurement against the swap observable.  Outcome
/// (a, b) of a Bell measurement has ZZ = (-1)^a and XX = (-1)^b.
pub fn bell<R: Rng + ?Sized>(p: usize, r: usize, rng: &mut R) -> Round {
    let phi = Question::new(vec![Item::Bell { p, r }]);
    match pick(rng, 3) {
        0 => {
            let mut g = magic_square(&Observable::label(p, Label::X), &Observable::label(p, Label::Z), r, rng);
            g.name = "bell/ms".into();
            g
        }
        1 => {
            let col = Question::new(bell_obs(p, r).iter().map(Observable::item).collect());
            Round::new("bell/column", phi, col, |x, y| {
                let (a, b) = (x.bits[0], x.bits[1]);
                y.bits[0] == b && y.bits[1] == a && y.bits[2] == 1 ^ a ^ b
            })
            .random_roles(rng)
        }
        _ => {
            let sw = Question::new(vec![Item::Obs { name: format!("SW{p},{r}"), op: swap_op(p, r) }]);
            Round::new("bell/swap", phi, sw, |x, y| y.bits[0] == x.bits[0] & x.bits[1]).random_roles(rng)
        }
    }
}

/// <Phi_ab| sigma_u (x) sigma_v |Phi_ab>, Phi_ab = (X^a Z^b (x) I)|EPR>.
/// Both conjugate representations give the same value, so a player holding
/// the partner halves of a Bell-measured pair sees these correlations.
pub fn bell_expectation(a: u8, b: u8, u: Label, v: Label) -> f64 {
    let mut s = StateVector::epr_pairs(1).expect("two qubits");
    if b == 1 {
        s.apply_1q(&gates::z(), 0);
    }
    if a == 1 {
        s.apply_1q(&gates::x(), 0);
    }
    let op = Operator::product(&[(0, u), (1, v)]);
    s.inner(&s.apply_operator(&op)).re
}
