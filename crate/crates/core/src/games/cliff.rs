//! The m-qubit Clifford test over Sigma = {X, Y, Z, F, G}, the rigidity test
//! built on it, and the tomography test.

use rand::seq::SliceRandom;
use rand::Rng;

use super::clifford::SignedString;
use super::conj::{conj, conj_cliff};
use super::elementary::{bell, bell_expectation, Observable};
use super::pbt::pbt;
use super::{pick, random_sigma, window, Answer, Item, Question, Round};
use crate::qsim::{Label, Operator};

/// cliff(Sigma, m) on data pairs 0..m, control pair m and ancilla pair m+1.
/// Parts that measure multi-qubit observables jointly act on a random window
/// of at most `cap` data positions.
pub fn cliff<R: Rng + ?Sized>(m: usize, cap: usize, rng: &mut R) -> Round {
    let w = random_sigma(rng, m);
    let (ctrl, anc) = (m, m + 1);
    let all: Vec<usize> = (0..m).collect();
    match pick(rng, 5) {
        0 => {
            let j = window(rng, &all, cap);
            let wj: Vec<Label> = j.iter().map(|&i| w[i]).collect();
            conj_cliff(&j, &wj, ctrl, anc, rng).prefixed("cliff/a")
        }
        1 => part_b(&w, ctrl, rng),
        2 => {
            let j = window(rng, &all, cap);
            let mut w2 = w.clone();
            let mut r = vec![Label::I; m];
            for &i in &j {
                let swap = match w[i] {
                    Label::F => Some(Label::G),
                    Label::G => Some(Label::F),
                    _ => None,
                };
                if let Some(l) = swap {
                    if rng.gen::<bool>() {
                        w2[i] = l;
                        r[i] = Label::Y;
                    }
                }
            }
            let on = |v: &[Label]| SignedString::on(&j, &j.iter().map(|&i| v[i]).collect::<Vec<_>>());
            conj(&on(&w), &on(&w2), &on(&r), ctrl, anc, rng).prefixed("cliff/c")
        }
        3 => {
            let j = window(rng, &all, cap);
            let alphabet: Vec<(Label, Label)> = j.iter().map(|&i| (w[i], braid_partner(w[i]))).collect();
            pbt(&j, &alphabet, anc, rng).prefixed("cliff/d")
        }
        _ => part_e(&w, rng),
    }
}

/// The anticommuting partner of each letter used in part (d).
fn braid_partner(l: Label) -> Label {
    match l {
        Label::X => Label::Y,
        Label::Y | Label::Z => Label::X,
        Label::F => Label::G,
        Label::G => Label::F,
        other => other,
    }
}

fn w_parity(bits: &[u8]) -> u8 {
    bits.iter().fold(0, |a, b| a ^ b)
}

/// X_W = X_ctrl (x) W against the pair (W, X_ctrl).
fn part_b<R: Rng + ?Sized>(w: &[Label], ctrl: usize, rng: &mut R) -> Round {
    let m = w.len();
    let all: Vec<usize> = (0..m).collect();
    let wq = Question::sigma(&all, w);
    let second = Question::concat(&[wq.clone(), Question::sigma(&[ctrl], &[Label::X])]);
    let round = if rng.gen::<bool>() {
        Round::new("cliff/b/W", wq, second, move |x, y| x.parity() == w_parity(&y.bits[..m]))
    } else {
        let mut factors: Vec<(usize, Label)> = vec![(ctrl, Label::X)];
        factors.extend(all.iter().map(|&i| (i, w[i])));
        let xw = Observable::new("X_W", Operator::product(&factors));
        Round::new("cliff/b/X_W", xw.question(), second, move |x, y| x.bits[0] == w_parity(&y.bits[..m]) ^ y.bits[m])
    };
    round.random_roles(rng)
}

/// Random disjoint pairs among the positions carrying `l`, each kept w.p. 1/2.
fn pairs_of<R: Rng + ?Sized>(w: &[Label], l: Label, rng: &mut R) -> Vec<(usize, usize)> {
    let mut pos: Vec<usize> = (0..w.len()).filter(|&i| w[i] == l).collect();
    pos.shuffle(rng);
    pos.chunks_exact(2).filter(|_| rng.gen::<bool>()).map(|c| (c[0], c[1])).collect()
}

fn part_e<R: Rng + ?Sized>(w: &[Label], rng: &mut R) -> Round {
    let m = w.len();
    let mut pairs = pairs_of(w, Label::F, rng);
    pairs.extend(pairs_of(w, Label::G, rng));
    if !pairs.is_empty() && rng.gen::<bool>() {
        let copies = pairs.iter().map(|&(i, j)| bell(i, j, rng)).collect();
        return Round::parallel("cliff/e/bell", copies);
    }
    let mut in_pair = vec![false; m];
    for &(i, j) in &pairs {
        in_pair[i] = true;
        in_pair[j] = true;
    }
    let rest: Vec<usize> = (0..m).filter(|&i| !in_pair[i]).collect();
    let rest_labels: Vec<Label> = rest.iter().map(|&i| w[i]).collect();
    let bells = Question::new(pairs.iter().map(|&(p, r)| Item::Bell { p, r }).collect());
    let q1 = Question::concat(&[Question::sigma(&rest, &rest_labels), bells]);
    let all: Vec<usize> = (0..m).collect();
    let q2 = Question::sigma(&all, w);
    let w = w.to_vec();
    let off = rest.len();
    Round::new("cliff/e/consistency", q1, q2, move |x, y| {
        let same = rest.iter().enumerate().all(|(k, &i)| x.bits[k] == y.bits[i]);
        same && pairs.iter().enumerate().all(|(k, &(i, j))| {
            let (a, b) = (x.bits[off + 2 * k], x.bits[off + 2 * k + 1]);
            let e = bell_expectation(a, b, w[i], w[j]);
            // only outcomes that determine the correlation are checked
            if (e.abs() - 1.0).abs() > 1e-9 {
                return true;
            }
            (y.bits[i] ^ y.bits[j] == 0) == (e > 0.0)
        })
    })
    .random_roles(rng)
}

/// The CHSH part of the rigidity test.
pub fn rigid_chsh<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Round {
    let (w, w2) = (random_sigma(rng, m), random_sigma(rng, m));
    let all: Vec<usize> = (0..m).collect();
    let t: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&i| matches!(w[i], Label::X | Label::Y) && matches!(w2[i], Label::F | Label::G))
        .collect();
    let (q1, q2) = (Question::sigma(&all, &w), Question::sigma(&all, &w2));
    Round::new("rigid/chsh", q1, q2, move |x, y| {
        if t.is_empty() {
            return true;
        }
        let good = t
            .iter()
            .filter(|&&i| (x.bits[i] != y.bits[i]) == (w[i] == Label::X && w2[i] == Label::F))
            .count();
        good as f64 >= rigid_threshold() * t.len() as f64
    })
    .random_roles(rng)
}

/// cos^2(pi/8) - 0.1.
pub fn rigid_threshold() -> f64 {
    (std::f64::consts::PI / 8.0).cos().powi(2) - 0.1
}

/// Exact probability that honest players pass the CHSH part on m pairs:
/// |T| ~ Bin(m, 4/25) and each position in T wins w.p. cos^2(pi/8).
pub fn rigid_chsh_pass_probability(m: usize) -> f64 {
    let q = 4.0 / 25.0;
    let p = (std::f64::consts::PI / 8.0).cos().powi(2);
    (0..=m)
        .map(|t| {
            let need = (rigid_threshold() * t as f64).ceil() as usize;
            let pass: f64 = (need..=t).map(|g| binom_pmf(t, g, p)).sum();
            binom_pmf(m, t, q) * if t == 0 { 1.0 } else { pass }
        })
        .sum()
}

fn binom_pmf(n: usize, k: usize, p: f64) -> f64 {
    let ln_choose: f64 = (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum();
    (ln_choose + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
}

/// rigid(Sigma, m): cliff or the CHSH part with equal probability.
pub fn rigid<R: Rng + ?Sized>(m: usize, cap: usize, rng: &mut R) -> Round {
    if rng.gen::<bool>() {
        cliff(m, cap, rng).prefixed("rigid")
    } else {
        rigid_chsh(m, rng)
    }
}

/// tom(Sigma, m', m): W to the first player, a random m'-subset S to the
/// second, who chooses its own labels.
pub fn tom<R: Rng + ?Sized>(m: usize, m_prime: usize, rng: &mut R) -> Round {
    let w = random_sigma(rng, m);
    let mut s = rand::seq::index::sample(rng, m, m_prime).into_vec();
    s.sort_unstable();
    let all: Vec<usize> = (0..m).collect();
    let q1 = Question::sigma(&all, &w);
    let q2 = Question::new(s.iter().map(|&pair| Item::Free { pair }).collect());
    Round::new("tom", q1, q2, move |a, b| tom_check(&w, &s, a, b))
}

/// Accept iff a_i = u_i wherever the reported label matches W_i.
pub fn tom_check(w: &[Label], s: &[usize], a: &Answer, b: &Answer) -> bool {
    s.iter().enumerate().all(|(k, &i)| b.labels[k] != w[i] || a.bits[i] == b.bits[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::tests::play;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn honest_cliff_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in 0..500 {
            let g = cliff(7, 4, &mut rng);
            assert!(play(&g, 9, t), "{}", g.name);
        }
    }

    #[test]
    fn braid_partners_anticommute() {
        for l in crate::qsim::SIGMA {
            let (a, b) = (l.matrix(), braid_partner(l).matrix());
            assert!(!crate::qsim::commutes(&a, &b, 1e-12));
        }
    }

    #[test]
    fn chsh_pass_probability_by_enumeration() {
        // independent oracle for m = 2: enumerate both label strings and
        // every winning pattern
        let p = (std::f64::consts::PI / 8.0).cos().powi(2);
        let sig = crate::qsim::SIGMA;
        let mut total = 0.0;
        for w in 0..25 {
            for w2 in 0..25 {
                let t = (0..2)
                    .filter(|&i| {
                        let (a, b) = (sig[[w % 5, w / 5][i]], sig[[w2 % 5, w2 / 5][i]]);
                        matches!(a, Label::X | Label::Y) && matches!(b, Label::F | Label::G)
                    })
                    .count();
                // t = 1 needs the single position to win, t = 2 needs both
                total += match t {
                    0 => 1.0,
                    1 => p,
                    _ => p * p,
                } / 625.0;
            }
        }
        assert!((rigid_chsh_pass_probability(2) - total).abs() < 1e-12);
    }

    #[test]
    fn honest_chsh_rate_matches_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 400;
        let wins = (0..n).filter(|&t| play(&rigid_chsh(16, &mut rng), 16, t)).count();
        let want = rigid_chsh_pass_probability(16);
        assert!((wins as f64 / n as f64 - want).abs() < 0.06, "{wins} vs {want}");
    }

    #[test]
    fn tom_rejects_mismatched_outcome() {
        let w = vec![Label::X, Label::Z];
        let a = Answer::new(vec![0, 1]);
        let good = Answer { bits: vec![1], labels: vec![Label::Z] };
        let bad = Answer { bits: vec![0], labels: vec![Label::Z] };
        let other = Answer { bits: vec![0], labels: vec![Label::F] };
        assert!(tom_check(&w, &[1], &a, &good));
        assert!(!tom_check(&w, &[1], &a, &bad));
        assert!(tom_check(&w, &[1], &a, &other));
    }
}
