//! Pauli braiding tests over a per-position alphabet of anticommuting pairs,
//! and the extension testing Y alongside X and Z.

use rand::seq::SliceRandom;
use rand::Rng;

use super::clifford::SignedString;
use super::elementary::{ac, bell, com, prod, Observable};
use super::{pick, random_bits, Item, Question, Round};
use crate::qsim::Label;

fn string(positions: &[usize], letters: &[Label], mask: &[u8]) -> Observable {
    let labels: Vec<Label> = letters.iter().zip(mask).map(|(&l, &b)| if b == 1 { l } else { Label::I }).collect();
    Observable::from_string(&SignedString::on(positions, &labels))
}

/// pbt over positions whose letters alternate within `alphabet[i]`, a pair
/// of anticommuting labels.  `anc` is the ancilla pair for ac.
pub fn pbt<R: Rng + ?Sized>(positions: &[usize], alphabet: &[(Label, Label)], anc: usize, rng: &mut R) -> Round {
    let k = positions.len();
    let draw = |rng: &mut R| -> Vec<Label> {
        alphabet.iter().map(|&(p, q)| if rng.gen::<bool>() { p } else { q }).collect()
    };
    if rng.gen::<bool>() {
        let (v, v2) = (draw(rng), draw(rng));
        let (a, a2) = (random_bits(rng, k), random_bits(rng, k));
        let clash = (0..k).filter(|&i| v[i] != v2[i] && a[i] == 1 && a2[i] == 1).count();
        let (x, y) = (string(positions, &v, &a), string(positions, &v2, &a2));
        let r = if clash % 2 == 0 { com(&x, &y, rng) } else { ac(&x, &y, anc, rng) };
        r.prefixed("pbt")
    } else {
        let v = draw(rng);
        let (a, a2) = (random_bits(rng, k), random_bits(rng, k));
        let sum: Vec<u8> = a.iter().zip(&a2).map(|(p, q)| p ^ q).collect();
        let r = prod(&string(positions, &v, &a), &string(positions, &v, &a2), &string(positions, &v, &sum), rng);
        r.prefixed("pbt")
    }
}

/// The extended braiding test for X, Y and Z.  Part (c) pairs the first
/// half of the positions with a permutation of the second half.
pub fn pbt_xyz<R: Rng + ?Sized>(positions: &[usize], anc: usize, rng: &mut R) -> Round {
    let k = positions.len();
    let h = k / 2;
    let part = if h == 0 { pick(rng, 2) } else { pick(rng, 3) };
    match part {
        0 => pbt(positions, &vec![(Label::X, Label::Z); k], anc, rng).prefixed("pbtxyz/a"),
        1 => {
            let other = if rng.gen::<bool>() { Label::X } else { Label::Z };
            pbt(positions, &vec![(Label::Y, other); k], anc, rng).prefixed("pbtxyz/b")
        }
        _ => swap_part(positions, h, rng).prefixed("pbtxyz/c"),
    }
}

fn swap_part<R: Rng + ?Sized>(positions: &[usize], h: usize, rng: &mut R) -> Round {
    let mut sigma: Vec<usize> = (0..h).collect();
    sigma.shuffle(rng);
    let iy = |rng: &mut R| -> Vec<Label> { (0..h).map(|_| if rng.gen::<bool>() { Label::Y } else { Label::I }).collect() };
    let (w1, w2) = (iy(rng), iy(rng));
    let first: Vec<usize> = positions[..h].to_vec();
    let second: Vec<usize> = positions[h..2 * h].to_vec();
    // W1 with entries moved to the partner positions h + sigma(i)
    let partner: Vec<usize> = (0..h).map(|i| second[sigma[i]]).collect();
    let w1w1s = Question::concat(&[Question::sigma(&first, &w1), Question::sigma(&partner, &w1)]);
    match pick(rng, 3) {
        0 => {
            let (other, half) = if rng.gen::<bool>() {
                (Question::concat(&[Question::sigma(&first, &w1), Question::sigma(&second, &w2)]), first.clone())
            } else {
                (Question::concat(&[Question::sigma(&first, &w2), Question::sigma(&partner, &w1)]), partner.clone())
            };
            let (q1, q2) = (w1w1s.clone(), other.clone());
            Round::new("consistency", w1w1s, other, move |x, y| {
                let (s1, s2) = (q1.sigma_answers(x), q2.sigma_answers(y));
                half.iter().all(|p| match (s1.get(p), s2.get(p)) {
                    (Some(u), Some(v)) => u == v,
                    _ => true,
                })
            })
            .random_roles(rng)
        }
        1 => {
            let phi = Question::new((0..h).map(|i| Item::Bell { p: first[i], r: partner[i] }).collect());
            let q1 = w1w1s.clone();
            let (first, partner) = (first.clone(), partner.clone());
            Round::new("bell-link", w1w1s, phi, move |x, y| {
                let s = q1.sigma_answers(x);
                (0..h).all(|i| {
                    let outcome_00 = y.bits[2 * i] == 0 && y.bits[2 * i + 1] == 0;
                    match (s.get(&first[i]), s.get(&partner[i])) {
                        // on Phi_00 the partner halves satisfy YY = -1
                        (Some(u), Some(v)) if outcome_00 => u.1 != v.1,
                        _ => true,
                    }
                })
            })
            .random_roles(rng)
        }
        _ => {
            let copies = (0..h).map(|i| bell(first[i], partner[i], rng)).collect();
            Round::parallel("bell-copies", copies)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::tests::play;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn honest_pbt_xz() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pos: Vec<usize> = (0..4).collect();
        for t in 0..300 {
            let r = pbt(&pos, &[(Label::X, Label::Z); 4], 4, &mut rng);
            assert!(play(&r, 5, t), "{}", r.name);
        }
    }

    #[test]
    fn honest_pbt_xyz() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pos: Vec<usize> = (0..5).collect();
        for t in 0..400 {
            let r = pbt_xyz(&pos, 5, &mut rng);
            assert!(play(&r, 6, t), "{}", r.name);
        }
    }

    #[test]
    fn literal_equal_rule_would_fail_honest_players() {
        use crate::games::bell_expectation;
        // On Phi_00 the partner halves are anticorrelated in Y.
        assert!((bell_expectation(0, 0, Label::Y, Label::Y) + 1.0).abs() < 1e-12);
    }
}
