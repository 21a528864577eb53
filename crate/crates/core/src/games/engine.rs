//! Honest answering: measure exactly the requested observables on the
//! player's halves.  Signed tensor products are measured factor by factor
//! when every factor commutes with everything else asked on that qubit,
//! which keeps the simulated blocks small; anything else is measured jointly.

use rand::Rng;

use super::{Answer, Item, Question};
use crate::qsim::{commutes, mat_approx_eq, Label, Mat2, Operator, PartyView, Term, SIGMA};

/// Which of the two complex-conjugate representations a player uses.  On a
/// maximally entangled state the pair (Sigma, Conjugate) reproduces the
/// ideal correlations Tr(A B)/d for every pair of observables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Sigma,
    Conjugate,
}

const TOL: f64 = 1e-10;

fn swap_xz(op: &Operator) -> Operator {
    let (x, z) = (Label::X.matrix(), Label::Z.matrix());
    let terms = op
        .terms()
        .iter()
        .map(|t| Term {
            coef: t.coef,
            factors: t
                .factors
                .iter()
                .map(|(q, m)| {
                    let m = if mat_approx_eq(m, &x, TOL) {
                        z
                    } else if mat_approx_eq(m, &z, TOL) {
                        x
                    } else {
                        *m
                    };
                    (*q, m)
                })
                .collect(),
        })
        .collect();
    Operator::from_terms(terms)
}

/// Matrices each item applies per local qubit (Bell: Z and X on both).
fn footprint(item: &Item, local: &Option<Operator>, half: &dyn Fn(usize) -> usize) -> Vec<(usize, Mat2)> {
    match (item, local) {
        (_, Some(op)) => op.support().into_iter().flat_map(|q| op.factors_on(q).into_iter().map(move |m| (q, m))).collect(),
        (Item::Bell { p, r }, None) => {
            let (z, x) = (Label::Z.matrix(), Label::X.matrix());
            vec![(half(*p), z), (half(*p), x), (half(*r), z), (half(*r), x)]
        }
        (Item::Free { pair }, None) => SIGMA.iter().map(|l| (half(*pair), l.matrix())).collect(),
        _ => vec![],
    }
}

/// Measure the question with `rep`; `swap` exchanges X and Z in every
/// requested observable (used by a deviating strategy).
pub fn measure_question<R: Rng + ?Sized>(
    q: &Question,
    view: &mut PartyView<'_>,
    rep: Representation,
    swap: bool,
    rng: &mut R,
) -> Answer {
    let party = view.party();
    let half = move |p: usize| match party {
        crate::qsim::Party::A => 2 * p,
        crate::qsim::Party::B => 2 * p + 1,
    };
    let localize = |op: &Operator| {
        let mut o = op.remap(half);
        if rep == Representation::Conjugate {
            o = o.conj();
        }
        if swap {
            o = swap_xz(&o);
        }
        o
    };
    let locals: Vec<Option<Operator>> = q
        .items
        .iter()
        .map(|it| match it {
            Item::Sigma { pair, label } => Some(localize(&Operator::label(*pair, *label))),
            Item::Obs { op, .. } => Some(localize(op)),
            _ => None,
        })
        .collect();
    let prints: Vec<Vec<(usize, Mat2)>> = q.items.iter().zip(&locals).map(|(it, l)| footprint(it, l, &half)).collect();

    let mut ans = Answer::default();
    for (k, it) in q.items.iter().enumerate() {
        match it {
            Item::Bell { p, r } => {
                let (a, b) = view.measure_bell(half(*p), half(*r));
                ans.bits.push(a);
                ans.bits.push(b);
            }
            Item::Free { pair } => {
                let l = SIGMA[rng.gen_range(0..SIGMA.len())];
                ans.labels.push(l);
                ans.bits.push(view.measure(&localize(&Operator::label(*pair, l))));
            }
            _ => {
                let op = locals[k].as_ref().expect("observable item");
                ans.bits.push(measure_op(op, k, &prints, view));
            }
        }
    }
    ans
}

fn measure_op(op: &Operator, k: usize, prints: &[Vec<(usize, Mat2)>], view: &mut PartyView<'_>) -> u8 {
    if let Some((sign, factors)) = op.as_signed_product() {
        if factors.len() > 1 {
            let separable = factors.iter().all(|(q, f)| {
                prints
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .flat_map(|(_, p)| p.iter())
                    .filter(|(q2, _)| q2 == q)
                    .all(|(_, m)| commutes(f, m, TOL))
            });
            if separable {
                let factors = factors.to_vec();
                return factors.iter().fold(sign, |acc, (q, f)| acc ^ view.measure(&Operator::single(*q, *f)));
            }
        }
    }
    view.measure(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{Party, Registers};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn refined_product_keeps_blocks_small() {
        let mut regs = Registers::epr_pairs(6, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let labels: Vec<(usize, Label)> = (0..6).map(|i| (i, SIGMA[i % 5])).collect();
        let q = Question::new(vec![Item::Obs { name: "W".into(), op: Operator::product(&labels) }]);
        let a = measure_question(&q, &mut regs.view(Party::A), Representation::Sigma, false, &mut rng);
        let b = measure_question(&q, &mut regs.view(Party::B), Representation::Conjugate, false, &mut rng);
        assert_eq!(a, b);
        assert_eq!(regs.peak_block(), 2);
    }

    #[test]
    fn swap_exchanges_bases() {
        let op = Operator::product(&[(0, Label::X), (1, Label::Z)]);
        let s = swap_xz(&op);
        let f0 = s.factors_on(0)[0];
        assert!(mat_approx_eq(&f0, &Label::Z.matrix(), 1e-12));
    }
}
