//! The conjugation test conj(A, B, R) and the Clifford conjugation test.

use rand::Rng;

use super::clifford::{pauli_labels, CliffordAction, SignedString};
use super::elementary::{ac, com, Observable};
use super::pbt::pbt_xyz;
use super::{pick, random_bits, Question, Round};
use crate::qsim::{c, Label, Operator};

/// C = |0><0| (x) A + |1><1| (x) B with the block set by the control pair.
pub fn controlled_observable(ctrl: usize, a: &Operator, b: &Operator) -> Operator {
    Operator::proj(ctrl, 0).mul(a).add(&Operator::proj(ctrl, 1).mul(b))
}

/// X_R = |0><1| (x) R^dagger + |1><0| (x) R.  For a signed tensor product of
/// Hermitian involutions R this equals X_ctrl (x) R, which is built directly
/// so it stays a product observable.
pub fn swap_observable(ctrl: usize, r: &Operator) -> Operator {
    if r.as_signed_product().is_some() {
        return Operator::label(ctrl, Label::X).mul(r);
    }
    let (o, one) = (c(0.0, 0.0), c(1.0, 0.0));
    let lower = Operator::single(ctrl, [[o, o], [one, o]]);
    let upper = Operator::single(ctrl, [[o, one], [o, o]]);
    upper.mul(&r.dagger()).add(&lower.mul(r))
}

fn unsigned(s: &SignedString) -> Observable {
    Observable::from_string(&SignedString::new(0, s.labels.clone()))
}

/// conj(A, B, R) for Pauli-type strings with R A R^dagger = B.  A and B are
/// asked under their unsigned labels; their signs enter the checks.
pub fn conj<R: Rng + ?Sized>(
    a: &SignedString,
    b: &SignedString,
    r: &SignedString,
    ctrl: usize,
    anc: usize,
    rng: &mut R,
) -> Round {
    let (oa, ob) = (unsigned(a), unsigned(b));
    let (sa, sb) = (a.sign, b.sign);
    let cc = Observable::new(format!("C[{}|{}]", a.name(), b.name()), controlled_observable(ctrl, &a.operator(), &b.operator()));
    let xr = Observable::new(format!("X_R[{}]", r.name()), swap_observable(ctrl, &r.operator()));
    let xc = Observable::label(ctrl, Label::X);
    let zc = Observable::label(ctrl, Label::Z);
    if rng.gen::<bool>() {
        let r = match pick(rng, 8) {
            0 => ac(&xc, &zc, anc, rng),
            1 => com(&cc, &zc, rng),
            2 => com(&xr, &cc, rng),
            3 => ac(&xr, &zc, anc, rng),
            4 => com(&oa, &xc, rng),
            5 => com(&ob, &xc, rng),
            6 => com(&oa, &zc, rng),
            _ => com(&ob, &zc, rng),
        };
        return r.prefixed("conj/a");
    }
    let w1 = pick(rng, 4);
    let w2 = pick(rng, 2);
    let q1 = [&oa, &ob, &cc, &zc][w1].question();
    let q2 = Question::new(vec![[&oa, &ob][w2].item(), zc.item()]);
    let sign2 = [sa, sb][w2];
    Round::new("conj/b", q1, q2, move |x, y| {
        let (v, z) = (y.bits[0], y.bits[1]);
        match w1 {
            2 => {
                // C agrees with A on the 0 block and with B on the 1 block
                if usize::from(z) == w2 {
                    x.bits[0] == v ^ sign2
                } else {
                    true
                }
            }
            3 => x.bits[0] == z,
            w => w != w2 || x.bits[0] == v,
        }
    })
    .random_roles(rng)
}

/// conj-cliff(R) for R a string of single-qubit Cliffords on `positions`.
pub fn conj_cliff<R: Rng + ?Sized>(positions: &[usize], r: &[Label], ctrl: usize, anc: usize, rng: &mut R) -> Round {
    if rng.gen::<bool>() {
        let mut pos = positions.to_vec();
        pos.push(ctrl);
        return pbt_xyz(&pos, anc, rng).prefixed("conjcliff/a");
    }
    let k = positions.len();
    let (a, b) = (random_bits(rng, k), random_bits(rng, k));
    let (sign, lb) = CliffordAction::new(r.to_vec()).conjugate_hermitian(&a, &b);
    let sa = SignedString::on(positions, &pauli_labels(&a, &b));
    let sb = SignedString::new(sign, positions.iter().copied().zip(lb).collect());
    conj(&sa, &sb, &SignedString::on(positions, r), ctrl, anc, rng).prefixed("conjcliff/b")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::tests::play;
    use crate::qsim::SIGMA;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_form_of_swap_observable_matches_block_form() {
        let r = Operator::product(&[(1, Label::F), (2, Label::Y)]);
        let (o, one) = (c(0.0, 0.0), c(1.0, 0.0));
        let lower = Operator::single(0, [[o, o], [one, o]]);
        let upper = Operator::single(0, [[o, one], [o, o]]);
        let block = upper.mul(&r.dagger()).add(&lower.mul(&r));
        let (x, y) = (swap_observable(0, &r).to_dense(3), block.to_dense(3));
        for (p, q) in x.iter().flatten().zip(y.iter().flatten()) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn swap_commutes_with_controlled_iff_conjugation_holds() {
        let r = Operator::label(1, Label::H);
        let a = Operator::label(1, Label::X);
        let good = controlled_observable(0, &a, &Operator::label(1, Label::Z));
        let bad = controlled_observable(0, &a, &Operator::label(1, Label::X));
        let xr = swap_observable(0, &r);
        let comm = |p: &Operator, q: &Operator| {
            p.mul(q).add(&q.mul(p).neg()).to_dense(2).iter().flatten().all(|z| z.norm() < 1e-12)
        };
        assert!(comm(&xr, &good));
        assert!(!comm(&xr, &bad));
    }

    #[test]
    fn honest_conj_cliff() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pos: Vec<usize> = (0..4).collect();
        for t in 0..400 {
            let r: Vec<Label> = (0..4).map(|_| SIGMA[rng.gen_range(0..5)]).collect();
            let g = conj_cliff(&pos, &r, 4, 5, &mut rng);
            assert!(play(&g, 6, t), "{}", g.name);
        }
    }
}
