//! Conjugation of Pauli operators X(a)Z(b) by a tensor product of
//! single-qubit Cliffords, tracked symbolically.

use crate::qsim::{Label, Operator};

/// `i^k X^x Z^z` on one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pauli1 {
    k: u8,
    x: u8,
    z: u8,
}

impl Pauli1 {
    fn mul(self, o: Pauli1) -> Pauli1 {
        // Z^z1 X^x2 = (-1)^{z1 x2} X^x2 Z^z1
        Pauli1 { k: (self.k + o.k + 2 * (self.z & o.x)) % 4, x: self.x ^ o.x, z: self.z ^ o.z }
    }
}

const PX: Pauli1 = Pauli1 { k: 0, x: 1, z: 0 };
const PZ: Pauli1 = Pauli1 { k: 0, x: 0, z: 1 };

fn neg(p: Pauli1) -> Pauli1 {
    Pauli1 { k: (p.k + 2) % 4, ..p }
}

/// (L X L^dagger, L Z L^dagger).
fn images(l: Label) -> (Pauli1, Pauli1) {
    let y = Pauli1 { k: 1, x: 1, z: 1 };
    match l {
        Label::I => (PX, PZ),
        Label::X => (PX, neg(PZ)),
        Label::Y => (neg(PX), neg(PZ)),
        Label::Z => (neg(PX), PZ),
        Label::F => (neg(y), neg(PZ)),
        Label::G => (y, neg(PZ)),
        Label::H => (PZ, PX),
        Label::Hp => (neg(PZ), neg(PX)),
    }
}

/// The action of R = (x)_i sigma_{labels[i]} on the Weyl-Heisenberg group:
/// R X(a)Z(b) R^dagger = i^{h_S} X(h_X) Z(h_Z).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordAction {
    labels: Vec<Label>,
}

impl CliffordAction {
    pub fn new(labels: Vec<Label>) -> CliffordAction {
        CliffordAction { labels }
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    /// Returns (h_S mod 4, h_X, h_Z).
    pub fn conjugate_pauli(&self, a: &[u8], b: &[u8]) -> (u8, Vec<u8>, Vec<u8>) {
        let mut k = 0u8;
        let mut hx = Vec::with_capacity(self.m());
        let mut hz = Vec::with_capacity(self.m());
        for (i, &l) in self.labels.iter().enumerate() {
            let (ix, iz) = images(l);
            let mut p = Pauli1 { k: 0, x: 0, z: 0 };
            if a[i] == 1 {
                p = p.mul(ix);
            }
            if b[i] == 1 {
                p = p.mul(iz);
            }
            k = (k + p.k) % 4;
            hx.push(p.x);
            hz.push(p.z);
        }
        (k, hx, hz)
    }

    /// R A(a,b) R^dagger for the Hermitian A(a,b) = i^{a.b} X(a)Z(b), written
    /// as (-1)^sign times a string over {I, X, Y, Z}.
    pub fn conjugate_hermitian(&self, a: &[u8], b: &[u8]) -> (u8, Vec<Label>) {
        let (hs, hx, hz) = self.conjugate_pauli(a, b);
        let ab = a.iter().zip(b).filter(|(p, q)| **p == 1 && **q == 1).count();
        let ys = hx.iter().zip(&hz).filter(|(p, q)| **p == 1 && **q == 1).count();
        // i^{ab + hs} X(hx)Z(hz) = i^{ab + hs - ys} * (Hermitian string)
        let phase = (ab as i64 + hs as i64 - ys as i64).rem_euclid(4);
        debug_assert!(phase % 2 == 0, "conjugate of a Hermitian Pauli must be Hermitian");
        (u8::from(phase == 2), pauli_labels(&hx, &hz))
    }
}

/// The Hermitian Pauli string with X on `a`, Z on `b` and Y where both.
pub fn pauli_labels(a: &[u8], b: &[u8]) -> Vec<Label> {
    a.iter()
        .zip(b)
        .map(|(&x, &z)| match (x, z) {
            (0, 0) => Label::I,
            (1, 0) => Label::X,
            (0, 1) => Label::Z,
            _ => Label::Y,
        })
        .collect()
}

/// Signed product observable over pairs, skipping identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedString {
    pub sign: u8,
    pub labels: Vec<(usize, Label)>,
}

impl SignedString {
    pub fn new(sign: u8, labels: Vec<(usize, Label)>) -> SignedString {
        SignedString { sign, labels: labels.into_iter().filter(|(_, l)| *l != Label::I).collect() }
    }

    pub fn on(positions: &[usize], labels: &[Label]) -> SignedString {
        SignedString::new(0, positions.iter().copied().zip(labels.iter().copied()).collect())
    }

    pub fn operator(&self) -> Operator {
        let op = Operator::product(&self.labels);
        if self.sign == 1 {
            op.neg()
        } else {
            op
        }
    }

    pub fn name(&self) -> String {
        let mut s = String::from(if self.sign == 1 { "-" } else { "" });
        if self.labels.is_empty() {
            s.push('I');
        }
        for (p, l) in &self.labels {
            s.push_str(&format!("{}{}", l.symbol(), p));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{conjugate_by, mat_approx_eq, mat_mul, mat_scale, Mat2, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(p: Pauli1) -> Mat2 {
        let mut m = Label::I.matrix();
        if p.x == 1 {
            m = mat_mul(&m, &Label::X.matrix());
        }
        if p.z == 1 {
            m = mat_mul(&m, &Label::Z.matrix());
        }
        mat_scale(&m, C64::i().powu(p.k as u32))
    }

    #[test]
    fn images_match_matrix_conjugation() {
        use Label::*;
        for l in [I, X, Y, Z, F, G, H, Hp] {
            let (ix, iz) = images(l);
            assert!(mat_approx_eq(&conjugate_by(&l.matrix(), &X.matrix()), &mat(ix), 1e-12), "{l:?} X");
            assert!(mat_approx_eq(&conjugate_by(&l.matrix(), &Z.matrix()), &mat(iz), 1e-12), "{l:?} Z");
            // Y = i X Z
            let iy = Pauli1 { k: 1, x: 0, z: 0 }.mul(ix).mul(iz);
            assert!(mat_approx_eq(&conjugate_by(&l.matrix(), &Y.matrix()), &mat(iy), 1e-12), "{l:?} Y");
        }
    }

    #[test]
    fn hermitian_conjugate_agrees_with_operator_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let all = [Label::X, Label::Y, Label::Z, Label::F, Label::G, Label::H, Label::Hp];
        for _ in 0..200 {
            let m = rng.gen_range(1..=4);
            let labels: Vec<Label> = (0..m).map(|_| all[rng.gen_range(0..all.len())]).collect();
            let a: Vec<u8> = (0..m).map(|_| rng.gen_range(0..2)).collect();
            let b: Vec<u8> = (0..m).map(|_| rng.gen_range(0..2)).collect();
            let act = CliffordAction::new(labels.clone());
            let (sign, out) = act.conjugate_hermitian(&a, &b);
            let pos: Vec<usize> = (0..m).collect();
            let r = SignedString::on(&pos, &labels).operator();
            let a_op = SignedString::on(&pos, &pauli_labels(&a, &b)).operator();
            let direct = r.mul(&a_op).mul(&r.dagger());
            let expect = SignedString::new(sign, pos.iter().copied().zip(out).collect()).operator();
            let (x, y) = (direct.to_dense(m), expect.to_dense(m));
            for (p, q) in x.iter().flatten().zip(y.iter().flatten()) {
                assert!((p - q).norm() < 1e-12);
            }
        }
    }

    fn random_case(rng: &mut ChaCha8Rng, alphabet: &[Label]) -> (Vec<Label>, Vec<u8>, Vec<u8>) {
        let m = rng.gen_range(1..=6);
        let labels = (0..m).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        let a = (0..m).map(|_| rng.gen_range(0..2)).collect();
        let b = (0..m).map(|_| rng.gen_range(0..2)).collect();
        (labels, a, b)
    }

    fn dot(a: &[u8], b: &[u8]) -> u8 {
        a.iter().zip(b).fold(0, |s, (p, q)| s ^ (p & q))
    }

    #[test]
    fn y_count_parity_tracks_the_phase() {
        // h_X . h_Z = a . b + h_S (mod 2) for every single-qubit Clifford
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let all = [Label::X, Label::Y, Label::Z, Label::F, Label::G, Label::H, Label::Hp];
        for _ in 0..1000 {
            let (labels, a, b) = random_case(&mut rng, &all);
            let (hs, hx, hz) = CliffordAction::new(labels).conjugate_pauli(&a, &b);
            assert_eq!(dot(&hx, &hz), dot(&a, &b) ^ (hs & 1));
        }
    }

    #[test]
    fn y_count_parity_is_preserved_without_f_and_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let all = [Label::X, Label::Y, Label::Z, Label::H, Label::Hp];
        for _ in 0..1000 {
            let (labels, a, b) = random_case(&mut rng, &all);
            let (hs, hx, hz) = CliffordAction::new(labels).conjugate_pauli(&a, &b);
            assert_eq!(hs % 2, 0);
            assert_eq!(dot(&hx, &hz), dot(&a, &b));
        }
    }

    #[test]
    fn f_maps_x_to_y() {
        // F X F^dagger = -Y, so the Y count changes parity
        let (hs, hx, hz) = CliffordAction::new(vec![Label::F]).conjugate_pauli(&[1], &[0]);
        assert_eq!((hs, hx, hz), (3, vec![1], vec![1]));
        assert_eq!(CliffordAction::new(vec![Label::F]).conjugate_hermitian(&[1], &[0]), (1, vec![Label::Y]));
    }
}
