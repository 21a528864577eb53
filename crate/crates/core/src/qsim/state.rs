use rand::Rng;

use super::{c, Label, Mat2, Operator, QsimError, C64, MAX_QUBITS, NORM_TOL};

/// Dense pure state on `n` qubits.  Qubit 0 is the most significant bit of
/// the basis index, so `basis(&[1, 0])` is |10>.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self, QsimError> {
        if n > MAX_QUBITS {
            return Err(QsimError::TooManyQubits { n, cap: MAX_QUBITS });
        }
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn basis(bits: &[u8]) -> Result<Self, QsimError> {
        let mut s = Self::zero(bits.len())?;
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        s.amps[0] = c(0.0, 0.0);
        s.amps[idx] = c(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QsimError::NotNormalized(0.0));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(QsimError::TooManyQubits { n, cap: MAX_QUBITS });
        }
        let s = StateVector { n, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QsimError::NotNormalized(norm));
        }
        Ok(s)
    }

    /// `k` EPR pairs (|00> + |11>)/sqrt2 on qubits (2i, 2i+1).
    pub fn epr_pairs(k: usize) -> Result<Self, QsimError> {
        let mut s = Self::zero(2 * k)?;
        for i in 0..k {
            s.apply_1q(&Label::H.matrix(), 2 * i);
            s.apply_cnot(2 * i, 2 * i + 1);
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    #[inline]
    fn mask(&self, q: usize) -> usize {
        debug_assert!(q < self.n, "qubit {q} out of range ({} qubits)", self.n);
        1 << (self.n - 1 - q)
    }

    pub fn apply_1q(&mut self, m: &Mat2, q: usize) {
        let mask = self.mask(q);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        assert_ne!(control, target, "CNOT needs distinct wires");
        let cm = self.mask(control);
        let tm = self.mask(target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    /// `O|psi>`; the operator's qubit indices are positions in this state.
    pub fn apply_operator(&self, op: &Operator) -> StateVector {
        let mut out = vec![c(0.0, 0.0); self.amps.len()];
        for term in op.terms() {
            let mut v = self.clone();
            for (q, m) in &term.factors {
                v.apply_1q(m, *q);
            }
            for (o, a) in out.iter_mut().zip(v.amps) {
                *o += term.coef * a;
            }
        }
        StateVector { n: self.n, amps: out }
    }

    fn split(&self, op: &Operator) -> (Vec<C64>, Vec<C64>) {
        let phi = self.apply_operator(op);
        let plus = self.amps.iter().zip(&phi.amps).map(|(a, b)| (a + b) * 0.5).collect();
        let minus = self.amps.iter().zip(&phi.amps).map(|(a, b)| (a - b) * 0.5).collect();
        (plus, minus)
    }

    /// A one-qubit observable as (qubit, signed matrix).
    fn single_factor(op: &Operator) -> Option<(usize, Mat2)> {
        let t = op.terms();
        if t.len() != 1 || t[0].factors.len() != 1 || t[0].coef.im.abs() > 1e-12 {
            return None;
        }
        let (q, m) = t[0].factors[0];
        let s = t[0].coef;
        Some((q, [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]))
    }

    /// (I + (-1)^outcome M) / 2.
    fn projector(m: &Mat2, outcome: u8) -> Mat2 {
        let sg = if outcome == 0 { 0.5 } else { -0.5 };
        let one = c(0.5, 0.0);
        [[one + m[0][0] * sg, m[0][1] * sg], [m[1][0] * sg, one + m[1][1] * sg]]
    }

    fn weight_1q(&self, p: &Mat2, q: usize) -> f64 {
        let mask = self.mask(q);
        let mut w = 0.0;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                w += (p[0][0] * a0 + p[0][1] * a1).norm_sqr() + (p[1][0] * a0 + p[1][1] * a1).norm_sqr();
            }
        }
        w
    }

    fn collapse_1q(&mut self, p: &Mat2, q: usize, weight: f64) {
        let s = 1.0 / weight.sqrt();
        let p = [[p[0][0] * s, p[0][1] * s], [p[1][0] * s, p[1][1] * s]];
        self.apply_1q(&p, q);
    }

    /// Probability of outcome 0 (eigenvalue +1) for the involution `op`.
    pub fn prob_plus(&self, op: &Operator) -> f64 {
        if let Some((q, m)) = Self::single_factor(op) {
            return self.weight_1q(&Self::projector(&m, 0), q);
        }
        let (plus, _) = self.split(op);
        plus.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Project onto the `outcome` eigenspace of the involution `op` and
    /// renormalise; returns the probability of that outcome.
    pub fn project(&mut self, op: &Operator, outcome: u8) -> Result<f64, QsimError> {
        if let Some((q, m)) = Self::single_factor(op) {
            let pr = Self::projector(&m, outcome);
            let p = self.weight_1q(&pr, q);
            if p <= 1e-300 {
                return Err(QsimError::NotNormalized(p));
            }
            self.collapse_1q(&pr, q, p);
            return Ok(p);
        }
        let (plus, minus) = self.split(op);
        let v = if outcome == 0 { plus } else { minus };
        let p: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if p <= 1e-300 {
            return Err(QsimError::NotNormalized(p));
        }
        let s = 1.0 / p.sqrt();
        self.amps = v.into_iter().map(|a| a * s).collect();
        Ok(p)
    }

    /// Measure a Hermitian involution.  Outcome 0 corresponds to eigenvalue +1;
    /// the state collapses through (I +- O)/2.
    pub fn measure<R: Rng + ?Sized>(&mut self, op: &Operator, rng: &mut R) -> u8 {
        if let Some((q, m)) = Self::single_factor(op) {
            let p0 = self.weight_1q(&Self::projector(&m, 0), q);
            let p1 = (1.0 - p0).max(0.0);
            let outcome = if rng.gen::<f64>() < p0 { 0 } else { 1 };
            let pr = Self::projector(&m, outcome);
            self.collapse_1q(&pr, q, if outcome == 0 { p0 } else { p1 });
            return outcome;
        }
        let (plus, minus) = self.split(op);
        let p0: f64 = plus.iter().map(|a| a.norm_sqr()).sum();
        let p1: f64 = minus.iter().map(|a| a.norm_sqr()).sum();
        debug_assert!((p0 + p1 - 1.0).abs() < 1e-6, "measurement probabilities sum to {}", p0 + p1);
        let outcome = if rng.gen::<f64>() * (p0 + p1) < p0 { 0 } else { 1 };
        let (v, p) = if outcome == 0 { (plus, p0) } else { (minus, p1) };
        let s = 1.0 / p.sqrt();
        self.amps = v.into_iter().map(|a| a * s).collect();
        outcome
    }

    pub fn measure_label<R: Rng + ?Sized>(&mut self, q: usize, label: Label, rng: &mut R) -> u8 {
        self.measure(&Operator::label(q, label), rng)
    }

    /// Bell-basis measurement of (q1, q2).  Returns `(a, b)` where `a` is the
    /// Z(q1)Z(q2) syndrome and `b` the X(q1)X(q2) syndrome, so (0, 0) is the
    /// EPR state.
    pub fn measure_bell<R: Rng + ?Sized>(&mut self, q1: usize, q2: usize, rng: &mut R) -> (u8, u8) {
        let a = self.measure(&Operator::zz(q1, q2), rng);
        let b = self.measure(&Operator::xx(q1, q2), rng);
        (a, b)
    }

    pub fn prob_zero(&self, q: usize) -> f64 {
        let mask = self.mask(q);
        self.amps.iter().enumerate().filter(|(i, _)| i & mask == 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// `self (x) other`, with `self` occupying the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, QsimError> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(QsimError::TooManyQubits { n, cap: MAX_QUBITS });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { n, amps })
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Move qubit `q` to the last position (amplitude reindexing only).
    #[cfg(test)]
    pub(crate) fn move_to_end(&self, q: usize) -> StateVector {
        let n = self.n;
        let mut amps = vec![c(0.0, 0.0); self.amps.len()];
        let hi = n - 1 - q;
        for (i, a) in self.amps.iter().enumerate() {
            let bit = (i >> hi) & 1;
            let upper = (i >> (hi + 1)) << hi;
            let lower = i & ((1 << hi) - 1);
            let rest = upper | lower;
            amps[(rest << 1) | bit] = *a;
        }
        StateVector { n, amps }
    }

    /// For a state that is a product between qubit `q` and the rest, split it
    /// into (single-qubit state, remaining state).
    pub(crate) fn factor_out(&self, q: usize) -> (StateVector, StateVector) {
        let hi = self.n - 1 - q;
        let lower = (1usize << hi) - 1;
        let half = self.amps.len() >> 1;
        // rest index r -> full index with bit `hi` cleared
        let full = |r: usize| ((r >> hi) << (hi + 1)) | (r & lower);
        let bit = 1usize << hi;
        let (mut best, mut best_norm) = (0usize, -1.0);
        for r in 0..half {
            let i = full(r);
            let w = self.amps[i].norm_sqr() + self.amps[i | bit].norm_sqr();
            if w > best_norm {
                best = r;
                best_norm = w;
            }
        }
        let s = 1.0 / best_norm.sqrt();
        let bi = full(best);
        let phi = [self.amps[bi] * s, self.amps[bi | bit] * s];
        let mut rest: Vec<C64> = (0..half)
            .map(|r| {
                let i = full(r);
                phi[0].conj() * self.amps[i] + phi[1].conj() * self.amps[i | bit]
            })
            .collect();
        let norm: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
        let s = 1.0 / norm.sqrt();
        rest.iter_mut().for_each(|a| *a *= s);
        (StateVector { n: 1, amps: phi.to_vec() }, StateVector { n: self.n - 1, amps: rest })
    }
}
