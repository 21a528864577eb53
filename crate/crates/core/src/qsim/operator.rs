use super::{
    c, conj as mconj, dagger as mdagger, identity2, is_hermitian_involution, is_identity, mat_mul,
    mat_approx_eq, mat_scale, Label, Mat2, C64,
};

const TOL: f64 = 1e-10;
const LABELS: [Label; 7] = [Label::X, Label::Y, Label::Z, Label::F, Label::G, Label::H, Label::Hp];

/// `coef * (x)_q factors[q]`, identity on qubits not listed.
#[derive(Clone, Debug)]
pub struct Term {
    pub coef: C64,
    /// Sorted by qubit, at most one entry per qubit.
    pub factors: Vec<(usize, Mat2)>,
}

/// A linear combination of tensor-product terms.  Observables measured by
/// the games are Hermitian involutions of this form (Pauli strings, the
/// controlled observable C and the swap-type X_R).
#[derive(Clone, Debug)]
pub struct Operator {
    terms: Vec<Term>,
}

impl Term {
    fn mul(&self, other: &Term) -> Term {
        let mut factors: Vec<(usize, Mat2)> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            let qa = self.factors.get(i).map(|f| f.0);
            let qb = other.factors.get(j).map(|f| f.0);
            match (qa, qb) {
                (Some(a), Some(b)) if a == b => {
                    factors.push((a, mat_mul(&self.factors[i].1, &other.factors[j].1)));
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    factors.push(self.factors[i]);
                    i += 1;
                }
                (Some(_), None) => {
                    factors.push(self.factors[i]);
                    i += 1;
                }
                _ => {
                    factors.push(other.factors[j]);
                    j += 1;
                }
            }
        }
        let mut t = Term { coef: self.coef * other.coef, factors };
        t.normalize();
        t
    }

    /// Pull scalar phases out of factors that are phase * (Hermitian involution),
    /// and drop identity factors.
    fn normalize(&mut self) {
        let mut coef = self.coef;
        let mut kept = Vec::with_capacity(self.factors.len());
        for (q, f) in &self.factors {
            let sq = mat_mul(f, f);
            let lam = sq[0][0];
            let mut f = *f;
            if (lam.norm() - 1.0).abs() < TOL && is_identity(&mat_scale(&sq, lam.inv()), TOL) {
                let w = lam.sqrt();
                let h = mat_scale(&f, w.inv());
                if is_hermitian_involution(&h, TOL) {
                    coef *= w;
                    f = h;
                }
            }
            if is_identity(&f, TOL) {
                continue;
            }
            // prefer the named label over its negation
            let negf = mat_scale(&f, c(-1.0, 0.0));
            if LABELS.iter().any(|l| mat_approx_eq(&negf, &l.matrix(), TOL)) {
                coef = -coef;
                f = negf;
            }
            if is_identity(&mat_scale(&f, c(-1.0, 0.0)), TOL) {
                coef = -coef;
                continue;
            }
            kept.push((*q, f));
        }
        self.coef = coef;
        self.factors = kept;
    }
}

impl Operator {
    pub fn identity() -> Operator {
        Operator { terms: vec![Term { coef: c(1.0, 0.0), factors: vec![] }] }
    }

    pub fn from_terms(terms: Vec<Term>) -> Operator {
        let mut terms = terms;
        for t in &mut terms {
            t.factors.sort_by_key(|f| f.0);
            t.normalize();
        }
        Operator { terms }
    }

    pub fn single(q: usize, m: Mat2) -> Operator {
        Operator::from_terms(vec![Term { coef: c(1.0, 0.0), factors: vec![(q, m)] }])
    }

    pub fn label(q: usize, l: Label) -> Operator {
        Operator::single(q, l.matrix())
    }

    /// Product of single-qubit labels on distinct qubits.
    pub fn product(labels: &[(usize, Label)]) -> Operator {
        labels.iter().fold(Operator::identity(), |acc, &(q, l)| acc.mul(&Operator::label(q, l)))
    }

    pub fn zz(q1: usize, q2: usize) -> Operator {
        Operator::product(&[(q1, Label::Z), (q2, Label::Z)])
    }

    pub fn xx(q1: usize, q2: usize) -> Operator {
        Operator::product(&[(q1, Label::X), (q2, Label::X)])
    }

    /// Rank-one projector |b><b| on qubit `q` (not an involution; used to
    /// build block-diagonal observables).
    pub fn proj(q: usize, b: u8) -> Operator {
        let o = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let m = if b == 0 { [[one, o], [o, o]] } else { [[o, o], [o, one]] };
        Operator { terms: vec![Term { coef: one, factors: vec![(q, m)] }] }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn mul(&self, other: &Operator) -> Operator {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        Operator { terms }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Operator { terms }
    }

    pub fn scale(&self, s: C64) -> Operator {
        let terms = self.terms.iter().map(|t| Term { coef: t.coef * s, factors: t.factors.clone() }).collect();
        Operator { terms }
    }

    pub fn neg(&self) -> Operator {
        self.scale(c(-1.0, 0.0))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Operator {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coef: t.coef.conj(), factors: t.factors.iter().map(|(q, m)| (*q, mconj(m))).collect() })
            .collect();
        Operator::from_terms(terms)
    }

    pub fn dagger(&self) -> Operator {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coef: t.coef.conj(), factors: t.factors.iter().map(|(q, m)| (*q, mdagger(m))).collect() })
            .collect();
        Operator::from_terms(terms)
    }

    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.terms.iter().flat_map(|t| t.factors.iter().map(|f| f.0)).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Operator {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coef: t.coef, factors: t.factors.iter().map(|(q, m)| (f(*q), *m)).collect() })
            .collect();
        Operator::from_terms(terms)
    }

    /// Matrices appearing on qubit `q` across all terms (identity where absent).
    pub fn factors_on(&self, q: usize) -> Vec<Mat2> {
        self.terms
            .iter()
            .map(|t| t.factors.iter().find(|f| f.0 == q).map(|f| f.1).unwrap_or_else(identity2))
            .collect()
    }

    /// If this is `(-1)^sign` times a tensor product of Hermitian involutions,
    /// return the sign bit and the factors.  Such an observable can be
    /// measured factor by factor.
    pub fn as_signed_product(&self) -> Option<(u8, &[(usize, Mat2)])> {
        if self.terms.len() != 1 {
            return None;
        }
        let t = &self.terms[0];
        if t.coef.im.abs() > TOL || (t.coef.re.abs() - 1.0).abs() > TOL {
            return None;
        }
        if !t.factors.iter().all(|(_, m)| is_hermitian_involution(m, TOL)) {
            return None;
        }
        Some(((t.coef.re < 0.0) as u8, &t.factors))
    }

    /// Dense matrix on `n` qubits (qubit 0 most significant); test helper.
    pub fn to_dense(&self, n: usize) -> Vec<Vec<C64>> {
        let dim = 1 << n;
        let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
        for t in &self.terms {
            for (row, out_row) in out.iter_mut().enumerate() {
                for (col, entry) in out_row.iter_mut().enumerate() {
                    let mut v = t.coef;
                    for q in 0..n {
                        let rb = (row >> (n - 1 - q)) & 1;
                        let cb = (col >> (n - 1 - q)) & 1;
                        match t.factors.iter().find(|f| f.0 == q) {
                            Some((_, m)) => v *= m[rb][cb],
                            None if rb != cb => v = c(0.0, 0.0),
                            None => {}
                        }
                    }
                    *entry += v;
                }
            }
        }
        out
    }
}
