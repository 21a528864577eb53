//! Dense statevector simulation: single-qubit observables, operators built
//! from tensor products, and a block-factorised register file for EPR pairs
//! shared between two parties.

mod operator;
mod registers;
mod state;

pub use operator::{Operator, Term};
pub use registers::{Party, PartyView, Registers};
pub use state::StateVector;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;
/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

/// Hard cap on the number of qubits in one dense block.
pub const MAX_QUBITS: usize = 16;
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("{n} qubits exceeds the dense-state cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },
    #[error("qubit {q} out of range for a {n}-qubit state")]
    QubitOutOfRange { q: usize, n: usize },
    #[error("state is not normalised (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("operator is not an involution on the current state")]
    NotInvolution,
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Single-qubit observable and gate labels.  `Hp` is the (X - Z)/sqrt2 reflection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    I,
    X,
    Y,
    Z,
    F,
    G,
    H,
    Hp,
}

/// The five observables certified by the rigidity tests.
pub const SIGMA: [Label; 5] = [Label::X, Label::Y, Label::Z, Label::F, Label::G];

impl Label {
    pub fn matrix(self) -> Mat2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let o = c(0.0, 0.0);
        match self {
            Label::I => [[c(1.0, 0.0), o], [o, c(1.0, 0.0)]],
            Label::X => [[o, c(1.0, 0.0)], [c(1.0, 0.0), o]],
            Label::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
            Label::Z => [[c(1.0, 0.0), o], [o, c(-1.0, 0.0)]],
            // (-X + Y)/sqrt2
            Label::F => [[o, c(-s, -s)], [c(-s, s), o]],
            // (X + Y)/sqrt2
            Label::G => [[o, c(s, -s)], [c(s, s), o]],
            Label::H => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
            Label::Hp => [[c(-s, 0.0), c(s, 0.0)], [c(s, 0.0), c(s, 0.0)]],
        }
    }

    /// Integer code used in transcripts.
    pub fn code(self) -> u32 {
        self as u32
    }

    pub fn from_code(code: u32) -> Option<Label> {
        use Label::*;
        [I, X, Y, Z, F, G, H, Hp].get(code as usize).copied()
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Label::I => "I",
            Label::X => "X",
            Label::Y => "Y",
            Label::Z => "Z",
            Label::F => "F",
            Label::G => "G",
            Label::H => "H",
            Label::Hp => "H'",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        Some(match s {
            "I" => Label::I,
            "X" => Label::X,
            "Y" => Label::Y,
            "Z" => Label::Z,
            "F" => Label::F,
            "G" => Label::G,
            "H" => Label::H,
            "H'" | "Hp" => Label::Hp,
            _ => return None,
        })
    }
}

pub mod gates {
    //! Unitary gate matrices.
    use super::{c, Label, Mat2};

    pub fn h() -> Mat2 {
        Label::H.matrix()
    }
    pub fn t() -> Mat2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(s, s)]]
    }
    pub fn t_dg() -> Mat2 {
        super::dagger(&t())
    }
    pub fn p() -> Mat2 {
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]
    }
    pub fn p_dg() -> Mat2 {
        super::dagger(&p())
    }
    pub fn x() -> Mat2 {
        Label::X.matrix()
    }
    pub fn y() -> Mat2 {
        Label::Y.matrix()
    }
    pub fn z() -> Mat2 {
        Label::Z.matrix()
    }
}

pub fn identity2() -> Mat2 {
    Label::I.matrix()
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub fn mat_scale(a: &Mat2, s: C64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn mat_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn conj(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[0][1].conj()], [a[1][0].conj(), a[1][1].conj()]]
}

pub fn mat_approx_eq(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() <= tol))
}

pub fn is_identity(a: &Mat2, tol: f64) -> bool {
    mat_approx_eq(a, &identity2(), tol)
}

/// Hermitian with square equal to the identity.
pub fn is_hermitian_involution(a: &Mat2, tol: f64) -> bool {
    mat_approx_eq(a, &dagger(a), tol) && is_identity(&mat_mul(a, a), tol)
}

pub fn commutes(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    mat_approx_eq(&mat_mul(a, b), &mat_mul(b, a), tol)
}

/// Conjugation `u a u^dagger`.
pub fn conjugate_by(u: &Mat2, a: &Mat2) -> Mat2 {
    mat_mul(&mat_mul(u, a), &dagger(u))
}
