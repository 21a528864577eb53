//! Classical tracking of the one-time-pad keys (a, b): the data on wire j is
//! X^{a_j} Z^{b_j} applied to the intended state.

use serde::{Deserialize, Serialize};

pub use crate::circuits::Parity;

/// r = 0, 1, 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoundType {
    Computation,
    XTest,
    ZTest,
}

impl RoundType {
    pub const ALL: [RoundType; 3] = [RoundType::Computation, RoundType::XTest, RoundType::ZTest];

    pub fn index(self) -> usize {
        match self {
            RoundType::Computation => 0,
            RoundType::XTest => 1,
            RoundType::ZTest => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RoundType::Computation => "computation",
            RoundType::XTest => "x_test",
            RoundType::ZTest => "z_test",
        }
    }

    /// Whether a T gate of this parity is checked (c_i = a'_i + e_i) in this round.
    pub fn checks(self, parity: Parity) -> bool {
        matches!((self, parity), (RoundType::XTest, Parity::Even) | (RoundType::ZTest, Parity::Odd))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliKeys {
    pub a: Vec<u8>,
    pub b: Vec<u8>,
}

impl PauliKeys {
    pub fn zero(n: usize) -> PauliKeys {
        PauliKeys { a: vec![0; n], b: vec![0; n] }
    }

    /// Keys after measuring the verifier's halves of the input pairs (outcomes `d`):
    /// computation (d + x, 0), X-test (d, 0), Z-test (0, d).
    pub fn initial(round: RoundType, d: &[u8], x: &[u8]) -> PauliKeys {
        let n = d.len();
        match round {
            RoundType::Computation => PauliKeys { a: d.iter().zip(x).map(|(p, q)| p ^ q).collect(), b: vec![0; n] },
            RoundType::XTest => PauliKeys { a: d.to_vec(), b: vec![0; n] },
            RoundType::ZTest => PauliKeys { a: vec![0; n], b: d.to_vec() },
        }
    }

    pub fn h(&mut self, j: usize) {
        std::mem::swap(&mut self.a[j], &mut self.b[j]);
    }

    /// (a_j, b_j, a_k, b_k) -> (a_j, b_j + b_k, a_j + a_k, b_k) for CNOT(j -> k).
    pub fn cnot(&mut self, j: usize, k: usize) {
        self.b[j] ^= self.b[k];
        self.a[k] ^= self.a[j];
    }

    /// Update for the T gadget on wire j with prover bit `c`, verifier
    /// outcome `e` and correction bit `z`.
    ///
    /// Computation rounds: a <- a + c, b <- b + e + (a + c) + (a + c) z.
    /// Checked gates (X-test even, Z-test odd) carry a computational basis
    /// state: (e, 0).  The remaining test gates carry a padded |+>: (0, b + e).
    /// The correction bit does not enter this last rule: the verifier's
    /// choice of X or Y already absorbs it.
    pub fn t(&mut self, j: usize, round: RoundType, parity: Parity, c: u8, e: u8, z: u8) {
        match round {
            RoundType::Computation => {
                let k = self.a[j] ^ c;
                self.a[j] = k;
                self.b[j] ^= e ^ k ^ (k & z);
            }
            _ if round.checks(parity) => {
                self.a[j] = e;
                self.b[j] = 0;
            }
            _ => {
                self.a[j] = 0;
                self.b[j] ^= e;
            }
        }
    }
}
