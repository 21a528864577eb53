//! Ordered record of every verifier/prover message.  Payloads are flat
//! arrays of bits, indices and symbol codes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TRANSCRIPT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    V,
    PV,
    PP,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub step: u32,
    pub from: Role,
    pub to: Role,
    pub kind: String,
    pub data: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub version: u32,
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn new() -> Transcript {
        Transcript { version: TRANSCRIPT_VERSION, messages: Vec::new() }
    }

    pub fn send(&mut self, from: Role, to: Role, kind: &str, data: Vec<u32>) {
        let step = self.messages.len() as u32;
        self.messages.push(Message { step, from, to, kind: kind.into(), data });
    }

    pub fn bits(bits: &[u8]) -> Vec<u32> {
        bits.iter().map(|&b| b as u32).collect()
    }

    pub fn indices(idx: &[usize]) -> Vec<u32> {
        idx.iter().map(|&i| i as u32).collect()
    }

    /// Messages addressed to `role`, in order.
    pub fn incoming(&self, role: Role) -> impl Iterator<Item = &Message> {
        self.messages.iter().filter(move |m| m.to == role)
    }

    /// Digest of everything `role` received; used by the blindness audit.
    pub fn incoming_digest(&self, role: Role) -> [u8; 32] {
        let mut h = Sha256::new();
        for m in self.incoming(role) {
            h.update(m.kind.as_bytes());
            h.update((m.data.len() as u32).to_le_bytes());
            for d in &m.data {
                h.update(d.to_le_bytes());
            }
        }
        h.finalize().into()
    }

    /// Number of messages from the verifier to `role`.
    pub fn questions_to(&self, role: Role) -> usize {
        self.messages.iter().filter(|m| m.from == Role::V && m.to == role).count()
    }
}
