//! The experiment harness: prover strategies, transcripts, seeded Monte
//! Carlo runs with statistics, the sequential amplification wrapper and
//! the command-line front end.

pub mod stats;
pub mod strategy;
pub mod transcript;
pub mod audit;
pub mod corpus;
pub mod experiment;
pub mod seq;
