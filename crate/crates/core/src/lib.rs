//! Two-prover delegation of quantum computation with a purely classical
//! verifier: a dense simulator, the one-time-pad key tracker, the EPR
//! protocol, the rigidity games, and the Leash and Dog-Walker protocols.

pub mod qsim;
pub mod circuits;
pub mod keys;
pub mod games;
pub mod epr;
pub mod leash;
pub mod dogwalker;
pub mod orchestrator;
