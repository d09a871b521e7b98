//! Proof-carrying hardware toolkit.
//!
//! A producer combines a circuit with a safety property into a sequential
//! checker ([`miter`]), runs IC3 ([`ic3`]) to obtain an inductive
//! strengthening, and ships it as a [`certificate`]. The consumer validates
//! the certificate with three unsatisfiability queries ([`checker`]).

pub mod aiger;
pub mod encoder;
pub mod sat;
pub mod builder;
pub mod certificate;
pub mod checker;
pub mod circuits;
pub mod cli;
pub mod ic3;
pub mod miter;
pub mod witness;
