//! Distance magic labelings of hypercubes: CNF encoding, SAT solving, decoding and
//! verification, plus analysis of the neighbor-balanced property.

pub mod cli;
pub mod cnf;
pub mod encoder;
pub mod hypercube;
pub mod oracle;
pub mod paper;
pub mod solver;

pub use cnf::{Cnf, Lit, Var};
pub use encoder::{build_instance, decode_model, EncodeOptions, EncodingArtifacts};
pub use hypercube::{
    balance_report, magic_constant, verify_dml, BalanceReport, Dimension, Labeling, Verdict,
};
pub use solver::{Model, SolverConfig, SolverOutcome};
