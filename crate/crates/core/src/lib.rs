//! Exact-arithmetic toolkit for the continued fraction of the Thue-Morse
//! Laurent tail and for Diophantine approximation certificates of the
//! associated constants.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`poly`] / [`laurent`]: exact polynomials, lazy Laurent tails and the
//!   Thue-Morse coefficient stream;
//! * [`cfseries`]: a generic continued-fraction engine for Laurent tails;
//! * [`canonical`]: the closed-form beta recurrence, canonical convergents,
//!   doubling map and shape checks;
//! * [`numtheory`]: valuations, primitive roots, Hensel lifting and discrete
//!   logarithms modulo prime powers;
//! * [`approx`] / [`realcf`]: integer approximation pairs, certified interval
//!   values, acceptability and divisibility certificates, and certified real
//!   continued fractions;
//! * [`selftest`]: the acceptance checklist run by `cargo test` and the CLI.

pub mod approx;
pub mod canonical;
pub mod cfseries;
pub mod dyadic;
pub mod laurent;
pub mod numtheory;
pub mod poly;
pub mod realcf;
pub mod selftest;
pub mod tm;

pub use approx::{
    AcceptabilityCertificate, ApproxPair, Engine, QualityReport, ScanRow, WitnessRecord,
};
pub use canonical::{BetaTable, CanonicalConvergent, CanonicalSeq, StructureReport};
pub use cfseries::{CfPrefix, Convergence, ConvergentPair};
pub use dyadic::{Dyadic, DyadicInterval};
pub use laurent::{LaurentTail, Residual, ResidualDegree};
pub use numtheory::{PrimePower, ValuationResult};
pub use poly::{Int, Poly, Rat};
pub use realcf::RealCf;
pub use tm::{tm_bit, tm_sign};
