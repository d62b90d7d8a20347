//! QHC: a joint calculus of problems and propositions.
//!
//! The crate provides the two-sorted formula language, Hilbert-style
//! proof checking for the five related calculi (QC, QH, QS4, QH4, QHC)
//! and their extensions, the syntactic interpretations between them, a
//! propositional S4/IPC decision procedure with self-certifying Kripke
//! countermodels, and a machine-checked corpus of derived results.

pub mod calculi;
pub mod corpus;
pub mod formula;
pub mod kernel;
pub mod parser;
pub mod printer;
pub mod schema;
pub mod script;
pub mod semantics;
pub mod translate;

pub use formula::{Formula, Signature, Sort, Term};
