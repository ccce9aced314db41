//! Independent reference implementations and corpus generators for tests.
//!
//! Nothing here shares code with the reasoner beyond the concept AST: the
//! oracles evaluate concepts directly against enumerated interpretations.

pub mod generate;
pub mod oracle;
