//! Reasoning over multi-relational simple contextualized knowledge
//! repositories: parsing, translation to a normal logic program, a native
//! answer-set engine, model preference, algebraic measures and queries.

pub mod asp;
pub mod depgraph;
pub mod kb;
pub mod measures;
pub mod preferences;
pub mod query;
pub mod translator;
