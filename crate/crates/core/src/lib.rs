//! Proof kernel, model checker and proof search for hybrid XPath with data
//! comparisons.

pub mod corpus;
pub mod cutelim;
pub mod derived;
pub mod gen;
pub mod hylo;
pub mod kernel;
pub mod model;
pub mod search;
pub mod syntax;
