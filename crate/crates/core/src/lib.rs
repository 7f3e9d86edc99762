//! Translation of method names and partial type names into fully qualified
//! Java expression templates with a phrase-based statistical model.

pub mod encoder;
pub mod evaluator;
pub mod extractor;
mod hash;
pub mod querier;
pub mod translator;
