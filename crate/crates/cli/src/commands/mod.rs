pub mod convert;
pub mod eval;
pub mod exec;
pub mod parse;
