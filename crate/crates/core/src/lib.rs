//! Parsing and hybrid execution of H-expressions: complex questions written
//! as trees of single-hop questions joined by eight deterministic binary
//! operations.
//!
//! ```
//! use hexpr_core::hexpr::parse_hexpression;
//! use hexpr_core::executor::{execute, ExecConfig};
//! use hexpr_core::readers::{FactStore, OracleReader};
//!
//! let expr = parse_hexpression(
//!     "JOIN[ Where is Ans#1's place of birth?, Who is director of The Iron Man? ]",
//! ).unwrap();
//! let mut facts = FactStore::new();
//! facts.insert("Who is director of The Iron Man?", ["Jon Favreau"]);
//! facts.insert("Where is Jon Favreau's place of birth?", ["New York"]);
//! let result = execute(&expr, &[], &OracleReader::new(facts), &ExecConfig::default());
//! assert_eq!(result.predicted(), "New York");
//! ```

pub mod builder;
pub mod eval;
pub mod executor;
pub mod hexpr;
pub mod jsonl;
pub mod readers;

pub use executor::{execute, execute_with_fallback, ExecConfig, ExecStatus, ExecutionResult};
pub use hexpr::{parse_hexpression, serialize, validate, HExpr, OpKind};
