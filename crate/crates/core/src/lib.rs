//! The paraconsistent logic vD: formulas, a Hilbert-style proof checker,
//! topological semantics with a partially determined disjunction, and
//! bounded countermodel search over finite topologies.
//!
//! ```
//! use vd_core::formula::parse;
//! use vd_core::search::{refute_validity, SearchBudget};
//!
//! let explosion = parse("p -> (!p -> q)").unwrap();
//! let report = refute_validity(&explosion, &SearchBudget::default()).unwrap().unwrap();
//! assert!(report.replay().unwrap());
//! ```

pub mod formula;
pub mod hilbert;
pub mod json;
pub mod random;
pub mod search;
pub mod semantics;
pub mod topo;

pub use formula::{parse, Formula};
pub use hilbert::{check, Derivation, Justification};
pub use semantics::{eval, Model, Valuation};
pub use topo::{FiniteSpace, IntervalSet, PointSet, Space};
