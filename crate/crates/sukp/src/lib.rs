//! Toolkit for the Set-Union Knapsack Problem (SUKP).
//!
//! A SUKP instance has an item set whose members are subsets of a shared
//! element set. Items carry profit, elements carry weight, and the weight of
//! a selection is the weight of the *union* of its items' elements. The
//! toolkit provides:
//!
//! - [`instance`]: the instance data model, a canonical text format, a seeded
//!   generator, and validation.
//! - [`eval`]: objective/feasibility evaluation for item-based and
//!   element-based encodings, plus the static and self-adjusting value
//!   density measures.
//! - [`repair`]: greedy repair-and-optimization operators (ISRO for item
//!   loading, ESRO for element loading, and a static-density baseline).
//! - [`dtlbo`]: a discrete teaching-learning-based optimization engine with
//!   elite opposite search and a natural-selection step.
//! - [`oracle`]: exact solvers (enumeration and branch-and-bound) for small
//!   instances, used as ground truth in tests.
//! - [`mod@bench`]: a multi-run experiment harness with Friedman/Nemenyi
//!   rank statistics and CSV/Markdown/JSON emission.

pub mod bench;
pub mod dtlbo;
pub mod eval;
pub mod instance;
pub mod oracle;
pub mod repair;
