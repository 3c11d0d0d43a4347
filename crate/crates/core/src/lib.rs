//! Fair allocation of indivisible chores when every item adds zero or one to an agent's cost.
//!
//! The crate provides cost functions and their class checks, allocation checkers (EF, EFX,
//! α-variants, Pareto-optimality), the envy graph, four allocation algorithms and an exhaustive
//! oracle for small instances. It needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod allocation;
pub mod builtin;
pub mod class;
pub mod cost;
pub mod envy_graph;
pub mod error;
pub mod fairness;
pub mod instance;
pub mod itemset;
pub mod oracle;
pub mod solve;

pub use allocation::Allocation;
pub use class::{check_class, sample_class, FunctionClassReport};
pub use cost::{Cost, CostFunction, Descriptor, FunctionClass, Residual, SetFunction};
pub use envy_graph::EnvyGraph;
pub use error::{Error, Result};
pub use fairness::{fairness_report, FairnessReport, Ratio};
pub use instance::{Instance, Metadata};
pub use itemset::ItemSet;
pub use solve::{solve, Algorithm, GuaranteeTag, SolveOptions, SolveReport};
