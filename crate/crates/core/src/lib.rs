//! Solvers for the graph vertex pricing problem (GVP) and its hypergraph
//! generalization, single-minded pricing (SMP).
//!
//! A seller prices the vertices of a graph; every edge is a consumer with a
//! budget who buys both endpoints when their summed price fits the budget.
//! The crate bundles exact solvers (brute force, tree-decomposition dynamic
//! programming, path/cycle recursions, Sherali-Adams LP rounding) with the
//! approximation algorithms built on them (FPTAS, planar PTAS, k-partite and
//! bounded-degree approximations).
//!
//! All budgets, prices and revenues are exact rationals.

pub mod error;
pub mod generators;
pub mod instance;
pub mod io;
pub mod kpartite;
pub mod low_degree;
pub mod lp;
pub mod oracle;
pub mod planar;
pub mod rational;
pub mod sherali_adams;
pub mod treewidth;

pub use error::{Error, Result};
pub use instance::{
    evaluate_revenue, evaluate_revenue_smp, lift_prices, round_budgets, Edge, HyperEdge,
    HyperInstance, Instance, PriceAssignment, RoundingResult, Solution,
};
pub use rational::Rational;
