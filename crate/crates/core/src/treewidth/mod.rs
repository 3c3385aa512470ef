//! Tree decompositions and the exact pricing DP over them.
//!
//! The DP works on arbitrary rooted decompositions: bags may have any size,
//! and each consumer (edge or hyperedge) is charged at the node nearest the
//! root whose bag contains all of its vertices. Integral budgets and prices
//! bounded by a cap make the table finite; [`fptas`] reaches that regime by
//! rounding budgets first.

mod decomposition;
mod dp;

pub use decomposition::{
    build_decomposition, build_decomposition_with, validate_decomposition, validate_structure,
    DecompositionOptions, TreeDecomposition, Violation,
};
pub use dp::{dp_solve, dp_solve_smp, dp_solve_smp_with, dp_solve_with, fptas, fptas_with, primal_graph, DpOptions};
