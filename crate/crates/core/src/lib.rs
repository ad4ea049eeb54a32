//! Symbolic-numeric verification of the generalized Kompaneets equation
//!
//! ```text
//! u_t = x² u_xx + x (x f'(u) + 4) u_x + 4x f(u),   x > 0, u > 0
//! ```
//!
//! and of its symmetry structure: equivalence transformations, Lie point
//! symmetries of every classified `f`, the algebra of the `f = u^(4/3)`
//! case, its symmetry reductions and exact invariant solutions, plus a
//! finite-difference solver that cross-checks the closed forms.
//!
//! Module map:
//!
//! - [`expr`]: expression trees, derivatives, identity testing
//! - [`model`]: the equation family, classification catalog, equivalence group
//! - [`symmetry`]: prolongation, invariance residuals, brackets, flows
//! - [`reduction`]: optimal system, ansätze, reduced ODEs, exact solutions
//! - [`solver`]: IMEX solver in `y = ln x`, heat-kernel reference, convergence
//! - [`cli`]: the `gke-lab` command line

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod expr;
pub mod model;
pub mod symmetry;
pub mod reduction;
pub mod solver;
pub mod cli;
