//! Exact permutation resemblance of functions on finite groups.
//!
//! The permutation resemblance `pres(f)` of `f: G -> G` is the smallest
//! image size `V(g)` over all `g` for which `g + f` is a bijection. This crate
//! builds finite groups and fields with integer element codes, computes the
//! preimage and differential statistics of lookup tables, solves `pres`
//! exactly with optimality certificates, and generates the closed-form
//! families and equivalence transforms around it.

pub mod algebra;
mod bigser;
pub mod equivalence;
pub mod families;
pub mod func;
pub mod input;
pub mod solver;
pub mod stats;

pub use algebra::{AlgebraError, GroupTable, Polynomial};
pub use func::FuncTable;
pub use solver::{pres, pres_exact, PresCertificate, PresOptions, ShiftSet, SolveOutcome};
pub use stats::{analyze, StatsReport};
