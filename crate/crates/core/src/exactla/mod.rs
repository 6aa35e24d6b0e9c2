//! Exact linear algebra: rationals, dense matrices, LDLᵀ, Smith and Hermite
//! normal forms, an exact simplex solver, and sparse field linear algebra.

pub mod field;
pub mod ldlt;
pub mod lp;
pub mod matrix;
pub mod normal_forms;
pub mod rational;

pub use field::{Echelon, Field, PrimeField, Rationals, SparseMatrix, SparseVec};
pub use ldlt::{is_positive_definite, ldlt, Ldlt};
pub use lp::{lp, LinearProgram, LpResult, LpStatus};
pub use matrix::{BigMatrix, IntMatrix, Matrix, RatMatrix};
pub use normal_forms::{
    hnf, hnf_basis, invariant_factors, primitive_part, saturate, snf, snf_i64, SnfResult,
};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
