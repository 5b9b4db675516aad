//! Exact integer, matrix and lattice arithmetic.

pub mod arith;
pub mod lattice;
pub mod matrix;
