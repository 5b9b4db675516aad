//! Cyclotomic integers and the λ-adic valuation engine.

pub mod integer;
pub mod lambda;
pub mod poly;

pub use integer::CyclotomicInteger;
pub use lambda::{residue_degree, LambdaContext, ResidueElement, ResidueField, Valuation};
