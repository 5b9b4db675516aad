//! Definite quaternion algebras over ℚ, Eichler orders and right ideal classes.
//!
//! The class set of an Eichler order `R` realizes the finite double coset
//! space `B^*\B̂^*/R̂^*`; its elements are represented by right `R`-ideals.

pub mod algebra;
pub mod ideal;
pub mod lattice;
pub mod order;

pub use algebra::{algebra_from_ramification, hilbert_symbol, Place, Quaternion, QuaternionAlgebra};
pub use ideal::{
    equivalence_element, ideal_equivalent, mass_check, right_ideal_classes, IdealClassSet,
    RightIdeal,
};
pub use lattice::QuatLattice;
pub use order::{eichler_order, maximal_order, QuatOrder};
