//! Exact computations with inertial automorphisms of abelian groups of finite
//! abelian section rank.

pub mod arith;
pub mod autos;
pub mod corpus;
pub mod decomp;
pub mod error;
pub mod falsify;
pub mod group;
pub mod inertia;
pub mod lattice;
pub mod subgroup;

pub use error::{Error, Result};
pub use group::{Atom, Element, GroupDescriptor, NatInf, PrimeSet, Slot, StructuralReport};
pub use subgroup::{span, Index, Subgroup, Window};
pub use autos::{block, conjugate, hom_to_stab, stab_to_hom, AutoExpr, Block, HomData, Source};
pub use inertia::{is_almost_power, is_inertial, Certificate, Status, Verdict};
pub use falsify::{inertia_falsify, Budget, Witness};
