//! Automorphism expressions and their exact action.

pub mod expr;
pub mod hom;
pub mod multiplier;
pub mod normal;
pub mod stability;
pub mod validate;

pub use expr::{block, AutoExpr, Block};
pub use hom::{HomData, HomImage, Source};
pub use validate::ValidityReport;
pub use normal::{equal, NormalForm};
pub use multiplier::{is_finitary, multiplication_certificate, FinitaryVerdict, Multiplier, Region};
pub use stability::{conjugate, hom_to_stab, stab_to_hom};
