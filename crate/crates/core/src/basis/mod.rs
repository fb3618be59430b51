//! Polynomial bases, quadrature rules, and reference-element operators.

pub mod nodes;
pub mod poly;
pub mod quad_rules;
pub mod reference;

pub use reference::{ElemKind, RefElement, RefFace};
