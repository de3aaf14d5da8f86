//! Finite sets and relations: the category `Rel` at desk scale.
//!
//! Objects are [`FinSet`]s with a fixed element order; morphisms are
//! [`FinRel`]s stored as dense bit matrices. Copy, delete and swap make this a
//! gs-monoidal category. [`diagram`] holds the string-diagram forms of the
//! definitions, which the combinatorial checks are tested against.

pub mod diagram;
pub mod enumerate;
pub mod laws;
mod rel;
mod set;

pub use enumerate::{homs, states, HomIter, RelSpace};
pub use rel::{
    compose, copy, delete, identity, swap, tensor, unitor_left, unitor_right, FinRel,
    MorphismClass, Support,
};
pub use set::{pair_index, split_index, FinSet, UNIT_ELEMENT, UNIT_ID};

pub(crate) use rel::{empty_row, row_is_empty, singleton_row};
