//! Exact arithmetic for three-party nonsignaling boxes with binary inputs and
//! outputs: the local, two-local and Svetlichny-box polytopes, the Svetlichny
//! and Mermin functionals, Svetlichny/Mermin strengths, and superlocality
//! certificates across bipartitions.
#![no_std]

extern crate alloc;

pub mod boxes;
pub mod error;
pub mod inequalities;
pub mod lp;
pub mod matrix;
pub mod membership;
pub mod scalar;
pub mod strengths;
pub mod superlocality;

pub use boxes::{AnyBox, BipartiteBox, Cut, Family, Pairing, Party, SingleBox, TripartiteBox, VertexLabel};
pub use error::{BoxError, DecompositionError, StrengthError};
pub use scalar::Scalar;
