//! Nested and sliced orthogonal arrays, difference matrices and the
//! space-filling Latin hypercube designs built from them.
//!
//! The crate is organised bottom-up:
//!
//! * [`galois`]: finite fields `GF(p^u)` with canonical integer codes;
//! * [`groups`]: towers of additive groups with transversals and the
//!   subgroup projections `ρ_i`;
//! * [`matrix`], [`kronecker`]: code matrices and Kronecker sums;
//! * [`arrays`]: nested/sliced orthogonal arrays and difference matrices;
//! * [`spacefill`]: nested and sliced permutations, relabeling and Latin
//!   hypercube designs;
//! * [`verify`]: independent property checkers;
//! * [`format`]: JSON/CSV design files.

pub mod arrays;
pub mod error;
pub mod format;
pub mod galois;
pub mod groups;
pub mod kronecker;
pub mod matrix;
pub mod spacefill;
pub mod verify;

pub use error::{Error, Result};
pub use galois::{Field, FieldElement};
pub use groups::{AdditiveGroup, BaseGroup, ChainSpec, Code, GroupChain, Nesting};
pub use matrix::Matrix;
