//! Finitely generated subgroups of free groups `F_n` and of products
//! `F_n × A` with `A` finite abelian.
//!
//! The crate builds Stallings graphs, intersects subgroups exactly, computes
//! ranks and indices, and constructs subgroup pairs whose intersection rank
//! grows without bound in `F_2 × Z/ℓ` while the ranks of the pair stay fixed.

pub mod abelian;
pub mod error;
mod fold;
pub mod freegroup;
pub mod fuzz;
pub mod lattice;
pub mod presentation;
pub mod product;
pub mod random;
pub mod stallings;
pub mod subgroup_file;

pub use error::{Error, Result};
