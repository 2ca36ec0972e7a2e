//! Computational Moy-Prasad filtrations, Bruhat-Tits apartments, Yu data and
//! Harish-Chandra character evaluation for split type-A groups over p-adic
//! fields, at desk scale and with exact arithmetic throughout.
//!
//! Everything downstream of [`local_field`] is exact: p-adic elements carry
//! digit expansions with explicit precision budgets, character values are
//! elements of cyclotomic fields, and filtration levels are rationals. The
//! finite-group toolkit in [`finrep`] doubles as the brute-force oracle layer
//! for the group-theoretic claims.

pub mod building;
pub mod characters;
pub mod cyclotomic;
pub mod finrep;
pub mod fq;
pub mod genericity;
pub mod heisenberg_weil;
pub mod local_field;
pub mod matrix;
pub mod rat;
pub mod root_data;
pub mod yu;
pub mod yu_config;

pub use cyclotomic::Cyc;
pub use local_field::{AdditiveCharacter, LocalField, LocalFieldElement};
pub use rat::{Level, Rat};
