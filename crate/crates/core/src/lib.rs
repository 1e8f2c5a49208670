//! Finite Heisenberg-Weyl groups, magnetic translations and metaplectic
//! representations of `SL₂(ℤ_N)`, checked mechanically at small `N`.

pub mod error;
pub mod exactnum;
pub mod harness;
pub mod heisenberg;
pub mod magnetic;
pub mod matrix;
pub mod metaplectic;
pub mod report;
pub mod sl2;
pub mod weilmod;

pub use error::{Error, Result};
