//! Semistability of quiver representations.

pub mod cpmap;
pub mod error;
pub mod numerics;
pub mod hn;
pub mod io;
pub mod king;
pub mod lattice;
pub mod ncpit;
pub mod quiver;
pub mod rankone;
pub mod registry;
pub mod semistability;

pub use error::{Error, Result};
