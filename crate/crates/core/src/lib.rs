pub mod action;
pub mod algebra;
pub mod counting;
pub mod entropy;
pub mod error;
pub mod field;
pub mod groebner;
pub mod lattice;
pub mod scan;

pub use error::{Error, Result};
