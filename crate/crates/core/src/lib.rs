pub mod cli;
pub mod error;
pub mod exppoly;
pub mod initdata;
pub mod io;
pub mod lattice;
pub mod recursion;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
