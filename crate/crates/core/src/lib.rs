pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod experiment;
pub mod io;
pub mod jacobi;
pub mod laws;
pub mod quadrature;
pub mod recover;

pub use error::{Error, Result};
