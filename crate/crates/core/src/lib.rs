pub mod bounds;
pub mod census;
pub mod cli;
pub mod cover;
pub mod error;
pub mod interval;
pub mod monomial;
pub mod pfaffian;
pub mod rational;

pub use error::{Error, Result};
