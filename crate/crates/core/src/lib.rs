pub mod bath;
pub mod cli;
pub mod collision;
pub mod error;
pub mod lindblad;
pub mod qcore;
pub mod scenarios;

pub use error::{Error, Result};
