//! Algebraic circuits over finite fields of positive characteristic.

pub mod cli;
pub mod designs;
pub mod error;
pub mod ff;
pub mod gen;
pub mod intslp;
pub mod ir;
pub mod pit;
pub mod poly;
pub mod transform;

pub use error::{Error, Result};
