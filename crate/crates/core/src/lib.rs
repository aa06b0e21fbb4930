pub mod cli;
pub mod clifford;
pub mod decompose;
pub mod error;
pub mod fiber;
pub mod frw;
pub mod geometry;
pub mod io;
pub mod mat4;
pub mod metric;
pub mod selftest;
pub mod spinlift;
pub mod tolerance;

pub use error::{Error, Result};
