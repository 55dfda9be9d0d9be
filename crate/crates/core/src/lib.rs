pub mod cstarcat;
pub mod duality;
pub mod error;
pub mod funcalc;
pub mod io;
pub mod numkit;
pub mod selftest;
pub mod spaceoid;

pub use error::{Error, Result};
pub use numkit::{Matrix, C64, DEFAULT_TOL};
