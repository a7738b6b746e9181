#![no_std]

extern crate alloc;

pub mod degeneration;
pub mod error;
pub mod interpolation;
pub mod kahler;
pub mod linalg;
pub mod picard;
pub mod rational;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
