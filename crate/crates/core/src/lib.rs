#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod exterior;
pub mod field;
pub mod fixtures;
pub mod hodge;
pub mod maxwell;
pub mod notation;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod spectra;
pub mod suites;
pub mod twobody;

pub use error::{Error, Result};
pub use notation::{parse_form, parse_scalar};
