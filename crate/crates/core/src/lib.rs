pub mod codes;
pub mod counting;
pub mod density;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod report;
pub mod ring;
pub mod suite;

pub use error::{Error, Result};
