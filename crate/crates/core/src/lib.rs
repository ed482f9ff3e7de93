pub mod error;
pub mod limits;
pub mod measures;
pub mod linalg;
pub mod poly;
pub mod presburger;
pub mod residue;
pub mod cli;
pub mod count;
pub mod defs;
pub mod diagnostics;
pub mod scheme;

pub use error::{Error, Result};
