pub mod catalog;
pub mod cnf;
pub mod encode;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod genesis;
pub mod hitting;
pub mod iso;
pub mod refutation;
pub mod satgate;

pub use error::{Error, Result};
