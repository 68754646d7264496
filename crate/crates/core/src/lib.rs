pub mod basis;
pub mod cli;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod moduli;
pub mod semigroup;
pub mod sequences;
pub mod suites;
pub mod tjurina;

pub use error::{Error, Result};
pub use exact::Exact;
