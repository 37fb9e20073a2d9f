pub mod density;
pub mod error;
pub mod explicit;
pub mod quad;
pub mod rmt;
pub mod seed;
pub mod specialfn;
pub mod stats;
pub mod testfn;
pub mod zeros;

pub use error::{Error, Result};
