pub mod brandt;
pub mod cyclo;
pub mod error;
pub mod gross;
pub mod gzsum;
pub mod numerics;
pub mod quat;
pub mod ringclass;

pub use error::{Error, Result};
