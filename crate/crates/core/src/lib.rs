pub mod cli;
pub mod complex;
pub mod error;
pub mod oracle;
pub mod lll;
pub mod params;
pub mod rdc;
pub mod torus;
pub mod witness;

pub use error::{Result, TwdError};
