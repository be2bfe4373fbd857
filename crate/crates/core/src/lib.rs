pub mod arith;
pub mod complex;
pub mod direct;
pub mod factor;
pub mod error;
pub mod fft;
pub mod field;
pub mod formula;
pub mod gauss;
pub mod instance;
pub mod numeric;
pub mod poly;
pub mod zeta;

pub use error::{Error, Result};
