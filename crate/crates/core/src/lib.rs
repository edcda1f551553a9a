pub mod addition;
pub mod catalog;
pub mod error;
pub mod expansion;
pub mod gegenbauer;
pub mod kernel;
pub mod lp_bound;
pub mod quadrature;
pub mod sphere;

pub use error::{Error, Result};
