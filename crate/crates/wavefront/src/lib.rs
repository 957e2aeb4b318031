//! Fronts of the delayed monostable equation `u_t = u_xx − u + g(u(t − h, x))`.

pub mod diagnostics;
pub mod error;
pub mod model;
pub mod numeric;
pub mod profile;
pub mod scenarios;
pub mod simulator;
pub mod spectral;

pub use error::{Error, Result};
