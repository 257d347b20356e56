pub mod autoencoder;
pub mod error;
pub mod optics;
pub mod pipeline;
pub mod preprocess;
pub mod readout;
pub mod reservoir;
pub mod stochastic;
pub mod temporal;

pub use error::{Error, Result};
