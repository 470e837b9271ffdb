//! Tracking and trajectory design for a UAV that senses a moving object by
//! radar while serving a communication device attached to it.

pub mod autodiff;
pub mod bounds;
pub mod ekf;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod monte_carlo;
pub mod motion;
pub mod optimize;
pub mod params;
pub mod sensing;
pub mod sim;
pub mod validate;

pub use error::{Error, Result};
pub use params::SystemParams;
