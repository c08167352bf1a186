pub mod error;
pub mod backends;
pub mod bv;
pub mod forms;
pub mod funcalg;
pub mod liealg;
pub mod linalg;
pub mod transfer;
pub mod pipeline;
pub mod verify;

pub use error::{Error, Result};
