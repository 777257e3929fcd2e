//! Isospectral partners of a position-dependent-mass model solvable by
//! hypergeometric functions.

pub mod error;
pub mod fd;
pub mod intertwine1;
pub mod intertwine2;
pub mod model;
pub mod numspec;
pub mod presets;
pub mod specialfn;
pub mod typea;
pub mod verify;

pub use error::{Error, Result};
