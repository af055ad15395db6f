//! Block preconditioners and eigenvalue bounds for double saddle-point
//! systems.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod indicators;
pub mod inner;
pub mod io;
pub mod linalg;
pub mod minres;
pub mod operator;
pub mod pdeopt;
pub mod pencil;
pub mod synthetic;
pub mod system;

pub use error::{Error, Result};
