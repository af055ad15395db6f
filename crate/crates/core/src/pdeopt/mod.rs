//! Distributed-control Poisson benchmarks discretized with P1 elements.

mod assembly;
mod mesh;
mod ocp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use assembly::{assemble_matrices, FemMatrices};
pub use mesh::{Mesh, MAX_LEVEL, MIN_LEVEL};
pub use ocp::{build_mesh, build_ocp_preconditioner, build_ocp_system, OcpPreconditioner, OcpSystem};

/// Where the tracking term observes the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observation {
    /// Tracking over the whole domain, `E = M`.
    Full,
    /// Tracking on the boundary only, `E = M_b`.
    Boundary,
}

impl Observation {
    /// Default regularization parameters for the tables.
    pub fn default_betas(&self) -> &'static [f64] {
        match self {
            Observation::Full => &[1e-2, 1e-4],
            Observation::Boundary => &[1e-1, 1e-3],
        }
    }
}

impl FromStr for Observation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "full" => Ok(Observation::Full),
            "boundary" => Ok(Observation::Boundary),
            other => Err(Error::InvalidArgument(format!(
                "unknown observation `{other}` (expected full or boundary)"
            ))),
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observation::Full => "full",
            Observation::Boundary => "boundary",
        })
    }
}
