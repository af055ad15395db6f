//! The optimality systems and their block preconditioners.

use std::sync::Arc;

use super::assembly::{assemble_matrices, FemMatrices};
use super::mesh::Mesh;
use super::Observation;
use crate::error::{Error, Result};
use crate::inner::{
    build_ahat_inverse, build_shat_inverse, build_xhat_inverse_boundary, build_xhat_inverse_full, AmgMode,
    ChebyshevSolver, SpectralInterval, XhatInverse,
};
use crate::linalg::BandCholesky;
use crate::system::{Block, BlockPreconditioner, DoubleSaddleSystem};

pub fn build_mesh(level: u32) -> Result<Mesh> {
    Mesh::new(level)
}

/// Discretized optimal-control problem with unknowns ordered `(u, p, y)`.
#[derive(Clone, Debug)]
pub struct OcpSystem {
    pub level: u32,
    pub beta: f64,
    pub observation: Observation,
    pub fem: FemMatrices,
    /// Desired-state load `ŷ_h`.
    pub load: Vec<f64>,
    pub system: DoubleSaddleSystem,
}

impl OcpSystem {
    pub fn order(&self) -> usize {
        self.system.order()
    }
}

/// Desired state for full observation.
fn gaussian(x: f64, y: f64) -> f64 {
    (-50.0 * ((x - 0.5).powi(2) + (y - 0.5).powi(2))).exp()
}

/// Control used to generate boundary data.
fn true_control(x: f64, y: f64) -> f64 {
    4.0 * x * (1.0 - x) + y
}

pub fn build_ocp_system(mesh: &Mesh, beta: f64, observation: Observation) -> Result<OcpSystem> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let fem = assemble_matrices(mesh);
    let n = mesh.num_nodes();
    let (e, load) = match observation {
        Observation::Full => (fem.mass.clone(), fem.mass.matvec(&mesh.interpolate(gaussian))),
        Observation::Boundary => {
            let mut y = fem.mass.matvec(&mesh.interpolate(true_control));
            y.iter_mut().for_each(|v| *v = -*v);
            BandCholesky::new(&fem.l)?.solve_in_place(&mut y);
            (fem.boundary_mass.clone(), fem.boundary_mass.matvec(&y))
        }
    };
    let mut rhs = vec![0.0; 3 * n];
    rhs[2 * n..].copy_from_slice(&load);
    let system = DoubleSaddleSystem::new(
        Block::Sparse(fem.mass.scaled(beta)),
        Block::Sparse(fem.mass.clone()),
        Block::Sparse(fem.l.clone()),
        Block::Sparse(e),
        rhs,
    )?;
    Ok(OcpSystem { level: mesh.level(), beta, observation, fem, load, system })
}

/// The block preconditioner and the inner operators it is built from.
pub struct OcpPreconditioner {
    pub preconditioner: BlockPreconditioner,
    pub chebyshev: Arc<ChebyshevSolver>,
    pub xhat_inv: Arc<XhatInverse>,
}

impl OcpPreconditioner {
    /// Extremes of the AMG quality pencil.
    pub fn amg_quality(&self, ocp: &OcpSystem) -> Result<(f64, f64)> {
        self.xhat_inv.amg().quality(&ocp.fem.mass)
    }
}

/// `Â⁻¹ = (1/β)·Cheb_ℓ(M)`, `Ŝ⁻¹ = β·Cheb_ℓ(M)` and `X̂⁻¹` from the surrogate.
pub fn build_ocp_preconditioner(
    ocp: &OcpSystem,
    l: usize,
    amg_mode: AmgMode,
    interval: SpectralInterval,
) -> Result<OcpPreconditioner> {
    let fem = &ocp.fem;
    let chebyshev = Arc::new(ChebyshevSolver::with_interval(fem.mass.clone(), l, interval)?);
    let a_inv = build_ahat_inverse(ocp.beta, chebyshev.clone())?;
    let s_inv = build_shat_inverse(ocp.beta, chebyshev.clone())?;
    let xhat_inv = Arc::new(match ocp.observation {
        Observation::Full => build_xhat_inverse_full(ocp.beta, &fem.mass, &fem.l, amg_mode)?,
        Observation::Boundary => build_xhat_inverse_boundary(ocp.beta, &fem.mass, &fem.l, amg_mode)?,
    });
    let preconditioner = BlockPreconditioner::new(&ocp.system, a_inv, s_inv, xhat_inv.clone())?;
    Ok(OcpPreconditioner { preconditioner, chebyshev, xhat_inv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_and_loads() {
        let mesh = build_mesh(4).unwrap();
        let full = build_ocp_system(&mesh, 1e-2, Observation::Full).unwrap();
        assert_eq!(full.order(), 867);
        assert!(full.load.iter().all(|v| *v >= 0.0));
        let centre = 8 * 17 + 8;
        assert_eq!(mesh.nodes()[centre], [0.5, 0.5]);
        assert_eq!(gaussian(0.5, 0.5), 1.0);
        let bnd = build_ocp_system(&mesh, 1e-1, Observation::Boundary).unwrap();
        let interior_load: f64 = (0..mesh.num_nodes())
            .filter(|i| !mesh.boundary_nodes().contains(i))
            .map(|i| bnd.load[i].abs())
            .sum();
        assert_eq!(interior_load, 0.0);
        assert!(build_ocp_system(&mesh, 0.0, Observation::Full).is_err());
    }
}
