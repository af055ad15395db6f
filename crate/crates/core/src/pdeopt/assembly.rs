//! P1 finite-element matrices.

use super::mesh::Mesh;
use crate::linalg::CsrMatrix;

/// Mass `M`, stiffness `K`, `L = K + M` and boundary mass `M_b` (full node
/// numbering, zero rows and columns at interior nodes).
#[derive(Clone, Debug)]
pub struct FemMatrices {
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
    pub l: CsrMatrix,
    pub boundary_mass: CsrMatrix,
}

pub fn assemble_matrices(mesh: &Mesh) -> FemMatrices {
    let n = mesh.num_nodes();
    let nodes = mesh.nodes();
    let mut mass = Vec::with_capacity(9 * mesh.elements().len());
    let mut stiff = Vec::with_capacity(9 * mesh.elements().len());
    for (e, tri) in mesh.elements().iter().enumerate() {
        let area = mesh.element_area(e);
        let p = tri.map(|v| nodes[v]);
        // ∇φ_i = (b_i, c_i) / (2·area)
        let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
        let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
        for i in 0..3 {
            for j in 0..3 {
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                mass.push((tri[i], tri[j], m));
                stiff.push((tri[i], tri[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area)));
            }
        }
    }
    let mut bmass = Vec::with_capacity(4 * mesh.boundary_edges().len());
    for [a, b] in mesh.boundary_edges() {
        let (pa, pb) = (nodes[*a], nodes[*b]);
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        bmass.push((*a, *a, len / 3.0));
        bmass.push((*b, *b, len / 3.0));
        bmass.push((*a, *b, len / 6.0));
        bmass.push((*b, *a, len / 6.0));
    }
    let mass = CsrMatrix::from_triplets(n, n, &mass).expect("node indices in range");
    let stiffness = CsrMatrix::from_triplets(n, n, &drop_roundoff(stiff)).expect("node indices in range");
    let l = stiffness.linear_combination(1.0, &mass, 1.0).expect("same shape");
    let boundary_mass = CsrMatrix::from_triplets(n, n, &bmass).expect("node indices in range");
    FemMatrices { mass, stiffness, l, boundary_mass }
}

/// Stiffness contributions of right triangles cancel exactly on the
/// hypotenuse couplings; this keeps them out of the pattern.
fn drop_roundoff(t: Vec<(usize, usize, f64)>) -> Vec<(usize, usize, f64)> {
    t.into_iter().filter(|(_, _, v)| v.abs() > 1e-14).collect()
}
