//! P1 stiffness, mass and boundary-mass matrices.

use crate::error::{Error, Result};

use super::mesh::{signed_area, Mesh2D};
use super::sparse::CsrMatrix;

/// The three matrices of the Robin form, on one shared sparsity pattern.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// `∫ ∇u·∇v`
    pub stiffness: CsrMatrix,
    /// `∫ u v`
    pub mass: CsrMatrix,
    /// `∫_∂Ω u v dS`
    pub boundary_mass: CsrMatrix,
    /// Profile-reducing elimination order (new index → vertex).
    pub ordering: Vec<usize>,
}

impl AssembledSystem {
    pub fn dofs(&self) -> usize {
        self.stiffness.n
    }

    /// `K − α B`.
    pub fn robin_operator(&self, alpha: f64) -> CsrMatrix {
        self.stiffness.lincomb(1.0, &self.boundary_mass, -alpha)
    }

    /// Robin form `q(u,u)` and `‖u‖²` for a nodal vector.
    pub fn rayleigh_quotient(&self, alpha: f64, u: &[f64]) -> f64 {
        (self.stiffness.quadratic_form(u) - alpha * self.boundary_mass.quadratic_form(u)) / self.mass.quadratic_form(u)
    }
}

/// Element stiffness of a P1 triangle with area `area > 0`.
pub fn element_stiffness(p: [[f64; 2]; 3], area: f64) -> [[f64; 3]; 3] {
    let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
    let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
        }
    }
    k
}

/// Ring-major or angle-major vertex order, whichever has the smaller
/// envelope; the origin goes last since it couples to a whole ring.
pub fn profile_ordering(mesh: &Mesh2D, pattern: &CsrMatrix) -> Vec<usize> {
    let nv = mesh.vertices.len();
    if mesh.rings == 0 || 1 + mesh.rings * mesh.n_theta != nv {
        return reverse_cuthill_mckee(pattern);
    }
    let mut ring_major: Vec<usize> = (1..nv).collect();
    ring_major.push(0);
    // angles 0, n−1, 1, n−2, … keep periodic neighbours close
    let n = mesh.n_theta;
    let mut angles = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0, n - 1);
    while lo <= hi {
        angles.push(lo);
        if lo != hi {
            angles.push(hi);
        }
        lo += 1;
        if hi == 0 {
            break;
        }
        hi -= 1;
    }
    let mut angle_major: Vec<usize> = angles
        .iter()
        .flat_map(|&i| (1..=mesh.rings).map(move |ring| (ring, i)))
        .map(|(ring, i)| mesh.vertex_index(ring, i))
        .collect();
    angle_major.push(0);
    if pattern.envelope_size(&angle_major) < pattern.envelope_size(&ring_major) {
        angle_major
    } else {
        ring_major
    }
}

/// Reverse Cuthill–McKee from a minimum-degree vertex of each component.
pub fn reverse_cuthill_mckee(pattern: &CsrMatrix) -> Vec<usize> {
    let n = pattern.n;
    let neighbours = |i: usize| pattern.col_idx[pattern.row_ptr[i]..pattern.row_ptr[i + 1]].iter().copied().filter(move |&j| j != i);
    let degree = |i: usize| neighbours(i).count();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n).filter(|&i| !seen[i]).min_by_key(|&i| degree(i)).unwrap();
        seen[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = neighbours(v).filter(|&j| !seen[j]).collect();
            next.sort_by_key(|&j| (degree(j), j));
            for j in next {
                seen[j] = true;
                order.push(j);
            }
        }
    }
    order.reverse();
    order
}

fn sparsity(mesh: &Mesh2D) -> Vec<Vec<usize>> {
    let mut rows: Vec<Vec<usize>> = (0..mesh.vertices.len()).map(|i| vec![i]).collect();
    for t in &mesh.triangles {
        for &a in t {
            for &b in t {
                if a != b {
                    rows[a].push(b);
                }
            }
        }
    }
    for r in rows.iter_mut() {
        r.sort_unstable();
        r.dedup();
    }
    rows
}

/// Assembles the system, aborting on the first triangle with area at or
/// below `1e-14` times the mean area.
pub fn assemble(mesh: &Mesh2D) -> Result<AssembledSystem> {
    let rows = sparsity(mesh);
    let mut stiffness = CsrMatrix::from_pattern(&rows);
    let mut mass = stiffness.clone();
    let mut boundary_mass = stiffness.clone();
    let mean_area = mesh.area().abs() / mesh.triangles.len().max(1) as f64;
    for (index, t) in mesh.triangles.iter().enumerate() {
        let p = [mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]];
        let area = signed_area(p[0], p[1], p[2]);
        if !(area > 1e-14 * mean_area) {
            return Err(Error::DegenerateTriangle { index, area });
        }
        let k = element_stiffness(p, area);
        for i in 0..3 {
            for j in 0..3 {
                stiffness.add_to(t[i], t[j], k[i][j]);
                mass.add_to(t[i], t[j], if i == j { area / 6.0 } else { area / 12.0 });
            }
        }
    }
    for e in &mesh.boundary_edges {
        let [a, b] = e.v;
        let pa = mesh.vertices[a];
        let pb = mesh.vertices[b];
        let len = (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
        boundary_mass.add_to(a, a, len / 3.0);
        boundary_mass.add_to(b, b, len / 3.0);
        boundary_mass.add_to(a, b, len / 6.0);
        boundary_mass.add_to(b, a, len / 6.0);
    }
    let ordering = profile_ordering(mesh, &stiffness);
    Ok(AssembledSystem { stiffness, mass, boundary_mass, ordering })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem2d::mesh::{build_mesh, BoundaryEdge, MeshParams};
    use crate::geometry::DomainSpec;

    #[test]
    fn reference_triangle_stiffness() {
        let k = element_stiffness([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], 0.5);
        let expected = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_triangle_system() {
        let mesh = Mesh2D {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            triangles: vec![[0, 1, 2]],
            boundary_edges: vec![
                BoundaryEdge { v: [0, 1], theta_mid: 0.0 },
                BoundaryEdge { v: [1, 2], theta_mid: 1.0 },
                BoundaryEdge { v: [2, 0], theta_mid: 2.0 },
            ],
            grading: MeshParams::new(16, 4, 0.5, 1),
            rings: 1,
            n_theta: 3,
        };
        let sys = assemble(&mesh).unwrap();
        assert!((sys.mass.total() - 0.5).abs() < 1e-15);
        assert!((sys.boundary_mass.total() - (2.0 + 2f64.sqrt())).abs() < 1e-14);
        // constants lie in the stiffness kernel
        assert!(sys.stiffness.row_sums().iter().all(|s| s.abs() < 1e-15));
    }

    #[test]
    fn degenerate_triangle_reports_index() {
        let mesh = Mesh2D {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 0.0]],
            triangles: vec![[0, 1, 2], [0, 1, 3]],
            boundary_edges: vec![],
            grading: MeshParams::new(16, 4, 0.5, 1),
            rings: 1,
            n_theta: 3,
        };
        assert!(matches!(assemble(&mesh), Err(Error::DegenerateTriangle { index: 1, .. })));
    }

    #[test]
    fn disk_totals_and_symmetry() {
        let spec = DomainSpec::star2d(vec![1.0, 0.1], vec![0.0, 0.0, 0.05]);
        let mesh = build_mesh(&spec, MeshParams::new(48, 6, 0.7, 4)).unwrap();
        let sys = assemble(&mesh).unwrap();
        assert!((sys.mass.total() - mesh.area()).abs() < 1e-12);
        assert!((sys.boundary_mass.total() - mesh.boundary_length()).abs() < 1e-12);
        for m in [&sys.stiffness, &sys.mass, &sys.boundary_mass] {
            assert!(m.max_asymmetry() < 1e-14);
        }
        // Rayleigh quotient of a constant: −α·perimeter/area
        let one = vec![1.0; sys.dofs()];
        let q = sys.rayleigh_quotient(2.0, &one);
        assert!((q + 2.0 * mesh.boundary_length() / mesh.area()).abs() < 1e-12);
    }
}
