//! Polar-mapped structured triangulations of star-shaped planar domains.
//!
//! Vertices sit at `ρ_j·r(θ_i)(cos θ_i, sin θ_i)` with `θ_i` equispaced and
//! `ρ_j ∈ (0, 1]` graded geometrically towards the boundary. The origin is a
//! single vertex joined to the first ring by a fan.

use std::collections::HashSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, FourierSeries};

/// Grading parameters of a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshParams {
    /// Angular subdivisions at refinement level 0.
    pub n_angular: usize,
    /// Uniform radial cells per unit of `ρ` in the bulk at level 0.
    pub n_radial: usize,
    /// Ratio between consecutive boundary-layer cells, in `(0, 1)`.
    pub layer_ratio: f64,
    /// Number of graded cells; the finest has thickness
    /// `(1 − q)·q^{layers−1}` in `ρ`.
    pub layers: usize,
    /// Uniform refinement level: every cell is split into `2^refine` parts
    /// in each direction.
    pub refine: u32,
}

impl MeshParams {
    pub fn new(n_angular: usize, n_radial: usize, layer_ratio: f64, layers: usize) -> Self {
        Self { n_angular, n_radial, layer_ratio, layers, refine: 0 }
    }

    pub fn refined(mut self, level: u32) -> Self {
        self.refine = level;
        self
    }

    /// Grading resolving a boundary layer of width `~1/α`: finest physical
    /// cell at most `1/(4α)` and ratio `0.8`, so that six cells fit inside
    /// `3/α`.
    pub fn for_alpha(n_angular: usize, n_radial: usize, alpha: f64, r_max: f64) -> Self {
        let q: f64 = 0.8;
        let bulk = 1.0 / n_radial as f64;
        let target = if alpha > 0.0 { (0.25 / (alpha * r_max)).min(bulk) } else { bulk };
        // smallest L with (1−q) q^{L−1} ≤ target
        let layers = if target >= 1.0 - q {
            1
        } else {
            1 + ((target / (1.0 - q)).ln() / q.ln()).ceil() as usize
        };
        Self::new(n_angular, n_radial, q, layers)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_angular < 16 {
            return Err(Error::InvalidParameter(format!("n_angular must be at least 16, got {}", self.n_angular)));
        }
        if self.n_radial < 4 {
            return Err(Error::InvalidParameter(format!("n_radial must be at least 4, got {}", self.n_radial)));
        }
        if !(self.layer_ratio > 0.0 && self.layer_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!("layer ratio must lie in (0, 1), got {}", self.layer_ratio)));
        }
        if self.layers == 0 {
            return Err(Error::InvalidParameter("at least one boundary layer is required".into()));
        }
        if self.refine > 6 {
            return Err(Error::InvalidParameter(format!("refinement level {} too large", self.refine)));
        }
        Ok(())
    }

    /// Ascending radial parameters `0 = ρ_0 < … < ρ_M = 1`.
    pub fn radial_nodes(&self) -> Vec<f64> {
        let q = self.layer_ratio;
        let bulk = 1.0 / self.n_radial as f64;
        // graded cells from the boundary inwards
        let mut cells = Vec::new();
        let mut depth = 0.0;
        let mut t = (1.0 - q) * q.powi(self.layers as i32 - 1);
        for _ in 0..self.layers {
            if t >= bulk || depth + t > 0.5 {
                break;
            }
            cells.push(t);
            depth += t;
            t /= q;
        }
        let inner = 1.0 - depth;
        let n_bulk = ((inner * self.n_radial as f64).ceil() as usize).max(1);
        let mut nodes: Vec<f64> = (0..=n_bulk).map(|i| inner * i as f64 / n_bulk as f64).collect();
        let mut rho = inner;
        for &c in cells.iter().rev() {
            rho += c;
            nodes.push(rho);
        }
        *nodes.last_mut().unwrap() = 1.0;
        let parts = 1usize << self.refine;
        let mut out = Vec::with_capacity((nodes.len() - 1) * parts + 1);
        for w in nodes.windows(2) {
            for s in 0..parts {
                out.push(w[0] + (w[1] - w[0]) * s as f64 / parts as f64);
            }
        }
        out.push(1.0);
        out
    }

    pub fn n_theta(&self) -> usize {
        self.n_angular << self.refine
    }
}

/// A boundary edge with the polar angle of its midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub theta_mid: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh2D {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub grading: MeshParams,
    /// Rings excluding the origin.
    pub rings: usize,
    /// Vertices per ring.
    pub n_theta: usize,
}

/// Mesh dump for debugging: just vertices and triangles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshDump {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

impl Mesh2D {
    /// Index of the vertex on ring `ring` (1-based) at angle index `i`.
    pub fn vertex_index(&self, ring: usize, i: usize) -> usize {
        1 + (ring - 1) * self.n_theta + (i % self.n_theta)
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges.iter().map(|e| dist(self.vertices[e.v[0]], self.vertices[e.v[1]])).sum()
    }

    /// Longest edge of the mesh.
    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(p, q)| dist(self.vertices[p], self.vertices[q]))
            .fold(0.0, f64::max)
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = HashSet::new();
        for &[a, b, c] in &self.triangles {
            for (p, q) in [(a, b), (b, c), (c, a)] {
                edges.insert((p.min(q), p.max(q)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    /// Whether the boundary edges form a single closed cycle.
    pub fn boundary_is_single_cycle(&self) -> bool {
        let n = self.boundary_edges.len();
        if n < 3 {
            return false;
        }
        let mut next = std::collections::HashMap::new();
        for e in &self.boundary_edges {
            if next.insert(e.v[0], e.v[1]).is_some() {
                return false;
            }
        }
        let start = self.boundary_edges[0].v[0];
        let mut cur = start;
        for step in 0..n {
            match next.get(&cur) {
                Some(&nx) => cur = nx,
                None => return false,
            }
            if cur == start {
                return step == n - 1;
            }
        }
        false
    }

    /// Splits every triangle into four through its edge midpoints. The
    /// polygon is unchanged, so the P1 space of the result contains the
    /// current one. The result has no ring structure (`rings = 0`).
    pub fn red_refined(&self) -> Mesh2D {
        let mut vertices = self.vertices.clone();
        let mut mid = std::collections::HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for e in &self.boundary_edges {
            let m = midpoint(e.v[0], e.v[1], &mut vertices);
            for v in [[e.v[0], m], [m, e.v[1]]] {
                let (p, q) = (vertices[v[0]], vertices[v[1]]);
                let theta_mid = (p[1] + q[1]).atan2(p[0] + q[0]).rem_euclid(2.0 * PI);
                boundary_edges.push(BoundaryEdge { v, theta_mid });
            }
        }
        Mesh2D { vertices, triangles, boundary_edges, grading: self.grading, rings: 0, n_theta: 0 }
    }

    pub fn dump(&self) -> MeshDump {
        MeshDump { vertices: self.vertices.clone(), triangles: self.triangles.clone() }
    }
}

pub(crate) fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Builds the polar-mapped mesh of a `Star2D` domain.
pub fn build_mesh(spec: &DomainSpec, params: MeshParams) -> Result<Mesh2D> {
    params.validate()?;
    let r = match spec {
        DomainSpec::Star2D(r) => r,
        other => {
            return Err(Error::InvalidDomain(format!("finite elements need a star2d domain, got {}", other.kind_name())))
        }
    };
    spec.validate()?;
    Ok(build_polar_mesh(r, params))
}

fn build_polar_mesh(r: &FourierSeries, params: MeshParams) -> Mesh2D {
    let rho = params.radial_nodes();
    let rings = rho.len() - 1;
    let n = params.n_theta();
    let angles: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let boundary: Vec<[f64; 2]> = angles
        .iter()
        .map(|&t| {
            let rt = r.value(t);
            [rt * t.cos(), rt * t.sin()]
        })
        .collect();
    let mut vertices = Vec::with_capacity(1 + rings * n);
    vertices.push([0.0, 0.0]);
    for &p in &rho[1..] {
        vertices.extend(boundary.iter().map(|b| [p * b[0], p * b[1]]));
    }
    let idx = |ring: usize, i: usize| 1 + (ring - 1) * n + (i % n);
    let mut triangles = Vec::with_capacity(n * (2 * rings - 1));
    for i in 0..n {
        triangles.push([0, idx(1, i), idx(1, i + 1)]);
    }
    for ring in 1..rings {
        for i in 0..n {
            let a = idx(ring, i);
            let b = idx(ring, i + 1);
            let c = idx(ring + 1, i + 1);
            let d = idx(ring + 1, i);
            // alternate the diagonal so the mesh has no preferred direction
            if (ring + i) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    for t in triangles.iter_mut() {
        if signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
    }
    let boundary_edges = (0..n)
        .map(|i| BoundaryEdge { v: [idx(rings, i), idx(rings, i + 1)], theta_mid: 2.0 * PI * (i as f64 + 0.5) / n as f64 })
        .collect();
    Mesh2D { vertices, triangles, boundary_edges, grading: params, rings, n_theta: n }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_mesh_area_and_perimeter() {
        let spec = DomainSpec::disk(1.0);
        let m = build_mesh(&spec, MeshParams::new(64, 16, 0.7, 4)).unwrap();
        // inscribed 64-gon
        let n = 64.0;
        let polygon_area = 0.5 * n * (2.0 * PI / n).sin();
        assert!((m.area() - polygon_area).abs() < 1e-12);
        // π − area ≈ 2π³/(3n²)
        assert!((m.area() - PI).abs() < 1.01 * 2.0 * PI.powi(3) / (3.0 * n * n));
        let polygon_perimeter = 2.0 * n * (PI / n).sin();
        assert!((m.boundary_length() - polygon_perimeter).abs() < 1e-12);
        assert_eq!(m.euler_characteristic(), 1);
        assert!(m.boundary_is_single_cycle());
    }

    #[test]
    fn every_triangle_positively_oriented() {
        let spec = DomainSpec::star2d(vec![1.0, 0.0, 0.2], vec![0.0, 0.05]);
        let m = build_mesh(&spec, MeshParams::for_alpha(32, 4, 20.0, 1.25).refined(1)).unwrap();
        for t in 0..m.triangles.len() {
            assert!(m.triangle_area(t) > 0.0);
        }
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn finest_layer_matches_grading_formula() {
        let p = MeshParams::new(32, 4, 0.7, 6);
        let rho = p.radial_nodes();
        let finest = rho[rho.len() - 1] - rho[rho.len() - 2];
        assert!((finest - 0.3 * 0.7f64.powi(5)).abs() < 1e-14);
        assert!(rho.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn alpha_grading_resolves_layer() {
        let alpha = 40.0;
        let p = MeshParams::for_alpha(64, 8, alpha, 1.0);
        let rho = p.radial_nodes();
        let m = rho.len();
        assert!(rho[m - 1] - rho[m - 2] <= 0.25 / alpha + 1e-15);
        // six cells inside 3/α
        assert!(1.0 - rho[m - 7] <= 3.0 / alpha);
    }

    #[test]
    fn refinement_keeps_coarse_nodes() {
        let p = MeshParams::new(16, 4, 0.6, 3);
        let coarse = p.radial_nodes();
        let fine = p.refined(1).radial_nodes();
        assert_eq!(fine.len(), 2 * coarse.len() - 1);
        for (i, c) in coarse.iter().enumerate() {
            assert!((fine[2 * i] - c).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_grading() {
        let spec = DomainSpec::disk(1.0);
        assert!(build_mesh(&spec, MeshParams::new(8, 4, 0.5, 2)).is_err());
        assert!(build_mesh(&spec, MeshParams::new(16, 4, 1.5, 2)).is_err());
        assert!(build_mesh(&DomainSpec::ball(2, 1.0), MeshParams::new(16, 4, 0.5, 2)).is_err());
    }

    #[test]
    fn red_refinement_keeps_polygon() {
        let spec = DomainSpec::star2d(vec![1.0, 0.0, 0.2], vec![]);
        let m = build_mesh(&spec, MeshParams::new(16, 4, 0.5, 2)).unwrap();
        let r = m.red_refined();
        assert_eq!(r.triangles.len(), 4 * m.triangles.len());
        assert_eq!(r.boundary_edges.len(), 2 * m.boundary_edges.len());
        assert!((r.area() - m.area()).abs() < 1e-13);
        assert!((r.boundary_length() - m.boundary_length()).abs() < 1e-13);
        assert_eq!(r.euler_characteristic(), 1);
        assert!(r.boundary_is_single_cycle());
        assert!((0..r.triangles.len()).all(|t| r.triangle_area(t) > 0.0));
        assert_eq!(&r.vertices[..m.vertices.len()], &m.vertices[..]);
    }
}
