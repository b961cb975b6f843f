//! Piecewise-linear finite element operators on triangle meshes.
//!
//! The stiffness matrix `S` is the cotangent Laplacian, so that `uᵀ S u` is
//! exactly the Dirichlet energy ∫|∇u|² of the linear interpolant, and the
//! lumped mass puts one third of each triangle's area on its vertices.

use crate::error::{Error, Result};
use crate::geodesic::fast_march;
use crate::mesh::TriangleMesh;
use crate::sparse::SparseSym;

#[derive(Debug, Clone)]
pub struct Operators {
    pub stiffness: SparseSym,
    pub lumped_area: Vec<f64>,
    pub total_area: f64,
}

/// One gradient vector per face. Embedded meshes use ambient 3-D
/// coordinates; intrinsic meshes use each face's local frame (see
/// [`TriangleMesh::local_frame`]) with a zero third component.
pub type FaceVectorField = Vec<[f64; 3]>;

pub fn build_operators(mesh: &TriangleMesh) -> Result<Operators> {
    let n = mesh.vertex_count();
    let mut triplets = Vec::with_capacity(mesh.face_count() * 9);
    let mut lumped = vec![0.0; n];
    for (f, face) in mesh.faces().iter().enumerate() {
        let area = mesh.face_area(f);
        if area <= 0.0 {
            return Err(Error::DegenerateFace { face: f });
        }
        for k in 0..3 {
            lumped[face[k]] += area / 3.0;
            // half the cotangent at corner k weights the opposite edge
            let w = 0.5 * mesh.corner_cot(f, k);
            let (i, j) = (face[(k + 1) % 3], face[(k + 2) % 3]);
            triplets.push((i, j, -w));
            triplets.push((j, i, -w));
            triplets.push((i, i, w));
            triplets.push((j, j, w));
        }
    }
    let total_area = lumped.iter().sum();
    Ok(Operators {
        stiffness: SparseSym::from_triplets(n, triplets),
        lumped_area: lumped,
        total_area,
    })
}

/// Gradients of the three hat functions of each face, expressed in the
/// face's local 2-D frame.
#[derive(Debug, Clone)]
pub struct GradientOperator {
    pub faces: Vec<[usize; 3]>,
    pub basis: Vec<[[f64; 2]; 3]>,
    pub areas: Vec<f64>,
}

impl GradientOperator {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let mut basis = Vec::with_capacity(mesh.face_count());
        let mut areas = Vec::with_capacity(mesh.face_count());
        for f in 0..mesh.face_count() {
            let p = mesh.local_frame(f);
            let a2 = 2.0 * mesh.face_area(f);
            let mut g = [[0.0; 2]; 3];
            for k in 0..3 {
                let e = [
                    p[(k + 2) % 3][0] - p[(k + 1) % 3][0],
                    p[(k + 2) % 3][1] - p[(k + 1) % 3][1],
                ];
                g[k] = [-e[1] / a2, e[0] / a2];
            }
            basis.push(g);
            areas.push(a2 / 2.0);
        }
        GradientOperator {
            faces: mesh.faces().to_vec(),
            basis,
            areas,
        }
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn apply_face(&self, f: usize, u: &[f64]) -> [f64; 2] {
        let face = self.faces[f];
        let g = &self.basis[f];
        let mut out = [0.0; 2];
        for k in 0..3 {
            out[0] += u[face[k]] * g[k][0];
            out[1] += u[face[k]] * g[k][1];
        }
        out
    }

    pub fn apply(&self, u: &[f64]) -> Vec<[f64; 2]> {
        (0..self.faces.len()).map(|f| self.apply_face(f, u)).collect()
    }

    /// Gᵀ diag(area) p, the area-weighted divergence of a face field.
    pub fn weighted_transpose(&self, p: &[[f64; 2]], n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (f, face) in self.faces.iter().enumerate() {
            let a = self.areas[f];
            for k in 0..3 {
                out[face[k]] += a * (self.basis[f][k][0] * p[f][0] + self.basis[f][k][1] * p[f][1]);
            }
        }
        out
    }

    pub fn max_norm(&self, u: &[f64]) -> f64 {
        (0..self.faces.len())
            .map(|f| {
                let g = self.apply_face(f, u);
                g[0].hypot(g[1])
            })
            .fold(0.0, f64::max)
    }
}

fn check_len(mesh: &TriangleMesh, u: &[f64]) -> Result<()> {
    if u.len() != mesh.vertex_count() {
        return Err(Error::LengthMismatchField {
            expected: mesh.vertex_count(),
            got: u.len(),
        });
    }
    Ok(())
}

pub fn face_gradients(mesh: &TriangleMesh, u: &[f64]) -> Result<FaceVectorField> {
    check_len(mesh, u)?;
    let mut out = Vec::with_capacity(mesh.face_count());
    match mesh.positions() {
        Some(pos) => {
            for face in mesh.faces() {
                let [p0, p1, p2] = [pos[face[0]], pos[face[1]], pos[face[2]]];
                let e1 = sub(p1, p0);
                let e2 = sub(p2, p0);
                let n = cross(e1, e2);
                let nn = dot(n, n);
                let mut g = [0.0; 3];
                let p = [p0, p1, p2];
                for k in 0..3 {
                    // ∇φ_k = n × e_k / |n|², e_k the edge opposite corner k
                    let e = sub(p[(k + 2) % 3], p[(k + 1) % 3]);
                    let c = cross(n, e);
                    for d in 0..3 {
                        g[d] += u[face[k]] * c[d] / nn;
                    }
                }
                out.push(g);
            }
        }
        None => {
            let op = GradientOperator::new(mesh);
            for f in 0..mesh.face_count() {
                let g = op.apply_face(f, u);
                out.push([g[0], g[1], 0.0]);
            }
        }
    }
    Ok(out)
}

/// Per-vertex |∇u|: the area-weighted mean of the incident face-gradient
/// norms.
pub fn vertex_gradient_norm(mesh: &TriangleMesh, u: &[f64]) -> Result<Vec<f64>> {
    let grads = face_gradients(mesh, u)?;
    let norms: Vec<f64> = grads.iter().map(|g| dot(*g, *g).sqrt()).collect();
    let mut out = vec![0.0; mesh.vertex_count()];
    for (v, o) in out.iter_mut().enumerate() {
        let faces = mesh.vertex_faces(v);
        if faces.is_empty() {
            return Err(Error::IsolatedVertex(v));
        }
        let (mut num, mut den) = (0.0, 0.0);
        for &f in faces {
            let a = mesh.face_area(f);
            num += a * norms[f];
            den += a;
        }
        *o = num / den;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CurvatureInfo {
    /// Angle defect divided by the lumped vertex area.
    pub gauss_per_vertex: Vec<f64>,
    pub angle_defect: Vec<f64>,
    /// K = max(0, -min Gauss curvature), a lower Ricci bound estimate.
    pub ricci_lower_bound: f64,
    pub diameter_estimate: f64,
    /// Σ defects - 2πχ; `None` on meshes with boundary.
    pub gauss_bonnet_residual: Option<f64>,
}

pub fn curvature_info(mesh: &TriangleMesh) -> Result<CurvatureInfo> {
    let n = mesh.vertex_count();
    let mut angle_sum = vec![0.0; n];
    let mut area = vec![0.0; n];
    for (f, face) in mesh.faces().iter().enumerate() {
        let a = mesh.face_area(f);
        for k in 0..3 {
            angle_sum[face[k]] += mesh.corner_angle(f, k);
            area[face[k]] += a / 3.0;
        }
    }
    let boundary = mesh.boundary_flags();
    let mut defect = vec![0.0; n];
    let mut gauss = vec![0.0; n];
    for v in 0..n {
        if area[v] == 0.0 {
            return Err(Error::IsolatedVertex(v));
        }
        let full = if boundary[v] {
            std::f64::consts::PI
        } else {
            2.0 * std::f64::consts::PI
        };
        // round-off from the angle sums would otherwise show as curvature
        let d = full - angle_sum[v];
        defect[v] = if d.abs() < 1e-12 { 0.0 } else { d };
        gauss[v] = defect[v] / area[v];
    }
    let min_gauss = gauss.iter().copied().fold(f64::INFINITY, f64::min);
    let gauss_bonnet_residual = if mesh.has_boundary() {
        None
    } else {
        let chi = mesh.euler_characteristic() as f64;
        Some(defect.iter().sum::<f64>() - 2.0 * std::f64::consts::PI * chi)
    };
    Ok(CurvatureInfo {
        gauss_per_vertex: gauss,
        angle_defect: defect,
        ricci_lower_bound: (-min_gauss).max(0.0),
        diameter_estimate: diameter_estimate(mesh),
        gauss_bonnet_residual,
    })
}

/// Double-sweep diameter estimate from fast marching, never below the
/// longest edge.
pub fn diameter_estimate(mesh: &TriangleMesh) -> f64 {
    let longest = mesh.max_edge_length();
    let first = match fast_march(mesh, &[0]) {
        Ok(d) => d,
        Err(_) => return longest,
    };
    let far = argmax_finite(&first.values).unwrap_or(0);
    let second = match fast_march(mesh, &[far]) {
        Ok(d) => d,
        Err(_) => return longest,
    };
    let ecc = second
        .values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    ecc.max(longest)
}

fn argmax_finite(v: &[f64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| x.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

/// Smallest m guaranteeing that the gradient-constrained and the
/// distance-constrained problems share their minimizer, given a Ricci lower
/// bound `-k`, the diameter and the dimension:
/// `½ max{√(nK(1 + K diam²)), nK diam}`.
pub fn sufficient_m(k: f64, diam: f64, n: usize) -> Result<f64> {
    if !(k >= 0.0) || !(diam > 0.0) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "sufficient_m needs K >= 0, diam > 0, n >= 2 (got {k}, {diam}, {n})"
        )));
    }
    let nf = n as f64;
    let a = (nf * k * (1.0 + k * diam * diam)).sqrt();
    let b = nf * k * diam;
    Ok(0.5 * a.max(b))
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
