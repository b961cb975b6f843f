//! Triangle meshes with either embedded (3-D positions) or intrinsic
//! (per-edge lengths) geometry.
//!
//! All metric quantities downstream (areas, cotangents, gradients) are
//! computed from edge lengths only, so the two representations are
//! interchangeable. Intrinsic meshes represent surfaces without a smooth
//! isometric embedding, e.g. the flat torus.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Relative tolerance for agreement between stored and embedded lengths.
const LENGTH_AGREEMENT: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertex_count: usize,
    faces: Vec<[usize; 3]>,
    positions: Option<Vec<[f64; 3]>>,
    /// `face_lengths[f][k]` is the length of the edge opposite local vertex `k`.
    face_lengths: Vec<[f64; 3]>,
    edges: Vec<[usize; 2]>,
    edge_lengths: Vec<f64>,
    edge_faces: Vec<[Option<usize>; 2]>,
    vertex_faces: Vec<Vec<usize>>,
    vertex_neighbors: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    basepoint: Option<usize>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

impl TriangleMesh {
    /// Mesh with 3-D vertex positions; edge lengths are derived.
    pub fn from_embedded(positions: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> Result<Self> {
        Self::build(positions.len(), faces, Some(positions), None)
    }

    /// Mesh given by combinatorics and one positive length per edge.
    pub fn from_intrinsic(
        vertex_count: usize,
        faces: Vec<[usize; 3]>,
        lengths: &HashMap<(usize, usize), f64>,
    ) -> Result<Self> {
        Self::build(vertex_count, faces, None, Some(lengths))
    }

    /// Mesh carrying both representations; they must agree.
    pub fn from_embedded_and_intrinsic(
        positions: Vec<[f64; 3]>,
        faces: Vec<[usize; 3]>,
        lengths: &HashMap<(usize, usize), f64>,
    ) -> Result<Self> {
        Self::build(positions.len(), faces, Some(positions), Some(lengths))
    }

    fn build(
        vertex_count: usize,
        faces: Vec<[usize; 3]>,
        positions: Option<Vec<[f64; 3]>>,
        lengths: Option<&HashMap<(usize, usize), f64>>,
    ) -> Result<Self> {
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= vertex_count) || f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidFace { face: fi, indices: *f });
            }
        }

        // Directed half-edges detect both non-manifold edges and flipped faces.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3);
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 2);
        let mut edges = Vec::new();
        let mut edge_faces: Vec<[Option<usize>; 2]> = Vec::new();
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                if directed.insert((a, b), fi).is_some() {
                    return Err(Error::InconsistentOrientation(a, b));
                }
                let key = edge_key(a, b);
                match edge_index.get(&key) {
                    Some(&e) => {
                        if edge_faces[e][1].is_some() {
                            return Err(Error::NonManifoldEdge(key.0, key.1));
                        }
                        edge_faces[e][1] = Some(fi);
                    }
                    None => {
                        edge_index.insert(key, edges.len());
                        edges.push([key.0, key.1]);
                        edge_faces.push([Some(fi), None]);
                    }
                }
            }
        }

        let mut edge_lengths = vec![0.0; edges.len()];
        for (e, &[a, b]) in edges.iter().enumerate() {
            let from_positions = positions.as_ref().map(|p| dist3(&p[a], &p[b]));
            let given = lengths.map(|l| l.get(&(a, b)).or_else(|| l.get(&(b, a))).copied());
            let len = match (from_positions, given) {
                (Some(p), Some(Some(g))) => {
                    if (p - g).abs() > LENGTH_AGREEMENT * p.abs().max(g.abs()) {
                        return Err(Error::LengthMismatch(a, b, g, p));
                    }
                    g
                }
                (_, Some(Some(g))) => g,
                (_, Some(None)) => return Err(Error::MissingEdgeLength(a, b)),
                (Some(p), None) => p,
                (None, None) => unreachable!("mesh built without geometry"),
            };
            if !(len > 0.0 && len.is_finite()) {
                return Err(Error::MissingEdgeLength(a, b));
            }
            edge_lengths[e] = len;
        }

        let mut face_lengths = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            let mut l = [0.0; 3];
            for k in 0..3 {
                let e = edge_index[&edge_key(f[(k + 1) % 3], f[(k + 2) % 3])];
                l[k] = edge_lengths[e];
            }
            if triangle_area(l) <= 0.0 {
                return Err(Error::DegenerateFace { face: fi });
            }
            face_lengths.push(l);
        }

        let mut vertex_faces = vec![Vec::new(); vertex_count];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                vertex_faces[v].push(fi);
            }
        }
        let mut vertex_neighbors = vec![Vec::new(); vertex_count];
        for &[a, b] in &edges {
            vertex_neighbors[a].push(b);
            vertex_neighbors[b].push(a);
        }
        for n in &mut vertex_neighbors {
            n.sort_unstable();
        }
        let mut boundary = vec![false; vertex_count];
        for (e, ef) in edge_faces.iter().enumerate() {
            if ef[1].is_none() {
                boundary[edges[e][0]] = true;
                boundary[edges[e][1]] = true;
            }
        }

        let mesh = TriangleMesh {
            vertex_count,
            faces,
            positions,
            face_lengths,
            edges,
            edge_lengths,
            edge_faces,
            vertex_faces,
            vertex_neighbors,
            boundary,
            basepoint: None,
        };
        mesh.warn_obtuse();
        Ok(mesh)
    }

    fn warn_obtuse(&self) {
        let limit = 170f64.to_radians().cos();
        let bad = self
            .face_lengths
            .iter()
            .filter(|l| (0..3).any(|k| corner_cos(**l, k) < limit))
            .count();
        if bad > 0 {
            log::warn!("{bad} triangles have an angle above 170 degrees");
        }
    }

    pub fn with_basepoint(mut self, b: usize) -> Result<Self> {
        if b >= self.vertex_count {
            return Err(Error::InvalidArgument(format!("basepoint {b} out of range")));
        }
        self.basepoint = Some(b);
        Ok(self)
    }

    /// Replaces the topological boundary flags.
    pub fn with_boundary_flags(mut self, flags: Vec<bool>) -> Result<Self> {
        if flags.len() != self.vertex_count {
            return Err(Error::LengthMismatchField {
                expected: self.vertex_count,
                got: flags.len(),
            });
        }
        self.boundary = flags;
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    pub fn face_lengths(&self) -> &[[f64; 3]] {
        &self.face_lengths
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    /// The two faces adjacent to each edge (second is `None` on the boundary).
    pub fn edge_faces(&self) -> &[[Option<usize>; 2]] {
        &self.edge_faces
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.vertex_neighbors[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary.iter().any(|&b| b)
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    pub fn is_intrinsic(&self) -> bool {
        self.positions.is_none()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        triangle_area(self.face_lengths[f])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(0.0, f64::max)
    }

    pub fn mean_edge_length(&self) -> f64 {
        self.edge_lengths.iter().sum::<f64>() / self.edge_lengths.len() as f64
    }

    /// Length of the edge joining `a` and `b`, if any.
    pub fn edge_length_between(&self, a: usize, b: usize) -> Option<f64> {
        for &f in &self.vertex_faces[a] {
            let face = self.faces[f];
            if let (Some(ka), Some(kb)) = (face.iter().position(|&v| v == a), face.iter().position(|&v| v == b)) {
                return Some(self.face_lengths[f][3 - ka - kb]);
            }
        }
        None
    }

    /// Euler characteristic V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Number of connected components of the vertex graph.
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.vertex_count];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.vertex_count {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &self.vertex_neighbors[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Index of the vertex nearest to `p` (embedded meshes only) together
    /// with the snap distance.
    pub fn nearest_vertex(&self, p: [f64; 3]) -> Option<(usize, f64)> {
        let pos = self.positions.as_ref()?;
        pos.iter()
            .enumerate()
            .map(|(i, q)| (i, dist3(q, &p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Checks that `values` is a valid vertex field on this mesh.
    pub fn check_field(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.vertex_count {
            return Err(Error::LengthMismatchField {
                expected: self.vertex_count,
                got: values.len(),
            });
        }
        match values.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(Error::NonFinite(i)),
            None => Ok(()),
        }
    }

    /// Vertices of face `f` laid out in a local 2-D frame: v0 at the origin,
    /// v1 on the positive x axis, v2 in the upper half plane.
    pub fn local_frame(&self, f: usize) -> [[f64; 2]; 3] {
        local_frame(self.face_lengths[f])
    }

    /// Interior angle at local corner `k` of face `f`.
    pub fn corner_angle(&self, f: usize, k: usize) -> f64 {
        corner_cos(self.face_lengths[f], k).clamp(-1.0, 1.0).acos()
    }

    /// Cotangent of the interior angle at local corner `k` of face `f`.
    pub fn corner_cot(&self, f: usize, k: usize) -> f64 {
        let l = self.face_lengths[f];
        let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
        (b * b + c * c - a * a) / (4.0 * triangle_area(l))
    }
}

/// Area from the three side lengths (Kahan's stable Heron formula).
pub fn triangle_area(l: [f64; 3]) -> f64 {
    let mut s = l;
    s.sort_by(|a, b| b.total_cmp(a));
    let (a, b, c) = (s[0], s[1], s[2]);
    let q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if q <= 0.0 {
        0.0
    } else {
        0.25 * q.sqrt()
    }
}

fn corner_cos(l: [f64; 3], k: usize) -> f64 {
    let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
    (b * b + c * c - a * a) / (2.0 * b * c)
}

pub(crate) fn local_frame(l: [f64; 3]) -> [[f64; 2]; 3] {
    // Edge v0-v1 is opposite v2 (length l[2]), edge v2-v0 is opposite v1.
    let x = (l[1] * l[1] + l[2] * l[2] - l[0] * l[0]) / (2.0 * l[2]);
    let y = 2.0 * triangle_area(l) / l[2];
    [[0.0, 0.0], [l[2], 0.0], [x, y]]
}
