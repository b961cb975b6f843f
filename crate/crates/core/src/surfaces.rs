//! Built-in model surfaces with known geodesic distances: the unit sphere
//! (icosphere meshes) and the flat unit torus (intrinsic grids).

use std::collections::HashMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceId {
    UnitSphere,
    FlatUnitTorus,
}

impl FromStr for SurfaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit_sphere" | "sphere" => Ok(SurfaceId::UnitSphere),
            "flat_unit_torus" | "torus" => Ok(SurfaceId::FlatUnitTorus),
            other => Err(Error::UnknownSurface(other.to_string())),
        }
    }
}

/// A point on a model surface: a unit 3-vector on the sphere, or torus
/// coordinates in `[0, 1)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfacePoint {
    Sphere([f64; 3]),
    Torus([f64; 2]),
}

/// Exact geodesic distance between two points of a model surface.
pub fn analytic_distance(surface: SurfaceId, base: SurfacePoint, query: SurfacePoint) -> Result<f64> {
    match (surface, base, query) {
        (SurfaceId::UnitSphere, SurfacePoint::Sphere(p), SurfacePoint::Sphere(q)) => Ok(sphere_distance(p, q)),
        (SurfaceId::FlatUnitTorus, SurfacePoint::Torus(p), SurfacePoint::Torus(q)) => Ok(torus_distance(p, q)),
        _ => Err(Error::InvalidArgument(format!(
            "points do not match surface {surface:?}"
        ))),
    }
}

/// Great-circle distance; atan2 form stays accurate near 0 and π.
pub fn sphere_distance(p: [f64; 3], q: [f64; 3]) -> f64 {
    let c = [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ];
    let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let d = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
    s.atan2(d)
}

/// Distance on the flat unit torus: minimum over the nine nearest
/// integer translates.
pub fn torus_distance(p: [f64; 2], q: [f64; 2]) -> f64 {
    let mut best = f64::INFINITY;
    for i in -1..=1 {
        for j in -1..=1 {
            let dx = q[0] - p[0] + i as f64;
            let dy = q[1] - p[1] + j as f64;
            best = best.min(dx.hypot(dy));
        }
    }
    best
}

/// Icosahedron with vertices at both poles, refined `subdivisions` times by
/// edge midpoints projected to the unit sphere. Vertex 0 is the north pole
/// (0,0,1) and vertex 1 the south pole (0,0,-1).
pub fn icosphere(subdivisions: usize) -> TriangleMesh {
    let mut pos: Vec<[f64; 3]> = vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    let z = 1.0 / 5f64.sqrt();
    let r = 2.0 / 5f64.sqrt();
    let tau = std::f64::consts::TAU;
    for k in 0..5 {
        let a = tau * k as f64 / 5.0;
        pos.push([r * a.cos(), r * a.sin(), z]);
    }
    for k in 0..5 {
        let a = tau * k as f64 / 5.0 + tau / 10.0;
        pos.push([r * a.cos(), r * a.sin(), -z]);
    }
    let up = |k: usize| 2 + k % 5;
    let lo = |k: usize| 7 + k % 5;
    let mut faces = Vec::new();
    for k in 0..5 {
        faces.push([0, up(k), up(k + 1)]);
        faces.push([up(k), lo(k), up(k + 1)]);
        faces.push([up(k + 1), lo(k), lo(k + 1)]);
        faces.push([1, lo(k + 1), lo(k)]);
    }
    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, pos: &mut Vec<[f64; 3]>| -> usize {
            let key = if a < b { (a, b) } else { (b, a) };
            *midpoint.entry(key).or_insert_with(|| {
                let m = [pos[a][0] + pos[b][0], pos[a][1] + pos[b][1], pos[a][2] + pos[b][2]];
                let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                pos.push([m[0] / n, m[1] / n, m[2] / n]);
                pos.len() - 1
            })
        };
        for f in &faces {
            let a = mid(f[0], f[1], &mut pos);
            let b = mid(f[1], f[2], &mut pos);
            let c = mid(f[2], f[0], &mut pos);
            next.push([f[0], a, c]);
            next.push([f[1], b, a]);
            next.push([f[2], c, b]);
            next.push([a, b, c]);
        }
        faces = next;
    }
    TriangleMesh::from_embedded(pos, faces)
        .expect("icosphere construction")
        .with_basepoint(0)
        .expect("north pole exists")
}

/// Vertex index of grid node `(i, j)` on an `n × n` torus grid.
pub fn torus_vertex(n: usize, i: usize, j: usize) -> usize {
    (i % n) * n + (j % n)
}

/// Torus coordinates `(i/n, j/n)` of a grid vertex.
pub fn torus_coords(n: usize, v: usize) -> [f64; 2] {
    [(v / n) as f64 / n as f64, (v % n) as f64 / n as f64]
}

/// Intrinsic `n × n` grid on the flat unit torus, basepoint at the origin.
///
/// Cell diagonals point towards the origin and towards (½, ½), so the mesh
/// shares the symmetries of the distance function to the origin.
pub fn flat_torus(n: usize) -> TriangleMesh {
    assert!(n >= 3, "torus grid needs n >= 3");
    let h = 1.0 / n as f64;
    let mut faces = Vec::with_capacity(2 * n * n);
    let mut lengths = HashMap::new();
    let mut put = |a: usize, b: usize, l: f64| {
        lengths.insert(if a < b { (a, b) } else { (b, a) }, l);
    };
    for i in 0..n {
        for j in 0..n {
            let v00 = torus_vertex(n, i, j);
            let v10 = torus_vertex(n, i + 1, j);
            let v11 = torus_vertex(n, i + 1, j + 1);
            let v01 = torus_vertex(n, i, j + 1);
            put(v00, v10, h);
            put(v00, v01, h);
            put(v10, v11, h);
            put(v01, v11, h);
            let cx = (i as f64 + 0.5) * h - 0.5;
            let cy = (j as f64 + 0.5) * h - 0.5;
            if cx * cy > 0.0 {
                faces.push([v00, v10, v11]);
                faces.push([v00, v11, v01]);
                put(v00, v11, h * 2f64.sqrt());
            } else {
                faces.push([v00, v10, v01]);
                faces.push([v10, v11, v01]);
                put(v10, v01, h * 2f64.sqrt());
            }
        }
    }
    TriangleMesh::from_intrinsic(n * n, faces, &lengths)
        .expect("torus construction")
        .with_basepoint(0)
        .expect("origin exists")
}

/// Planar `n × n`-cell grid on the unit square (test helper and example
/// geometry).
pub fn unit_square_grid(n: usize) -> TriangleMesh {
    let h = 1.0 / n as f64;
    let mut pos = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..=n {
        for j in 0..=n {
            pos.push([i as f64 * h, j as f64 * h, 0.0]);
        }
    }
    let id = |i: usize, j: usize| i * (n + 1) + j;
    let mut faces = Vec::new();
    for i in 0..n {
        for j in 0..n {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriangleMesh::from_embedded(pos, faces).expect("grid construction")
}

/// Exact distance to the basepoint at every vertex of a built-in mesh
/// (north pole on the sphere, origin on the torus).
pub fn analytic_vertex_distance(surface: SurfaceId, mesh: &TriangleMesh) -> Result<Vec<f64>> {
    match surface {
        SurfaceId::UnitSphere => {
            let pos = mesh
                .positions()
                .ok_or_else(|| Error::InvalidArgument("sphere mesh needs positions".into()))?;
            Ok(pos.iter().map(|p| sphere_distance([0.0, 0.0, 1.0], *p)).collect())
        }
        SurfaceId::FlatUnitTorus => {
            let n = (mesh.vertex_count() as f64).sqrt().round() as usize;
            if n * n != mesh.vertex_count() {
                return Err(Error::InvalidArgument("not a square torus grid".into()));
            }
            Ok((0..mesh.vertex_count())
                .map(|v| torus_distance([0.0, 0.0], torus_coords(n, v)))
                .collect())
        }
    }
}
