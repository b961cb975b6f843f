//! Planar domains: structured disk and rectangle meshes, exact boundary
//! distance, torsion solves with zero boundary values and medial-axis
//! ground truth.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geodesic::DistanceField;
use crate::gradient::{solve_gradient_constrained, GradientConfig, GradientProblem, GradientReport};
use crate::mesh::TriangleMesh;
use crate::obstacle::{ObstacleProblem, ObstacleSolver, SolveConfig, SolveReport};
use crate::operators::Operators;
use crate::sets::{gen_grad_from_directions, DirectionSet, LabelKind, LabelParams, RegionLabeling, GROUND_TRUTH_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Disk { radius: f64 },
    Rectangle { length: f64, width: f64 },
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum DomainSpec {
    Disk { radius: f64, h: f64 },
    Rectangle { length: f64, width: f64, h: f64 },
    External(TriangleMesh),
}

#[derive(Debug, Clone)]
pub struct PlanarDomain {
    pub mesh: TriangleMesh,
    /// Boundary loops as ordered vertex lists (counter-clockwise for the
    /// outer boundary).
    pub loops: Vec<Vec<usize>>,
    pub shape: Option<Shape>,
}

impl PlanarDomain {
    pub fn h(&self) -> f64 {
        self.mesh.max_edge_length()
    }

    pub fn points(&self) -> &[[f64; 3]] {
        self.mesh.positions().expect("planar meshes are embedded")
    }
}

pub fn build_domain(spec: DomainSpec) -> Result<PlanarDomain> {
    let (mesh, shape) = match spec {
        DomainSpec::Disk { radius, h } => {
            check_positive(&[radius, h])?;
            (disk_mesh(radius, h)?, Some(Shape::Disk { radius }))
        }
        DomainSpec::Rectangle { length, width, h } => {
            check_positive(&[length, width, h])?;
            (
                rectangle_mesh(length, width, h)?,
                Some(Shape::Rectangle { length, width }),
            )
        }
        DomainSpec::External(mesh) => {
            let pos = mesh
                .positions()
                .ok_or_else(|| invalid("planar domain needs vertex positions"))?;
            if pos.iter().any(|p| p[2] != 0.0) {
                return Err(invalid("planar domain must lie in the plane z = 0"));
            }
            (mesh, None)
        }
    };
    let loops = boundary_loops(&mesh)?;
    let nb: usize = loops.iter().map(Vec::len).sum();
    if nb < 8 {
        return Err(invalid(format!("only {nb} boundary vertices; decrease h")));
    }
    Ok(PlanarDomain { mesh, loops, shape })
}

fn check_positive(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| *x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(invalid("shape parameters and h must be positive"))
    }
}

/// Concentric rings of `6k` vertices joined by angular zippers.
fn disk_mesh(radius: f64, h: f64) -> Result<TriangleMesh> {
    let mut rings = 1;
    loop {
        let mesh = disk_rings(radius, rings)?;
        if mesh.max_edge_length() <= h {
            return Ok(mesh);
        }
        if rings > 100_000 {
            return Err(invalid("h too small"));
        }
        // the longest edges scale like radius / rings
        let grow = (rings as f64 * mesh.max_edge_length() / h).ceil() as usize;
        rings = grow.max(rings + 1);
    }
}

fn disk_rings(radius: f64, rings: usize) -> Result<TriangleMesh> {
    use std::f64::consts::TAU;
    let mut pos = vec![[0.0, 0.0, 0.0]];
    let mut start = vec![0usize];
    for k in 1..=rings {
        start.push(pos.len());
        let r = radius * k as f64 / rings as f64;
        for j in 0..6 * k {
            let t = TAU * j as f64 / (6 * k) as f64;
            pos.push([r * t.cos(), r * t.sin(), 0.0]);
        }
    }
    let mut faces = Vec::new();
    for j in 0..6 {
        faces.push([0, 1 + j, 1 + (j + 1) % 6]);
    }
    for k in 1..rings {
        let (a, b) = (6 * k, 6 * (k + 1));
        let (ia, ib) = (start[k], start[k + 1]);
        let (mut i, mut j) = (0, 0);
        while i < a || j < b {
            let next_in = (i + 1) as f64 / a as f64;
            let next_out = (j + 1) as f64 / b as f64;
            if j < b && (i == a || next_out <= next_in) {
                faces.push([ia + i % a, ib + j, ib + (j + 1) % b]);
                j += 1;
            } else {
                faces.push([ia + i % a, ib + j % b, ia + (i + 1) % a]);
                i += 1;
            }
        }
    }
    TriangleMesh::from_embedded(pos, faces)
}

/// Cells of side at most `h/√2` with an even number of cells in each
/// direction; cell diagonals point towards the centre so the medial
/// branches run along mesh edges.
fn rectangle_mesh(length: f64, width: f64, h: f64) -> Result<TriangleMesh> {
    let even_at_least = |x: f64| {
        let n = x.ceil().max(2.0) as usize;
        n + n % 2
    };
    let short = length.min(width);
    let mut ns = even_at_least(short * 2f64.sqrt() / h);
    let (nx, ny) = loop {
        let s = short / ns as f64;
        let (fx, fy) = (length / s, width / s);
        let (rx, ry) = (fx.round(), fy.round());
        if (fx - rx).abs() < 1e-9
            && (fy - ry).abs() < 1e-9
            && (rx as usize).is_multiple_of(2)
            && (ry as usize).is_multiple_of(2)
        {
            break (rx as usize, ry as usize);
        }
        if ns > 4 * even_at_least(short * 2f64.sqrt() / h) {
            // incommensurable sides: fall back to near-square cells
            break (
                even_at_least(length * 2f64.sqrt() / h),
                even_at_least(width * 2f64.sqrt() / h),
            );
        }
        ns += 2;
    };
    let (sx, sy) = (length / nx as f64, width / ny as f64);
    let id = |i: usize, j: usize| i * (ny + 1) + j;
    let mut pos = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            pos.push([i as f64 * sx, j as f64 * sy, 0.0]);
        }
    }
    let mut faces = Vec::with_capacity(2 * nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let cx = (i as f64 + 0.5) * sx - 0.5 * length;
            let cy = (j as f64 + 0.5) * sy - 0.5 * width;
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if cx * cy > 0.0 {
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            } else {
                faces.push([a, b, d]);
                faces.push([b, c, d]);
            }
        }
    }
    TriangleMesh::from_embedded(pos, faces)
}

/// Ordered boundary loops following the face orientation.
fn boundary_loops(mesh: &TriangleMesh) -> Result<Vec<Vec<usize>>> {
    use std::collections::{HashMap, HashSet};
    let mut directed = HashSet::new();
    for f in mesh.faces() {
        for k in 0..3 {
            directed.insert((f[k], f[(k + 1) % 3]));
        }
    }
    let mut next: HashMap<usize, usize> = HashMap::new();
    for &(a, b) in &directed {
        if !directed.contains(&(b, a)) && next.insert(a, b).is_some() {
            return Err(invalid(format!("boundary is pinched at vertex {a}")));
        }
    }
    let mut starts: Vec<usize> = next.keys().copied().collect();
    starts.sort_unstable();
    let mut seen = HashSet::new();
    let mut loops = Vec::new();
    for s in starts {
        if seen.contains(&s) {
            continue;
        }
        let mut l = vec![s];
        seen.insert(s);
        let mut v = next[&s];
        while v != s {
            if !seen.insert(v) {
                return Err(invalid("boundary edges do not form closed loops"));
            }
            l.push(v);
            v = *next.get(&v).ok_or_else(|| invalid("open boundary chain"))?;
        }
        loops.push(l);
    }
    Ok(loops)
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Exact distance from every vertex to the boundary polyline.
pub fn boundary_distance(domain: &PlanarDomain) -> DistanceField {
    let pos = domain.points();
    let segs: Vec<([f64; 2], [f64; 2])> = domain
        .loops
        .iter()
        .flat_map(|l| {
            (0..l.len()).map(move |k| {
                let (a, b) = (pos[l[k]], pos[l[(k + 1) % l.len()]]);
                ([a[0], a[1]], [b[0], b[1]])
            })
        })
        .collect();
    let flags = domain.mesh.boundary_flags();
    let values = pos
        .iter()
        .enumerate()
        .map(|(v, p)| {
            if flags[v] {
                0.0
            } else {
                segs.iter()
                    .map(|(a, b)| point_segment_distance([p[0], p[1]], *a, *b))
                    .fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    let sources = (0..pos.len()).filter(|&v| flags[v]).collect();
    DistanceField {
        values,
        sources,
        edge_fallbacks: 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionMode {
    Obstacle,
    Gradient,
}

#[derive(Debug, Clone)]
pub enum TorsionReport {
    Obstacle(SolveReport),
    Gradient(GradientReport),
}

impl TorsionReport {
    pub fn u(&self) -> &[f64] {
        match self {
            TorsionReport::Obstacle(r) => &r.u,
            TorsionReport::Gradient(r) => &r.u,
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            TorsionReport::Obstacle(r) => r.converged,
            TorsionReport::Gradient(r) => r.converged,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            TorsionReport::Obstacle(r) => r.iterations,
            TorsionReport::Gradient(r) => r.iterations,
        }
    }
}

/// Torsion problem with zero boundary values: obstacle `u ≤ d_∂Ω` or
/// gradient constraint `|∇u| ≤ 1`.
pub fn solve_torsion(
    domain: &PlanarDomain,
    ops: &Operators,
    m: f64,
    mode: TorsionMode,
    obstacle_config: &SolveConfig,
    gradient_config: &GradientConfig,
) -> Result<TorsionReport> {
    match mode {
        TorsionMode::Obstacle => {
            let d = boundary_distance(domain).values;
            let p = ObstacleProblem::new(&domain.mesh, ops, d, m)?;
            let r = ObstacleSolver::new(ops)?.solve(&p, obstacle_config, None)?;
            Ok(TorsionReport::Obstacle(r))
        }
        TorsionMode::Gradient => {
            let p = GradientProblem::new(&domain.mesh, ops, m)?;
            Ok(TorsionReport::Gradient(solve_gradient_constrained(
                &p,
                gradient_config,
                None,
            )?))
        }
    }
}

/// Unit directions from `p` to its nearest boundary points and the boundary
/// distance, for a built-in shape.
pub fn nearest_boundary_directions(shape: Shape, p: [f64; 2]) -> (f64, Vec<[f64; 2]>) {
    match shape {
        Shape::Disk { radius } => {
            let r = p[0].hypot(p[1]);
            if r < GROUND_TRUTH_TOL {
                let k = 64;
                let dirs = (0..k)
                    .map(|i| {
                        let t = std::f64::consts::TAU * i as f64 / k as f64;
                        [t.cos(), t.sin()]
                    })
                    .collect();
                (radius, dirs)
            } else {
                (radius - r, vec![[p[0] / r, p[1] / r]])
            }
        }
        Shape::Rectangle { length, width } => {
            let sides = [
                (p[0], [-1.0, 0.0]),
                (length - p[0], [1.0, 0.0]),
                (p[1], [0.0, -1.0]),
                (width - p[1], [0.0, 1.0]),
            ];
            let d = sides.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
            let dirs = sides
                .iter()
                .filter(|s| s.0 <= d + GROUND_TRUTH_TOL)
                .map(|s| s.1)
                .collect();
            (d, dirs)
        }
    }
}

/// Membership of a point in the closed medial axis (λ = 0) or in the
/// λ-medial axis.
pub fn medial_point(shape: Shape, lambda: f64, p: [f64; 2]) -> Result<bool> {
    if !(lambda >= 0.0) {
        return Err(invalid("lambda must be nonnegative"));
    }
    let (d, dirs) = nearest_boundary_directions(shape, p);
    if dirs.len() < 2 {
        return Ok(false);
    }
    if lambda == 0.0 {
        return Ok(true);
    }
    if d <= 0.0 {
        return Ok(false);
    }
    let g = gen_grad_from_directions(&DirectionSet::new(dirs)?);
    Ok(g * g <= 1.0 - lambda * lambda / (d * d) + GROUND_TRUTH_TOL)
}

/// Labels the vertices of a built-in domain.
pub fn medial_ground_truth(domain: &PlanarDomain, lambda: f64) -> Result<RegionLabeling> {
    let shape = domain
        .shape
        .ok_or_else(|| invalid("ground truth is only available for built-in shapes"))?;
    let member = domain
        .points()
        .iter()
        .map(|p| medial_point(shape, lambda, [p[0], p[1]]))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionLabeling {
        member,
        kind: LabelKind::GroundTruth,
        params: LabelParams {
            lambda: Some(lambda),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::build_operators;

    #[test]
    fn disk_geometry() {
        let d = build_domain(DomainSpec::Disk { radius: 1.0, h: 0.05 }).unwrap();
        assert!(d.h() <= 0.05);
        assert!((d.mesh.total_area() - std::f64::consts::PI).abs() < 0.02);
        assert_eq!(d.loops.len(), 1);
        assert_eq!(d.mesh.euler_characteristic(), 1);
        let bd = boundary_distance(&d);
        let nb = d.loops[0].len() as f64;
        let apothem = (std::f64::consts::PI / nb).cos();
        assert!((bd.values[0] - apothem).abs() < 1e-12);
        assert!(d.loops[0].iter().all(|&v| bd.values[v] == 0.0));
        assert!(build_domain(DomainSpec::Disk { radius: 1.0, h: 5.0 }).is_err());
    }

    #[test]
    fn rectangle_geometry() {
        let d = build_domain(DomainSpec::Rectangle {
            length: 2.0,
            width: 1.0,
            h: 0.1,
        })
        .unwrap();
        assert!(d.h() <= 0.1 + 1e-12);
        assert!((d.mesh.total_area() - 2.0).abs() < 1e-9);
        let centre = d.mesh.nearest_vertex([1.0, 0.5, 0.0]).unwrap();
        assert!(centre.1 < 1e-12);
        assert!((boundary_distance(&d).values[centre.0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn medial_axis_of_shapes() {
        let disk = Shape::Disk { radius: 1.0 };
        assert!(medial_point(disk, 0.5, [0.0, 0.0]).unwrap());
        assert!(!medial_point(disk, 1.5, [0.0, 0.0]).unwrap());
        assert!(!medial_point(disk, 0.5, [0.3, 0.0]).unwrap());
        let rect = Shape::Rectangle {
            length: 2.0,
            width: 1.0,
        };
        assert!(medial_point(rect, 0.2, [1.0, 0.5]).unwrap());
        assert!(!medial_point(rect, 0.6, [1.0, 0.5]).unwrap());
        // branch point at distance s = 0.3√2 ≈ 0.42 from the corner: s ≥ 2λ = 0.4
        assert!(medial_point(rect, 0.2, [0.3, 0.3]).unwrap());
        assert!(!medial_point(rect, 0.2, [0.25, 0.25]).unwrap());
        assert!(medial_point(rect, 0.0, [0.0, 0.0]).unwrap());
        assert!(!medial_point(rect, 0.0, [0.3, 0.2]).unwrap());
    }

    #[test]
    fn small_m_is_unconstrained_torsion() {
        let d = build_domain(DomainSpec::Disk { radius: 1.0, h: 0.04 }).unwrap();
        let ops = build_operators(&d.mesh).unwrap();
        let m = 2.0;
        let r = solve_torsion(
            &d,
            &ops,
            m,
            TorsionMode::Obstacle,
            &SolveConfig::default(),
            &GradientConfig::default(),
        )
        .unwrap();
        assert!(r.converged());
        assert!((r.u()[0] / (m / 8.0) - 1.0).abs() < 0.01);
    }
}
