//! Elastic sets, λ-elastic sets, generalized gradients and set distances.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geodesic::multi_source_distance;
use crate::mesh::TriangleMesh;
use crate::operators::vertex_gradient_norm;
use crate::surfaces::{sphere_distance, torus_coords, SurfaceId, SurfacePoint};

/// How a labeling was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    ContactGap,
    GradientThreshold,
    LambdaSet,
    GroundTruth,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelParams {
    pub m: Option<f64>,
    pub lambda: Option<f64>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionLabeling {
    pub member: Vec<bool>,
    pub kind: LabelKind,
    pub params: LabelParams,
}

impl RegionLabeling {
    pub fn count(&self) -> usize {
        self.member.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.member.len()).filter(|&i| self.member[i]).collect()
    }

    /// Every member of `self` is a member of `other`.
    pub fn is_subset_of(&self, other: &RegionLabeling) -> bool {
        self.member.iter().zip(&other.member).all(|(a, b)| !a || *b)
    }

    pub fn as_field(&self) -> Vec<f64> {
        self.member.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElasticMode {
    /// Member iff `d − u > ε_c`.
    ContactGap(f64),
    /// Member iff `|∇u| < 1 − ε_g` at the vertex.
    GradientThreshold(f64),
}

/// Default contact-gap threshold `max(1e−6, min(h²m/8, 1/(2m)))`.
///
/// The `h²m/8` term absorbs the quadratic growth of the gap off the free
/// boundary; the `1/(2m)` cap keeps it below the size of the gap itself,
/// which is of order `1/m` on the elastic set.
pub fn default_contact_threshold(h: f64, m: f64) -> f64 {
    (h * h * m / 8.0).min(0.5 / m).max(1e-6)
}

/// Default gradient threshold `max(0.02, 2h)`.
pub fn default_gradient_threshold(h: f64) -> f64 {
    (2.0 * h).max(0.02)
}

pub fn elastic_set(u: &[f64], d: &[f64], mesh: &TriangleMesh, mode: ElasticMode) -> Result<RegionLabeling> {
    mesh.check_field(u)?;
    match mode {
        ElasticMode::ContactGap(eps) => {
            if d.len() != u.len() {
                return Err(Error::LengthMismatchField {
                    expected: u.len(),
                    got: d.len(),
                });
            }
            Ok(RegionLabeling {
                member: u.iter().zip(d).map(|(u, d)| d - u > eps).collect(),
                kind: LabelKind::ContactGap,
                params: LabelParams {
                    threshold: Some(eps),
                    ..Default::default()
                },
            })
        }
        ElasticMode::GradientThreshold(eps) => {
            let g = vertex_gradient_norm(mesh, u)?;
            Ok(RegionLabeling {
                member: g.iter().map(|&g| g < 1.0 - eps).collect(),
                kind: LabelKind::GradientThreshold,
                params: LabelParams {
                    threshold: Some(eps),
                    ..Default::default()
                },
            })
        }
    }
}

/// Vertices with `u > λ` and `|∇u|² ≤ 1 − λ²/u² + ε_g`.
pub fn lambda_elastic_set(u: &[f64], mesh: &TriangleMesh, lambda: f64, eps_g: f64) -> Result<RegionLabeling> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda must be positive; use elastic_set for lambda = 0"));
    }
    mesh.check_field(u)?;
    let g = vertex_gradient_norm(mesh, u)?;
    let member = u
        .iter()
        .zip(&g)
        .map(|(&u, &g)| u > lambda * (1.0 + 1e-9) && g * g <= 1.0 - lambda * lambda / (u * u) + eps_g)
        .collect();
    Ok(RegionLabeling {
        member,
        kind: LabelKind::LambdaSet,
        params: LabelParams {
            lambda: Some(lambda),
            threshold: Some(eps_g),
            ..Default::default()
        },
    })
}

/// Unit tangent vectors at a point (initial velocities of the minimizing
/// geodesics to the basepoint).
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet(Vec<[f64; 2]>);

impl DirectionSet {
    pub fn new(dirs: Vec<[f64; 2]>) -> Result<Self> {
        if dirs.is_empty() {
            return Err(invalid("direction set is empty"));
        }
        if let Some(v) = dirs.iter().find(|v| (v[0].hypot(v[1]) - 1.0).abs() > 1e-12) {
            return Err(invalid(format!("direction {v:?} is not a unit vector")));
        }
        Ok(DirectionSet(dirs))
    }

    /// Normalizes nonzero vectors first.
    pub fn from_unnormalized(dirs: &[[f64; 2]]) -> Result<Self> {
        let mut out = Vec::with_capacity(dirs.len());
        for v in dirs {
            let n = v[0].hypot(v[1]);
            if !(n > 0.0) || !n.is_finite() {
                return Err(invalid("zero or non-finite direction"));
            }
            out.push([v[0] / n, v[1] / n]);
        }
        Self::new(out)
    }

    pub fn directions(&self) -> &[[f64; 2]] {
        &self.0
    }
}

/// `max{0, max_{|v|=1} min_k −γ̇_k·v}` by a 4096-point angle grid followed
/// by ternary refinement around the best sample.
pub fn gen_grad_from_directions(dirs: &DirectionSet) -> f64 {
    let f = |t: f64| {
        let v = [t.cos(), t.sin()];
        dirs.0
            .iter()
            .map(|g| -(g[0] * v[0] + g[1] * v[1]))
            .fold(f64::INFINITY, f64::min)
    };
    const SAMPLES: usize = 4096;
    let step = std::f64::consts::TAU / SAMPLES as f64;
    let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
    for i in 0..SAMPLES {
        let t = i as f64 * step;
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = (best_t - step, best_t + step);
    while hi - lo > 1e-10 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    best.max(f(0.5 * (lo + hi))).max(0.0)
}

/// Tolerance for deciding that a vertex lies on an exact ground-truth set.
pub const GROUND_TRUTH_TOL: f64 = 1e-9;

/// Initial directions at `p` of the minimizing geodesics to the basepoint
/// (north pole / origin), in a local tangent frame.
pub fn minimizing_directions(surface: SurfaceId, p: SurfacePoint) -> Result<DirectionSet> {
    match (surface, p) {
        (SurfaceId::UnitSphere, SurfacePoint::Sphere(q)) => {
            let d = sphere_distance([0.0, 0.0, 1.0], q);
            if (d - std::f64::consts::PI).abs() < GROUND_TRUTH_TOL {
                // antipode: every direction is minimizing
                let k = 64;
                let dirs = (0..k)
                    .map(|i| {
                        let t = std::f64::consts::TAU * i as f64 / k as f64;
                        [t.cos(), t.sin()]
                    })
                    .collect();
                DirectionSet::new(dirs)
            } else {
                // single meridian direction towards the north pole
                DirectionSet::new(vec![[0.0, 1.0]])
            }
        }
        (SurfaceId::FlatUnitTorus, SurfacePoint::Torus(q)) => {
            let mut cands = Vec::new();
            for i in -1..=1 {
                for j in -1..=1 {
                    let v = [i as f64 - q[0], j as f64 - q[1]];
                    cands.push((v[0].hypot(v[1]), v));
                }
            }
            let best = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
            if best == 0.0 {
                return Err(invalid("directions are undefined at the basepoint"));
            }
            let dirs: Vec<[f64; 2]> = cands
                .iter()
                .filter(|c| c.0 <= best + GROUND_TRUTH_TOL)
                .map(|c| c.1)
                .collect();
            DirectionSet::from_unnormalized(&dirs)
        }
        _ => Err(invalid(format!("point does not lie on {surface:?}"))),
    }
}

/// Exact membership of a point in the cut locus (λ = 0) or the λ-cut locus.
pub fn ground_truth_point(surface: SurfaceId, lambda: f64, p: SurfacePoint) -> Result<bool> {
    if !(lambda >= 0.0) {
        return Err(invalid("lambda must be nonnegative"));
    }
    let d = match (surface, p) {
        (SurfaceId::UnitSphere, SurfacePoint::Sphere(q)) => sphere_distance([0.0, 0.0, 1.0], q),
        (SurfaceId::FlatUnitTorus, SurfacePoint::Torus(q)) => crate::surfaces::torus_distance([0.0, 0.0], q),
        _ => return Err(invalid(format!("point does not lie on {surface:?}"))),
    };
    if d == 0.0 {
        return Ok(false);
    }
    let dirs = minimizing_directions(surface, p)?;
    let in_cut = dirs.directions().len() >= 2;
    if lambda == 0.0 {
        return Ok(in_cut);
    }
    let g = gen_grad_from_directions(&dirs);
    Ok(in_cut && g * g <= 1.0 - lambda * lambda / (d * d) + GROUND_TRUTH_TOL)
}

/// Labels the vertices of a built-in mesh (icosphere or torus grid with the
/// basepoint at the north pole / origin).
pub fn ground_truth_cut(surface: SurfaceId, lambda: f64, mesh: &TriangleMesh) -> Result<RegionLabeling> {
    let points: Vec<SurfacePoint> = match surface {
        SurfaceId::UnitSphere => mesh
            .positions()
            .ok_or_else(|| invalid("sphere mesh needs positions"))?
            .iter()
            .map(|p| {
                let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                SurfacePoint::Sphere([p[0] / n, p[1] / n, p[2] / n])
            })
            .collect(),
        SurfaceId::FlatUnitTorus => {
            let n = (mesh.vertex_count() as f64).sqrt().round() as usize;
            if n * n != mesh.vertex_count() {
                return Err(invalid("not a square torus grid"));
            }
            (0..mesh.vertex_count())
                .map(|v| SurfacePoint::Torus(torus_coords(n, v)))
                .collect()
        }
    };
    let member = points
        .into_iter()
        .map(|p| ground_truth_point(surface, lambda, p))
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

/// One-sided and symmetric Hausdorff distances in the mesh metric.
///
/// A one-sided value is `None` when its target set is empty; the symmetric
/// value is `None` when either set is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub sup_a_to_b: Option<f64>,
    pub sup_b_to_a: Option<f64>,
    pub symmetric: Option<f64>,
    pub a_empty: bool,
    pub b_empty: bool,
}

pub fn hausdorff(mesh: &TriangleMesh, a: &RegionLabeling, b: &RegionLabeling) -> Result<HausdorffReport> {
    let n = mesh.vertex_count();
    for l in [a, b] {
        if l.member.len() != n {
            return Err(Error::LengthMismatchField {
                expected: n,
                got: l.member.len(),
            });
        }
    }
    let (ia, ib) = (a.indices(), b.indices());
    if ia.is_empty() && ib.is_empty() {
        return Err(invalid("both sets are empty"));
    }
    let one_sided = |from: &[usize], to: &[usize]| -> Result<Option<f64>> {
        if to.is_empty() {
            return Ok(None);
        }
        let d = multi_source_distance(mesh, to)?;
        Ok(Some(from.iter().map(|&v| d.values[v]).fold(0.0, f64::max)))
    };
    let ab = one_sided(&ia, &ib)?;
    let ba = one_sided(&ib, &ia)?;
    let symmetric = match (ab, ba) {
        (Some(x), Some(y)) if !ia.is_empty() && !ib.is_empty() => Some(x.max(y)),
        _ => None,
    };
    Ok(HausdorffReport {
        sup_a_to_b: ab,
        sup_b_to_a: ba,
        symmetric,
        a_empty: ia.is_empty(),
        b_empty: ib.is_empty(),
    })
}
