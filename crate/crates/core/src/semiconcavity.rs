//! Sampling estimate of the semiconcavity constant along geodesic chords.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSurface {
    UnitSphere,
    FlatUnitTorus,
    Planar,
}

impl std::str::FromStr for SampleSurface {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit_sphere" | "sphere" => Ok(SampleSurface::UnitSphere),
            "flat_unit_torus" | "torus" => Ok(SampleSurface::FlatUnitTorus),
            "planar" | "plane" => Ok(SampleSurface::Planar),
            other => Err(crate::Error::UnknownSurface(format!(
                "{other}: geodesic sampling supports unit_sphere, flat_unit_torus and planar"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Curve {
    /// `cos t · e1 + sin t · e2`
    GreatCircle { e1: [f64; 3], e2: [f64; 3] },
    /// `origin + t · dir`, reduced mod 1 on the torus
    Line {
        origin: [f64; 2],
        dir: [f64; 2],
        periodic: bool,
    },
}

impl Curve {
    fn at(&self, t: f64) -> [f64; 3] {
        match *self {
            Curve::GreatCircle { e1, e2 } => {
                let (s, c) = t.sin_cos();
                [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]]
            }
            Curve::Line { origin, dir, periodic } => {
                let mut x = origin[0] + t * dir[0];
                let mut y = origin[1] + t * dir[1];
                if periodic {
                    x = x.rem_euclid(1.0);
                    y = y.rem_euclid(1.0);
                }
                [x, y, 0.0]
            }
        }
    }
}

/// A unit-speed geodesic segment sampled at increasing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample {
    pub id: usize,
    pub surface: SampleSurface,
    pub params: Vec<f64>,
    pub points: Vec<[f64; 3]>,
    pub exclusion_radius: f64,
    curve: Curve,
}

impl GeodesicSample {
    pub fn point_at(&self, t: f64) -> [f64; 3] {
        self.curve.at(t)
    }
}

/// Distance to the basepoint: north pole on the sphere, origin on the torus
/// and in the plane.
pub fn basepoint_distance(surface: SampleSurface, p: [f64; 3]) -> f64 {
    match surface {
        SampleSurface::UnitSphere => crate::surfaces::sphere_distance([0.0, 0.0, 1.0], p),
        SampleSurface::FlatUnitTorus => crate::surfaces::torus_distance([0.0, 0.0], [p[0], p[1]]),
        SampleSurface::Planar => p[0].hypot(p[1]),
    }
}

/// Number of points per sampled segment.
pub const POINTS_PER_SAMPLE: usize = 101;

/// Random geodesic segments of length `max_length`, each cut down to its
/// longest run of sample points outside the ball of radius `rho` around the
/// basepoint. Segments with fewer than three remaining points are dropped
/// and redrawn.
pub fn sample_geodesics(
    surface: SampleSurface,
    count: usize,
    max_length: f64,
    rho: f64,
    seed: u64,
) -> Result<Vec<GeodesicSample>> {
    if !(max_length > 0.0 && max_length.is_finite()) || !(rho >= 0.0) {
        return Err(invalid("max_length must be positive and rho nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count + 100 {
            return Err(invalid("exclusion ball leaves no room for geodesic samples"));
        }
        let (curve, t0) = match surface {
            SampleSurface::UnitSphere => {
                let n = random_unit3(&mut rng);
                let e1 = orthonormal(n);
                let e2 = cross(n, e1);
                (Curve::GreatCircle { e1, e2 }, rng.gen_range(0.0..TAU))
            }
            SampleSurface::FlatUnitTorus => {
                let a: f64 = rng.gen_range(0.0..TAU);
                let origin = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
                (
                    Curve::Line {
                        origin,
                        dir: [a.cos(), a.sin()],
                        periodic: true,
                    },
                    0.0,
                )
            }
            SampleSurface::Planar => {
                let a: f64 = rng.gen_range(0.0..TAU);
                let origin = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                (
                    Curve::Line {
                        origin,
                        dir: [a.cos(), a.sin()],
                        periodic: false,
                    },
                    -0.5 * max_length,
                )
            }
        };
        let step = max_length / (POINTS_PER_SAMPLE - 1) as f64;
        let params: Vec<f64> = (0..POINTS_PER_SAMPLE).map(|i| t0 + i as f64 * step).collect();
        let outside: Vec<bool> = params
            .iter()
            .map(|&t| rho == 0.0 || basepoint_distance(surface, curve.at(t)) >= rho)
            .collect();
        let (mut best, mut run_start) = ((0, 0), 0);
        for i in 0..=outside.len() {
            if i == outside.len() || !outside[i] {
                if i - run_start > best.1 - best.0 {
                    best = (run_start, i);
                }
                run_start = i + 1;
            }
        }
        if best.1 - best.0 < 3 {
            continue;
        }
        let params = params[best.0..best.1].to_vec();
        let points = params.iter().map(|&t| curve.at(t)).collect();
        out.push(GeodesicSample {
            id: out.len(),
            surface,
            params,
            points,
            exclusion_radius: rho,
            curve,
        });
    }
    Ok(out)
}

fn random_unit3(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let a: f64 = rng.gen_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    [s * a.cos(), s * a.sin(), z]
}

fn orthonormal(n: [f64; 3]) -> [f64; 3] {
    let t = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let c = cross(n, t);
    let l = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    [c[0] / l, c[1] / l, c[2] / l]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstChord {
    pub sample: usize,
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiconcavityReport {
    pub c_hat: f64,
    pub worst: Option<WorstChord>,
    pub samples: usize,
    pub chords: usize,
}

/// `{0.1, 0.2, …, 0.9}`.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..10).map(|j| j as f64 / 10.0).collect()
}

/// Largest chord quotient
/// `((1−λ)u(γ(a)) + λu(γ(b)) − u(γ((1−λ)a + λb))) / (λ(1−λ)(b−a)²)`
/// over chords between sample points at index distances 1, 2, 4, … and the
/// given λ values, with a local λ refinement at each sample's worst chord.
/// Chords shorter than `min_chord` are skipped.
pub fn estimate_semiconcavity(
    u: &dyn Fn([f64; 3]) -> f64,
    samples: &[GeodesicSample],
    lambdas: &[f64],
    min_chord: f64,
) -> Result<SemiconcavityReport> {
    if samples.is_empty() {
        return Err(invalid("no geodesic samples"));
    }
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(invalid("lambda grid must lie in (0, 1)"));
    }
    let quotient = |s: &GeodesicSample, ua: f64, ub: f64, a: f64, b: f64, l: f64| {
        let mid = u(s.point_at((1.0 - l) * a + l * b));
        ((1.0 - l) * ua + l * ub - mid) / (l * (1.0 - l) * (b - a) * (b - a))
    };
    let mut c_hat = f64::NEG_INFINITY;
    let mut worst = None;
    let mut chords = 0usize;
    for s in samples {
        let vals: Vec<f64> = s.points.iter().map(|&p| u(p)).collect();
        let n = s.params.len();
        let mut local: Option<(f64, usize, usize, f64)> = None;
        let mut len = 1;
        while len < n {
            let stride = (len / 4).max(1);
            let mut i = 0;
            while i + len < n {
                let (a, b) = (s.params[i], s.params[i + len]);
                if b - a >= min_chord {
                    chords += 1;
                    for &l in lambdas {
                        let q = quotient(s, vals[i], vals[i + len], a, b, l);
                        if local.is_none_or(|w| q > w.0) {
                            local = Some((q, i, i + len, l));
                        }
                    }
                }
                i += stride;
            }
            len = if len * 2 < n - 1 || len == n - 1 {
                len * 2
            } else {
                n - 1
            };
        }
        let Some((mut q, i, j, mut lambda)) = local else {
            continue;
        };
        let (a, b) = (s.params[i], s.params[j]);
        let centre = lambda;
        for k in -5..=5 {
            let l = centre + 0.01 * k as f64;
            if l > 0.0 && l < 1.0 {
                let r = quotient(s, vals[i], vals[j], a, b, l);
                if r > q {
                    q = r;
                    lambda = l;
                }
            }
        }
        if q > c_hat {
            c_hat = q;
            worst = Some(WorstChord {
                sample: s.id,
                a,
                b,
                lambda,
            });
        }
    }
    if chords == 0 {
        return Err(invalid("every chord is shorter than the minimum chord length"));
    }
    Ok(SemiconcavityReport {
        c_hat,
        worst,
        samples: samples.len(),
        chords,
    })
}

/// Piecewise-linear evaluation of a vertex field on an embedded mesh at the
/// closest point of the surface. Faces are bucketed on a uniform grid.
pub struct MeshInterpolator<'a> {
    mesh: &'a TriangleMesh,
    lo: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    buckets: Vec<Vec<usize>>,
}

impl<'a> MeshInterpolator<'a> {
    pub fn new(mesh: &'a TriangleMesh) -> Result<Self> {
        let pos = mesh
            .positions()
            .ok_or_else(|| invalid("interpolation needs vertex positions"))?;
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in pos {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let cell = 2.0 * mesh.mean_edge_length();
        let dims = [0, 1, 2].map(|k| (((hi[k] - lo[k]) / cell).floor() as usize + 1).min(4096));
        let mut buckets = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        let index = |c: [usize; 3]| (c[0] * dims[1] + c[1]) * dims[2] + c[2];
        let to_cell = |x: f64, k: usize| (((x - lo[k]) / cell).floor().max(0.0) as usize).min(dims[k] - 1);
        for (f, tri) in mesh.faces().iter().enumerate() {
            let mut a = [usize::MAX; 3];
            let mut b = [0usize; 3];
            for &v in tri {
                for k in 0..3 {
                    let c = to_cell(pos[v][k], k);
                    a[k] = a[k].min(c);
                    b[k] = b[k].max(c);
                }
            }
            for i in a[0]..=b[0] {
                for j in a[1]..=b[1] {
                    for l in a[2]..=b[2] {
                        buckets[index([i, j, l])].push(f);
                    }
                }
            }
        }
        Ok(MeshInterpolator {
            mesh,
            lo,
            cell,
            dims,
            buckets,
        })
    }

    /// Closest face and barycentric coordinates of the closest point.
    pub fn locate(&self, p: [f64; 3]) -> (usize, [f64; 3], f64) {
        let pos = self.mesh.positions().expect("checked in new");
        let c = [0, 1, 2].map(|k| ((p[k] - self.lo[k]) / self.cell).floor() as i64);
        let mut best = (usize::MAX, [0.0; 3], f64::INFINITY);
        let max_ring = *self.dims.iter().max().expect("three dims") as i64;
        for ring in 0..=max_ring {
            // every point within ring·cell of p has been covered
            if best.0 != usize::MAX && best.2 <= (ring as f64 - 1.0).max(0.0) * self.cell {
                break;
            }
            for i in c[0] - ring..=c[0] + ring {
                for j in c[1] - ring..=c[1] + ring {
                    for l in c[2] - ring..=c[2] + ring {
                        let on_shell = [i - c[0], j - c[1], l - c[2]].iter().any(|d| d.abs() == ring);
                        if !on_shell {
                            continue;
                        }
                        let idx = [i, j, l];
                        if (0..3).any(|k| idx[k] < 0 || idx[k] >= self.dims[k] as i64) {
                            continue;
                        }
                        let b = (idx[0] as usize * self.dims[1] + idx[1] as usize) * self.dims[2] + idx[2] as usize;
                        for &f in &self.buckets[b] {
                            let t = self.mesh.faces()[f];
                            let (bary, d) = closest_on_triangle(p, pos[t[0]], pos[t[1]], pos[t[2]]);
                            if d < best.2 || (d == best.2 && f < best.0) {
                                best = (f, bary, d);
                            }
                        }
                    }
                }
            }
        }
        best
    }

    pub fn eval(&self, values: &[f64], p: [f64; 3]) -> f64 {
        let (f, w, _) = self.locate(p);
        let t = self.mesh.faces()[f];
        w[0] * values[t[0]] + w[1] * values[t[1]] + w[2] * values[t[2]]
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Closest point on triangle `abc` as barycentric weights, and its distance.
fn closest_on_triangle(p: [f64; 3], a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> ([f64; 3], f64) {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let (d1, d2) = (dot(ab, ap), dot(ac, ap));
    let w = if d1 <= 0.0 && d2 <= 0.0 {
        [1.0, 0.0, 0.0]
    } else {
        let bp = sub(p, b);
        let (d3, d4) = (dot(ab, bp), dot(ac, bp));
        if d3 >= 0.0 && d4 <= d3 {
            [0.0, 1.0, 0.0]
        } else {
            let cp = sub(p, c);
            let (d5, d6) = (dot(ab, cp), dot(ac, cp));
            let vc = d1 * d4 - d3 * d2;
            let vb = d5 * d2 - d1 * d6;
            let va = d3 * d6 - d5 * d4;
            if d6 >= 0.0 && d5 <= d6 {
                [0.0, 0.0, 1.0]
            } else if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
                let v = d1 / (d1 - d3);
                [1.0 - v, v, 0.0]
            } else if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
                let v = d2 / (d2 - d6);
                [1.0 - v, 0.0, v]
            } else if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
                let v = (d4 - d3) / ((d4 - d3) + (d5 - d6));
                [0.0, 1.0 - v, v]
            } else {
                let den = 1.0 / (va + vb + vc);
                let (v, w) = (vb * den, vc * den);
                [1.0 - v - w, v, w]
            }
        }
    };
    let q = [0, 1, 2].map(|k| w[0] * a[k] + w[1] * b[k] + w[2] * c[k]);
    let d = sub(p, q);
    (w, dot(d, d).sqrt())
}

/// Piecewise-linear evaluation on the `n × n` flat torus grid, matching the
/// diagonal layout of [`crate::surfaces::flat_torus`].
pub fn torus_grid_eval(n: usize, values: &[f64], p: [f64; 3]) -> f64 {
    let x = p[0].rem_euclid(1.0) * n as f64;
    let y = p[1].rem_euclid(1.0) * n as f64;
    let (i, j) = ((x.floor() as usize).min(n - 1), (y.floor() as usize).min(n - 1));
    let (fx, fy) = (x - i as f64, y - j as f64);
    let v = |a: usize, b: usize| values[crate::surfaces::torus_vertex(n, a, b)];
    let (u00, u10, u11, u01) = (v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1));
    let h = 1.0 / n as f64;
    let cx = (i as f64 + 0.5) * h - 0.5;
    let cy = (j as f64 + 0.5) * h - 0.5;
    if cx * cy > 0.0 {
        if fx >= fy {
            u00 + fx * (u10 - u00) + fy * (u11 - u10)
        } else {
            u00 + fy * (u01 - u00) + fx * (u11 - u01)
        }
    } else if fx + fy <= 1.0 {
        u00 + fx * (u10 - u00) + fy * (u01 - u00)
    } else {
        u11 + (1.0 - fx) * (u01 - u11) + (1.0 - fy) * (u10 - u11)
    }
}
