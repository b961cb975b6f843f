//! The gradient-constrained problem
//!
//! ```text
//! minimize  uᵀ S u − m aᵀ u   subject to  |∇u|_f ≤ 1 on every face,  u = 0 on P
//! ```
//!
//! where `P` is the basepoint (closed surfaces) or the boundary (planar
//! domains). Solved by ADMM on the splitting `z_f = ∇u|_f`: the u-step is
//! one prefactored Poisson solve (because `Σ_f A_f G_fᵀ G_f = S`), the z-step
//! is a projection onto unit discs. Optimality is certified a posteriori by
//! a feasible primal point and the dual value of the face multipliers.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mesh::TriangleMesh;
use crate::operators::{GradientOperator, Operators};
use crate::sparse::{ReducedCholesky, ReducedFactor, SparseSym};
use faer::linalg::solvers::Solve;
use faer::Mat;
use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pinning {
    Basepoint(usize),
    ZeroOnBoundary,
}

#[derive(Debug, Clone)]
pub struct GradientProblem<'a> {
    pub mesh: &'a TriangleMesh,
    pub ops: &'a Operators,
    pub m: f64,
    pub pinning: Pinning,
}

impl<'a> GradientProblem<'a> {
    /// Pins the mesh basepoint on closed meshes and the boundary otherwise.
    pub fn new(mesh: &'a TriangleMesh, ops: &'a Operators, m: f64) -> Result<Self> {
        let pinning = if mesh.has_boundary() {
            Pinning::ZeroOnBoundary
        } else {
            Pinning::Basepoint(
                mesh.basepoint()
                    .ok_or_else(|| invalid("closed mesh needs a basepoint for the gradient problem"))?,
            )
        };
        let p = GradientProblem { mesh, ops, m, pinning };
        p.validate()?;
        Ok(p)
    }

    pub fn with_m(&self, m: f64) -> Result<Self> {
        let mut p = self.clone();
        p.m = m;
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.m >= 0.0) || !self.m.is_finite() {
            return Err(invalid(format!("m must be finite and nonnegative, got {}", self.m)));
        }
        match self.pinning {
            Pinning::Basepoint(b) if b >= self.mesh.vertex_count() => {
                Err(invalid(format!("basepoint {b} out of range")))
            }
            Pinning::ZeroOnBoundary if !self.mesh.has_boundary() => {
                Err(invalid("zero-on-boundary requires boundary vertices"))
            }
            _ => Ok(()),
        }
    }

    fn pinned(&self) -> Vec<bool> {
        match self.pinning {
            Pinning::Basepoint(b) => {
                let mut p = vec![false; self.mesh.vertex_count()];
                p[b] = true;
                p
            }
            Pinning::ZeroOnBoundary => self.mesh.boundary_flags().to_vec(),
        }
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        let load: f64 = u.iter().zip(&self.ops.lumped_area).map(|(x, a)| x * a).sum();
        self.ops.stiffness.quadratic_form(u) - self.m * load
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GradientConfig {
    pub tol_gap: f64,
    pub tol_feas: f64,
    /// `None` means 500·√n·100.
    pub max_iter: Option<usize>,
    /// Iterations between certificate evaluations.
    pub check_every: usize,
    pub relaxation: f64,
    /// Anderson acceleration memory; 0 disables acceleration.
    pub anderson_memory: usize,
}

impl Default for GradientConfig {
    fn default() -> Self {
        GradientConfig {
            tol_gap: 1e-7,
            tol_feas: 1e-6,
            max_iter: None,
            check_every: 10,
            relaxation: 1.6,
            anderson_memory: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradientReport {
    /// Feasible primal point (the iterate scaled into the constraint set).
    pub u: Vec<f64>,
    pub iterations: usize,
    pub energy: f64,
    pub dual_value: f64,
    /// `(energy − dual_value) / (|energy| + 1)`.
    pub relative_gap: f64,
    /// `max_f |∇u|_f − 1` of the returned `u` (≤ 0 up to round-off).
    pub feasibility: f64,
    /// Largest constraint violation of the raw iterate before scaling.
    pub iterate_violation: f64,
    pub max_grad: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub max_grad: f64,
    pub violating_faces: Vec<usize>,
    pub u_at_basepoint: Option<f64>,
}

/// Face-gradient check of an arbitrary field.
pub fn feasibility_report(mesh: &TriangleMesh, u: &[f64]) -> Result<FeasibilityReport> {
    mesh.check_field(u)?;
    let g = GradientOperator::new(mesh);
    let mut max_grad: f64 = 0.0;
    let mut violating = Vec::new();
    for f in 0..g.face_count() {
        let v = g.apply_face(f, u);
        let n = v[0].hypot(v[1]);
        max_grad = max_grad.max(n);
        if n > 1.0 + 1e-9 {
            violating.push(f);
        }
    }
    Ok(FeasibilityReport {
        max_grad,
        violating_faces: violating,
        u_at_basepoint: mesh.basepoint().map(|b| u[b]),
    })
}

/// ADMM solve; `initial` is an optional warm start.
pub fn solve_gradient_constrained(
    problem: &GradientProblem,
    config: &GradientConfig,
    initial: Option<&[f64]>,
) -> Result<GradientReport> {
    problem.validate()?;
    if !(config.tol_gap > 0.0 && config.tol_feas > 0.0) {
        return Err(invalid("tolerances must be positive"));
    }
    let n = problem.mesh.vertex_count();
    let s = &problem.ops.stiffness;
    let g = GradientOperator::new(problem.mesh);
    let nf = g.face_count();
    let areas = g.areas.clone();
    let pinned = problem.pinned();
    let zeros = vec![0.0; n];
    let factor = ReducedCholesky::new(s)?
        .factor(s, &pinned, 1.0)
        .map_err(|e| Error::Singular(format!("stiffness on unpinned vertices: {e}")))?;
    let load: Vec<f64> = problem.ops.lumped_area.iter().map(|a| problem.m * a).collect();
    let max_iter = config
        .max_iter
        .unwrap_or_else(|| (500.0 * (n as f64).sqrt() * 100.0) as usize)
        .max(1);

    let mut u = match initial {
        Some(u0) => {
            problem.mesh.check_field(u0)?;
            u0.iter().zip(&pinned).map(|(&x, &p)| if p { 0.0 } else { x }).collect()
        }
        None => zeros.clone(),
    };
    // ADMM state x = (z, w), one 2-vector of each per face
    let mut x = vec![0.0; 4 * nf];
    for (f, gz) in g.apply(&u).into_iter().enumerate() {
        let zf = project_unit(gz);
        x[2 * f] = zf[0];
        x[2 * f + 1] = zf[1];
    }
    let weights: Vec<f64> = (0..4 * nf).map(|k| areas[(k / 2) % nf]).collect();
    let mut rho = 1.0 + problem.m / 4.0;
    let mut accel = Anderson::new(config.anderson_memory, weights);
    let step = AdmmStep {
        g: &g,
        factor: &factor,
        stiffness: s,
        load: &load,
        zeros: &zeros,
        alpha: config.relaxation,
    };

    let mut best: Option<(Vec<f64>, f64, f64, f64)> = None; // u, energy, dual, rel gap
    let mut iterations = 0;
    let mut converged = false;
    let mut raw_violation = f64::INFINITY;
    while iterations < max_iter {
        iterations += 1;
        let (tx, u_new, primal_res, dual_res) = step.apply(&x, rho);
        u = u_new;
        let check = iterations % config.check_every.max(1) == 0 || iterations == max_iter;
        if check {
            let (uf, energy, raw) = feasible_point(problem, &g, &u);
            raw_violation = raw;
            let p: Vec<[f64; 2]> = (0..nf)
                .map(|f| [rho * tx[2 * (nf + f)], rho * tx[2 * (nf + f) + 1]])
                .collect();
            let dual = dual_value(problem, &g, &factor, &load, &p, &zeros);
            let rel = (energy - dual) / (energy.abs() + 1.0);
            if iterations % 500 == 0 {
                log::debug!(
                    "iteration {iterations}: gap {rel:e}, violation {raw:e}, residuals {primal_res:e}/{dual_res:e}, rho {rho}"
                );
            }
            if best.as_ref().map(|b| rel < b.3).unwrap_or(true) {
                best = Some((uf, energy, dual, rel));
            }
            if rel <= config.tol_gap {
                converged = true;
                break;
            }
        }
        let scale = if !check {
            1.0
        } else if primal_res > 10.0 * dual_res {
            2.0
        } else if dual_res > 10.0 * primal_res {
            0.5
        } else {
            1.0
        };
        if scale != 1.0 {
            // residual balancing changes the fixed-point map: restart acceleration
            rho *= scale;
            x = tx;
            for v in x[2 * nf..].iter_mut() {
                *v /= scale;
            }
            accel.clear();
        } else {
            x = accel.next(&x, tx);
        }
    }
    let (u, energy, dual, rel) = best.expect("at least one certificate evaluation");
    let max_grad = g.max_norm(&u);
    log::debug!("gradient solve: {iterations} iterations, relative gap {rel:e}, rho {rho}");
    Ok(GradientReport {
        u,
        iterations,
        energy,
        dual_value: dual,
        relative_gap: rel,
        feasibility: (max_grad - 1.0).max(0.0),
        iterate_violation: raw_violation,
        max_grad,
        converged: converged && (max_grad - 1.0) <= config.tol_feas,
    })
}

/// One ADMM iteration as a map on the state `(z, w)`.
struct AdmmStep<'a> {
    g: &'a GradientOperator,
    factor: &'a ReducedFactor,
    stiffness: &'a SparseSym,
    load: &'a [f64],
    zeros: &'a [f64],
    alpha: f64,
}

impl AdmmStep<'_> {
    /// Returns the next state, the u-iterate and the primal and dual
    /// residual norms.
    fn apply(&self, x: &[f64], rho: f64) -> (Vec<f64>, Vec<f64>, f64, f64) {
        let nf = self.g.face_count();
        let n = self.load.len();
        let (z, w) = x.split_at(2 * nf);
        // u-step: (2 + ρ) S u = m a + ρ Gᵀ A (z − w)
        let target: Vec<[f64; 2]> = (0..nf)
            .map(|f| [z[2 * f] - w[2 * f], z[2 * f + 1] - w[2 * f + 1]])
            .collect();
        let div = self.g.weighted_transpose(&target, n);
        let rhs: Vec<f64> = self
            .load
            .iter()
            .zip(&div)
            .map(|(l, d)| (l + rho * d) / (2.0 + rho))
            .collect();
        let u = self.factor.solve(self.stiffness, &rhs, self.zeros);
        // z-step with over-relaxation, then the scaled dual update
        let mut next = vec![0.0; 4 * nf];
        let (mut pr, mut dr) = (0.0, 0.0);
        for f in 0..nf {
            let gu = self.g.apply_face(f, &u);
            let a = self.g.areas[f];
            let zo = [z[2 * f], z[2 * f + 1]];
            let hat = [
                self.alpha * gu[0] + (1.0 - self.alpha) * zo[0],
                self.alpha * gu[1] + (1.0 - self.alpha) * zo[1],
            ];
            let zf = project_unit([hat[0] + w[2 * f], hat[1] + w[2 * f + 1]]);
            next[2 * f] = zf[0];
            next[2 * f + 1] = zf[1];
            next[2 * (nf + f)] = w[2 * f] + hat[0] - zf[0];
            next[2 * (nf + f) + 1] = w[2 * f + 1] + hat[1] - zf[1];
            pr += a * ((gu[0] - zf[0]).powi(2) + (gu[1] - zf[1]).powi(2));
            dr += a * ((zf[0] - zo[0]).powi(2) + (zf[1] - zo[1]).powi(2));
        }
        (next, u, pr.sqrt(), rho * dr.sqrt())
    }
}

/// Type-II Anderson acceleration of a fixed-point iteration with a
/// residual safeguard.
struct Anderson {
    memory: usize,
    weights: Vec<f64>,
    dx: VecDeque<Vec<f64>>,
    dg: VecDeque<Vec<f64>>,
    /// Gram matrix of `dg`, row `i` holding products with entries `0..=i`.
    gram: VecDeque<Vec<f64>>,
    prev: Option<(Vec<f64>, Vec<f64>)>,
    best_residual: f64,
}

impl Anderson {
    fn new(memory: usize, weights: Vec<f64>) -> Self {
        Anderson {
            memory,
            weights,
            dx: VecDeque::new(),
            dg: VecDeque::new(),
            gram: VecDeque::new(),
            prev: None,
            best_residual: f64::INFINITY,
        }
    }

    fn clear(&mut self) {
        self.dx.clear();
        self.dg.clear();
        self.gram.clear();
        self.prev = None;
        self.best_residual = f64::INFINITY;
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(&self.weights).map(|((x, y), w)| x * y * w).sum()
    }

    /// Next iterate given the current point `x` and its image `tx`.
    fn next(&mut self, x: &[f64], tx: Vec<f64>) -> Vec<f64> {
        if self.memory == 0 {
            return tx;
        }
        let gk: Vec<f64> = tx.iter().zip(x).map(|(a, b)| a - b).collect();
        let res = self.dot(&gk, &gk).sqrt();
        if res > 100.0 * self.best_residual {
            // extrapolation went astray: forget the history, take the plain step
            self.clear();
            return tx;
        }
        self.best_residual = self.best_residual.min(res);
        if let Some((xp, gp)) = self.prev.take() {
            if self.dx.len() == self.memory {
                self.dx.pop_front();
                self.dg.pop_front();
                self.gram.pop_front();
                for row in self.gram.iter_mut() {
                    row.remove(0);
                }
            }
            let new: Vec<f64> = gk.iter().zip(&gp).map(|(a, b)| a - b).collect();
            let mut row: Vec<f64> = self.dg.iter().map(|d| self.dot(d, &new)).collect();
            row.push(self.dot(&new, &new));
            self.gram.push_back(row);
            self.dx.push_back(x.iter().zip(&xp).map(|(a, b)| a - b).collect());
            self.dg.push_back(new);
        }
        self.prev = Some((x.to_vec(), gk.clone()));
        let k = self.dg.len();
        if k == 0 {
            return tx;
        }
        // least squares min |g − ΔG γ| by regularized normal equations
        let mut gram = Mat::<f64>::zeros(k, k);
        let mut rhs = Mat::<f64>::zeros(k, 1);
        for i in 0..k {
            for j in 0..=i {
                let v = self.gram[i][j];
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
            rhs[(i, 0)] = self.dot(&self.dg[i], &gk);
        }
        let trace: f64 = (0..k).map(|i| gram[(i, i)]).sum();
        for i in 0..k {
            gram[(i, i)] += 1e-10 * trace.max(f64::MIN_POSITIVE);
        }
        let gamma = gram.partial_piv_lu().solve(&rhs);
        if (0..k).any(|i| !gamma[(i, 0)].is_finite()) {
            self.clear();
            return tx;
        }
        let mut out = tx;
        for i in 0..k {
            let c = gamma[(i, 0)];
            for ((o, a), b) in out.iter_mut().zip(&self.dx[i]).zip(&self.dg[i]) {
                *o -= c * (a + b);
            }
        }
        out
    }
}

fn project_unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    if n > 1.0 {
        [v[0] / n, v[1] / n]
    } else {
        v
    }
}

/// Scales `u` into the feasible set; the pinned values stay zero.
/// Returns the scaled field, its energy and the raw violation.
fn feasible_point(problem: &GradientProblem, g: &GradientOperator, u: &[f64]) -> (Vec<f64>, f64, f64) {
    let mg = g.max_norm(u);
    let s = mg.max(1.0);
    let uf: Vec<f64> = u.iter().map(|x| x / s).collect();
    let e = problem.energy(&uf);
    (uf, e, (mg - 1.0).max(0.0))
}

/// Dual objective at face multipliers `p`:
/// `−Σ A_f |p_f| − ¼ cᵀ S⁻¹ c` with `c = m a − Gᵀ A p` on unpinned vertices.
fn dual_value(
    problem: &GradientProblem,
    g: &GradientOperator,
    factor: &ReducedFactor,
    load: &[f64],
    p: &[[f64; 2]],
    zeros: &[f64],
) -> f64 {
    let n = load.len();
    let gp = g.weighted_transpose(p, n);
    let pinned = factor.fixed();
    let c: Vec<f64> = (0..n).map(|i| if pinned[i] { 0.0 } else { load[i] - gp[i] }).collect();
    let x = factor.solve(&problem.ops.stiffness, &c, zeros);
    let quad: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    let support: f64 = g.areas.iter().zip(p).map(|(a, q)| a * q[0].hypot(q[1])).sum();
    -support - 0.25 * quad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::build_operators;
    use crate::surfaces::{flat_torus, unit_square_grid};

    #[test]
    fn zero_load_gives_zero() {
        let mesh = flat_torus(8);
        let ops = build_operators(&mesh).unwrap();
        let p = GradientProblem::new(&mesh, &ops, 0.0).unwrap();
        let r = solve_gradient_constrained(&p, &GradientConfig::default(), None).unwrap();
        assert!(r.converged);
        assert!(r.u.iter().all(|&x| x == 0.0));
        assert_eq!(r.energy, 0.0);
    }

    #[test]
    fn feasibility_of_simple_fields() {
        let mesh = unit_square_grid(4);
        let zero = feasibility_report(&mesh, &vec![0.0; mesh.vertex_count()]).unwrap();
        assert_eq!(zero.max_grad, 0.0);
        assert!(zero.violating_faces.is_empty());
        let u: Vec<f64> = mesh.positions().unwrap().iter().map(|p| 2.0 * p[0]).collect();
        let r = feasibility_report(&mesh, &u).unwrap();
        assert!((r.max_grad - 2.0).abs() < 1e-12);
        assert_eq!(r.violating_faces.len(), mesh.face_count());
    }

    #[test]
    fn small_load_is_unconstrained_poisson() {
        // with a tiny load the gradient bound is inactive: u solves 2 S u = m a
        let mesh = unit_square_grid(8);
        let ops = build_operators(&mesh).unwrap();
        let p = GradientProblem::new(&mesh, &ops, 0.5).unwrap();
        let r = solve_gradient_constrained(&p, &GradientConfig::default(), None).unwrap();
        assert!(r.converged, "gap {}", r.relative_gap);
        let fixed = mesh.boundary_flags().to_vec();
        let chol = ReducedCholesky::new(&ops.stiffness).unwrap();
        let f = chol.factor(&ops.stiffness, &fixed, 2.0).unwrap();
        let rhs: Vec<f64> = ops.lumped_area.iter().map(|a| 0.5 * a).collect();
        let exact = f.solve(&ops.stiffness, &rhs, &vec![0.0; mesh.vertex_count()]);
        for (a, b) in r.u.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn large_load_saturates_the_constraint() {
        let mesh = unit_square_grid(10);
        let ops = build_operators(&mesh).unwrap();
        let p = GradientProblem::new(&mesh, &ops, 200.0).unwrap();
        let r = solve_gradient_constrained(&p, &GradientConfig::default(), None).unwrap();
        assert!(r.converged, "gap {}", r.relative_gap);
        assert!(r.max_grad <= 1.0 + 1e-12);
        assert!(r.max_grad > 0.999);
        assert!(r.energy >= r.dual_value);
    }
}
