//! The discrete obstacle problem
//!
//! ```text
//! minimize  uᵀ S u − m aᵀ u   subject to  l ≤ u ≤ d
//! ```
//!
//! with `S` the cotangent stiffness and `a` the lumped areas. Projected SOR
//! gives a monotone first phase; a primal-dual active set iteration with
//! sparse Cholesky solves on the free vertices then reaches tight tolerances.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mesh::TriangleMesh;
use crate::operators::Operators;
use crate::sparse::ReducedCholesky;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    None,
    ZeroOnBoundary,
}

#[derive(Debug, Clone)]
pub struct ObstacleProblem<'a> {
    pub mesh: &'a TriangleMesh,
    pub ops: &'a Operators,
    /// Upper bound per vertex; `+∞` leaves a vertex unconstrained.
    pub obstacle: Vec<f64>,
    pub m: f64,
    pub boundary: BoundaryCondition,
    /// Optional lower bound `u ≥ 0`.
    pub lower_bound_zero: bool,
}

impl<'a> ObstacleProblem<'a> {
    /// Zero boundary values on meshes with boundary; lower bound 0 on closed
    /// meshes.
    pub fn new(mesh: &'a TriangleMesh, ops: &'a Operators, obstacle: Vec<f64>, m: f64) -> Result<Self> {
        let closed = !mesh.has_boundary();
        let p = ObstacleProblem {
            mesh,
            ops,
            obstacle,
            m,
            boundary: if closed {
                BoundaryCondition::None
            } else {
                BoundaryCondition::ZeroOnBoundary
            },
            lower_bound_zero: closed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_boundary(mut self, bc: BoundaryCondition) -> Result<Self> {
        self.boundary = bc;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lower_bound(mut self, on: bool) -> Self {
        self.lower_bound_zero = on;
        self
    }

    pub fn with_m(&self, m: f64) -> Result<Self> {
        let mut p = self.clone();
        p.m = m;
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.mesh.vertex_count();
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(invalid(format!("m must be positive and finite, got {}", self.m)));
        }
        if self.obstacle.len() != n {
            return Err(Error::LengthMismatchField {
                expected: n,
                got: self.obstacle.len(),
            });
        }
        if let Some(i) = self.obstacle.iter().position(|d| d.is_nan() || *d == f64::NEG_INFINITY) {
            return Err(Error::NonFinite(i));
        }
        if self.boundary == BoundaryCondition::ZeroOnBoundary && !self.mesh.has_boundary() {
            return Err(invalid("zero-on-boundary requires a mesh with boundary vertices"));
        }
        if self.boundary == BoundaryCondition::None && self.obstacle.iter().all(|d| d.is_infinite()) {
            return Err(Error::Singular(
                "no finite obstacle and no boundary condition: the energy is unbounded \
                 (pure Neumann problem with a nonzero load)"
                    .into(),
            ));
        }
        Ok(())
    }

    fn fixed(&self) -> Vec<bool> {
        match self.boundary {
            BoundaryCondition::None => vec![false; self.mesh.vertex_count()],
            BoundaryCondition::ZeroOnBoundary => self.mesh.boundary_flags().to_vec(),
        }
    }

    fn lower(&self, i: usize) -> f64 {
        if self.lower_bound_zero { 0.0 } else { f64::NEG_INFINITY }.min(self.obstacle[i])
    }

    /// uᵀ S u − m aᵀ u
    pub fn energy(&self, u: &[f64]) -> f64 {
        let load: f64 = u.iter().zip(&self.ops.lumped_area).map(|(x, a)| x * a).sum();
        self.ops.stiffness.quadratic_form(u) - self.m * load
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub tol: f64,
    /// Total iteration budget (sweeps plus active-set steps); `None` means
    /// 200 per vertex.
    pub max_iter: Option<usize>,
    pub omega: f64,
    /// Projected SOR sweeps before switching to the active-set iteration.
    pub sweeps_before_active_set: usize,
    pub active_set: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-8,
            max_iter: None,
            omega: 1.5,
            sweeps_before_active_set: 10,
            active_set: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktResidual {
    pub infeasibility: f64,
    pub stationarity: f64,
    pub complementarity: f64,
}

impl KktResidual {
    pub fn max(&self) -> f64 {
        self.infeasibility.max(self.stationarity).max(self.complementarity)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub energy: f64,
    pub kkt_infeasibility: f64,
    pub kkt_stationarity: f64,
    pub kkt_complementarity: f64,
    /// Contact set `{u = d}` up to the classification threshold.
    pub active: Vec<bool>,
    pub converged: bool,
    /// Energy after each projected sweep (monotone nonincreasing).
    pub energy_history: Vec<f64>,
}

/// Relative gap below which a vertex counts as touching the obstacle.
pub const ACTIVE_THRESHOLD: f64 = 1e-10;

fn touching(gap: f64, bound: f64) -> bool {
    bound.is_finite() && gap <= ACTIVE_THRESHOLD * (1.0 + bound.abs())
}

/// KKT residuals of `u` for the problem.
///
/// With `μ = (m a − 2 S u) / a` (the multiplier density):
/// infeasibility is the largest bound violation, stationarity is `max |μ|`
/// over vertices strictly between their bounds, and complementarity is the
/// natural residual `max |u − clamp(u + μ, l, d)|`, which also catches
/// multipliers of the wrong sign on the contact set. Vertices held by the
/// boundary condition only contribute to infeasibility.
pub fn kkt_residual(problem: &ObstacleProblem, u: &[f64]) -> KktResidual {
    let grad = problem.ops.stiffness.matvec(u);
    let fixed = problem.fixed();
    let mut r = KktResidual {
        infeasibility: 0.0,
        stationarity: 0.0,
        complementarity: 0.0,
    };
    for i in 0..u.len() {
        let (d, l) = (problem.obstacle[i], problem.lower(i));
        if fixed[i] {
            r.infeasibility = r.infeasibility.max(u[i].abs());
            continue;
        }
        r.infeasibility = r.infeasibility.max(u[i] - d).max(l - u[i]);
        let a = problem.ops.lumped_area[i];
        let mu = (problem.m * a - 2.0 * grad[i]) / a;
        let at_upper = touching(d - u[i], d);
        let at_lower = touching(u[i] - l, l);
        if !at_upper && !at_lower {
            r.stationarity = r.stationarity.max(mu.abs());
        }
        let proj = (u[i] + mu).min(d).max(l);
        r.complementarity = r.complementarity.max((u[i] - proj).abs());
    }
    r
}

/// Obstacle solver holding the symbolic factorization of the stiffness
/// pattern, reusable across problems on the same mesh (e.g. an m-sweep).
pub struct ObstacleSolver {
    chol: ReducedCholesky,
}

impl ObstacleSolver {
    pub fn new(ops: &Operators) -> Result<Self> {
        Ok(ObstacleSolver {
            chol: ReducedCholesky::new(&ops.stiffness)?,
        })
    }

    /// Solves from `initial` (projected onto the feasible set) or from the
    /// lower bound / zero.
    pub fn solve(
        &self,
        problem: &ObstacleProblem,
        config: &SolveConfig,
        initial: Option<&[f64]>,
    ) -> Result<SolveReport> {
        problem.validate()?;
        if !(config.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if !(config.omega > 0.0 && config.omega < 2.0) {
            return Err(invalid("omega must lie in (0, 2)"));
        }
        let n = problem.mesh.vertex_count();
        let max_iter = config.max_iter.unwrap_or(200 * n).max(1);
        let fixed = problem.fixed();
        let mut u = match initial {
            Some(u0) => {
                problem.mesh.check_field(u0)?;
                u0.to_vec()
            }
            None => vec![0.0; n],
        };
        for i in 0..n {
            u[i] = if fixed[i] {
                0.0
            } else {
                u[i].min(problem.obstacle[i]).max(problem.lower(i))
            };
        }

        let mut iterations = 0;
        let mut history = Vec::new();
        let mut converged = false;
        let mut last_kkt;

        let sweeps = if config.active_set {
            config.sweeps_before_active_set.min(max_iter)
        } else {
            max_iter
        };
        loop {
            last_kkt = kkt_residual(problem, &u);
            if last_kkt.max() <= config.tol {
                converged = true;
                break;
            }
            if iterations >= sweeps {
                break;
            }
            sor_sweep(problem, &fixed, config.omega, &mut u);
            iterations += 1;
            history.push(problem.energy(&u));
        }

        if !converged && config.active_set && iterations < max_iter {
            match self.active_set(problem, &fixed, &u, config.tol, max_iter - iterations) {
                Ok((v, steps, kkt)) => {
                    iterations += steps;
                    if kkt.max() <= config.tol {
                        u = v;
                        last_kkt = kkt;
                        converged = true;
                    }
                }
                Err(e) => log::warn!("active-set phase failed ({e}); continuing with projected sweeps"),
            }
            // fall back to projected sweeps if the active-set phase stalled
            while !converged && iterations < max_iter {
                sor_sweep(problem, &fixed, config.omega, &mut u);
                iterations += 1;
                history.push(problem.energy(&u));
                last_kkt = kkt_residual(problem, &u);
                converged = last_kkt.max() <= config.tol;
            }
        }

        let active = (0..n)
            .map(|i| !fixed[i] && touching(problem.obstacle[i] - u[i], problem.obstacle[i]))
            .collect();
        Ok(SolveReport {
            energy: problem.energy(&u),
            u,
            iterations,
            kkt_infeasibility: last_kkt.infeasibility,
            kkt_stationarity: last_kkt.stationarity,
            kkt_complementarity: last_kkt.complementarity,
            active,
            converged,
            energy_history: history,
        })
    }

    /// Primal-dual active set iteration started from `u0`. Returns the final
    /// iterate, the number of linear solves and its KKT residual.
    fn active_set(
        &self,
        problem: &ObstacleProblem,
        fixed: &[bool],
        u0: &[f64],
        tol: f64,
        budget: usize,
    ) -> Result<(Vec<f64>, usize, KktResidual)> {
        let n = u0.len();
        let s = &problem.ops.stiffness;
        let area = &problem.ops.lumped_area;
        let diag = s.diagonal();
        let rhs: Vec<f64> = area.iter().map(|a| problem.m * a).collect();
        let mut u = u0.to_vec();
        // 0 free, 1 upper, 2 lower
        let mut sets: Vec<u8> = vec![u8::MAX; n];
        let mut best: Option<(Vec<f64>, KktResidual)> = None;
        let limit = budget.min(200);
        for step in 1..=limit {
            let su = s.matvec(&u);
            let mut next = vec![0u8; n];
            for i in 0..n {
                if fixed[i] {
                    continue;
                }
                let lam = rhs[i] - 2.0 * su[i];
                let c = 2.0 * diag[i];
                let (d, l) = (problem.obstacle[i], problem.lower(i));
                if d.is_finite() && lam + c * (u[i] - d) > 0.0 {
                    next[i] = 1;
                } else if l.is_finite() && -lam + c * (l - u[i]) > 0.0 {
                    next[i] = 2;
                }
            }
            if next == sets {
                let kkt = kkt_residual(problem, &u);
                return Ok((u, step - 1, kkt));
            }
            sets = next;
            let held: Vec<bool> = (0..n).map(|i| fixed[i] || sets[i] != 0).collect();
            let values: Vec<f64> = (0..n)
                .map(|i| match (fixed[i], sets[i]) {
                    (true, _) => 0.0,
                    (false, 1) => problem.obstacle[i],
                    (false, 2) => problem.lower(i),
                    _ => 0.0,
                })
                .collect();
            let factor = self.chol.factor(s, &held, 2.0)?;
            u = factor.solve(s, &rhs, &values);
            let kkt = kkt_residual(problem, &u);
            if kkt.max() <= tol {
                return Ok((u, step, kkt));
            }
            if best.as_ref().map(|b| kkt.max() < b.1.max()).unwrap_or(true) {
                best = Some((u.clone(), kkt));
            }
        }
        log::warn!("active-set iteration did not settle within {limit} steps");
        let (mut v, _) = best.ok_or_else(|| Error::Singular("no active-set step taken".into()))?;
        for i in 0..n {
            v[i] = if fixed[i] {
                0.0
            } else {
                v[i].min(problem.obstacle[i]).max(problem.lower(i))
            };
        }
        let kkt = kkt_residual(problem, &v);
        Ok((v, limit, kkt))
    }
}

/// One projected SOR sweep in vertex order.
fn sor_sweep(problem: &ObstacleProblem, fixed: &[bool], omega: f64, u: &mut [f64]) {
    let s = &problem.ops.stiffness;
    for i in 0..u.len() {
        if fixed[i] {
            continue;
        }
        let (cols, vals) = s.row(i);
        let mut off = 0.0;
        let mut sii = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i {
                sii = v;
            } else {
                off += v * u[j];
            }
        }
        if sii <= 0.0 {
            continue;
        }
        let target = (0.5 * problem.m * problem.ops.lumped_area[i] - off) / sii;
        let relaxed = u[i] + omega * (target - u[i]);
        u[i] = relaxed.min(problem.obstacle[i]).max(problem.lower(i));
    }
}

/// Solves with a fresh [`ObstacleSolver`].
pub fn solve_obstacle(problem: &ObstacleProblem, config: &SolveConfig) -> Result<SolveReport> {
    ObstacleSolver::new(problem.ops)?.solve(problem, config, None)
}
