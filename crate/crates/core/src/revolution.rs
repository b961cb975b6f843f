//! Rotation-invariant reduction to weighted 1-D problems on surfaces of
//! revolution, `∫ (ρ'² − mρ) r dt` over `ρ(0) = 0`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Meridian profile `t ↦ r(t)` of a surface of revolution, `t` arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevolutionProfile {
    pub name: String,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
}

impl RevolutionProfile {
    pub fn new(name: impl Into<String>, t: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        if t.len() != r.len() {
            return Err(Error::LengthMismatchField {
                expected: t.len(),
                got: r.len(),
            });
        }
        let n = t.len();
        if n < 3 {
            return Err(invalid("profile needs at least three nodes"));
        }
        if let Some(i) = t.iter().chain(&r).position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i % n));
        }
        if t[0] != 0.0 || r[0] != 0.0 {
            return Err(Error::InfeasibleProfile(
                "profile must start at a pole: t(0) = r(0) = 0".into(),
            ));
        }
        for i in 0..n - 1 {
            let dt = t[i + 1] - t[i];
            if dt <= 0.0 {
                return Err(Error::InfeasibleProfile(format!("t not increasing at node {i}")));
            }
            if ((r[i + 1] - r[i]) / dt).abs() > 1.0 + 1e-9 {
                return Err(Error::InfeasibleProfile(format!(
                    "|dr/dt| > 1 on interval {i}: a unit-speed meridian cannot have this radius profile"
                )));
            }
        }
        if let Some(i) = (1..n - 1).find(|&i| r[i] <= 0.0) {
            return Err(Error::InfeasibleProfile(format!(
                "r must be positive inside, r({}) = {}",
                t[i], r[i]
            )));
        }
        if r[n - 1] < 0.0 {
            return Err(Error::InfeasibleProfile("negative end radius".into()));
        }
        Ok(RevolutionProfile {
            name: name.into(),
            t,
            r,
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.t.last().expect("nonempty")
    }

    /// Trapezoidal weights of `∫ · r dt`.
    pub fn node_weights(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.t[i] - self.t[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.t[i + 1] - self.t[i] } else { 0.0 };
                self.r[i] * 0.5 * (left + right)
            })
            .collect()
    }

    /// Interval coefficients `r_mid / Δt` of the Dirichlet term.
    fn couplings(&self) -> Vec<f64> {
        (0..self.len() - 1)
            .map(|k| 0.5 * (self.r[k] + self.r[k + 1]) / (self.t[k + 1] - self.t[k]))
            .collect()
    }

    /// `Σ c_k (Δρ_k)² − m Σ w_i ρ_i`.
    pub fn energy(&self, rho: &[f64], m: f64) -> f64 {
        let c = self.couplings();
        let w = self.node_weights();
        let dir: f64 = c
            .iter()
            .enumerate()
            .map(|(k, ck)| ck * (rho[k + 1] - rho[k]).powi(2))
            .sum();
        dir - m * w.iter().zip(rho).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn max_slope(&self) -> f64 {
        self.r
            .windows(2)
            .zip(self.t.windows(2))
            .map(|(r, t)| ((r[1] - r[0]) / (t[1] - t[0])).abs())
            .fold(0.0, f64::max)
    }
}

/// Unit sphere, `r = sin t` on `[0, π]`.
pub fn sphere_profile(nt: usize) -> Result<RevolutionProfile> {
    if nt < 3 {
        return Err(invalid("nt must be at least 3"));
    }
    let t: Vec<f64> = (0..nt).map(|i| PI * i as f64 / (nt - 1) as f64).collect();
    let mut r: Vec<f64> = t.iter().map(|x| x.sin()).collect();
    r[nt - 1] = 0.0;
    RevolutionProfile::new(format!("sphere({nt})"), t, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DumbbellParams {
    pub neck_r: f64,
    pub neck_len: f64,
    pub bulb_r: f64,
    pub bulb_len: f64,
    pub nt: usize,
    /// Length of each bulb-to-neck transition; defaults to the shortest one
    /// with `|r'| ≤ 1`, `π(bulb_r − neck_r)/2`.
    pub transition_len: Option<f64>,
}

impl DumbbellParams {
    pub fn new(neck_r: f64, neck_len: f64, bulb_r: f64, bulb_len: f64, nt: usize) -> Self {
        DumbbellParams {
            neck_r,
            neck_len,
            bulb_r,
            bulb_len,
            nt,
            transition_len: None,
        }
    }
}

/// Two capped cylinders of radius `bulb_r` joined through a neck of radius
/// `neck_r` by cosine transitions. The profile is C¹ with `|r'| ≤ 1`.
pub fn dumbbell_profile(p: DumbbellParams) -> Result<RevolutionProfile> {
    let DumbbellParams {
        neck_r,
        neck_len,
        bulb_r,
        bulb_len,
        nt,
        transition_len,
    } = p;
    if !(neck_r > 0.0 && neck_r < bulb_r && neck_len >= 0.0 && bulb_len >= 0.0) || !bulb_r.is_finite() {
        return Err(invalid("dumbbell needs 0 < neck_r < bulb_r and nonnegative lengths"));
    }
    if nt < 16 {
        return Err(invalid("nt must be at least 16"));
    }
    let min_tr = FRAC_PI_2 * (bulb_r - neck_r);
    let tr = transition_len.unwrap_or(min_tr);
    if tr < min_tr * (1.0 - 1e-12) {
        return Err(Error::InfeasibleProfile(format!(
            "transition of length {tr} needs |r'| = {} > 1; minimum length is {min_tr}",
            min_tr / tr
        )));
    }
    let cap = FRAC_PI_2 * bulb_r;
    // breakpoints: cap, bulb, transition, neck, transition, bulb, cap
    let lens = [cap, bulb_len, tr, neck_len, tr, bulb_len, cap];
    let mut ends = [0.0; 7];
    let mut acc = 0.0;
    for (k, l) in lens.iter().enumerate() {
        acc += l;
        ends[k] = acc;
    }
    let total = acc;
    let radius = |t: f64| {
        let s = t.min(total - t);
        if s <= ends[0] {
            bulb_r * (s / bulb_r).sin()
        } else if s <= ends[1] {
            bulb_r
        } else if s <= ends[2] {
            let x = (s - ends[1]) / tr;
            neck_r + (bulb_r - neck_r) * 0.5 * (1.0 + (PI * x).cos())
        } else {
            neck_r
        }
    };
    let t: Vec<f64> = (0..nt).map(|i| total * i as f64 / (nt - 1) as f64).collect();
    let mut r: Vec<f64> = t.iter().map(|&x| radius(x)).collect();
    r[0] = 0.0;
    r[nt - 1] = 0.0;
    RevolutionProfile::new(
        format!("dumbbell(neck_r={neck_r}, neck_len={neck_len}, bulb_r={bulb_r}, bulb_len={bulb_len}, nt={nt})"),
        t,
        r,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode1D {
    Obstacle,
    Gradient,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solve1DConfig {
    pub max_iter: usize,
}

impl Default for Solve1DConfig {
    fn default() -> Self {
        Solve1DConfig { max_iter: 1000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solve1DReport {
    pub mode: Mode1D,
    pub rho: Vec<f64>,
    pub sup_gradient: f64,
    pub energy: f64,
    pub kkt_infeasibility: f64,
    pub kkt_stationarity: f64,
    pub kkt_complementarity: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn sup_gradient(profile: &RevolutionProfile, rho: &[f64]) -> f64 {
    rho.windows(2)
        .zip(profile.t.windows(2))
        .map(|(p, t)| ((p[1] - p[0]) / (t[1] - t[0])).abs())
        .fold(0.0, f64::max)
}

/// Solves a symmetric tridiagonal system (`diag`, `off[k]` couples k, k+1).
fn thomas(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut b = diag[0];
    c[0] = if n > 1 { off[0] / b } else { 0.0 };
    d[0] = rhs[0] / b;
    for i in 1..n {
        b = diag[i] - off[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = off[i] / b;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / b;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Multiplier `m w_i − 2(Kρ)_i` of the constraint at node `i`, assembled
/// from differences to avoid cancellation.
fn multiplier(c: &[f64], w: &[f64], rho: &[f64], m: f64, i: usize) -> f64 {
    let mut flux = 0.0;
    if i > 0 {
        flux += c[i - 1] * (rho[i] - rho[i - 1]);
    }
    if i + 1 < rho.len() {
        flux -= c[i] * (rho[i + 1] - rho[i]);
    }
    m * w[i] - 2.0 * flux
}

/// Every other node, keeping both ends.
fn coarsen(profile: &RevolutionProfile) -> (RevolutionProfile, Vec<usize>) {
    let n = profile.len();
    let mut idx: Vec<usize> = (0..n).step_by(2).collect();
    if *idx.last().expect("nonempty") != n - 1 {
        idx.push(n - 1);
    }
    let coarse = RevolutionProfile {
        name: profile.name.clone(),
        t: idx.iter().map(|&i| profile.t[i]).collect(),
        r: idx.iter().map(|&i| profile.r[i]).collect(),
    };
    (coarse, idx)
}

/// Primal-dual active set iteration from `active`; returns the solution,
/// the final active set, the iteration count and whether it settled.
fn active_set_1d(
    profile: &RevolutionProfile,
    m: f64,
    mut active: Vec<bool>,
    max_iter: usize,
) -> (Vec<f64>, Vec<bool>, usize, bool) {
    let n = profile.len();
    let c = profile.couplings();
    let w = profile.node_weights();
    let obstacle = &profile.t;
    let mut rho = obstacle.clone();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let fixed = |i: usize| i == 0 || active[i];
        let value = |i: usize| if i == 0 { 0.0 } else { obstacle[i] };
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            if fixed(i) {
                diag[i] = 1.0;
                rhs[i] = value(i);
                continue;
            }
            rhs[i] = m * w[i];
            if i > 0 {
                diag[i] += 2.0 * c[i - 1];
                if fixed(i - 1) {
                    rhs[i] += 2.0 * c[i - 1] * value(i - 1);
                } else {
                    off[i - 1] = -2.0 * c[i - 1];
                }
            }
            if i + 1 < n {
                diag[i] += 2.0 * c[i];
                if fixed(i + 1) {
                    rhs[i] += 2.0 * c[i] * value(i + 1);
                }
            }
        }
        rho = thomas(&diag, &off, &rhs);
        let mut next = vec![false; n];
        for i in 1..n {
            let left = c[i - 1];
            let right = if i + 1 < n { c[i] } else { 0.0 };
            next[i] = multiplier(&c, &w, &rho, m, i) + 2.0 * (left + right) * (rho[i] - obstacle[i]) > 0.0;
        }
        if next == active {
            return (rho, active, iterations, true);
        }
        active = next;
    }
    (rho, active, iterations, false)
}

/// Active set iteration started from the prolonged solution of the
/// profile coarsened by two; the free boundary then moves only a few nodes
/// per level.
fn nested_active_set(profile: &RevolutionProfile, m: f64, max_iter: usize) -> (Vec<f64>, Vec<bool>, usize, bool) {
    let n = profile.len();
    let mut active = vec![true; n];
    let mut spent = 0;
    if n > 64 {
        let (coarse, idx) = coarsen(profile);
        let (_, coarse_active, it, _) = nested_active_set(&coarse, m, max_iter);
        spent = it;
        for (k, &i) in idx.iter().enumerate() {
            active[i] = coarse_active[k];
            if let Some(&next) = idx.get(k + 1) {
                for a in &mut active[i + 1..next] {
                    *a = coarse_active[k] && coarse_active[k + 1];
                }
            }
        }
    }
    let (rho, active, it, ok) = active_set_1d(profile, m, active, max_iter);
    (rho, active, spent + it, ok)
}

/// Obstacle problem `ρ ≤ t`, `ρ(0) = 0`, by a primal-dual active set
/// iteration with tridiagonal solves, nested over coarsened profiles.
pub fn solve_obstacle_1d(profile: &RevolutionProfile, m: f64, config: &Solve1DConfig) -> Result<Solve1DReport> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(invalid("m must be positive"));
    }
    let n = profile.len();
    let c = profile.couplings();
    let w = profile.node_weights();
    let obstacle = &profile.t;
    let (rho, _, iterations, converged) = nested_active_set(profile, m, config.max_iter);
    let mut inf: f64 = rho[0].abs();
    let (mut stat, mut comp): (f64, f64) = (0.0, 0.0);
    for i in 1..n {
        inf = inf.max(rho[i] - obstacle[i]);
        let lambda = multiplier(&c, &w, &rho, m, i);
        let mu = if w[i] > 0.0 { lambda / w[i] } else { lambda };
        let touching = obstacle[i] - rho[i] <= 1e-10 * (1.0 + obstacle[i]);
        if !touching {
            stat = stat.max(mu.abs());
        }
        comp = comp.max((rho[i] - (rho[i] + mu).min(obstacle[i])).abs());
    }
    if !converged {
        log::warn!("1-D active set did not settle in {} iterations", config.max_iter);
    }
    Ok(Solve1DReport {
        mode: Mode1D::Obstacle,
        sup_gradient: sup_gradient(profile, &rho),
        energy: profile.energy(&rho, m),
        kkt_infeasibility: inf.max(0.0),
        kkt_stationarity: stat,
        kkt_complementarity: comp,
        rho,
        iterations,
        converged,
    })
}

/// Gradient-constrained problem `|ρ'| ≤ 1`, `ρ(0) = 0`. With slopes as
/// unknowns the energy separates per interval, so the minimizer is a clamp.
pub fn solve_gradient_1d(profile: &RevolutionProfile, m: f64, _config: &Solve1DConfig) -> Result<Solve1DReport> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(invalid("m must be nonnegative"));
    }
    let n = profile.len();
    let w = profile.node_weights();
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + w[i];
    }
    let mut rho = vec![0.0; n];
    for k in 0..n - 1 {
        let dt = profile.t[k + 1] - profile.t[k];
        let rmid = 0.5 * (profile.r[k] + profile.r[k + 1]);
        let g = (m * tail[k + 1] / (2.0 * rmid)).clamp(-1.0, 1.0);
        rho[k + 1] = rho[k] + g * dt;
    }
    let sup = sup_gradient(profile, &rho);
    Ok(Solve1DReport {
        mode: Mode1D::Gradient,
        sup_gradient: sup,
        energy: profile.energy(&rho, m),
        kkt_infeasibility: (sup - 1.0).max(0.0),
        kkt_stationarity: 0.0,
        kkt_complementarity: 0.0,
        rho,
        iterations: 1,
        converged: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub profile: String,
    pub m: f64,
    pub sup_gradient: f64,
    pub equivalence_gap: f64,
}

pub const DEFAULT_WITNESS_MARGIN: f64 = 0.05;

/// Every `(profile, m)` whose obstacle solution has slope above
/// `1 + margin`, with the sup-norm gap to the gradient-constrained solution.
pub fn counterexample_search(
    profiles: &[RevolutionProfile],
    ms: &[f64],
    margin: f64,
    config: &Solve1DConfig,
) -> Result<Vec<Witness>> {
    let mut out = Vec::new();
    for p in profiles {
        for &m in ms {
            let obs = solve_obstacle_1d(p, m, config)?;
            if obs.sup_gradient > 1.0 + margin {
                let grad = solve_gradient_1d(p, m, config)?;
                let gap = obs
                    .rho
                    .iter()
                    .zip(&grad.rho)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                out.push(Witness {
                    profile: p.name.clone(),
                    m,
                    sup_gradient: obs.sup_gradient,
                    equivalence_gap: gap,
                });
            }
        }
    }
    Ok(out)
}

/// neck_r ∈ {1e−2, 1e−3}, neck_len ∈ {0.5, 1}, bulb_len ∈ {2, 8}, bulb_r = 1.
pub fn default_dumbbell_family(nt: usize) -> Result<Vec<RevolutionProfile>> {
    let mut out = Vec::new();
    for neck_r in [1e-2, 1e-3] {
        for neck_len in [0.5, 1.0] {
            for bulb_len in [2.0, 8.0] {
                out.push(dumbbell_profile(DumbbellParams::new(
                    neck_r, neck_len, 1.0, bulb_len, nt,
                ))?);
            }
        }
    }
    Ok(out)
}

pub fn default_witness_ms() -> Vec<f64> {
    vec![1e-2, 1e-1, 1.0]
}

/// Value of the continuum sphere solution at the south pole: elastic slope
/// `(m/2)·cot(t/2)` beyond `t* = 2·arctan(m/2)`.
pub fn sphere_rho_at_pi(m: f64) -> f64 {
    let ts = 2.0 * (0.5 * m).atan();
    ts - m * (0.5 * ts).sin().ln()
}
