use cutlocus::geodesic::fast_march;
use cutlocus::gradient::{solve_gradient_constrained, GradientConfig, GradientProblem};
use cutlocus::obstacle::{solve_obstacle, ObstacleProblem, ObstacleSolver, SolveConfig};
use cutlocus::operators::{build_operators, Operators};
use cutlocus::sets::{default_contact_threshold, elastic_set, ground_truth_cut, ElasticMode};
use cutlocus::surfaces::{analytic_vertex_distance, flat_torus, icosphere, SurfaceId};
use cutlocus::TriangleMesh;
use proptest::prelude::*;
use std::sync::OnceLock;

struct Setup {
    mesh: TriangleMesh,
    ops: Operators,
    d: Vec<f64>,
}

impl Setup {
    fn new(mesh: TriangleMesh) -> Self {
        let ops = build_operators(&mesh).unwrap();
        let d = fast_march(&mesh, &[mesh.basepoint().unwrap()]).unwrap().values;
        Setup { mesh, ops, d }
    }

    fn solve(&self, m: f64) -> Vec<f64> {
        let p = ObstacleProblem::new(&self.mesh, &self.ops, self.d.clone(), m).unwrap();
        let r = solve_obstacle(&p, &SolveConfig::default()).unwrap();
        assert!(r.converged);
        r.u
    }
}

fn sphere() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| Setup::new(icosphere(3)))
}

fn torus() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| Setup::new(flat_torus(32)))
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solutions_increase_with_m(lo in 0.5f64..40.0, ratio in 1.05f64..4.0, on_torus: bool) {
        let s = if on_torus { torus() } else { sphere() };
        let (a, b) = (s.solve(lo), s.solve(lo * ratio));
        for i in 0..a.len() {
            prop_assert!(b[i] - a[i] >= -1e-6);
            prop_assert!(b[i] - s.d[i] <= 1e-6);
        }
    }

    #[test]
    fn obstacle_solution_is_certified(m in 1.0f64..200.0, on_torus: bool) {
        let s = if on_torus { torus() } else { sphere() };
        let p = ObstacleProblem::new(&s.mesh, &s.ops, s.d.clone(), m).unwrap();
        let r = ObstacleSolver::new(&s.ops).unwrap().solve(&p, &SolveConfig::default(), None).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.kkt_infeasibility <= 1e-8 && r.kkt_stationarity <= 1e-8 && r.kkt_complementarity <= 1e-8);
        // a feasible perturbation never lowers the energy
        let shrunk: Vec<f64> = r.u.iter().map(|x| 0.99 * x).collect();
        prop_assert!(p.energy(&shrunk) >= r.energy - 1e-9);
    }
}

#[test]
fn gap_decays_like_one_over_m() {
    let s = torus();
    let gaps: Vec<f64> = [8.0, 16.0, 32.0].iter().map(|&m| sup(&s.solve(m), &s.d) * m).collect();
    let spread = gaps.iter().cloned().fold(0.0, f64::max) / gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1.5, "{gaps:?}");
}

#[test]
fn solution_touches_the_obstacle_near_the_basepoint() {
    let s = sphere();
    let u = s.solve(16.0);
    let b = s.mesh.basepoint().unwrap();
    assert!(u[b].abs() < 1e-12);
    for &v in s.mesh.neighbors(b) {
        assert!((s.d[v] - u[v]).abs() < 1e-9);
    }
}

#[test]
fn elastic_set_contains_the_cut_locus_and_shrinks() {
    let s = Setup::new(icosphere(4));
    let h = s.mesh.max_edge_length();
    let cut = ground_truth_cut(SurfaceId::UnitSphere, 0.0, &s.mesh).unwrap();
    let mut previous: Option<Vec<bool>> = None;
    for m in [8.0, 16.0, 32.0, 64.0] {
        let u = s.solve(m);
        let e = elastic_set(
            &u,
            &s.d,
            &s.mesh,
            ElasticMode::ContactGap(default_contact_threshold(h, m)),
        )
        .unwrap();
        assert!(cut.is_subset_of(&e), "m = {m}");
        let b = s.mesh.basepoint().unwrap();
        assert!(!e.member[b] && s.mesh.neighbors(b).iter().all(|&v| !e.member[v]));
        if let Some(prev) = &previous {
            // E_m ⊂ E_m' for m > m', up to a band of width 2h around E_m'
            let prev_set: Vec<usize> = (0..prev.len()).filter(|&i| prev[i]).collect();
            let dist = cutlocus::geodesic::multi_source_distance(&s.mesh, &prev_set).unwrap();
            for i in e.indices() {
                assert!(dist.values[i] <= 2.0 * h, "m = {m}, vertex {i}");
            }
        }
        previous = Some(e.member);
    }
}

#[test]
fn torus_problems_agree_for_every_m() {
    let s = torus();
    let h = 1.0 / 32.0;
    for m in [2.0, 16.0, 64.0] {
        let u = s.solve(m);
        let g = solve_gradient_constrained(
            &GradientProblem::new(&s.mesh, &s.ops, m).unwrap(),
            &GradientConfig::default(),
            Some(&u),
        )
        .unwrap();
        assert!(g.converged);
        assert!(g.feasibility <= 1e-6 && g.relative_gap <= 1e-7);
        assert!(sup(&u, &g.u) <= 5e-3f64.max(3.0 * h), "m = {m}: {}", sup(&u, &g.u));
    }
}

#[test]
fn fast_marching_error_is_first_order() {
    let err = |k: usize| {
        let m = icosphere(k);
        let d = fast_march(&m, &[m.basepoint().unwrap()]).unwrap().values;
        (
            m.max_edge_length(),
            sup(&d, &analytic_vertex_distance(SurfaceId::UnitSphere, &m).unwrap()),
        )
    };
    let (h3, e3) = err(3);
    let (h5, e5) = err(5);
    assert!(e5 < e3);
    let rate = (e3 / e5).ln() / (h3 / h5).ln();
    assert!(rate > 0.7, "rate {rate}");
}
