//! λ-elastic sets on the flat torus against the exact λ-cut locus: the full
//! cross for λ ≤ ½, only the corner (½, ½) for ½ < λ ≤ √2/2.

use cutlocus::geodesic::fast_march;
use cutlocus::obstacle::{solve_obstacle, ObstacleProblem, SolveConfig};
use cutlocus::operators::build_operators;
use cutlocus::sets::{default_gradient_threshold, ground_truth_cut, hausdorff, lambda_elastic_set};
use cutlocus::surfaces::{flat_torus, SurfaceId};

fn main() -> cutlocus::Result<()> {
    let n = 128;
    let mesh = flat_torus(n);
    let ops = build_operators(&mesh)?;
    let d = fast_march(&mesh, &[0])?.values;
    let m = 128.0;
    let r = solve_obstacle(&ObstacleProblem::new(&mesh, &ops, d, m)?, &SolveConfig::default())?;
    let eps_g = default_gradient_threshold(1.0 / n as f64);
    for lambda in [0.1, 0.3, 0.6] {
        let e = lambda_elastic_set(&r.u, &mesh, lambda, eps_g)?;
        let gt = ground_truth_cut(SurfaceId::FlatUnitTorus, lambda, &mesh)?;
        let h = hausdorff(&mesh, &e, &gt)?;
        let fmt = |x: Option<f64>| x.map_or("-".into(), |v| format!("{v:.4}"));
        println!(
            "λ = {lambda}: |E| = {:>4}, |Cut^λ| = {:>3}, E→Cut^λ = {}, Cut^λ→E = {}",
            e.count(),
            gt.count(),
            fmt(h.sup_a_to_b),
            fmt(h.sup_b_to_a)
        );
    }
    Ok(())
}
