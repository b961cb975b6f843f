//! Distance-constrained torsion problem on the sphere: the elastic set
//! shrinks onto the south pole as m grows.

use cutlocus::geodesic::fast_march;
use cutlocus::obstacle::{ObstacleProblem, ObstacleSolver, SolveConfig};
use cutlocus::operators::build_operators;
use cutlocus::sets::{default_contact_threshold, elastic_set, ground_truth_cut, hausdorff, ElasticMode};
use cutlocus::surfaces::{icosphere, SurfaceId};

fn main() -> cutlocus::Result<()> {
    let mesh = icosphere(4);
    let ops = build_operators(&mesh)?;
    let d = fast_march(&mesh, &[mesh.basepoint().unwrap()])?.values;
    let solver = ObstacleSolver::new(&ops)?;
    let cut = ground_truth_cut(SurfaceId::UnitSphere, 0.0, &mesh)?;
    let h = mesh.max_edge_length();
    let mut warm: Option<Vec<f64>> = None;
    for m in [4.0, 8.0, 16.0, 32.0, 64.0] {
        let p = ObstacleProblem::new(&mesh, &ops, d.clone(), m)?;
        let r = solver.solve(&p, &SolveConfig::default(), warm.as_deref())?;
        let e = elastic_set(
            &r.u,
            &d,
            &mesh,
            ElasticMode::ContactGap(default_contact_threshold(h, m)),
        )?;
        let dist = if e.is_empty() {
            None
        } else {
            hausdorff(&mesh, &e, &cut)?.symmetric
        };
        let gap = r.u.iter().zip(&d).map(|(u, d)| d - u).fold(0.0, f64::max);
        println!(
            "m = {m:>4}: {:>2} iterations, sup gap = {gap:.4}, |E_m| = {:>4}, Hausdorff to the south pole = {}, KKT = {:.1e}",
            r.iterations,
            e.count(),
            dist.map_or("-".into(), |x| format!("{x:.3}")),
            r.kkt_complementarity.max(r.kkt_stationarity)
        );
        warm = Some(r.u);
    }
    Ok(())
}
