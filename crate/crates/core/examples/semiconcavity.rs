//! Semiconcavity constants along random great-circle arcs of the sphere,
//! for the exact distance and for solutions on an icosphere.

use cutlocus::geodesic::fast_march;
use cutlocus::obstacle::{solve_obstacle, ObstacleProblem, SolveConfig};
use cutlocus::operators::build_operators;
use cutlocus::semiconcavity::{
    basepoint_distance, default_lambda_grid, estimate_semiconcavity, sample_geodesics, MeshInterpolator, SampleSurface,
};
use cutlocus::surfaces::icosphere;
use std::f64::consts::FRAC_PI_4;

fn main() -> cutlocus::Result<()> {
    let samples = sample_geodesics(SampleSurface::UnitSphere, 200, 2.0, FRAC_PI_4, 7)?;
    let grid = default_lambda_grid();
    let exact = |p: [f64; 3]| basepoint_distance(SampleSurface::UnitSphere, p);
    let r = estimate_semiconcavity(&exact, &samples, &grid, 1e-3)?;
    println!("exact distance: C_hat = {:.4} over {} chords", r.c_hat, r.chords);

    let mesh = icosphere(5);
    let h = mesh.max_edge_length();
    let ops = build_operators(&mesh)?;
    let d = fast_march(&mesh, &[mesh.basepoint().unwrap()])?.values;
    let interp = MeshInterpolator::new(&mesh)?;
    for m in [16.0, 64.0] {
        let u = solve_obstacle(
            &ObstacleProblem::new(&mesh, &ops, d.clone(), m)?,
            &SolveConfig::default(),
        )?
        .u;
        let eval = |p: [f64; 3]| interp.eval(&u, p);
        let r = estimate_semiconcavity(&eval, &samples, &grid, 2.0 * h)?;
        println!("u_m, m = {m}: C_hat = {:.4}", r.c_hat);
    }
    Ok(())
}
