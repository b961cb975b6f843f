//! Elastic-plastic torsion of a disk and a rectangle; the λ-elastic sets
//! approximate the λ-medial axis.

use cutlocus::gradient::GradientConfig;
use cutlocus::obstacle::SolveConfig;
use cutlocus::operators::build_operators;
use cutlocus::planar::{boundary_distance, build_domain, medial_ground_truth, solve_torsion, DomainSpec, TorsionMode};
use cutlocus::sets::{
    default_contact_threshold, default_gradient_threshold, elastic_set, hausdorff, lambda_elastic_set, ElasticMode,
};

fn main() -> cutlocus::Result<()> {
    let disk = build_domain(DomainSpec::Disk { radius: 1.0, h: 0.02 })?;
    let ops = build_operators(&disk.mesh)?;
    let d = boundary_distance(&disk).values;
    let m = 8.0;
    let r = solve_torsion(
        &disk,
        &ops,
        m,
        TorsionMode::Obstacle,
        &SolveConfig::default(),
        &GradientConfig::default(),
    )?;
    let u = r.u();
    let e = elastic_set(
        u,
        &d,
        &disk.mesh,
        ElasticMode::ContactGap(default_contact_threshold(disk.h(), m)),
    )?;
    let radius = e.indices().iter().map(|&i| d[i]).fold(1.0, f64::min);
    let centre = disk.mesh.nearest_vertex([0.0, 0.0, 0.0]).unwrap().0;
    println!(
        "disk m = 8: u(0) = {:.4} (radial solution 0.75), free boundary at r = {:.3} (0.5)",
        u[centre],
        1.0 - radius
    );

    let rect = build_domain(DomainSpec::Rectangle {
        length: 2.0,
        width: 1.0,
        h: 0.02,
    })?;
    let ops = build_operators(&rect.mesh)?;
    let r = solve_torsion(
        &rect,
        &ops,
        128.0,
        TorsionMode::Obstacle,
        &SolveConfig::default(),
        &GradientConfig::default(),
    )?;
    let eps_g = default_gradient_threshold(rect.h());
    for lambda in [0.1, 0.2, 0.3] {
        let e = lambda_elastic_set(r.u(), &rect.mesh, lambda, eps_g)?;
        let gt = medial_ground_truth(&rect, lambda)?;
        let h = hausdorff(&rect.mesh, &e, &gt)?;
        println!(
            "rectangle λ = {lambda}: E→M_λ = {:.4}, M_λ→E = {:.4}",
            h.sup_a_to_b.unwrap_or(f64::NAN),
            h.sup_b_to_a.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
