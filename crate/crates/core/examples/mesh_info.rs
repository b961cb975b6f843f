//! Mesh statistics and curvature for the built-in surfaces.

use cutlocus::operators::{curvature_info, sufficient_m};
use cutlocus::surfaces::{flat_torus, icosphere};

fn main() -> cutlocus::Result<()> {
    for (name, mesh) in [("icosphere(4)", icosphere(4)), ("flat torus 64²", flat_torus(64))] {
        let info = curvature_info(&mesh)?;
        let m = sufficient_m(info.ricci_lower_bound, info.diameter_estimate, 2)?;
        println!(
            "{name}: {} vertices, {} faces, χ = {}, h = {:.4}, area = {:.4}",
            mesh.vertex_count(),
            mesh.face_count(),
            mesh.euler_characteristic(),
            mesh.max_edge_length(),
            mesh.total_area()
        );
        println!(
            "  K = {:.3e}, diam ≈ {:.4}, Gauss-Bonnet residual = {:.1e}, sufficient m = {m:.3}",
            info.ricci_lower_bound,
            info.diameter_estimate,
            info.gauss_bonnet_residual.unwrap_or(0.0)
        );
    }
    Ok(())
}
