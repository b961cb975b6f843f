//! Fast marching from the north pole of an icosphere, compared with the
//! great-circle distance.

use cutlocus::geodesic::fast_march;
use cutlocus::surfaces::{analytic_vertex_distance, icosphere, SurfaceId};

fn main() -> cutlocus::Result<()> {
    for k in 2..=5 {
        let mesh = icosphere(k);
        let b = mesh.basepoint().expect("icospheres carry the north pole");
        let fm = fast_march(&mesh, &[b])?;
        let exact = analytic_vertex_distance(SurfaceId::UnitSphere, &mesh)?;
        let err = fm
            .values
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "subdivisions {k}: h = {:.4}, max error = {err:.4}, edge fallbacks = {}",
            mesh.max_edge_length(),
            fm.edge_fallbacks
        );
    }
    Ok(())
}
