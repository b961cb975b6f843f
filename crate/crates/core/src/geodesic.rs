//! Fast marching on triangle meshes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Result};
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone)]
pub struct DistanceField {
    pub values: Vec<f64>,
    pub sources: Vec<usize>,
    /// Number of accepted updates that used the edge (Dijkstra) formula
    /// because the unfolded two-neighbor update was not admissible.
    pub edge_fallbacks: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Far,
    Trial,
    Known,
}

struct Entry(f64, usize);

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // min-heap on distance, ties broken by vertex index
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Distance to a set of source vertices by wavefront propagation.
///
/// Unreachable vertices (other components) get `+∞` and a warning is logged.
pub fn fast_march(mesh: &TriangleMesh, sources: &[usize]) -> Result<DistanceField> {
    if sources.is_empty() {
        return Err(invalid("fast marching needs at least one source"));
    }
    let n = mesh.vertex_count();
    if let Some(&s) = sources.iter().find(|&&s| s >= n) {
        return Err(invalid(format!("source vertex {s} out of range")));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut state = vec![State::Far; n];
    let mut via_edge = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        state[s] = State::Trial;
        heap.push(Entry(0.0, s));
    }
    let faces = mesh.faces();
    let lengths = mesh.face_lengths();
    let mut fallbacks = 0usize;
    while let Some(Entry(d, v)) = heap.pop() {
        if state[v] == State::Known || d > dist[v] {
            continue;
        }
        state[v] = State::Known;
        if via_edge[v] {
            fallbacks += 1;
        }
        for &f in mesh.vertex_faces(v) {
            let tri = faces[f];
            let l = lengths[f];
            for k in 0..3 {
                let c = tri[k];
                if state[c] == State::Known {
                    continue;
                }
                // the other two corners; edge lengths opposite each corner
                let (ia, ib) = ((k + 1) % 3, (k + 2) % 3);
                let (a, b) = (tri[ia], tri[ib]);
                if a != v && b != v {
                    continue;
                }
                let (cand, edge) = update(
                    dist[a],
                    state[a] == State::Known,
                    dist[b],
                    state[b] == State::Known,
                    l[ib],
                    l[ia],
                    l[k],
                );
                if cand < dist[c] {
                    dist[c] = cand;
                    via_edge[c] = edge;
                    state[c] = State::Trial;
                    heap.push(Entry(cand, c));
                }
            }
        }
    }
    let unreachable = dist.iter().filter(|d| d.is_infinite()).count();
    if unreachable > 0 {
        log::warn!("{unreachable} vertices unreachable from the sources; distance set to +inf");
    }
    let mut sources = sources.to_vec();
    sources.sort_unstable();
    sources.dedup();
    Ok(DistanceField {
        values: dist,
        sources,
        edge_fallbacks: fallbacks,
    })
}

/// Candidate distance at corner C of a triangle from corners A and B.
/// `ac`, `bc`, `ab` are edge lengths. Returns the value and whether the edge
/// formula had to be used although both A and B were known.
fn update(ta: f64, ka: bool, tb: f64, kb: bool, ac: f64, bc: f64, ab: f64) -> (f64, bool) {
    let edge = {
        let x = if ka { ta + ac } else { f64::INFINITY };
        let y = if kb { tb + bc } else { f64::INFINITY };
        x.min(y)
    };
    if !(ka && kb) {
        return (edge, false);
    }
    // A at the origin, B on the positive x-axis, C above, virtual source S below.
    let cx = (ac * ac + ab * ab - bc * bc) / (2.0 * ab);
    let cy2 = ac * ac - cx * cx;
    let sx = (ta * ta + ab * ab - tb * tb) / (2.0 * ab);
    let sy2 = ta * ta - sx * sx;
    if cy2 <= 0.0 || sy2 < 0.0 {
        return (edge, true);
    }
    let (cy, sy) = (cy2.sqrt(), -sy2.sqrt());
    let cross = sx + (cx - sx) * (-sy) / (cy - sy);
    let tc = (cx - sx).hypot(cy - sy);
    if (0.0..=ab).contains(&cross) && tc >= ta.max(tb) && tc <= edge {
        (tc, false)
    } else {
        (edge, true)
    }
}

/// Distance to an arbitrary vertex set; same algorithm as [`fast_march`].
pub fn multi_source_distance(mesh: &TriangleMesh, set: &[usize]) -> Result<DistanceField> {
    fast_march(mesh, set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{flat_torus, icosphere, torus_coords, torus_distance, unit_square_grid};
    use proptest::prelude::*;

    #[test]
    fn first_step_is_edge_length() {
        // fan of four triangles around vertex 0
        let pos = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 0.7, 0.0],
            [-1.3, 0.0, 0.0],
            [0.0, -0.4, 0.0],
        ];
        let faces = vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]];
        let m = TriangleMesh::from_embedded(pos, faces).unwrap();
        let d = fast_march(&m, &[0]).unwrap();
        for (got, want) in d.values.iter().zip([0.0, 1.0, 0.7, 1.3, 0.4]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn square_grid_diagonal() {
        let m = unit_square_grid(50);
        let d = fast_march(&m, &[0]).unwrap();
        let far = m.nearest_vertex([1.0, 1.0, 0.0]).unwrap().0;
        assert!((d.values[far] - 2f64.sqrt()).abs() < 0.03);
    }

    #[test]
    fn sphere_equator() {
        let m = icosphere(5);
        let d = fast_march(&m, &[0]).unwrap();
        let pos = m.positions().unwrap();
        let mut worst: f64 = 0.0;
        for (v, p) in pos.iter().enumerate() {
            if p[2].abs() < 1e-12 {
                worst = worst.max((d.values[v] / std::f64::consts::FRAC_PI_2 - 1.0).abs());
            }
        }
        assert!(worst < 0.02, "relative equator error {worst}");
        let both = multi_source_distance(&m, &[0, 1]).unwrap();
        let max = both.values.iter().cloned().fold(0.0, f64::max);
        assert!((max / std::f64::consts::FRAC_PI_2 - 1.0).abs() < 0.02);
    }

    #[test]
    fn torus_matches_closed_form() {
        let n = 64;
        let m = flat_torus(n);
        let d = fast_march(&m, &[0]).unwrap();
        let h = 1.0 / n as f64;
        for v in 0..m.vertex_count() {
            let exact = torus_distance([0.0, 0.0], torus_coords(n, v));
            assert!((d.values[v] - exact).abs() <= 3.0 * h, "vertex {v}");
        }
    }

    #[test]
    fn all_sources_give_zero() {
        let m = unit_square_grid(4);
        let all: Vec<usize> = (0..m.vertex_count()).collect();
        let d = multi_source_distance(&m, &all).unwrap();
        assert!(d.values.iter().all(|&x| x == 0.0));
        assert!(fast_march(&m, &[]).is_err());
    }

    #[test]
    fn disconnected_vertices_are_infinite() {
        let pos = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [5.0, 0.0, 0.0],
            [6.0, 0.0, 0.0],
            [5.0, 1.0, 0.0],
        ];
        let m = TriangleMesh::from_embedded(pos, vec![[0, 1, 2], [3, 4, 5]]).unwrap();
        let d = fast_march(&m, &[0]).unwrap();
        assert!(d.values[3].is_infinite());
        assert_eq!(d.values[1], 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn lipschitz_and_monotone_in_sources(a in 0usize..1089, b in 0usize..1089) {
            let m = unit_square_grid(32);
            let d1 = fast_march(&m, &[a]).unwrap();
            let d2 = fast_march(&m, &[a, b]).unwrap();
            for (e, &[i, j]) in m.edges().iter().enumerate() {
                let l = m.edge_lengths()[e];
                prop_assert!((d1.values[i] - d1.values[j]).abs() <= l + 1e-9);
            }
            for v in 0..m.vertex_count() {
                prop_assert!(d2.values[v] <= d1.values[v]);
                prop_assert!(d1.values[v] >= 0.0);
            }
            prop_assert_eq!(d1.values[a], 0.0);
        }
    }
}
