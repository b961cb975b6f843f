//! Mesh and field file formats.
//!
//! Intrinsic meshes use a plain-text format:
//!
//! ```text
//! INTRINSIC nv nf ne
//! i j k          (nf face lines)
//! i j length     (ne edge lines)
//! ```
//!
//! Lines starting with `#` are ignored in both OFF and intrinsic files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

struct Lines<'a> {
    path: &'a Path,
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(path: &'a Path, text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Lines {
            path,
            inner: it.peekable(),
        }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    fn next_tokens(&mut self) -> Result<(usize, Vec<&'a str>)> {
        match self.inner.next() {
            Some((n, l)) => Ok((n, l.split_whitespace().collect())),
            None => Err(self.err(0, "unexpected end of file")),
        }
    }

    fn parse<T: std::str::FromStr>(&self, line: usize, tok: Option<&&str>) -> Result<T> {
        let tok = tok.ok_or_else(|| self.err(line, "missing value"))?;
        tok.parse().map_err(|_| self.err(line, format!("cannot parse `{tok}`")))
    }
}

/// Reads an ASCII OFF file (triangles only).
pub fn read_off(path: &Path) -> Result<TriangleMesh> {
    let text = fs::read_to_string(path)?;
    let mut lines = Lines::new(path, &text);
    let (n, head) = lines.next_tokens()?;
    let mut counts = head.clone();
    if head.first() == Some(&"OFF") {
        counts.remove(0);
    } else if head.first().map(|t| t.starts_with("OFF")) == Some(true) {
        return Err(lines.err(n, "only plain OFF is supported"));
    }
    let counts = if counts.is_empty() {
        lines.next_tokens()?
    } else {
        (n, counts)
    };
    let (cl, counts) = counts;
    let nv: usize = lines.parse(cl, counts.first())?;
    let nf: usize = lines.parse(cl, counts.get(1))?;
    let mut pos = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, t) = lines.next_tokens()?;
        pos.push([
            lines.parse(l, t.first())?,
            lines.parse(l, t.get(1))?,
            lines.parse(l, t.get(2))?,
        ]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, t) = lines.next_tokens()?;
        let k: usize = lines.parse(l, t.first())?;
        if k != 3 {
            return Err(lines.err(l, format!("face with {k} vertices; only triangles are supported")));
        }
        faces.push([
            lines.parse(l, t.get(1))?,
            lines.parse(l, t.get(2))?,
            lines.parse(l, t.get(3))?,
        ]);
    }
    TriangleMesh::from_embedded(pos, faces)
}

pub fn write_off(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let pos = mesh
        .positions()
        .ok_or_else(|| Error::InvalidArgument("OFF output needs vertex positions".into()))?;
    let mut s = String::new();
    writeln!(s, "OFF\n{} {} {}", pos.len(), mesh.face_count(), mesh.edges().len()).unwrap();
    for p in pos {
        writeln!(s, "{:e} {:e} {:e}", p[0], p[1], p[2]).unwrap();
    }
    for f in mesh.faces() {
        writeln!(s, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

/// Reads the intrinsic mesh format described in the module docs.
pub fn read_intrinsic(path: &Path) -> Result<TriangleMesh> {
    let text = fs::read_to_string(path)?;
    let mut lines = Lines::new(path, &text);
    let (l, head) = lines.next_tokens()?;
    if head.first() != Some(&"INTRINSIC") {
        return Err(lines.err(l, "expected `INTRINSIC nv nf ne` header"));
    }
    let nv: usize = lines.parse(l, head.get(1))?;
    let nf: usize = lines.parse(l, head.get(2))?;
    let ne: usize = lines.parse(l, head.get(3))?;
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, t) = lines.next_tokens()?;
        faces.push([
            lines.parse(l, t.first())?,
            lines.parse(l, t.get(1))?,
            lines.parse(l, t.get(2))?,
        ]);
    }
    let mut lengths = HashMap::with_capacity(ne);
    for _ in 0..ne {
        let (l, t) = lines.next_tokens()?;
        let a: usize = lines.parse(l, t.first())?;
        let b: usize = lines.parse(l, t.get(1))?;
        let len: f64 = lines.parse(l, t.get(2))?;
        lengths.insert(if a < b { (a, b) } else { (b, a) }, len);
    }
    TriangleMesh::from_intrinsic(nv, faces, &lengths)
}

pub fn write_intrinsic(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let mut s = String::new();
    writeln!(
        s,
        "INTRINSIC {} {} {}",
        mesh.vertex_count(),
        mesh.face_count(),
        mesh.edges().len()
    )
    .unwrap();
    for f in mesh.faces() {
        writeln!(s, "{} {} {}", f[0], f[1], f[2]).unwrap();
    }
    for (e, l) in mesh.edges().iter().zip(mesh.edge_lengths()) {
        writeln!(s, "{} {} {:e}", e[0], e[1], l).unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

/// Reads either format, dispatching on the first non-comment token.
pub fn read_mesh(path: &Path) -> Result<TriangleMesh> {
    let text = fs::read_to_string(path)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if first.starts_with("INTRINSIC") {
        read_intrinsic(path)
    } else {
        read_off(path)
    }
}

/// Legacy ASCII VTK polydata with one scalar array per field.
///
/// Intrinsic meshes have no positions, so `points` must then be supplied
/// (any layout works for visualization, e.g. torus parameter coordinates).
pub fn write_vtk(
    path: &Path,
    mesh: &TriangleMesh,
    points: Option<&[[f64; 3]]>,
    fields: &[(&str, &[f64])],
) -> Result<()> {
    let pts = points
        .or(mesh.positions())
        .ok_or_else(|| Error::InvalidArgument("VTK output of an intrinsic mesh needs points".into()))?;
    if pts.len() != mesh.vertex_count() {
        return Err(Error::LengthMismatchField {
            expected: mesh.vertex_count(),
            got: pts.len(),
        });
    }
    let mut s = String::new();
    writeln!(s, "# vtk DataFile Version 3.0\ncutlocus field\nASCII\nDATASET POLYDATA").unwrap();
    writeln!(s, "POINTS {} double", pts.len()).unwrap();
    for p in pts {
        writeln!(s, "{:e} {:e} {:e}", p[0], p[1], p[2]).unwrap();
    }
    writeln!(s, "POLYGONS {} {}", mesh.face_count(), 4 * mesh.face_count()).unwrap();
    for f in mesh.faces() {
        writeln!(s, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    if !fields.is_empty() {
        writeln!(s, "POINT_DATA {}", mesh.vertex_count()).unwrap();
    }
    for (name, values) in fields {
        mesh.check_field(values)?;
        writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
        for v in values.iter() {
            writeln!(s, "{v:e}").unwrap();
        }
    }
    fs::write(path, s)?;
    Ok(())
}

/// Two-column CSV `vertex_id,value` (also used for face scalars with
/// header `face_id`).
pub fn write_indexed_csv(path: &Path, id_column: &str, values: &[f64]) -> Result<()> {
    let mut s = format!("{id_column},value\n");
    for (i, v) in values.iter().enumerate() {
        writeln!(s, "{i},{v:e}").unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn write_vertex_csv(path: &Path, values: &[f64]) -> Result<()> {
    write_indexed_csv(path, "vertex_id", values)
}

pub fn write_face_csv(path: &Path, values: &[f64]) -> Result<()> {
    write_indexed_csv(path, "face_id", values)
}

/// CSV with a `vertex_id` column followed by one column per named field.
pub fn write_vertex_columns_csv(path: &Path, columns: &[(&str, &[f64])]) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.1.len());
    if let Some(c) = columns.iter().find(|c| c.1.len() != n) {
        return Err(Error::LengthMismatchField {
            expected: n,
            got: c.1.len(),
        });
    }
    let mut s = String::from("vertex_id");
    for (name, _) in columns {
        write!(s, ",{name}").unwrap();
    }
    s.push('\n');
    for i in 0..n {
        write!(s, "{i}").unwrap();
        for (_, v) in columns {
            write!(s, ",{:e}", v[i]).unwrap();
        }
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

/// Reads the first value column of a CSV written by [`write_vertex_csv`] or
/// [`write_vertex_columns_csv`].
pub fn read_vertex_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: msg.to_string(),
        };
        let mut cols = line.split(',');
        let (id, v) = match (cols.next(), cols.next()) {
            (Some(id), Some(v)) => (id, v),
            _ => return Err(err("expected an index and a value column")),
        };
        let id: usize = id.trim().parse().map_err(|_| err("bad index"))?;
        if id != out.len() {
            return Err(err("indices must be consecutive from 0"));
        }
        out.push(v.trim().parse().map_err(|_| err("bad value"))?);
    }
    Ok(out)
}

/// Profile CSV with header `t,r`.
pub fn write_profile_csv(path: &Path, t: &[f64], r: &[f64]) -> Result<()> {
    let mut s = String::from("t,r\n");
    for (a, b) in t.iter().zip(r) {
        writeln!(s, "{a:e},{b:e}").unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn read_profile_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let (mut t, mut r) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with('t')) {
            continue;
        }
        let err = || Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: "expected `t,r`".into(),
        };
        let (a, b) = line.split_once(',').ok_or_else(err)?;
        t.push(a.trim().parse().map_err(|_| err())?);
        r.push(b.trim().parse().map_err(|_| err())?);
    }
    Ok((t, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{flat_torus, icosphere};

    #[test]
    fn off_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.off");
        let m = icosphere(1);
        write_off(&p, &m).unwrap();
        let back = read_off(&p).unwrap();
        assert_eq!(back.faces(), m.faces());
        assert_eq!(back.vertex_count(), m.vertex_count());
        assert!((back.total_area() - m.total_area()).abs() < 1e-12);
    }

    #[test]
    fn intrinsic_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.txt");
        let m = flat_torus(6);
        write_intrinsic(&p, &m).unwrap();
        let back = read_mesh(&p).unwrap();
        assert!(back.is_intrinsic());
        assert_eq!(back.faces(), m.faces());
        assert!((back.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_manifold_off_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.off");
        let text = "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
        fs::write(&p, text).unwrap();
        assert!(read_off(&p).is_err());
    }

    #[test]
    fn csv_round_trip_and_vtk() {
        let dir = tempfile::tempdir().unwrap();
        let m = icosphere(0);
        let vals: Vec<f64> = (0..m.vertex_count()).map(|i| i as f64 * 0.25).collect();
        let p = dir.path().join("f.csv");
        write_vertex_csv(&p, &vals).unwrap();
        assert_eq!(read_vertex_csv(&p).unwrap(), vals);
        let v = dir.path().join("f.vtk");
        write_vtk(&v, &m, None, &[("u", &vals)]).unwrap();
        let text = fs::read_to_string(&v).unwrap();
        assert!(text.contains("POINT_DATA 12"));
        let t = flat_torus(4);
        assert!(write_vtk(&v, &t, None, &[]).is_err());
    }
}
