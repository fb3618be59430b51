//! Mesh and field file formats.
//!
//! Mesh file (ASCII, whitespace separated):
//!
//! ```text
//! MMFMESH 1
//! SURFACE plane | sphere <radius> | generic
//! ORDER <solution-order> <geometry-order>
//! VERTICES <nv>
//! <x> <y> <z>                  (nv lines)
//! ELEMENTS <ne>
//! <code> <v0> <v1> <v2> [<v3>] (ne lines; code 3 = triangle, 4 = quad)
//! CURVED                       (optional section)
//! <nn> <x> <y> <z> ...         (ne lines, nn nodes flattened per element)
//! END
//! ```
//!
//! Without a CURVED section the element geometry is rebuilt from the
//! vertices and, for plane/sphere surfaces, from the analytic surface.
//!
//! Field files are CSV with one row per solution point: `x,y,z,val` for
//! scalars and `x,y,z,vx,vy,vz` for vectors.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

use crate::basis::ElemKind;
use crate::error::{Error, Result};

use super::{ScalarField, SurfaceKind, SurfaceMesh, VectorField};

pub fn save_mesh(path: impl AsRef<Path>, mesh: &SurfaceMesh) -> Result<()> {
    let mut s = String::new();
    s.push_str("MMFMESH 1\n");
    match mesh.surface() {
        SurfaceKind::Plane => s.push_str("SURFACE plane\n"),
        SurfaceKind::Sphere { radius } => {
            let _ = writeln!(s, "SURFACE sphere {radius}");
        }
        SurfaceKind::Generic => s.push_str("SURFACE generic\n"),
    }
    let _ = writeln!(s, "ORDER {} {}", mesh.order(), mesh.geom_order());
    let _ = writeln!(s, "VERTICES {}", mesh.n_vertices());
    for v in mesh.vertices() {
        let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
    }
    let _ = writeln!(s, "ELEMENTS {}", mesh.n_elements());
    for el in mesh.elements() {
        let _ = write!(s, "{}", el.kind.type_code());
        for v in &el.verts {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    if mesh.surface() == SurfaceKind::Generic && mesh.geom_order() > 1 {
        s.push_str("CURVED\n");
        for el in mesh.elements() {
            let _ = write!(s, "{}", el.geom_nodes.len());
            for n in &el.geom_nodes {
                let _ = write!(s, " {} {} {}", n.x, n.y, n.z);
            }
            s.push('\n');
        }
    }
    s.push_str("END\n");
    std::fs::write(path, s)?;
    Ok(())
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<SurfaceMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<SurfaceMesh> {
    let mut lines = text.lines().enumerate();
    let mut next_line = |expect: &str| -> Result<(usize, &str)> {
        for (i, raw) in lines.by_ref() {
            let t = raw.trim();
            if !t.is_empty() {
                return Ok((i + 1, t));
            }
        }
        Err(Error::parse(0, format!("unexpected end of file, expected {expect}")))
    };

    let (ln, header) = next_line("header")?;
    if header != "MMFMESH 1" {
        return Err(Error::parse(ln, format!("bad header {header:?}, expected \"MMFMESH 1\"")));
    }

    let (ln, surf_line) = next_line("SURFACE")?;
    let mut it = surf_line.split_whitespace();
    if it.next() != Some("SURFACE") {
        return Err(Error::parse(ln, "expected SURFACE line"));
    }
    let surface = match it.next() {
        Some("plane") => SurfaceKind::Plane,
        Some("sphere") => {
            let r: f64 = it
                .next()
                .ok_or_else(|| Error::parse(ln, "sphere surface needs a radius"))?
                .parse()
                .map_err(|_| Error::parse(ln, "bad sphere radius"))?;
            SurfaceKind::Sphere { radius: r }
        }
        Some("generic") => SurfaceKind::Generic,
        other => return Err(Error::parse(ln, format!("unknown surface kind {other:?}"))),
    };

    let (ln, order_line) = next_line("ORDER")?;
    let mut it = order_line.split_whitespace();
    if it.next() != Some("ORDER") {
        return Err(Error::parse(ln, "expected ORDER line"));
    }
    let order: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(ln, "bad solution order"))?;
    let geom_order: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(ln, "bad geometry order"))?;

    let (ln, vline) = next_line("VERTICES")?;
    let nv: usize = vline
        .strip_prefix("VERTICES")
        .and_then(|t| t.trim().parse().ok())
        .ok_or_else(|| Error::parse(ln, "expected VERTICES <count>"))?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = next_line("vertex coordinates")?;
        let c: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::parse(ln, format!("bad coordinate {t:?}"))))
            .collect::<Result<_>>()?;
        if c.len() != 3 {
            return Err(Error::parse(ln, format!("expected 3 coordinates, got {}", c.len())));
        }
        vertices.push(Vector3::new(c[0], c[1], c[2]));
    }

    let (ln, eline) = next_line("ELEMENTS")?;
    let ne: usize = eline
        .strip_prefix("ELEMENTS")
        .and_then(|t| t.trim().parse().ok())
        .ok_or_else(|| Error::parse(ln, "expected ELEMENTS <count>"))?;
    let mut conn = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (ln, line) = next_line("element connectivity")?;
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::parse(ln, format!("bad index {t:?}"))))
            .collect::<Result<_>>()?;
        let kind = match ids.first() {
            Some(3) => ElemKind::Tri,
            Some(4) => ElemKind::Quad,
            Some(code) => {
                return Err(Error::parse(ln, format!("unknown element type code {code}")));
            }
            None => return Err(Error::parse(ln, "empty element record")),
        };
        if ids.len() != 1 + kind.n_verts() {
            return Err(Error::parse(
                ln,
                format!("element record has {} indices, expected {}", ids.len() - 1, kind.n_verts()),
            ));
        }
        conn.push((kind, ids[1..].to_vec()));
    }

    let mut geom_nodes = Vec::new();
    let (ln, tail) = next_line("CURVED or END")?;
    match tail {
        "END" => {}
        "CURVED" => {
            for _ in 0..ne {
                let (ln, line) = next_line("curved node block")?;
                let toks: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| Error::parse(ln, format!("bad number {t:?}"))))
                    .collect::<Result<_>>()?;
                if toks.is_empty() {
                    return Err(Error::parse(ln, "empty curved block"));
                }
                let nn = toks[0] as usize;
                if toks.len() != 1 + 3 * nn {
                    return Err(Error::parse(
                        ln,
                        format!("curved block has {} numbers, expected {}", toks.len() - 1, 3 * nn),
                    ));
                }
                geom_nodes.push(
                    (0..nn)
                        .map(|i| Vector3::new(toks[1 + 3 * i], toks[2 + 3 * i], toks[3 + 3 * i]))
                        .collect(),
                );
            }
            let (ln, end) = next_line("END")?;
            if end != "END" {
                return Err(Error::parse(ln, format!("expected END, got {end:?}")));
            }
        }
        other => return Err(Error::parse(ln, format!("expected CURVED or END, got {other:?}"))),
    }

    SurfaceMesh::from_parts(vertices, conn, geom_nodes, order, geom_order, surface)
}

fn write_field_rows(mesh: &SurfaceMesh, header: &str, row: impl Fn(usize, &mut String)) -> String {
    let mut s = String::new();
    s.push_str(header);
    s.push('\n');
    let pts = mesh.points();
    for (i, p) in pts.iter().enumerate() {
        let _ = write!(s, "{},{},{}", p.x, p.y, p.z);
        row(i, &mut s);
        s.push('\n');
    }
    s
}

pub fn save_scalar_field(path: impl AsRef<Path>, mesh: &SurfaceMesh, f: &ScalarField) -> Result<()> {
    mesh.check_field_len(f.len())?;
    let s = write_field_rows(mesh, "x,y,z,val", |i, s| {
        let _ = write!(s, ",{}", f.data[i]);
    });
    std::fs::write(path, s)?;
    Ok(())
}

pub fn save_vector_field(path: impl AsRef<Path>, mesh: &SurfaceMesh, f: &VectorField) -> Result<()> {
    mesh.check_field_len(f.len())?;
    let s = write_field_rows(mesh, "x,y,z,vx,vy,vz", |i, s| {
        let v = f.data[i];
        let _ = write!(s, ",{},{},{}", v.x, v.y, v.z);
    });
    std::fs::write(path, s)?;
    Ok(())
}

/// Parse a CSV field file and check its point layout against the mesh.
/// Returns the value columns.
pub fn load_field_columns(path: impl AsRef<Path>, mesh: &SurfaceMesh, ncols: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(&path)?;
    let mut cols = vec![Vec::with_capacity(mesh.n_points()); ncols];
    let pts = mesh.points();
    let tol = 1e-6 * (1.0 + mesh.h_max());
    let mut row = 0usize;
    for (ln, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('x') {
            continue;
        }
        let vals: Vec<f64> = t
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse()
                    .map_err(|_| Error::parse(ln + 1, format!("bad number {tok:?}")))
            })
            .collect::<Result<_>>()?;
        if vals.len() != 3 + ncols {
            return Err(Error::parse(
                ln + 1,
                format!("expected {} columns, got {}", 3 + ncols, vals.len()),
            ));
        }
        if row >= pts.len() {
            return Err(Error::parse(ln + 1, "more rows than mesh points"));
        }
        let p = pts[row];
        if (p - Vector3::new(vals[0], vals[1], vals[2])).norm() > tol {
            return Err(Error::parse(
                ln + 1,
                format!("row position does not match mesh point {row}"),
            ));
        }
        for c in 0..ncols {
            cols[c].push(vals[3 + c]);
        }
        row += 1;
    }
    if row != pts.len() {
        return Err(Error::parse(0, format!("file has {row} rows, mesh expects {}", pts.len())));
    }
    Ok(cols)
}

pub fn load_scalar_field(path: impl AsRef<Path>, mesh: &SurfaceMesh) -> Result<ScalarField> {
    let cols = load_field_columns(path, mesh, 1)?;
    Ok(ScalarField {
        data: cols.into_iter().next().unwrap(),
    })
}

pub fn load_vector_field(path: impl AsRef<Path>, mesh: &SurfaceMesh) -> Result<VectorField> {
    let cols = load_field_columns(path, mesh, 3)?;
    Ok(VectorField {
        data: (0..cols[0].len())
            .map(|i| Vector3::new(cols[0][i], cols[1][i], cols[2][i]))
            .collect(),
    })
}
