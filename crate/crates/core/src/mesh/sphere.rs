//! Triangulated sphere meshes from a subdivided octahedron.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::basis::ElemKind;
use crate::error::{Error, Result};

use super::{SurfaceKind, SurfaceMesh};

/// Build a curved triangular mesh of the sphere of radius `r` with target
/// edge length `h`. Each octant of an octahedron is subdivided into n^2
/// triangles and projected onto the sphere; the subdivision count is
/// calibrated as n = round(3 r / h) against reference unstructured meshes,
/// so h = 2.48 at r = 10 yields 1152 elements. Point normals are the exact
/// sphere normals x / |x|.
pub fn build_sphere_mesh(r: f64, h: f64, p: usize) -> Result<SurfaceMesh> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!("sphere radius {r} must be positive")));
    }
    if !(h > 0.0) || h >= r {
        return Err(Error::invalid(format!(
            "target edge length {h} must lie in (0, radius = {r})"
        )));
    }
    if !(1..=10).contains(&p) {
        return Err(Error::invalid(format!("order {p} out of range 1..=10")));
    }

    let n = ((3.0 * r / h).round() as usize).max(2);

    // Octant corner triples, wound so the projected triangles face outward.
    let xp = Vector3::new(1.0, 0.0, 0.0);
    let xm = -xp;
    let yp = Vector3::new(0.0, 1.0, 0.0);
    let ym = -yp;
    let zp = Vector3::new(0.0, 0.0, 1.0);
    let zm = -zp;
    let octants = [
        [xp, yp, zp],
        [yp, xm, zp],
        [xm, ym, zp],
        [ym, xp, zp],
        [yp, xp, zm],
        [xm, yp, zm],
        [ym, xm, zm],
        [xp, ym, zm],
    ];

    // Vertices on an octant face are rational in 1/n; quantized keys give
    // exact deduplication along shared edges.
    let mut key_of = HashMap::new();
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut vertex_id = |pos: Vector3<f64>, vertices: &mut Vec<Vector3<f64>>| -> usize {
        let key = (
            (pos.x * n as f64).round() as i64,
            (pos.y * n as f64).round() as i64,
            (pos.z * n as f64).round() as i64,
        );
        *key_of.entry(key).or_insert_with(|| {
            vertices.push(pos * (r / pos.norm()));
            vertices.len() - 1
        })
    };

    let mut conn = Vec::with_capacity(8 * n * n);
    for [a, b, c] in octants {
        // Barycentric grid on the flat octant face: row i from edge ab
        // toward c; node (i, j) = a + j/n (b-a) + i/n (c-a).
        let node = |i: usize, j: usize| a + (b - a) * (j as f64 / n as f64) + (c - a) * (i as f64 / n as f64);
        for i in 0..n {
            for j in 0..(n - i) {
                let v00 = vertex_id(node(i, j), &mut vertices);
                let v01 = vertex_id(node(i, j + 1), &mut vertices);
                let v10 = vertex_id(node(i + 1, j), &mut vertices);
                conn.push((ElemKind::Tri, vec![v00, v01, v10]));
                if j + 1 < n - i {
                    let v11 = vertex_id(node(i + 1, j + 1), &mut vertices);
                    conn.push((ElemKind::Tri, vec![v01, v11, v10]));
                }
            }
        }
    }

    SurfaceMesh::from_parts(
        vertices,
        conn,
        Vec::new(),
        p,
        p,
        SurfaceKind::Sphere { radius: r },
    )
}
