//! Structured quadrilateral meshes of planar rectangles.

use nalgebra::Vector3;

use crate::basis::ElemKind;
use crate::error::{Error, Result};

use super::{SurfaceKind, SurfaceMesh};

/// Rectangle bounds [xmin, xmax] x [ymin, ymax] in the z = 0 plane.
#[derive(Debug, Clone, Copy)]
pub struct Extent {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Extent {
    pub fn square(lo: f64, hi: f64) -> Self {
        Extent {
            xmin: lo,
            xmax: hi,
            ymin: lo,
            ymax: hi,
        }
    }
}

/// Build a flat quadrilateral mesh of the rectangle with target edge length
/// `h`. The actual mesh spacing never exceeds `h`, and the mesh reports its
/// maximum edge length through [`SurfaceMesh::h_max`]. Normals are (0,0,1).
pub fn build_plane_mesh(extent: Extent, h: f64, p: usize) -> Result<SurfaceMesh> {
    let lx = extent.xmax - extent.xmin;
    let ly = extent.ymax - extent.ymin;
    if !(lx > 0.0) || !(ly > 0.0) {
        return Err(Error::invalid(format!(
            "degenerate extent [{}, {}] x [{}, {}]",
            extent.xmin, extent.xmax, extent.ymin, extent.ymax
        )));
    }
    if !(h > 0.0) {
        return Err(Error::invalid(format!("target edge length {h} must be positive")));
    }
    if !(1..=10).contains(&p) {
        return Err(Error::invalid(format!("order {p} out of range 1..=10")));
    }

    let nx = (lx / h).ceil() as usize;
    let ny = (ly / h).ceil() as usize;
    let dx = lx / nx as f64;
    let dy = ly / ny as f64;

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Vector3::new(
                extent.xmin + dx * i as f64,
                extent.ymin + dy * j as f64,
                0.0,
            ));
        }
    }
    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut conn = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            conn.push((
                ElemKind::Quad,
                vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)],
            ));
        }
    }

    SurfaceMesh::from_parts(vertices, conn, Vec::new(), p, p, SurfaceKind::Plane)
}
