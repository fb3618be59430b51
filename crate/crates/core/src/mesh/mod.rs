//! Surface meshes with high-order curved element geometry.
//!
//! A mesh is a set of triangles / quadrilaterals with polynomial geometry.
//! Every element carries a set of quadrature points that double as the
//! solution points of all fields: positions, quadrature weights, dual
//! tangent vectors and unit surface normals are cached per point at build
//! time. Meshes are immutable after construction.

pub mod fields;
pub mod io;
mod plane;
mod sphere;

use std::collections::BTreeMap;

use nalgebra::{DVector, Matrix3, Vector3};

use crate::basis::{ElemKind, RefElement};
use crate::error::{Error, Result};
pub use fields::{ScalarField, VectorField};
pub use plane::{build_plane_mesh, Extent};
pub use sphere::build_sphere_mesh;

/// Analytic surface a mesh samples, when known. Used to assign exact
/// normals and to regenerate curved geometry on load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind {
    Plane,
    Sphere { radius: f64 },
    Generic,
}

#[derive(Debug, Clone)]
pub struct Element {
    pub kind: ElemKind,
    pub verts: Vec<usize>,
    /// Geometry values at the reference nodal points.
    pub geom_nodes: Vec<Vector3<f64>>,
}

/// Per-element geometric data at the quadrature points.
#[derive(Debug, Clone)]
pub struct ElementGeom {
    pub xq: Vec<Vector3<f64>>,
    /// Quadrature weight times surface Jacobian (area units).
    pub wj: Vec<f64>,
    /// Dual tangent vectors: grad_x r and grad_x s on the surface.
    pub a_r: Vec<Vector3<f64>>,
    pub a_s: Vec<Vector3<f64>>,
    /// Unit surface normal.
    pub normal: Vec<Vector3<f64>>,
}

/// One side of a mesh face.
#[derive(Debug, Clone)]
pub struct FaceSide {
    pub elem: usize,
    pub local_face: usize,
    /// Whether the local traversal direction opposes the global one
    /// (global = from smaller to larger vertex id).
    pub flip: bool,
    /// Outward co-normal (tangent to the surface, normal to the edge) at
    /// the face quadrature points, in global order.
    pub conormal: Vec<Vector3<f64>>,
}

#[derive(Debug, Clone)]
pub struct MeshFace {
    pub verts: (usize, usize),
    pub sides: Vec<FaceSide>,
    /// Face quadrature positions in global order.
    pub xf: Vec<Vector3<f64>>,
    /// 1D quadrature weight times edge Jacobian (length units).
    pub wj: Vec<f64>,
    /// Unit surface normal at the face points.
    pub normal: Vec<Vector3<f64>>,
}

impl MeshFace {
    pub fn is_boundary(&self) -> bool {
        self.sides.len() == 1
    }
}

/// A curved 2-manifold mesh with cached high-order geometry.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    vertices: Vec<Vector3<f64>>,
    elements: Vec<Element>,
    order: usize,
    geom_order: usize,
    surface: SurfaceKind,
    ref_tri: Option<RefElement>,
    ref_quad: Option<RefElement>,
    geoms: Vec<ElementGeom>,
    faces: Vec<MeshFace>,
    /// Per element: global face id for each local face.
    elem_face_ids: Vec<Vec<usize>>,
    /// Point offset of each element (last entry = total point count).
    offsets: Vec<usize>,
    h_max: f64,
}

impl SurfaceMesh {
    /// Assemble a mesh from vertices and element connectivity.
    ///
    /// `geom_nodes` may be empty, in which case element geometry is built
    /// from the vertices (straight/bilinear) and projected onto the analytic
    /// surface when one is given.
    pub fn from_parts(
        vertices: Vec<Vector3<f64>>,
        conn: Vec<(ElemKind, Vec<usize>)>,
        geom_nodes: Vec<Vec<Vector3<f64>>>,
        order: usize,
        geom_order: usize,
        surface: SurfaceKind,
    ) -> Result<SurfaceMesh> {
        if !(1..=12).contains(&order) {
            return Err(Error::invalid(format!("solution order {order} out of range 1..=12")));
        }
        if conn.is_empty() {
            return Err(Error::invalid("mesh has no elements"));
        }
        let has_tri = conn.iter().any(|(k, _)| *k == ElemKind::Tri);
        let has_quad = conn.iter().any(|(k, _)| *k == ElemKind::Quad);
        let ref_tri = has_tri.then(|| RefElement::new(ElemKind::Tri, order, geom_order));
        let ref_quad = has_quad.then(|| RefElement::new(ElemKind::Quad, order, geom_order));
        let ref_of = |k: ElemKind| -> &RefElement {
            match k {
                ElemKind::Tri => ref_tri.as_ref().unwrap(),
                ElemKind::Quad => ref_quad.as_ref().unwrap(),
            }
        };

        // Element geometry nodes
        let use_given = !geom_nodes.is_empty();
        if use_given && geom_nodes.len() != conn.len() {
            return Err(Error::invalid("geometry node block count does not match element count"));
        }
        let mut elements = Vec::with_capacity(conn.len());
        for (e, (kind, verts)) in conn.into_iter().enumerate() {
            if verts.len() != kind.n_verts() {
                return Err(Error::invalid(format!(
                    "element {e} has {} vertices, expected {}",
                    verts.len(),
                    kind.n_verts()
                )));
            }
            for &v in &verts {
                if v >= vertices.len() {
                    return Err(Error::invalid(format!("element {e} references vertex {v} out of range")));
                }
            }
            let re = ref_of(kind);
            let nodes = if use_given {
                let g = geom_nodes[e].clone();
                if g.len() != re.n_nodes {
                    return Err(Error::invalid(format!(
                        "element {e} curved block has {} nodes, expected {}",
                        g.len(),
                        re.n_nodes
                    )));
                }
                g
            } else {
                re.nodes
                    .iter()
                    .map(|&(r, s)| {
                        let x = vertex_blend(kind, &verts, &vertices, r, s);
                        match surface {
                            SurfaceKind::Sphere { radius } => x * (radius / x.norm()),
                            _ => x,
                        }
                    })
                    .collect()
            };
            elements.push(Element {
                kind,
                verts,
                geom_nodes: nodes,
            });
        }

        // Geometry cache at quadrature points
        let mut geoms = Vec::with_capacity(elements.len());
        let mut offsets = Vec::with_capacity(elements.len() + 1);
        let mut total = 0usize;
        for (e, el) in elements.iter().enumerate() {
            let re = ref_of(el.kind);
            offsets.push(total);
            total += re.n_qpts;
            let (xq, xr, xs) = interp_geometry(re, &el.geom_nodes, &re.node_to_qp, &re.node_to_qp_dr, &re.node_to_qp_ds);
            let mut wj = Vec::with_capacity(re.n_qpts);
            let mut a_r = Vec::with_capacity(re.n_qpts);
            let mut a_s = Vec::with_capacity(re.n_qpts);
            let mut normal = Vec::with_capacity(re.n_qpts);
            for q in 0..re.n_qpts {
                let cross = xr[q].cross(&xs[q]);
                let j = cross.norm();
                if !(j > 1e-14) {
                    return Err(Error::invalid(format!(
                        "element {e} has degenerate Jacobian at quadrature point {q}"
                    )));
                }
                let k = surface_normal(surface, &xq[q], &cross)?;
                if cross.dot(&k) <= 0.0 {
                    return Err(Error::invalid(format!(
                        "element {e} is wound opposite to the surface orientation"
                    )));
                }
                let (ar, as_) = dual_tangents(&xr[q], &xs[q]);
                wj.push(re.qw[q] * j);
                a_r.push(ar);
                a_s.push(as_);
                normal.push(k);
            }
            geoms.push(ElementGeom {
                xq,
                wj,
                a_r,
                a_s,
                normal,
            });
        }
        offsets.push(total);

        // Face connectivity: every edge keyed by its vertex pair.
        let mut edge_map: BTreeMap<(usize, usize), Vec<(usize, usize, bool)>> = BTreeMap::new();
        for (e, el) in elements.iter().enumerate() {
            let re = ref_of(el.kind);
            for (lf, face) in re.faces.iter().enumerate() {
                let a = el.verts[face.verts.0];
                let b = el.verts[face.verts.1];
                let key = (a.min(b), a.max(b));
                let flip = a > b;
                edge_map.entry(key).or_default().push((e, lf, flip));
            }
        }

        let mut faces = Vec::with_capacity(edge_map.len());
        let mut elem_face_ids: Vec<Vec<usize>> =
            elements.iter().map(|el| vec![usize::MAX; el.kind.n_faces()]).collect();
        for (key, sides_raw) in edge_map {
            if sides_raw.len() > 2 {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) is shared by {} elements; mesh is not a 2-manifold",
                    key.0,
                    key.1,
                    sides_raw.len()
                )));
            }
            let face_id = faces.len();

            // Shared face geometry from the first side.
            let (e0, lf0, flip0) = sides_raw[0];
            let el0 = &elements[e0];
            let re0 = ref_of(el0.kind);
            let rf0 = &re0.faces[lf0];
            let nfq = rf0.fq.len();
            let (xf_loc, xr_loc, xs_loc) =
                interp_geometry(re0, &el0.geom_nodes, &rf0.node_trace, &rf0.node_trace_dr, &rf0.node_trace_ds);
            let reorder = |v: Vec<Vector3<f64>>, flip: bool| -> Vec<Vector3<f64>> {
                if flip {
                    v.into_iter().rev().collect()
                } else {
                    v
                }
            };
            let xf = reorder(xf_loc.clone(), flip0);
            let mut wj = Vec::with_capacity(nfq);
            let mut normal = Vec::with_capacity(nfq);
            for i in 0..nfq {
                let iloc = if flip0 { nfq - 1 - i } else { i };
                let dxdt = xr_loc[iloc] * rf0.dref_dt.0 + xs_loc[iloc] * rf0.dref_dt.1;
                wj.push(rf0.fw[iloc] * dxdt.norm());
                let cross = xr_loc[iloc].cross(&xs_loc[iloc]);
                normal.push(surface_normal(surface, &xf[i], &cross)?);
            }

            let mut sides = Vec::with_capacity(sides_raw.len());
            for &(e, lf, flip) in &sides_raw {
                let el = &elements[e];
                let re = ref_of(el.kind);
                let rf = &re.faces[lf];
                let (xf_s, xr_s, xs_s) =
                    interp_geometry(re, &el.geom_nodes, &rf.node_trace, &rf.node_trace_dr, &rf.node_trace_ds);
                let mut conormal = Vec::with_capacity(nfq);
                for i in 0..nfq {
                    let iloc = if flip { nfq - 1 - i } else { i };
                    let (ar, as_) = dual_tangents(&xr_s[iloc], &xs_s[iloc]);
                    let v = ar * rf.ref_normal.0 + as_ * rf.ref_normal.1;
                    let k = &normal[i];
                    let v = v - k * v.dot(k);
                    let n = v.norm();
                    if !(n > 1e-14) {
                        return Err(Error::invalid(format!(
                            "element {e} face {lf} has a degenerate co-normal"
                        )));
                    }
                    conormal.push(v / n);
                    // Watertightness: both sides must see the same edge curve.
                    if (xf_s[iloc] - xf[i]).norm() > 1e-8 * (1.0 + xf[i].norm()) {
                        return Err(Error::invalid(format!(
                            "element {e} face {lf} geometry does not match its neighbor"
                        )));
                    }
                }
                elem_face_ids[e][lf] = face_id;
                sides.push(FaceSide {
                    elem: e,
                    local_face: lf,
                    flip,
                    conormal,
                });
            }

            faces.push(MeshFace {
                verts: key,
                sides,
                xf,
                wj,
                normal,
            });
        }

        // Longest edge, by 1D quadrature of the edge Jacobian.
        let h_max = faces
            .iter()
            .map(|f| f.wj.iter().sum::<f64>())
            .fold(0.0f64, f64::max);

        Ok(SurfaceMesh {
            vertices,
            elements,
            order,
            geom_order,
            surface,
            ref_tri,
            ref_quad,
            geoms,
            faces,
            elem_face_ids,
            offsets,
            h_max,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_points(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn geom_order(&self) -> usize {
        self.geom_order
    }

    pub fn surface(&self) -> SurfaceKind {
        self.surface
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn faces(&self) -> &[MeshFace] {
        &self.faces
    }

    pub fn elem_face_ids(&self) -> &[Vec<usize>] {
        &self.elem_face_ids
    }

    pub fn geom(&self, e: usize) -> &ElementGeom {
        &self.geoms[e]
    }

    pub fn ref_elem(&self, kind: ElemKind) -> &RefElement {
        match kind {
            ElemKind::Tri => self.ref_tri.as_ref().expect("no triangle elements in mesh"),
            ElemKind::Quad => self.ref_quad.as_ref().expect("no quad elements in mesh"),
        }
    }

    pub fn elem_ref(&self, e: usize) -> &RefElement {
        self.ref_elem(self.elements[e].kind)
    }

    /// Point index range of element `e`.
    pub fn elem_points(&self, e: usize) -> std::ops::Range<usize> {
        self.offsets[e]..self.offsets[e + 1]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Maximum edge length.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Position of solution point `i`.
    pub fn point(&self, i: usize) -> Vector3<f64> {
        let e = self.elem_of_point(i);
        self.geoms[e].xq[i - self.offsets[e]]
    }

    pub fn elem_of_point(&self, i: usize) -> usize {
        match self.offsets.binary_search(&i) {
            Ok(e) if e < self.elements.len() => e,
            Ok(e) => e - 1,
            Err(e) => e - 1,
        }
    }

    /// All point positions in layout order.
    pub fn points(&self) -> Vec<Vector3<f64>> {
        self.geoms.iter().flat_map(|g| g.xq.iter().copied()).collect()
    }

    /// Unit surface normal per point.
    pub fn normals(&self) -> VectorField {
        VectorField {
            data: self.geoms.iter().flat_map(|g| g.normal.iter().copied()).collect(),
        }
    }

    /// Quadrature weight (area element) per point.
    pub fn weights(&self) -> Vec<f64> {
        self.geoms.iter().flat_map(|g| g.wj.iter().copied()).collect()
    }

    pub fn check_field_len(&self, len: usize) -> Result<()> {
        if len != self.n_points() {
            return Err(Error::invalid(format!(
                "field has {len} points, mesh expects {}",
                self.n_points()
            )));
        }
        Ok(())
    }

    /// Total surface area by quadrature.
    pub fn area(&self) -> f64 {
        self.geoms.iter().map(|g| g.wj.iter().sum::<f64>()).sum()
    }

    /// Integral of a scalar field over the surface.
    pub fn integrate(&self, f: &ScalarField) -> f64 {
        assert_eq!(f.len(), self.n_points());
        let mut acc = 0.0;
        for (e, g) in self.geoms.iter().enumerate() {
            for (q, idx) in self.elem_points(e).enumerate() {
                acc += g.wj[q] * f.data[idx];
            }
        }
        acc
    }

    /// Tangential (covariant) gradient of a scalar field, elementwise.
    ///
    /// The point values are L2-projected onto the element polynomial space,
    /// differentiated in reference coordinates and pushed through the dual
    /// tangents; the normal component is projected out.
    pub fn gradient(&self, f: &ScalarField) -> VectorField {
        assert_eq!(f.len(), self.n_points());
        let mut out = VectorField::zeros(self.n_points());
        for e in 0..self.elements.len() {
            let re = self.elem_ref(e);
            let g = &self.geoms[e];
            let rng = self.elem_points(e);
            let u = DVector::from_column_slice(&f.data[rng.clone()]);
            let dur = &re.dr * &u;
            let dus = &re.ds * &u;
            for (q, idx) in rng.enumerate() {
                let mut grad = g.a_r[q] * dur[q] + g.a_s[q] * dus[q];
                let k = &g.normal[q];
                grad -= k * grad.dot(k);
                out.data[idx] = grad;
            }
        }
        out
    }

    /// Jacobian of the Cartesian components of a vector field restricted to
    /// the surface: row c of the output matrix at a point is the tangential
    /// gradient of component c.
    pub fn jacobian(&self, f: &VectorField) -> Vec<Matrix3<f64>> {
        assert_eq!(f.len(), self.n_points());
        let mut out = vec![Matrix3::zeros(); self.n_points()];
        for c in 0..3 {
            let comp = ScalarField {
                data: f.data.iter().map(|v| v[c]).collect(),
            };
            let grad = self.gradient(&comp);
            for (i, g) in grad.data.iter().enumerate() {
                out[i].set_row(c, &g.transpose());
            }
        }
        out
    }

    /// Covariant (surface) divergence of a tangent vector field.
    pub fn surface_divergence(&self, f: &VectorField) -> ScalarField {
        assert_eq!(f.len(), self.n_points());
        let mut out = ScalarField::zeros(self.n_points());
        for c in 0..3 {
            let comp = ScalarField {
                data: f.data.iter().map(|v| v[c]).collect(),
            };
            for e in 0..self.elements.len() {
                let re = self.elem_ref(e);
                let g = &self.geoms[e];
                let rng = self.elem_points(e);
                let u = DVector::from_column_slice(&comp.data[rng.clone()]);
                let dur = &re.dr * &u;
                let dus = &re.ds * &u;
                for (q, idx) in rng.enumerate() {
                    out.data[idx] += g.a_r[q][c] * dur[q] + g.a_s[q][c] * dus[q];
                }
            }
        }
        out
    }

    /// Trace of element point values onto the face quadrature points of one
    /// side, in global face order.
    pub fn face_values(&self, face: &MeshFace, side: &FaceSide, f: &[f64]) -> Vec<f64> {
        let re = self.elem_ref(side.elem);
        let rf = &re.faces[side.local_face];
        let rng = self.elem_points(side.elem);
        let u = DVector::from_column_slice(&f[rng]);
        let c = &re.proj * &u;
        let vals = &rf.trace * &c;
        let nfq = face.xf.len();
        (0..nfq)
            .map(|i| vals[if side.flip { nfq - 1 - i } else { i }])
            .collect()
    }
}

fn vertex_blend(kind: ElemKind, verts: &[usize], vertices: &[Vector3<f64>], r: f64, s: f64) -> Vector3<f64> {
    match kind {
        ElemKind::Tri => {
            vertices[verts[0]] * (-(r + s) / 2.0)
                + vertices[verts[1]] * ((1.0 + r) / 2.0)
                + vertices[verts[2]] * ((1.0 + s) / 2.0)
        }
        ElemKind::Quad => {
            (vertices[verts[0]] * ((1.0 - r) * (1.0 - s))
                + vertices[verts[1]] * ((1.0 + r) * (1.0 - s))
                + vertices[verts[2]] * ((1.0 + r) * (1.0 + s))
                + vertices[verts[3]] * ((1.0 - r) * (1.0 + s)))
                * 0.25
        }
    }
}

fn interp_geometry(
    _re: &RefElement,
    geom_nodes: &[Vector3<f64>],
    interp: &nalgebra::DMatrix<f64>,
    interp_dr: &nalgebra::DMatrix<f64>,
    interp_ds: &nalgebra::DMatrix<f64>,
) -> (Vec<Vector3<f64>>, Vec<Vector3<f64>>, Vec<Vector3<f64>>) {
    let npt = interp.nrows();
    let nn = geom_nodes.len();
    let mut x = vec![Vector3::zeros(); npt];
    let mut xr = vec![Vector3::zeros(); npt];
    let mut xs = vec![Vector3::zeros(); npt];
    for i in 0..npt {
        for n in 0..nn {
            x[i] += geom_nodes[n] * interp[(i, n)];
            xr[i] += geom_nodes[n] * interp_dr[(i, n)];
            xs[i] += geom_nodes[n] * interp_ds[(i, n)];
        }
    }
    (x, xr, xs)
}

fn dual_tangents(xr: &Vector3<f64>, xs: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let g11 = xr.dot(xr);
    let g12 = xr.dot(xs);
    let g22 = xs.dot(xs);
    let det = g11 * g22 - g12 * g12;
    let a_r = (xr * g22 - xs * g12) / det;
    let a_s = (xs * g11 - xr * g12) / det;
    (a_r, a_s)
}

fn surface_normal(surface: SurfaceKind, x: &Vector3<f64>, cross: &Vector3<f64>) -> Result<Vector3<f64>> {
    Ok(match surface {
        SurfaceKind::Plane => Vector3::new(0.0, 0.0, 1.0),
        SurfaceKind::Sphere { .. } => {
            let n = x.norm();
            if n < 1e-14 {
                return Err(Error::invalid("sphere-surface point at the origin"));
            }
            x / n
        }
        SurfaceKind::Generic => {
            let n = cross.norm();
            if n < 1e-14 {
                return Err(Error::invalid("degenerate surface normal"));
            }
            cross / n
        }
    })
}
