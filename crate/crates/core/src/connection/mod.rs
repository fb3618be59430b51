//! Connection form and curvature of orthonormal frame fields.
//!
//! The connection component w_ijk = e^i . (J(e^j) e^k) measures the rotation
//! of e^j toward e^i when moving along e^k, where J(e^j) is the tangential
//! Jacobian of the Cartesian components of e^j. Antisymmetry in (i,j) leaves
//! three independent 1-forms; their six directional values along e^1, e^2
//! are stored per point. The nontrivial Riemann curvature component of the
//! orthonormal basis follows from the second structure equation with the
//! wedge (Gaussian torsion) term vanishing identically:
//! R2121 = grad(w211) . e^2 - grad(w212) . e^1.

use nalgebra::Matrix3;

use crate::frames::{AlignFlag, FrameField};
use crate::mesh::{ScalarField, SurfaceMesh};

/// Sentinel written for points excluded from connection/curvature maps.
pub const SENTINEL: f64 = f64::NAN;

/// The six stored connection values per point (units 1/length).
#[derive(Debug, Clone)]
pub struct ConnectionField {
    pub w211: Vec<f64>,
    pub w212: Vec<f64>,
    pub w311: Vec<f64>,
    pub w312: Vec<f64>,
    pub w321: Vec<f64>,
    pub w322: Vec<f64>,
    /// False where the underlying frames were unaligned or rejected.
    pub valid: Vec<bool>,
}

/// Pointwise curvature diagnostics derived from the connection.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    /// Riemann curvature of the orthonormal basis (1/length^2).
    pub r2121: Vec<f64>,
    /// The approximation -grad(w212) . e^1 that drops the w211 term.
    pub r2121_approx: Vec<f64>,
    pub gauss_k: Vec<f64>,
    pub mean_h: Vec<f64>,
    pub valid: Vec<bool>,
}

/// Compute the connection form of a frame field by elementwise polynomial
/// differentiation of the frame components. No inter-element averaging is
/// applied; interface jumps can be inspected with
/// [`interface_jump_diagnostic`].
pub fn connection_form(mesh: &SurfaceMesh, frames: &FrameField) -> ConnectionField {
    let n = mesh.n_points();
    assert_eq!(frames.len(), n);
    let j1 = mesh.jacobian(&frames.e1_field());
    let j2 = mesh.jacobian(&frames.e2_field());

    let mut out = ConnectionField {
        w211: vec![0.0; n],
        w212: vec![0.0; n],
        w311: vec![0.0; n],
        w312: vec![0.0; n],
        w321: vec![0.0; n],
        w322: vec![0.0; n],
        valid: vec![false; n],
    };
    let contract = |e_i: &nalgebra::Vector3<f64>, jac: &Matrix3<f64>, e_k: &nalgebra::Vector3<f64>| {
        e_i.dot(&(jac * e_k))
    };
    for i in 0..n {
        let (e1, e2, e3) = (&frames.e1[i], &frames.e2[i], &frames.e3[i]);
        out.w211[i] = contract(e2, &j1[i], e1);
        out.w212[i] = contract(e2, &j1[i], e2);
        out.w311[i] = contract(e3, &j1[i], e1);
        out.w312[i] = contract(e3, &j1[i], e2);
        out.w321[i] = contract(e3, &j2[i], e1);
        out.w322[i] = contract(e3, &j2[i], e2);
        out.valid[i] = frames.flag[i] == AlignFlag::Aligned;
    }
    out
}

/// Gaussian and mean curvature from the normal connection components:
/// K = w311 w322 - w312 w321, H = (w311 + w322) / 2.
pub fn gauss_mean(conn: &ConnectionField) -> (Vec<f64>, Vec<f64>) {
    let n = conn.w211.len();
    let mut k = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    for i in 0..n {
        k.push(conn.w311[i] * conn.w322[i] - conn.w312[i] * conn.w321[i]);
        h.push(0.5 * (conn.w311[i] + conn.w322[i]));
    }
    (k, h)
}

/// The wedge term of the second structure equation, evaluated literally:
/// sum over k in {1,2} of det [[w^2_k<e^m>, w^2_k<e^n>], [w^k_1<e^m>,
/// w^k_1<e^n>]]. The diagonal forms w^1_1 and w^2_2 are identically zero,
/// so every determinant carries a zero row and the sum vanishes exactly.
pub fn gaussian_torsion(conn: &ConnectionField, i: usize) -> f64 {
    // k = 1: w^2_1 wedge w^1_1; the second row is w^1_1 = 0.
    let det1 = conn.w211[i] * 0.0 - conn.w212[i] * 0.0;
    // k = 2: w^2_2 wedge w^2_1; the first row is w^2_2 = 0.
    let det2 = 0.0 * conn.w212[i] - 0.0 * conn.w211[i];
    det1 + det2
}

/// Riemann curvature of the orthonormal basis per point, together with the
/// Gaussian/mean curvature maps. The connection values are L2-projected
/// back onto the element polynomial space inside the elementwise gradient,
/// which stabilizes this third derivative of the frames. Elements
/// containing invalid points are excluded entirely (their second
/// differentiation would mix sentinel data into every point).
pub fn riemann_2121(mesh: &SurfaceMesh, conn: &ConnectionField, frames: &FrameField) -> CurvatureField {
    let n = mesh.n_points();
    let mut elem_valid = vec![true; mesh.n_elements()];
    for e in 0..mesh.n_elements() {
        for idx in mesh.elem_points(e) {
            if !conn.valid[idx] {
                elem_valid[e] = false;
                break;
            }
        }
    }

    let clean = |v: &[f64]| ScalarField {
        data: v
            .iter()
            .enumerate()
            .map(|(i, &x)| if conn.valid[i] { x } else { 0.0 })
            .collect(),
    };
    let g211 = mesh.gradient(&clean(&conn.w211));
    let g212 = mesh.gradient(&clean(&conn.w212));

    let (gauss_k, mean_h) = gauss_mean(conn);
    let mut out = CurvatureField {
        r2121: vec![SENTINEL; n],
        r2121_approx: vec![SENTINEL; n],
        gauss_k: vec![SENTINEL; n],
        mean_h: vec![SENTINEL; n],
        valid: vec![false; n],
    };
    for e in 0..mesh.n_elements() {
        for idx in mesh.elem_points(e) {
            if !elem_valid[e] || !conn.valid[idx] {
                continue;
            }
            let full = g211.data[idx].dot(&frames.e2[idx]) - g212.data[idx].dot(&frames.e1[idx]);
            out.r2121[idx] = full;
            out.r2121_approx[idx] = -g212.data[idx].dot(&frames.e1[idx]);
            out.gauss_k[idx] = gauss_k[idx];
            out.mean_h[idx] = mean_h[idx];
            out.valid[idx] = true;
        }
    }
    out
}

/// Apply the sentinel to the connection values of invalid points (used
/// when writing maps; the raw values stay available for diagnostics).
pub fn apply_sentinel(conn: &ConnectionField) -> ConnectionField {
    let mut c = conn.clone();
    for i in 0..c.valid.len() {
        if !c.valid[i] {
            c.w211[i] = SENTINEL;
            c.w212[i] = SENTINEL;
            c.w311[i] = SENTINEL;
            c.w312[i] = SENTINEL;
            c.w321[i] = SENTINEL;
            c.w322[i] = SENTINEL;
        }
    }
    c
}

/// Max jump of w212 across interior faces; a diagnostic for the accepted
/// inter-element discontinuity of the connection.
pub fn interface_jump_diagnostic(mesh: &SurfaceMesh, conn: &ConnectionField) -> f64 {
    let mut worst = 0.0f64;
    for face in mesh.faces() {
        if face.sides.len() != 2 {
            continue;
        }
        let v0 = mesh.face_values(face, &face.sides[0], &conn.w212);
        let v1 = mesh.face_values(face, &face.sides[1], &conn.w212);
        for (a, b) in v0.iter().zip(&v1) {
            if a.is_finite() && b.is_finite() {
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}

/// Boolean mask with contiguous-region labels.
#[derive(Debug, Clone)]
pub struct RegionMask {
    pub mask: Vec<bool>,
    /// 0 for unmasked points; 1..=n_regions for labeled regions.
    pub labels: Vec<u32>,
    pub n_regions: usize,
}

/// Threshold a scalar map: mask points where the value exceeds `tau`,
/// label contiguous regions through element adjacency.
pub fn curvature_threshold(mesh: &SurfaceMesh, field: &[f64], tau: f64) -> RegionMask {
    assert!(tau > 0.0, "threshold must be positive");
    let n = mesh.n_points();
    assert_eq!(field.len(), n);
    let mask: Vec<bool> = field.iter().map(|&v| v.is_finite() && v > tau).collect();

    // Union-find over elements that contain masked points.
    let ne = mesh.n_elements();
    let hot: Vec<bool> = (0..ne)
        .map(|e| mesh.elem_points(e).any(|i| mask[i]))
        .collect();
    let mut parent: Vec<usize> = (0..ne).collect();
    fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for face in mesh.faces() {
        if face.sides.len() == 2 {
            let (a, b) = (face.sides[0].elem, face.sides[1].elem);
            if hot[a] && hot[b] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut label_of_root = std::collections::BTreeMap::new();
    let mut labels = vec![0u32; n];
    let mut next = 0u32;
    for e in 0..ne {
        if !hot[e] {
            continue;
        }
        let root = find(&mut parent, e);
        let lab = *label_of_root.entry(root).or_insert_with(|| {
            next += 1;
            next
        });
        for i in mesh.elem_points(e) {
            if mask[i] {
                labels[i] = lab;
            }
        }
    }
    RegionMask {
        mask,
        labels,
        n_regions: next as usize,
    }
}
