//! Reference elements for triangles and quadrilaterals.
//!
//! Fields are sampled at quadrature points that double as the solution
//! points. Each element carries an orthonormal modal basis (tensor Legendre
//! on quads, Dubiner on triangles) so that differentiation is an exact L2
//! projection followed by modal differentiation. The quadrature is exact for
//! degree 2p+1, which makes the projector B^T W a true L2 projection on
//! polynomials of the element space.

use nalgebra::DMatrix;

use super::nodes::{quad_nodes, tri_nodes};
use super::poly::{grad_jacobi, jacobi};
use super::quad_rules::{gauss_jacobi, gauss_legendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElemKind {
    Tri,
    Quad,
}

impl ElemKind {
    pub fn n_verts(self) -> usize {
        match self {
            ElemKind::Tri => 3,
            ElemKind::Quad => 4,
        }
    }

    pub fn n_faces(self) -> usize {
        self.n_verts()
    }

    pub fn n_modes(self, p: usize) -> usize {
        match self {
            ElemKind::Tri => (p + 1) * (p + 2) / 2,
            ElemKind::Quad => (p + 1) * (p + 1),
        }
    }

    /// Element type code used in the mesh file format.
    pub fn type_code(self) -> usize {
        self.n_verts()
    }
}

/// Evaluate orthonormal modal basis function `mode` with its reference
/// gradient at (r,s).
fn eval_mode(kind: ElemKind, p: usize, mode: usize, r: f64, s: f64) -> (f64, f64, f64) {
    match kind {
        ElemKind::Quad => {
            let i = mode % (p + 1);
            let j = mode / (p + 1);
            let v = jacobi(r, 0.0, 0.0, i) * jacobi(s, 0.0, 0.0, j);
            let dr = grad_jacobi(r, 0.0, 0.0, i) * jacobi(s, 0.0, 0.0, j);
            let ds = jacobi(r, 0.0, 0.0, i) * grad_jacobi(s, 0.0, 0.0, j);
            (v, dr, ds)
        }
        ElemKind::Tri => {
            let (i, j) = tri_mode_ij(p, mode);
            let b = s;
            let a = if (1.0 - s).abs() < 1e-14 {
                -1.0
            } else {
                2.0 * (1.0 + r) / (1.0 - s) - 1.0
            };
            let fa = jacobi(a, 0.0, 0.0, i);
            let dfa = grad_jacobi(a, 0.0, 0.0, i);
            let al = 2.0 * i as f64 + 1.0;
            let gb = jacobi(b, al, 0.0, j);
            let dgb = grad_jacobi(b, al, 0.0, j);
            let half1mb = 0.5 * (1.0 - b);
            let scale = 2f64.powf(i as f64 + 0.5);

            let v = scale * fa * gb * half1mb.powi(i as i32);

            let pow_im1 = if i > 0 { half1mb.powi(i as i32 - 1) } else { 1.0 };
            let dr = scale * dfa * gb * if i > 0 { pow_im1 } else { 1.0 };

            let mut ds = dfa * gb * 0.5 * (1.0 + a) * if i > 0 { pow_im1 } else { 1.0 };
            let mut tmp = dgb * half1mb.powi(i as i32);
            if i > 0 {
                tmp -= 0.5 * i as f64 * gb * pow_im1;
            }
            ds += fa * tmp;
            ds *= scale;
            (v, dr, ds)
        }
    }
}

fn tri_mode_ij(p: usize, mode: usize) -> (usize, usize) {
    let mut m = mode;
    for i in 0..=p {
        let count = p + 1 - i;
        if m < count {
            return (i, m);
        }
        m -= count;
    }
    panic!("mode index out of range");
}

/// One face of a reference element with its quadrature and trace operators.
#[derive(Debug, Clone)]
pub struct RefFace {
    /// Local corner indices (start, end) in local traversal order.
    pub verts: (usize, usize),
    /// 1D quadrature parameters on [-1,1] along the local direction.
    pub fq: Vec<f64>,
    pub fw: Vec<f64>,
    /// Reference coordinates of the face quadrature points.
    pub coords: Vec<(f64, f64)>,
    /// (dr/dt, ds/dt) along the face parameter.
    pub dref_dt: (f64, f64),
    /// Reference-space outward normal of the face.
    pub ref_normal: (f64, f64),
    /// Solution modal basis evaluated at face points: nfq x nm.
    pub trace: DMatrix<f64>,
    /// Geometry interpolation at face points: nfq x nn.
    pub node_trace: DMatrix<f64>,
    pub node_trace_dr: DMatrix<f64>,
    pub node_trace_ds: DMatrix<f64>,
}

/// Precomputed operators for one element shape and order.
#[derive(Debug, Clone)]
pub struct RefElement {
    pub kind: ElemKind,
    /// Solution polynomial order.
    pub order: usize,
    /// Geometry polynomial order.
    pub geom_order: usize,
    pub n_modes: usize,
    pub n_qpts: usize,
    pub n_nodes: usize,
    /// Quadrature points (r,s), exact for degree 2p+1.
    pub qp: Vec<(f64, f64)>,
    /// Reference quadrature weights.
    pub qw: Vec<f64>,
    /// Geometry nodal points.
    pub nodes: Vec<(f64, f64)>,
    /// Modal basis at quadrature points: nq x nm.
    pub b: DMatrix<f64>,
    pub br: DMatrix<f64>,
    pub bs: DMatrix<f64>,
    /// L2 projector point values -> modal coefficients: nm x nq (= B^T W).
    pub proj: DMatrix<f64>,
    /// Pointwise derivative operators (projection + modal derivative): nq x nq.
    pub dr: DMatrix<f64>,
    pub ds: DMatrix<f64>,
    /// Geometry nodal values -> quadrature point values: nq x nn.
    pub node_to_qp: DMatrix<f64>,
    pub node_to_qp_dr: DMatrix<f64>,
    pub node_to_qp_ds: DMatrix<f64>,
    pub faces: Vec<RefFace>,
}

impl RefElement {
    pub fn new(kind: ElemKind, order: usize, geom_order: usize) -> Self {
        assert!(order >= 1 && order <= 12, "order must be in 1..=12");
        assert!(geom_order >= 1);
        let p = order;
        let nm = kind.n_modes(p);

        // Quadrature: tensor Gauss on the square, collapsed Gauss x
        // Gauss-Jacobi(1,0) on the triangle. Both are exact to degree 2p+1.
        let n1 = p + 1;
        let (qp, qw): (Vec<(f64, f64)>, Vec<f64>) = match kind {
            ElemKind::Quad => {
                let (g, w) = gauss_legendre(n1);
                let mut pts = Vec::new();
                let mut wts = Vec::new();
                for j in 0..n1 {
                    for i in 0..n1 {
                        pts.push((g[i], g[j]));
                        wts.push(w[i] * w[j]);
                    }
                }
                (pts, wts)
            }
            ElemKind::Tri => {
                let (ga, wa) = gauss_legendre(n1);
                let (gb, wb) = gauss_jacobi(n1, 1.0, 0.0);
                let mut pts = Vec::new();
                let mut wts = Vec::new();
                for j in 0..n1 {
                    for i in 0..n1 {
                        let a = ga[i];
                        let b = gb[j];
                        let r = 0.5 * (1.0 + a) * (1.0 - b) - 1.0;
                        pts.push((r, b));
                        wts.push(0.5 * wa[i] * wb[j]);
                    }
                }
                (pts, wts)
            }
        };
        let nq = qp.len();

        let mut b = DMatrix::zeros(nq, nm);
        let mut br = DMatrix::zeros(nq, nm);
        let mut bs = DMatrix::zeros(nq, nm);
        for q in 0..nq {
            for m in 0..nm {
                let (v, dr, ds) = eval_mode(kind, p, m, qp[q].0, qp[q].1);
                b[(q, m)] = v;
                br[(q, m)] = dr;
                bs[(q, m)] = ds;
            }
        }
        let mut proj = b.transpose();
        for q in 0..nq {
            for m in 0..nm {
                proj[(m, q)] *= qw[q];
            }
        }
        let dr = &br * &proj;
        let ds = &bs * &proj;

        // Geometry: nodal Lagrange basis of order geom_order.
        let g = geom_order;
        let nodes = match kind {
            ElemKind::Quad => quad_nodes(g),
            ElemKind::Tri => tri_nodes(g),
        };
        let nn = nodes.len();
        let nmg = kind.n_modes(g);
        assert_eq!(nn, nmg, "nodal set must be unisolvent");
        let v_nodal = DMatrix::from_fn(nn, nmg, |i, m| {
            eval_mode(kind, g, m, nodes[i].0, nodes[i].1).0
        });
        let v_inv = v_nodal
            .clone()
            .lu()
            .try_inverse()
            .expect("nodal Vandermonde must be invertible");
        let eval_geom = |pts: &[(f64, f64)]| {
            let npt = pts.len();
            let mut bg = DMatrix::zeros(npt, nmg);
            let mut bgr = DMatrix::zeros(npt, nmg);
            let mut bgs = DMatrix::zeros(npt, nmg);
            for (i, &(r, s)) in pts.iter().enumerate() {
                for m in 0..nmg {
                    let (v, dr, ds) = eval_mode(kind, g, m, r, s);
                    bg[(i, m)] = v;
                    bgr[(i, m)] = dr;
                    bgs[(i, m)] = ds;
                }
            }
            (bg * &v_inv, bgr * &v_inv, bgs * &v_inv)
        };
        let (node_to_qp, node_to_qp_dr, node_to_qp_ds) = eval_geom(&qp);

        // Faces with 1D Gauss quadrature (p+2 points).
        let nfq = p + 2;
        let (fq, fw) = gauss_legendre(nfq);
        let face_defs: Vec<((usize, usize), Box<dyn Fn(f64) -> (f64, f64)>, (f64, f64), (f64, f64))> =
            match kind {
                ElemKind::Tri => vec![
                    ((0, 1), Box::new(|t| (t, -1.0)), (1.0, 0.0), (0.0, -1.0)),
                    ((1, 2), Box::new(|t| (-t, t)), (-1.0, 1.0), (1.0, 1.0)),
                    ((2, 0), Box::new(|t| (-1.0, -t)), (0.0, -1.0), (-1.0, 0.0)),
                ],
                ElemKind::Quad => vec![
                    ((0, 1), Box::new(|t| (t, -1.0)), (1.0, 0.0), (0.0, -1.0)),
                    ((1, 2), Box::new(|t| (1.0, t)), (0.0, 1.0), (1.0, 0.0)),
                    ((2, 3), Box::new(|t| (-t, 1.0)), (-1.0, 0.0), (0.0, 1.0)),
                    ((3, 0), Box::new(|t| (-1.0, -t)), (0.0, -1.0), (-1.0, 0.0)),
                ],
            };

        let faces = face_defs
            .into_iter()
            .map(|(verts, param, dref_dt, ref_normal)| {
                let coords: Vec<(f64, f64)> = fq.iter().map(|&t| param(t)).collect();
                let mut trace = DMatrix::zeros(nfq, nm);
                for (i, &(r, s)) in coords.iter().enumerate() {
                    for m in 0..nm {
                        trace[(i, m)] = eval_mode(kind, p, m, r, s).0;
                    }
                }
                let (node_trace, node_trace_dr, node_trace_ds) = eval_geom(&coords);
                RefFace {
                    verts,
                    fq: fq.clone(),
                    fw: fw.clone(),
                    coords,
                    dref_dt,
                    ref_normal,
                    trace,
                    node_trace,
                    node_trace_dr,
                    node_trace_ds,
                }
            })
            .collect();

        RefElement {
            kind,
            order: p,
            geom_order: g,
            n_modes: nm,
            n_qpts: nq,
            n_nodes: nn,
            qp,
            qw,
            nodes,
            b,
            br,
            bs,
            proj,
            dr,
            ds,
            node_to_qp,
            node_to_qp_dr,
            node_to_qp_ds,
            faces,
        }
    }

    /// Reference-element area (2 for the triangle, 4 for the square).
    pub fn ref_area(&self) -> f64 {
        match self.kind {
            ElemKind::Tri => 2.0,
            ElemKind::Quad => 4.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn modal_orthonormality() {
        for kind in [ElemKind::Quad, ElemKind::Tri] {
            for p in 1..=7 {
                let re = RefElement::new(kind, p, p);
                let gram = &re.proj * &re.b; // B^T W B
                for i in 0..re.n_modes {
                    for j in 0..re.n_modes {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert_relative_eq!(gram[(i, j)], expect, epsilon = 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn weights_sum_to_reference_area() {
        for kind in [ElemKind::Quad, ElemKind::Tri] {
            let re = RefElement::new(kind, 4, 4);
            let total: f64 = re.qw.iter().sum();
            assert_relative_eq!(total, re.ref_area(), epsilon = 1e-12);
        }
    }

    #[test]
    fn derivative_operators_exact_on_polynomials() {
        // u = r^2 s + 3 r s - s^3 is in P3, so p = 3 must differentiate exactly
        let f = |r: f64, s: f64| r * r * s + 3.0 * r * s - s * s * s;
        let fr = |r: f64, s: f64| 2.0 * r * s + 3.0 * s;
        let fs = |r: f64, s: f64| r * r + 3.0 * r - 3.0 * s * s;
        for kind in [ElemKind::Quad, ElemKind::Tri] {
            for p in 3..=6 {
                let re = RefElement::new(kind, p, p);
                let u = nalgebra::DVector::from_iterator(
                    re.n_qpts,
                    re.qp.iter().map(|&(r, s)| f(r, s)),
                );
                let dur = &re.dr * &u;
                let dus = &re.ds * &u;
                for (q, &(r, s)) in re.qp.iter().enumerate() {
                    assert_relative_eq!(dur[q], fr(r, s), epsilon = 1e-10);
                    assert_relative_eq!(dus[q], fs(r, s), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn face_trace_matches_direct_evaluation() {
        let f = |r: f64, s: f64| 0.3 * r * r - r * s + 2.0 * s;
        for kind in [ElemKind::Quad, ElemKind::Tri] {
            let re = RefElement::new(kind, 3, 3);
            let u = nalgebra::DVector::from_iterator(re.n_qpts, re.qp.iter().map(|&(r, s)| f(r, s)));
            let c = &re.proj * &u;
            for face in &re.faces {
                let vals = &face.trace * &c;
                for (i, &(r, s)) in face.coords.iter().enumerate() {
                    assert_relative_eq!(vals[i], f(r, s), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn geometry_interpolation_exact() {
        // geometry nodal interpolation must reproduce polynomials of the
        // geometry order at quadrature points
        let f = |r: f64, s: f64| 1.0 + r + s + r * s;
        for kind in [ElemKind::Quad, ElemKind::Tri] {
            let re = RefElement::new(kind, 4, 2);
            let nodal =
                nalgebra::DVector::from_iterator(re.n_nodes, re.nodes.iter().map(|&(r, s)| f(r, s)));
            let at_qp = &re.node_to_qp * &nodal;
            for (q, &(r, s)) in re.qp.iter().enumerate() {
                assert_relative_eq!(at_qp[q], f(r, s), epsilon = 1e-10);
            }
            let dr = &re.node_to_qp_dr * &nodal;
            for (q, &(_, s)) in re.qp.iter().enumerate() {
                assert_relative_eq!(dr[q], 1.0 + s, epsilon = 1e-10);
            }
        }
    }
}
