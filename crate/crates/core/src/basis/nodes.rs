//! Nodal point sets used for element geometry: tensor-product Gauss-Lobatto
//! points on quadrilaterals and warped simplex points on triangles. Edge
//! nodes of both families coincide with 1D Gauss-Lobatto points, so adjacent
//! elements sharing an edge interpolate identical edge curves.

use nalgebra::DMatrix;

use super::poly::jacobi;
use super::quad_rules::gauss_lobatto;

/// Tensor-product Gauss-Lobatto nodes on the reference square, ordered
/// j-major: (i + j*(p+1)) with r varying fastest.
pub fn quad_nodes(p: usize) -> Vec<(f64, f64)> {
    let g = gauss_lobatto(p + 1);
    let mut out = Vec::with_capacity((p + 1) * (p + 1));
    for &s in &g {
        for &r in &g {
            out.push((r, s));
        }
    }
    out
}

// Interpolation warp factor: displacement from equidistant to Gauss-Lobatto
// 1D nodes, evaluated at arbitrary coordinates `rout`, with the edge factor
// (1 - r^2) divided out.
fn warp_factor(n: usize, rout: &[f64]) -> Vec<f64> {
    let lgl = gauss_lobatto(n + 1);
    let req: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();

    // Vandermonde at the equidistant nodes
    let np = n + 1;
    let veq = DMatrix::from_fn(np, np, |i, m| jacobi(req[i], 0.0, 0.0, m));
    let veq_t = veq.transpose();
    let lu = veq_t.lu();

    let mut warp = vec![0.0; rout.len()];
    for (j, &r) in rout.iter().enumerate() {
        // Lagrange basis at r via the modal expansion
        let pvec = DMatrix::from_fn(np, 1, |m, _| jacobi(r, 0.0, 0.0, m));
        let lag = lu.solve(&pvec).expect("equidistant Vandermonde is invertible");
        let mut w = 0.0;
        for i in 0..np {
            w += lag[(i, 0)] * (lgl[i] - req[i]);
        }
        let zerof = r.abs() < 1.0 - 1e-10;
        let sf = if zerof { 1.0 - r * r } else { 1.0 };
        warp[j] = if zerof { w / sf } else { 0.0 };
    }
    warp
}

/// Warp-and-blend nodes on the reference triangle {r,s >= -1, r+s <= 0},
/// ordered row-wise from vertex (-1,-1).
pub fn tri_nodes(p: usize) -> Vec<(f64, f64)> {
    const ALPHA_OPT: [f64; 15] = [
        0.0, 0.0, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832, 1.3648, 1.4773, 1.4959,
        1.5743, 1.5770, 1.6223, 1.6258,
    ];
    let alpha = if p < 16 { ALPHA_OPT[p.saturating_sub(1)] } else { 5.0 / 3.0 };
    let n = p;
    let np = (n + 1) * (n + 2) / 2;

    // Equidistant barycentric coordinates
    let mut l1 = Vec::with_capacity(np);
    let mut l2 = Vec::with_capacity(np);
    let mut l3 = Vec::with_capacity(np);
    for row in 0..=n {
        for col in 0..=(n - row) {
            let a = row as f64 / n.max(1) as f64;
            let c = col as f64 / n.max(1) as f64;
            l1.push(a);
            l3.push(c);
            l2.push(1.0 - a - c);
        }
    }
    if p == 0 {
        return vec![(-1.0 / 3.0, -1.0 / 3.0)];
    }

    // Equilateral coordinates
    let mut x: Vec<f64> = (0..np).map(|i| -l2[i] + l3[i]).collect();
    let mut y: Vec<f64> = (0..np)
        .map(|i| (-l2[i] - l3[i] + 2.0 * l1[i]) / 3f64.sqrt())
        .collect();

    let blend = |la: &[f64], lb: &[f64], i: usize| 4.0 * la[i] * lb[i];
    let w1_arg: Vec<f64> = (0..np).map(|i| l3[i] - l2[i]).collect();
    let w2_arg: Vec<f64> = (0..np).map(|i| l1[i] - l3[i]).collect();
    let w3_arg: Vec<f64> = (0..np).map(|i| l2[i] - l1[i]).collect();
    let wf1 = warp_factor(n, &w1_arg);
    let wf2 = warp_factor(n, &w2_arg);
    let wf3 = warp_factor(n, &w3_arg);

    for i in 0..np {
        let warp1 = blend(&l2, &l3, i) * wf1[i] * (1.0 + (alpha * l1[i]).powi(2));
        let warp2 = blend(&l1, &l3, i) * wf2[i] * (1.0 + (alpha * l2[i]).powi(2));
        let warp3 = blend(&l1, &l2, i) * wf3[i] * (1.0 + (alpha * l3[i]).powi(2));
        let (c2, s2) = ((2.0 * std::f64::consts::PI / 3.0).cos(), (2.0 * std::f64::consts::PI / 3.0).sin());
        let (c4, s4) = ((4.0 * std::f64::consts::PI / 3.0).cos(), (4.0 * std::f64::consts::PI / 3.0).sin());
        x[i] += warp1 + c2 * warp2 + c4 * warp3;
        y[i] += s2 * warp2 + s4 * warp3;
    }

    // Equilateral -> reference triangle
    let mut out = Vec::with_capacity(np);
    for i in 0..np {
        let lam1 = (3f64.sqrt() * y[i] + 1.0) / 3.0;
        let lam2 = (-3.0 * x[i] - 3f64.sqrt() * y[i] + 2.0) / 6.0;
        let lam3 = (3.0 * x[i] - 3f64.sqrt() * y[i] + 2.0) / 6.0;
        out.push((-lam2 + lam3 - lam1, -lam2 - lam3 + lam1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tri_nodes_p1_are_vertices() {
        let n = tri_nodes(1);
        assert_eq!(n.len(), 3);
        let expect = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)];
        for e in expect {
            assert!(n.iter().any(|&(r, s)| (r - e.0).abs() < 1e-12 && (s - e.1).abs() < 1e-12));
        }
    }

    #[test]
    fn tri_edge_nodes_are_lobatto() {
        for p in 2..=7 {
            let nodes = tri_nodes(p);
            let gll = gauss_lobatto(p + 1);
            // bottom edge s = -1
            let mut edge: Vec<f64> = nodes
                .iter()
                .filter(|&&(_, s)| (s + 1.0).abs() < 1e-9)
                .map(|&(r, _)| r)
                .collect();
            edge.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(edge.len(), p + 1);
            for (a, b) in edge.iter().zip(&gll) {
                assert_relative_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn nodes_inside_reference_triangle() {
        for p in 1..=8 {
            for &(r, s) in &tri_nodes(p) {
                assert!(r >= -1.0 - 1e-10 && s >= -1.0 - 1e-10 && r + s <= 1e-10);
            }
        }
    }
}
