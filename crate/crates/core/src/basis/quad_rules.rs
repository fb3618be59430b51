//! One-dimensional Gauss-Jacobi quadrature rules and Gauss-Lobatto node sets,
//! computed with the Golub-Welsch eigenvalue method.

use nalgebra::DMatrix;

use super::poly::ln_gamma;

/// Gauss-Jacobi rule with `n` points for the weight (1-x)^alpha (1+x)^beta.
/// Exact for polynomials of degree <= 2n-1 (times the weight).
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mu0 = 2f64.powf(alpha + beta + 1.0) / (alpha + beta + 1.0)
        * (ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0) - ln_gamma(alpha + beta + 1.0)).exp();
    if n == 1 {
        let x = (beta - alpha) / (alpha + beta + 2.0);
        return (vec![x], vec![mu0]);
    }

    // Symmetric tridiagonal Jacobi matrix for the orthonormal recurrence.
    let m = n;
    let mut j = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let h1 = 2.0 * k as f64 + alpha + beta;
        let diag = if k == 0 && alpha + beta == 0.0 {
            0.0
        } else {
            -(alpha * alpha - beta * beta) / ((h1 + 2.0) * h1)
        };
        j[(k, k)] = diag;
    }
    for k in 1..m {
        let kf = k as f64;
        let h1 = 2.0 * (kf - 1.0) + alpha + beta;
        let off = 2.0 / (h1 + 2.0)
            * (kf * (kf + alpha + beta) * (kf + alpha) * (kf + beta)
                / ((h1 + 1.0) * (h1 + 3.0)))
                .sqrt();
        j[(k - 1, k)] = off;
        j[(k, k - 1)] = off;
    }

    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let lambda = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (lambda, v0 * v0 * mu0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let nodes = pairs.iter().map(|p| p.0).collect();
    let weights = pairs.iter().map(|p| p.1).collect();
    (nodes, weights)
}

/// Gauss-Legendre rule with `n` points on [-1,1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss-Lobatto-Legendre nodes: n points including both endpoints.
pub fn gauss_lobatto(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let mut nodes = Vec::with_capacity(n);
    nodes.push(-1.0);
    if n > 2 {
        let (interior, _) = gauss_jacobi(n - 2, 1.0, 1.0);
        nodes.extend(interior);
    }
    nodes.push(1.0);
    nodes
}
