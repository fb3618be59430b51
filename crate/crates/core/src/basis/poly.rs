//! Jacobi polynomials normalized to unit L2 norm on [-1,1] with weight
//! (1-x)^alpha (1+x)^beta. These are the building blocks for the modal
//! bases on both element shapes.

/// Natural log of the gamma function (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection formula
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Evaluate the orthonormal Jacobi polynomial P_n^{(alpha,beta)} at `x`.
///
/// Orthonormal means int_{-1}^{1} (1-x)^a (1+x)^b P_m P_n dx = delta_mn.
pub fn jacobi(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    let gamma0 = 2f64.powf(alpha + beta + 1.0) / (alpha + beta + 1.0) * gamma(alpha + 1.0)
        * gamma(beta + 1.0)
        / gamma(alpha + beta + 1.0);
    let p0 = 1.0 / gamma0.sqrt();
    if n == 0 {
        return p0;
    }
    let gamma1 = (alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0) * gamma0;
    let p1 = ((alpha + beta + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / gamma1.sqrt();
    if n == 1 {
        return p1;
    }
    let mut aold = 2.0 / (2.0 + alpha + beta)
        * ((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0)).sqrt();
    let mut pm2 = p0;
    let mut pm1 = p1;
    for i in 1..n {
        let i = i as f64;
        let h1 = 2.0 * i + alpha + beta;
        let anew = 2.0 / (h1 + 2.0)
            * ((i + 1.0) * (i + 1.0 + alpha + beta) * (i + 1.0 + alpha) * (i + 1.0 + beta)
                / ((h1 + 1.0) * (h1 + 3.0)))
                .sqrt();
        let bnew = -(alpha * alpha - beta * beta) / (h1 * (h1 + 2.0));
        let pnew = (-aold * pm2 + (x - bnew) * pm1) / anew;
        pm2 = pm1;
        pm1 = pnew;
        aold = anew;
    }
    pm1
}

/// Derivative of the orthonormal Jacobi polynomial.
pub fn grad_jacobi(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (n as f64 * (n as f64 + alpha + beta + 1.0)).sqrt()
        * jacobi(x, alpha + 1.0, beta + 1.0, n - 1)
}
