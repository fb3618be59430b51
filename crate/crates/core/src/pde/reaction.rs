//! Two-variable excitable-medium kinetics (Aliev-Panfilov form).

use crate::mesh::ScalarField;

/// Sign of the uv coupling term in the membrane-potential equation.
/// `Minus` produces the repolarizing action-potential pulse; `Plus` is the
/// alternative printed convention, kept switchable for cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UvSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy)]
pub struct ApParams {
    pub k: f64,
    pub a: f64,
    pub eps0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub uv_sign: UvSign,
}

impl Default for ApParams {
    fn default() -> Self {
        // k, a, eps0 are the standard test values; mu1, mu2 are the common
        // literature constants for the recovery time scale.
        ApParams {
            k: 8.0,
            a: 0.15,
            eps0: 0.002,
            mu1: 0.2,
            mu2: 0.3,
            uv_sign: UvSign::Minus,
        }
    }
}

impl ApParams {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.k > 0.0) || !(self.a > 0.0 && self.a < 1.0) || !(self.eps0 > 0.0) {
            return Err(crate::Error::invalid(format!(
                "reaction parameters out of range: k={}, a={}, eps0={}",
                self.k, self.a, self.eps0
            )));
        }
        Ok(())
    }
}

pub struct ReactionRates {
    pub du: ScalarField,
    pub dv: ScalarField,
    /// Number of points where the recovery denominator u + mu2 needed the
    /// machine-epsilon floor.
    pub guarded: usize,
}

/// Pointwise reaction rates:
/// du = -k u (u - a)(u - 1) +/- u v
/// dv = (eps0 + mu1 v / (u + mu2)) (-v - k u (u - a - 1))
pub fn ap_reaction(u: &ScalarField, v: &ScalarField, p: &ApParams) -> ReactionRates {
    assert_eq!(u.len(), v.len());
    let n = u.len();
    let mut du = Vec::with_capacity(n);
    let mut dv = Vec::with_capacity(n);
    let mut guarded = 0usize;
    let sign = match p.uv_sign {
        UvSign::Plus => 1.0,
        UvSign::Minus => -1.0,
    };
    for i in 0..n {
        let (ui, vi) = (u.data[i], v.data[i]);
        du.push(-p.k * ui * (ui - p.a) * (ui - 1.0) + sign * ui * vi);
        let mut den = ui + p.mu2;
        if den.abs() < f64::EPSILON {
            den = if den >= 0.0 { f64::EPSILON } else { -f64::EPSILON };
            guarded += 1;
        }
        dv.push((p.eps0 + p.mu1 * vi / den) * (-vi - p.k * ui * (ui - p.a - 1.0)));
    }
    ReactionRates {
        du: ScalarField { data: du },
        dv: ScalarField { data: dv },
        guarded,
    }
}
