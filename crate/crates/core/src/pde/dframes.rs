//! Diffusivity-scaled frames: the anisotropic diffusion tensor expressed as
//! a pair of orthogonal, non-unit tangent vectors d^m = d^mm e^m.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::frames::FrameField;
use crate::mesh::VectorField;

/// Pointwise diffusivity magnitudes along e1 and e2.
#[derive(Debug, Clone)]
pub struct DiffusivityMagnitudes {
    pub d11: Vec<f64>,
    pub d22: Vec<f64>,
}

impl DiffusivityMagnitudes {
    pub fn constant(n: usize, d11: f64, d22: f64) -> Self {
        DiffusivityMagnitudes {
            d11: vec![d11; n],
            d22: vec![d22; n],
        }
    }

    pub fn isotropic(n: usize, d: f64) -> Self {
        Self::constant(n, d, d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d11.iter().chain(&self.d22).any(|&d| !(d > 0.0)) {
            return Err(Error::invalid("diffusivity must be positive at every point"));
        }
        Ok(())
    }
}

/// The two diffusivity-scaled frame vectors per point.
#[derive(Debug, Clone)]
pub struct DFrames {
    pub d1: Vec<Vector3<f64>>,
    pub d2: Vec<Vector3<f64>>,
}

impl DFrames {
    pub fn len(&self) -> usize {
        self.d1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d1.is_empty()
    }

    pub fn d1_field(&self) -> VectorField {
        VectorField {
            data: self.d1.clone(),
        }
    }

    pub fn d2_field(&self) -> VectorField {
        VectorField {
            data: self.d2.clone(),
        }
    }
}

/// d^m = d^mm e^m pointwise. Errors on nonpositive diffusivity.
pub fn make_dframes(frames: &FrameField, mags: &DiffusivityMagnitudes) -> Result<DFrames> {
    mags.validate()?;
    let n = frames.len();
    if mags.d11.len() != n || mags.d22.len() != n {
        return Err(Error::invalid(format!(
            "diffusivity fields have {} / {} points, frames have {n}",
            mags.d11.len(),
            mags.d22.len()
        )));
    }
    Ok(DFrames {
        d1: (0..n).map(|i| frames.e1[i] * mags.d11[i]).collect(),
        d2: (0..n).map(|i| frames.e2[i] * mags.d22[i]).collect(),
    })
}
