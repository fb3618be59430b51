//! Point-sampled scalar and vector fields tied to a mesh point layout.

use nalgebra::Vector3;

/// One scalar value per solution point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(n: usize) -> Self {
        ScalarField { data: vec![0.0; n] }
    }

    pub fn constant(n: usize, v: f64) -> Self {
        ScalarField { data: vec![v; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn has_nan(&self) -> bool {
        self.data.iter().any(|v| !v.is_finite())
    }
}

/// One Cartesian 3-vector per solution point.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub data: Vec<Vector3<f64>>,
}

impl VectorField {
    pub fn zeros(n: usize) -> Self {
        VectorField {
            data: vec![Vector3::zeros(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}
