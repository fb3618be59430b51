//! Initial states: point excitation and plane-wave excitation.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::mesh::{ScalarField, SurfaceKind, SurfaceMesh};

use super::ApState;

// C2 smoothstep on [0,1]
fn smooth5(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

fn surface_distance(mesh: &SurfaceMesh, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    match mesh.surface() {
        SurfaceKind::Sphere { radius } => {
            let ca = a / a.norm();
            let cb = b / b.norm();
            radius * ca.dot(&cb).clamp(-1.0, 1.0).acos()
        }
        _ => (a - b).norm(),
    }
}

/// Membrane potential set to `strength` inside the ball of `radius` around
/// `center` (geodesic on the sphere), smoothed to zero over one element
/// width; the recovery variable starts at zero.
pub fn point_initialize(
    mesh: &SurfaceMesh,
    center: Vector3<f64>,
    radius: f64,
    strength: f64,
) -> Result<ApState> {
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("initiation radius {radius} must be positive")));
    }
    let tol = 1e-6 * (1.0 + mesh.h_max());
    let off_surface = match mesh.surface() {
        SurfaceKind::Plane => center.z.abs(),
        SurfaceKind::Sphere { radius: r } => (center.norm() - r).abs(),
        SurfaceKind::Generic => 0.0,
    };
    if off_surface > tol {
        return Err(Error::invalid(format!(
            "initiation center ({}, {}, {}) lies off the surface by {off_surface:.3e}",
            center.x, center.y, center.z
        )));
    }

    let w = mesh.h_max();
    let pts = mesh.points();
    let u = ScalarField {
        data: pts
            .iter()
            .map(|p| {
                let d = surface_distance(mesh, p, &center);
                strength * (1.0 - smooth5((d - radius) / w))
            })
            .collect(),
    };
    Ok(ApState {
        v: ScalarField::zeros(u.len()),
        u,
        t: 0.0,
        step: 0,
    })
}

/// Plane-wave excitation: u = strength for x <= x0, decaying to zero over
/// `width` in the +x direction.
pub fn plane_wave_initialize(mesh: &SurfaceMesh, x0: f64, width: f64, strength: f64) -> Result<ApState> {
    if !(width > 0.0) {
        return Err(Error::invalid(format!("wave width {width} must be positive")));
    }
    let pts = mesh.points();
    let u = ScalarField {
        data: pts
            .iter()
            .map(|p| strength * (1.0 - smooth5((p.x - x0) / width)))
            .collect(),
    };
    Ok(ApState {
        v: ScalarField::zeros(u.len()),
        u,
        t: 0.0,
        step: 0,
    })
}
