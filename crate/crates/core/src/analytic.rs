//! Analytic frame fields and their closed-form connection/curvature values,
//! used by the convergence harness and the validation tests.
//!
//! Plane, radial frames about a center c (polar axes):
//!   e1 = r / |r|,    w211 = 0,  w212 = 1/|r|,  R2121 = 1/|r|^2.
//! Sphere of radius R, latitudinal frames (colatitude theta from +z):
//!   e1 = d/d theta,  w212 = cos(theta) / (R sin(theta)),
//!   w311 = w322 = -1/R,  K = 1/R^2,  H = -1/R,
//!   R2121 = 1 / (R^2 sin^2 theta).

use nalgebra::Vector3;

use crate::frames::FrameField;
use crate::mesh::{SurfaceKind, SurfaceMesh};

/// Radial frames on a plane mesh: e1 points away from `center`.
pub fn plane_radial_frames(mesh: &SurfaceMesh, center: Vector3<f64>) -> FrameField {
    FrameField::from_e1(mesh, |p| {
        let r = p - center;
        Vector3::new(r.x, r.y, 0.0)
    })
}

pub fn plane_radial_w212(p: &Vector3<f64>, center: &Vector3<f64>) -> f64 {
    1.0 / (p - center).xy().norm()
}

pub fn plane_radial_r2121(p: &Vector3<f64>, center: &Vector3<f64>) -> f64 {
    let r = (p - center).xy().norm();
    1.0 / (r * r)
}

/// Latitudinal frames on a sphere mesh: e1 along d/d theta (from the north
/// pole toward the equator), e2 along d/d phi.
pub fn sphere_latitudinal_frames(mesh: &SurfaceMesh) -> FrameField {
    FrameField::from_e1(mesh, |p| {
        let r = p.norm();
        let theta = (p.z / r).acos();
        let phi = p.y.atan2(p.x);
        Vector3::new(
            theta.cos() * phi.cos(),
            theta.cos() * phi.sin(),
            -theta.sin(),
        )
    })
}

pub fn sphere_theta(p: &Vector3<f64>) -> f64 {
    (p.z / p.norm()).acos()
}

pub fn sphere_w212(p: &Vector3<f64>, radius: f64) -> f64 {
    let th = sphere_theta(p);
    th.cos() / (radius * th.sin())
}

pub fn sphere_r2121(p: &Vector3<f64>, radius: f64) -> f64 {
    let s = sphere_theta(p).sin();
    1.0 / (radius * radius * s * s)
}

/// Exact aligned direction for the analytic test family of a mesh:
/// plane-radial about `center`, or sphere-latitudinal.
pub fn exact_e1(mesh: &SurfaceMesh, center: &Vector3<f64>, p: &Vector3<f64>) -> Vector3<f64> {
    match mesh.surface() {
        SurfaceKind::Sphere { .. } => {
            let r = p.norm();
            let theta = (p.z / r).acos();
            let phi = p.y.atan2(p.x);
            Vector3::new(
                theta.cos() * phi.cos(),
                theta.cos() * phi.sin(),
                -theta.sin(),
            )
        }
        _ => {
            let r = p - center;
            let n = r.xy().norm();
            Vector3::new(r.x / n, r.y / n, 0.0)
        }
    }
}

/// Exact connection component w212 for the analytic family.
pub fn exact_w212(mesh: &SurfaceMesh, center: &Vector3<f64>, p: &Vector3<f64>) -> f64 {
    match mesh.surface() {
        SurfaceKind::Sphere { radius } => sphere_w212(p, radius),
        _ => plane_radial_w212(p, center),
    }
}

/// Exact Riemann curvature component for the analytic family.
pub fn exact_r2121(mesh: &SurfaceMesh, center: &Vector3<f64>, p: &Vector3<f64>) -> f64 {
    match mesh.surface() {
        SurfaceKind::Sphere { radius } => sphere_r2121(p, radius),
        _ => plane_radial_r2121(p, center),
    }
}

trait Xy {
    fn xy(&self) -> nalgebra::Vector2<f64>;
}

impl Xy for Vector3<f64> {
    fn xy(&self) -> nalgebra::Vector2<f64> {
        nalgebra::Vector2::new(self.x, self.y)
    }
}
