//! Orthonormal moving frames and their alignment along wave propagation.
//!
//! A frame field attaches an orthonormal triple (e1, e2, e3) to every
//! solution point, with e3 the surface normal and e1, e2 spanning the
//! tangent plane. Alignment turns the order-zero frames produced by
//! [`init_frames`] into frames whose e1 follows the propagation direction
//! extracted from a diffusion-reaction run: per-step gradient accumulation,
//! post-hoc finalization, tangential projection, and a validity gate that
//! rejects re-orientations perturbing the discrete diffusion operator.

use nalgebra::Vector3;

use crate::mesh::{ScalarField, SurfaceMesh, VectorField};
use crate::pde::{DiffusivityMagnitudes, FluxParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignFlag {
    Unaligned,
    Aligned,
    Rejected,
}

impl AlignFlag {
    pub fn code(self) -> u8 {
        match self {
            AlignFlag::Unaligned => 0,
            AlignFlag::Aligned => 1,
            AlignFlag::Rejected => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(AlignFlag::Unaligned),
            1 => Some(AlignFlag::Aligned),
            2 => Some(AlignFlag::Rejected),
            _ => None,
        }
    }
}

/// Orthonormal frame triple per solution point.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameField {
    pub e1: Vec<Vector3<f64>>,
    pub e2: Vec<Vector3<f64>>,
    pub e3: Vec<Vector3<f64>>,
    pub flag: Vec<AlignFlag>,
}

impl FrameField {
    /// Build frames from a tangent e1 candidate at every point. The
    /// candidate is projected onto the tangent plane and normalized;
    /// e2 = e3 x e1 closes the right-handed triple. All points are flagged
    /// aligned. Panics if a candidate is (numerically) parallel to the
    /// normal; use [`init_frames`] for generic starting frames.
    pub fn from_e1(mesh: &SurfaceMesh, e1_of: impl Fn(Vector3<f64>) -> Vector3<f64>) -> Self {
        let pts = mesh.points();
        let normals = mesh.normals();
        let n = pts.len();
        let mut e1 = Vec::with_capacity(n);
        let mut e2 = Vec::with_capacity(n);
        let mut e3 = Vec::with_capacity(n);
        for i in 0..n {
            let k = normals.data[i];
            let cand = e1_of(pts[i]);
            let t = cand - k * cand.dot(&k);
            let tn = t.norm();
            assert!(tn > 1e-12, "e1 candidate parallel to the surface normal");
            let v1 = t / tn;
            e1.push(v1);
            e2.push(k.cross(&v1));
            e3.push(k);
        }
        FrameField {
            e1,
            e2,
            e3,
            flag: vec![AlignFlag::Aligned; n],
        }
    }

    pub fn len(&self) -> usize {
        self.e1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e1.is_empty()
    }

    /// Max deviation from orthonormality over all points.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            let (a, b, c) = (self.e1[i], self.e2[i], self.e3[i]);
            worst = worst.max((a.norm() - 1.0).abs());
            worst = worst.max((b.norm() - 1.0).abs());
            worst = worst.max((c.norm() - 1.0).abs());
            worst = worst.max(a.dot(&b).abs());
            worst = worst.max(a.dot(&c).abs());
            worst = worst.max(b.dot(&c).abs());
        }
        worst
    }

    pub fn e1_field(&self) -> VectorField {
        VectorField {
            data: self.e1.clone(),
        }
    }

    pub fn e2_field(&self) -> VectorField {
        VectorField {
            data: self.e2.clone(),
        }
    }
}

/// Starting-frame policy for [`init_frames`].
#[derive(Debug, Clone, Copy)]
pub enum InitPolicy {
    /// Project a fixed global axis onto the tangent plane, with a
    /// deterministic fallback axis where the projection degenerates.
    FixedAxis(Vector3<f64>),
    /// Pick the Cartesian axis least aligned with the normal at each point.
    NormalComplement,
}

/// Construct order-zero frames: orthonormal with e3 = surface normal and e1
/// chosen by policy. Flags start unaligned.
pub fn init_frames(mesh: &SurfaceMesh, policy: InitPolicy) -> FrameField {
    let pts = mesh.points();
    let normals = mesh.normals();
    let n = pts.len();
    let axes = [
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(0.0, 1.0, 0.0),
        Vector3::new(0.0, 0.0, 1.0),
    ];
    let mut e1 = Vec::with_capacity(n);
    let mut e2 = Vec::with_capacity(n);
    let mut e3 = Vec::with_capacity(n);
    for i in 0..n {
        let k = normals.data[i];
        let candidates: Vec<Vector3<f64>> = match policy {
            InitPolicy::FixedAxis(a) => {
                let mut c = vec![a];
                c.extend(axes);
                c
            }
            InitPolicy::NormalComplement => {
                let mut idx = [0usize, 1, 2];
                idx.sort_by(|&a, &b| {
                    k[a].abs()
                        .partial_cmp(&k[b].abs())
                        .unwrap()
                        .then(a.cmp(&b))
                });
                idx.iter().map(|&j| axes[j]).collect()
            }
        };
        let mut v1 = None;
        for cand in candidates {
            let t = cand - k * cand.dot(&k);
            let tn = t.norm();
            if tn > 1e-8 {
                v1 = Some(t / tn);
                break;
            }
        }
        let v1 = v1.expect("no tangent axis found; degenerate normal");
        e1.push(v1);
        e2.push(k.cross(&v1));
        e3.push(k);
    }
    FrameField {
        e1,
        e2,
        e3,
        flag: vec![AlignFlag::Unaligned; n],
    }
}

/// Wavefront / waveback selection for gradient extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Wavefront,
    Waveback,
}

/// Gradient extraction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extraction {
    /// Keep the direction at the step where the gradient magnitude peaks.
    Str,
    /// Integrate unit directions with weight one.
    Int,
    /// Integrate unit directions weighted by the gradient magnitude.
    Wint,
}

/// Per-point accumulator of propagation directions over a run.
#[derive(Debug, Clone)]
pub struct GradientAccumulator {
    pub mode: Position,
    pub method: Extraction,
    /// Threshold on |grad u| relative to the largest magnitude observed so
    /// far over the whole domain.
    pub eps_g_rel: f64,
    pub eps_g_floor: f64,
    gmax_observed: f64,
    pub dir_sum: Vec<Vector3<f64>>,
    pub weight: Vec<f64>,
    pub peak: Vec<f64>,
}

impl GradientAccumulator {
    pub fn new(n_points: usize, mode: Position, method: Extraction, eps_g_rel: f64) -> Self {
        GradientAccumulator {
            mode,
            method,
            eps_g_rel,
            eps_g_floor: 0.0,
            gmax_observed: 0.0,
            dir_sum: vec![Vector3::zeros(); n_points],
            weight: vec![0.0; n_points],
            peak: vec![0.0; n_points],
        }
    }

    /// Record one step. Only points on the configured side of the wave
    /// (du/dt sign) with non-negligible gradient contribute. The stored
    /// direction is the propagation direction: -sign(du/dt) grad u, which
    /// points outward both at the front and at the back of a pulse.
    pub fn accumulate(&mut self, _u: &ScalarField, du_dt: &ScalarField, grad_u: &VectorField) {
        let n = self.dir_sum.len();
        assert_eq!(du_dt.len(), n);
        assert_eq!(grad_u.len(), n);

        let step_gmax = grad_u.data.iter().fold(0.0f64, |m, g| m.max(g.norm()));
        self.gmax_observed = self.gmax_observed.max(step_gmax);
        let threshold = self.eps_g_floor.max(self.eps_g_rel * self.gmax_observed);

        for i in 0..n {
            let dudt = du_dt.data[i];
            let active = match self.mode {
                Position::Wavefront => dudt > 0.0,
                Position::Waveback => dudt < 0.0,
            };
            if !active {
                continue;
            }
            let g = grad_u.data[i];
            let gn = g.norm();
            if gn <= threshold {
                continue;
            }
            let dir = g * (-dudt.signum() / gn);
            match self.method {
                Extraction::Str => {
                    if gn > self.peak[i] {
                        self.peak[i] = gn;
                        self.dir_sum[i] = dir;
                        self.weight[i] = 1.0;
                    }
                }
                Extraction::Int => {
                    self.dir_sum[i] += dir;
                    self.weight[i] += 1.0;
                    self.peak[i] = self.peak[i].max(gn);
                }
                Extraction::Wint => {
                    self.dir_sum[i] += dir * gn;
                    self.weight[i] += gn;
                    self.peak[i] = self.peak[i].max(gn);
                }
            }
        }
    }

    /// Normalized accumulated direction; zero where nothing was recorded.
    pub fn finalize_direction(&self) -> VectorField {
        let mut out = VectorField::zeros(self.dir_sum.len());
        for i in 0..self.dir_sum.len() {
            if self.weight[i] > 0.0 {
                let n = self.dir_sum[i].norm();
                if n > 1e-300 {
                    out.data[i] = self.dir_sum[i] / n;
                }
            }
        }
        out
    }

    pub fn gmax_observed(&self) -> f64 {
        self.gmax_observed
    }
}

/// Alignment configuration of Algorithm-style frame alignment.
#[derive(Debug, Clone)]
pub struct AlignmentConfig {
    /// Validity tolerance; the acceptance threshold is delta * dt.
    pub delta: f64,
    /// Gradient-negligibility threshold relative to the observed maximum.
    pub eps_g_rel: f64,
    /// Optional exclusion ball (center, radius), e.g. around the initiation
    /// point. Only applied to alignment when `exclude_from_alignment`.
    pub exclusion: Option<(Vector3<f64>, f64)>,
    pub exclude_from_alignment: bool,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            delta: 0.1,
            eps_g_rel: 1e-4,
            exclusion: None,
            exclude_from_alignment: false,
        }
    }
}

/// Everything the validity gate needs: a solution snapshot and the discrete
/// diffusion operator configuration it is evaluated with.
pub struct ValidityContext<'a> {
    pub u: &'a ScalarField,
    pub dmags: DiffusivityMagnitudes,
    pub flux: FluxParams,
    pub dt: f64,
}

/// Outcome of the per-element validity check.
#[derive(Debug, Clone)]
pub struct ValidityReport {
    /// Per-element pass/fail.
    pub pass: Vec<bool>,
    /// Elements whose reference norm was below machine zero (vacuous pass).
    pub vacuous: Vec<bool>,
}

/// Relative per-element L2 comparison of the discrete diffusion operator
/// under two frame fields: an element passes when
/// ||L u(orig) - L u(new)|| / ||L u(orig)|| < delta * dt.
pub fn validity_check(
    mesh: &SurfaceMesh,
    frames_orig: &FrameField,
    frames_new: &FrameField,
    u: &ScalarField,
    dmags: &DiffusivityMagnitudes,
    flux: FluxParams,
    delta: f64,
    dt: f64,
) -> ValidityReport {
    let l_orig = crate::pde::mmf_laplacian_for(mesh, frames_orig, dmags, flux, u);
    let l_new = crate::pde::mmf_laplacian_for(mesh, frames_new, dmags, flux, u);

    let ne = mesh.n_elements();
    let mut pass = vec![true; ne];
    let mut vacuous = vec![false; ne];
    let tiny = 1e-14 * (1.0 + l_orig.max_abs());
    for e in 0..ne {
        let g = mesh.geom(e);
        let mut num2 = 0.0;
        let mut den2 = 0.0;
        for (q, idx) in mesh.elem_points(e).enumerate() {
            let d = l_orig.data[idx] - l_new.data[idx];
            num2 += g.wj[q] * d * d;
            den2 += g.wj[q] * l_orig.data[idx] * l_orig.data[idx];
        }
        let den = den2.sqrt();
        if den < tiny {
            vacuous[e] = true;
            pass[e] = true;
        } else {
            pass[e] = num2.sqrt() / den < delta * dt;
        }
    }
    ValidityReport { pass, vacuous }
}

/// Align frames along a finalized direction field.
///
/// Where the direction is nonzero, not excluded, and has a nonzero
/// tangential part, the candidate frame is e1 = normalized tangential
/// projection of the direction, e2 = e3 x e1. With a validity context the
/// candidate is gated per element against the original frames; elements
/// that fail keep their original frames bit-exactly and are flagged
/// rejected. Without a context every candidate is accepted.
pub fn align_frames(
    mesh: &SurfaceMesh,
    frames: &FrameField,
    direction: &VectorField,
    config: &AlignmentConfig,
    validity: Option<&ValidityContext>,
) -> FrameField {
    let n = frames.len();
    assert_eq!(direction.len(), n);
    let pts = mesh.points();

    let mut out = frames.clone();
    let mut candidate_pts = vec![false; n];
    for i in 0..n {
        if config.exclude_from_alignment {
            if let Some((c, r)) = config.exclusion {
                if (pts[i] - c).norm() < r {
                    continue;
                }
            }
        }
        let d = direction.data[i];
        if d.norm() < 1e-300 {
            continue;
        }
        let k = frames.e3[i];
        let t = d - k * d.dot(&k);
        let tn = t.norm();
        if tn < 1e-10 * d.norm() {
            // direction parallel to the normal: leave unaligned
            continue;
        }
        let e1 = t / tn;
        out.e1[i] = e1;
        out.e2[i] = k.cross(&e1);
        out.flag[i] = AlignFlag::Aligned;
        candidate_pts[i] = true;
    }

    if let Some(ctx) = validity {
        let report = validity_check(
            mesh,
            frames,
            &out,
            ctx.u,
            &ctx.dmags,
            ctx.flux,
            config.delta,
            ctx.dt,
        );
        for e in 0..mesh.n_elements() {
            if !report.pass[e] {
                for idx in mesh.elem_points(e) {
                    if candidate_pts[idx] {
                        out.e1[idx] = frames.e1[idx];
                        out.e2[idx] = frames.e2[idx];
                        out.flag[idx] = AlignFlag::Rejected;
                    }
                }
            }
        }
    }
    out
}
