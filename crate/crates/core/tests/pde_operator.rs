//! Discrete diffusion operator: consistency, frame invariance, conservation.

use approx::assert_relative_eq;
use faer::linalg::solvers::Solve;
use mmf_core::frames::{init_frames, FrameField, InitPolicy};
use mmf_core::mesh::{build_plane_mesh, Extent, ScalarField};
use mmf_core::pde::{
    make_dframes, mmf_laplacian, point_initialize, run, ApParams, ApState, DiffusivityMagnitudes,
    FluxParams, ImexStepper, LdgOperator, SolverConfig,
};
use nalgebra::Vector3;

fn iso_dframes(mesh: &mmf_core::mesh::SurfaceMesh, d: f64) -> mmf_core::pde::DFrames {
    let frames = init_frames(mesh, InitPolicy::FixedAxis(Vector3::new(1.0, 0.0, 0.0)));
    make_dframes(&frames, &DiffusivityMagnitudes::isotropic(mesh.n_points(), d)).unwrap()
}

#[test]
fn constant_field_maps_to_zero() {
    let mesh = build_plane_mesh(Extent::square(-2.0, 2.0), 1.0, 3).unwrap();
    let d = iso_dframes(&mesh, 1.0);
    let u = ScalarField::constant(mesh.n_points(), 3.7);
    let f = mmf_laplacian(&mesh, &d, FluxParams::default(), &u).unwrap();
    assert!(f.max_abs() < 1e-10, "laplacian of constant: {}", f.max_abs());
}

#[test]
fn quadratic_laplacian_on_interior_elements() {
    let mesh = build_plane_mesh(Extent::square(-2.0, 2.0), 0.5, 3).unwrap();
    let d = iso_dframes(&mesh, 1.0);
    let u = ScalarField {
        data: mesh.points().iter().map(|p| p.x * p.x).collect(),
    };
    let f = mmf_laplacian(&mesh, &d, FluxParams::default(), &u).unwrap();
    // interior points only: the zero-flux boundary condition modifies
    // boundary elements
    for (i, p) in mesh.points().iter().enumerate() {
        if p.x.abs() < 1.3 && p.y.abs() < 1.3 {
            assert_relative_eq!(f.data[i], 2.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn anisotropic_quadratic() {
    // d11 = 4 along x, d22 = 1: div(d grad(x^2 + y^2)) = 2 d11 + 2 d22 = 10
    let mesh = build_plane_mesh(Extent::square(-2.0, 2.0), 0.5, 3).unwrap();
    let frames = init_frames(&mesh, InitPolicy::FixedAxis(Vector3::new(1.0, 0.0, 0.0)));
    let d = make_dframes(
        &frames,
        &DiffusivityMagnitudes::constant(mesh.n_points(), 4.0, 1.0),
    )
    .unwrap();
    let u = ScalarField {
        data: mesh.points().iter().map(|p| p.x * p.x + p.y * p.y).collect(),
    };
    let f = mmf_laplacian(&mesh, &d, FluxParams::default(), &u).unwrap();
    for (i, p) in mesh.points().iter().enumerate() {
        if p.x.abs() < 1.3 && p.y.abs() < 1.3 {
            assert_relative_eq!(f.data[i], 10.0, epsilon = 1e-8);
        }
    }
}

#[test]
fn frame_invariance_isotropic() {
    // 30-degree rotated frames must give the same isotropic operator up to
    // discretization error
    let mesh = build_plane_mesh(Extent::square(0.0, 1.0), 0.5, 6).unwrap();
    let n = mesh.n_points();
    let u = ScalarField {
        data: mesh.points().iter().map(|p| p.x.sin() * p.y.cos()).collect(),
    };
    let mags = DiffusivityMagnitudes::isotropic(n, 1.0);
    let f0 = {
        let fr = init_frames(&mesh, InitPolicy::FixedAxis(Vector3::new(1.0, 0.0, 0.0)));
        let d = make_dframes(&fr, &mags).unwrap();
        mmf_laplacian(&mesh, &d, FluxParams::default(), &u).unwrap()
    };
    let f30 = {
        let th = 30f64.to_radians();
        let fr = FrameField::from_e1(&mesh, |_| Vector3::new(th.cos(), th.sin(), 0.0));
        let d = make_dframes(&fr, &mags).unwrap();
        mmf_laplacian(&mesh, &d, FluxParams::default(), &u).unwrap()
    };
    let norm0: f64 = f0.data.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff: f64 = f0
        .data
        .iter()
        .zip(&f30.data)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    assert!(
        diff / norm0 < 1e-6,
        "relative frame-rotation difference {:.3e}",
        diff / norm0
    );
}

#[test]
fn assembled_matrix_matches_matrix_free_apply() {
    let mesh = build_plane_mesh(Extent::square(-1.0, 1.0), 0.7, 3).unwrap();
    let frames = init_frames(&mesh, InitPolicy::FixedAxis(Vector3::new(1.0, 0.0, 0.0)));
    let mags = DiffusivityMagnitudes::constant(mesh.n_points(), 2.0, 0.5);
    let d = make_dframes(&frames, &mags).unwrap();
    let op = LdgOperator::new(&mesh, &d, FluxParams::default()).unwrap();

    let u = ScalarField {
        data: mesh
            .points()
            .iter()
            .map(|p| (1.3 * p.x).sin() + p.y * p.y - 0.2 * p.x * p.y)
            .collect(),
    };
    let uc = op.to_modal(&u);

    // A uc with c = -1 gives (M + Lw) uc; subtract M uc to isolate Lw uc
    let n = op.n_modal();
    let trips = op.assemble_helmholtz(-1.0);
    let a = faer::sparse::SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips).unwrap();
    let mut x = faer::Mat::<f64>::zeros(n, 1);
    let off = op.modal_offsets();
    for e in 0..uc.len() {
        for i in 0..uc[e].len() {
            x[(off[e] + i, 0)] = uc[e][i];
        }
    }
    let ax = &a * &x;

    let m_uc = op.apply_mass_modal(&uc);
    let lw_uc = op.apply_weak_modal(&uc);
    let mut max_err = 0.0f64;
    for e in 0..uc.len() {
        for i in 0..uc[e].len() {
            let want = m_uc[e][i] + lw_uc[e][i];
            max_err = max_err.max((ax[(off[e] + i, 0)] - want).abs());
        }
    }
    assert!(max_err < 1e-11, "assembly mismatch {max_err:.3e}");
}

#[test]
fn helmholtz_solve_recovers_state() {
    // (M - c Lw) u = M u0 - c Lw u0 must return u0
    let mesh = build_plane_mesh(Extent::square(-1.0, 1.0), 0.5, 2).unwrap();
    let d = iso_dframes(&mesh, 1.0);
    let op = LdgOperator::new(&mesh, &d, FluxParams::default()).unwrap();
    let u = ScalarField {
        data: mesh.points().iter().map(|p| (p.x + 0.3 * p.y).cos()).collect(),
    };
    let uc = op.to_modal(&u);
    let n = op.n_modal();
    let c = 0.005;
    let trips = op.assemble_helmholtz(c);
    let a = faer::sparse::SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips).unwrap();
    let sym = faer::sparse::linalg::solvers::SymbolicLu::try_new(a.symbolic()).unwrap();
    let lu = faer::sparse::linalg::solvers::Lu::try_new_with_symbolic(sym, a.as_ref()).unwrap();

    let m_uc = op.apply_mass_modal(&uc);
    let lw_uc = op.apply_weak_modal(&uc);
    let off = op.modal_offsets();
    let mut rhs = faer::Mat::<f64>::zeros(n, 1);
    for e in 0..uc.len() {
        for i in 0..uc[e].len() {
            rhs[(off[e] + i, 0)] = m_uc[e][i] - c * lw_uc[e][i];
        }
    }
    let sol = lu.solve(rhs.as_ref());
    let mut max_err = 0.0f64;
    for e in 0..uc.len() {
        for i in 0..uc[e].len() {
            max_err = max_err.max((sol[(off[e] + i, 0)] - uc[e][i]).abs());
        }
    }
    assert!(max_err < 1e-11, "solve mismatch {max_err:.3e}");
}

#[test]
fn zero_state_is_fixed_point() {
    let mesh = build_plane_mesh(Extent::square(-1.0, 1.0), 0.5, 2).unwrap();
    let d = iso_dframes(&mesh, 1.0);
    let state = ApState::zeros(mesh.n_points());
    let cfg = SolverConfig {
        dt: 0.01,
        t_final: 0.05,
        ..Default::default()
    };
    let out = run(&mesh, &d, ApParams::default(), cfg, state, None).unwrap();
    assert!(out.state.u.max_abs() < 1e-14);
    assert!(out.state.v.max_abs() < 1e-14);
}

#[test]
fn diffusion_conserves_mass_per_step() {
    let mesh = build_plane_mesh(Extent::square(-5.0, 5.0), 1.0, 4).unwrap();
    let state = point_initialize(&mesh, Vector3::zeros(), 1.0, 1.0).unwrap();
    let d = iso_dframes(&mesh, 1.0);
    let cfg = SolverConfig {
        dt: 0.01,
        t_final: 0.0,
        reaction_enabled: false,
        ..Default::default()
    };
    let mut stepper = ImexStepper::new(&mesh, &d, ApParams::default(), cfg, state).unwrap();
    let m0 = mesh.integrate(&stepper.u_pts);
    for _ in 0..20 {
        stepper.advance().unwrap();
        let m = mesh.integrate(&stepper.u_pts);
        assert!(
            ((m - m0) / m0).abs() < 1e-12,
            "mass drift {:.3e} after step {}",
            (m - m0) / m0,
            stepper.step
        );
    }
}

#[test]
fn point_init_profile_and_integral() {
    let mesh = build_plane_mesh(Extent::square(-20.0, 20.0), 4.0, 4).unwrap();
    let state = point_initialize(&mesh, Vector3::zeros(), 1.0, 1.0).unwrap();
    // value at the center and far away
    let pts = mesh.points();
    for (i, p) in pts.iter().enumerate() {
        let r = (p.x * p.x + p.y * p.y).sqrt();
        if r < 0.2 {
            assert_relative_eq!(state.u.data[i], 1.0, epsilon = 1e-12);
        }
        if r > 5.0 + mesh.h_max() {
            assert_eq!(state.u.data[i], 0.0);
        }
    }

    // quadrature oracle for the smoothed profile: 2 pi int u(r) r dr,
    // on a mesh whose smoothing width is small against the radius
    let fine = build_plane_mesh(Extent::square(-4.0, 4.0), 0.25, 4).unwrap();
    let state = point_initialize(&fine, Vector3::zeros(), 1.0, 1.0).unwrap();
    let w = fine.h_max();
    let radius = 1.0;
    let smooth5 = |t: f64| {
        let t: f64 = t.clamp(0.0, 1.0);
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    };
    let profile = |r: f64| 1.0 - smooth5((r - radius) / w);
    let n1d = 4000;
    let rmax = radius + w;
    let dr = rmax / n1d as f64;
    let mut exact = 0.0;
    for i in 0..n1d {
        let r = (i as f64 + 0.5) * dr;
        exact += profile(r) * r * dr;
    }
    exact *= 2.0 * std::f64::consts::PI;

    let integral = fine.integrate(&state.u);
    assert_relative_eq!(integral, exact, max_relative = 1e-3);
    // and it is pi r^2 up to the smoothing ring
    let ring = 2.0 * std::f64::consts::PI * (radius + w) * w;
    assert!((integral - std::f64::consts::PI).abs() < ring);
}

#[test]
fn point_init_rejects_bad_input() {
    let mesh = build_plane_mesh(Extent::square(-2.0, 2.0), 1.0, 2).unwrap();
    assert!(point_initialize(&mesh, Vector3::zeros(), -1.0, 1.0).is_err());
    assert!(point_initialize(&mesh, Vector3::new(0.0, 0.0, 2.0), 1.0, 1.0).is_err());

    let zero = point_initialize(&mesh, Vector3::zeros(), 1.0, 0.0).unwrap();
    assert!(zero.u.max_abs() == 0.0);
}

#[test]
fn t_final_zero_returns_initial_state() {
    let mesh = build_plane_mesh(Extent::square(-2.0, 2.0), 1.0, 2).unwrap();
    let state = point_initialize(&mesh, Vector3::zeros(), 1.0, 1.0).unwrap();
    let d = iso_dframes(&mesh, 1.0);
    let cfg = SolverConfig {
        dt: 0.01,
        t_final: 0.0,
        snapshot_times: vec![0.0],
        ..Default::default()
    };
    let out = run(&mesh, &d, ApParams::default(), cfg, state.clone(), None).unwrap();
    assert_eq!(out.n_steps, 0);
    assert_eq!(out.state.u.data, state.u.data);
    assert_eq!(out.snapshots.len(), 1);
}
