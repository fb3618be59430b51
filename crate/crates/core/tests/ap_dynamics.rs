//! Action-potential dynamics: pulse formation, propagation, repolarization,
//! and the outward orientation of accumulated waveback directions.

use mmf_core::frames::{init_frames, Extraction, GradientAccumulator, InitPolicy, Position};
use mmf_core::mesh::{build_plane_mesh, Extent};
use mmf_core::pde::{
    make_dframes, point_initialize, run, ApParams, DiffusivityMagnitudes, SolverConfig,
};
use nalgebra::Vector3;

#[test]
fn pulse_propagates_and_repolarizes() {
    let mesh = build_plane_mesh(
        Extent {
            xmin: -40.0,
            xmax: 40.0,
            ymin: -4.0,
            ymax: 4.0,
        },
        2.0,
        4,
    )
    .unwrap();
    let frames = init_frames(&mesh, InitPolicy::FixedAxis(Vector3::new(1.0, 0.0, 0.0)));
    let d = make_dframes(
        &frames,
        &DiffusivityMagnitudes::isotropic(mesh.n_points(), 1.0),
    )
    .unwrap();
    let origin = Vector3::new(-36.0, 0.0, 0.0);
    let state = point_initialize(&mesh, origin, 1.0, 1.0).unwrap();
    let cfg = SolverConfig {
        dt: 0.01,
        t_final: 35.0,
        snapshot_times: vec![15.0, 25.0, 35.0],
        ..Default::default()
    };
    let mut acc = GradientAccumulator::new(mesh.n_points(), Position::Waveback, Extraction::Wint, 1e-4);
    let out = run(&mesh, &d, ApParams::default(), cfg, state, Some(&mut acc)).unwrap();

    // front position (largest x with u > 0.5) grows between snapshots
    let front = |u: &mmf_core::mesh::ScalarField| {
        let mut f = f64::NEG_INFINITY;
        for (i, p) in mesh.points().iter().enumerate() {
            if u.data[i] > 0.5 && p.x > f {
                f = p.x;
            }
        }
        f
    };
    let fronts: Vec<f64> = out.snapshots.iter().map(|(_, u)| front(u)).collect();
    assert!(fronts[1] > fronts[0] + 5.0 && fronts[2] > fronts[1] + 5.0, "fronts {fronts:?}");
    let speed = (fronts[2] - fronts[0]) / 20.0;
    assert!(speed > 0.5 && speed < 2.5, "speed {speed}");

    // a probe near the initiation saw a full action potential by t = 35
    let probe = mesh
        .points()
        .iter()
        .position(|p| (p.x + 30.0).abs() < 1.0 && p.y.abs() < 1.0)
        .unwrap();
    assert!(out.state.u.data[probe] < 0.1, "probe u = {}", out.state.u.data[probe]);

    // waveback-accumulated directions point outward (away from initiation)
    let dir = acc.finalize_direction();
    let mut aligned = 0usize;
    let mut outward = 0usize;
    for (i, p) in mesh.points().iter().enumerate() {
        let radial = p - origin;
        if radial.norm() < 3.0 || dir.data[i].norm() == 0.0 {
            continue;
        }
        aligned += 1;
        if dir.data[i].dot(&radial.normalize()) > 0.8 {
            outward += 1;
        }
    }
    assert!(aligned > 100, "aligned points {aligned}");
    assert!(
        outward as f64 > 0.95 * aligned as f64,
        "outward {outward} of {aligned}"
    );
}
