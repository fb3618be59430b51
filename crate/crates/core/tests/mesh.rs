//! Mesh construction, quadrature, differentiation, and file round trips.

use approx::assert_relative_eq;
use mmf_core::mesh::io::{load_mesh, parse_mesh, save_mesh, save_scalar_field};
use mmf_core::mesh::{build_plane_mesh, build_sphere_mesh, ScalarField};
use mmf_core::mesh::Extent;
use mmf_core::Error;

#[test]
fn plane_mesh_normals_and_area() {
    let mesh = build_plane_mesh(Extent::square(-40.0, 40.0), 4.0, 4).unwrap();
    for k in mesh.normals().data {
        assert_relative_eq!(k.x, 0.0, epsilon = 1e-14);
        assert_relative_eq!(k.y, 0.0, epsilon = 1e-14);
        assert_relative_eq!(k.z, 1.0, epsilon = 1e-14);
    }
    let area = mesh.area();
    assert!((area - 6400.0).abs() < 1e-10 * 6400.0);
    assert_relative_eq!(mesh.h_max(), 4.0, epsilon = 1e-12);
}

#[test]
fn unit_square_single_quad() {
    let mesh = build_plane_mesh(Extent::square(0.0, 1.0), 1.0, 1).unwrap();
    assert_eq!(mesh.n_elements(), 1);
    assert!((mesh.area() - 1.0).abs() < 1e-12);
}

#[test]
fn degenerate_extent_rejected() {
    let bad = Extent {
        xmin: 1.0,
        xmax: 1.0,
        ymin: 0.0,
        ymax: 2.0,
    };
    assert!(matches!(
        build_plane_mesh(bad, 0.5, 2),
        Err(Error::InvalidInput(_))
    ));
    assert!(build_plane_mesh(Extent::square(0.0, 1.0), -1.0, 2).is_err());
    assert!(build_plane_mesh(Extent::square(0.0, 1.0), 0.5, 0).is_err());
}

#[test]
fn sphere_mesh_area_and_normals() {
    let r = 10.0;
    let exact = 4.0 * std::f64::consts::PI * r * r;
    let mesh = build_sphere_mesh(r, 2.48, 4).unwrap();
    assert_eq!(mesh.n_elements(), 1152);
    let area = mesh.area();
    assert!(
        (area - exact).abs() / exact < 1e-3,
        "area {area} vs {exact}"
    );

    // normals are the exact sphere normals
    let pts = mesh.points();
    for (p, k) in pts.iter().zip(mesh.normals().data.iter()) {
        let n = p / p.norm();
        assert!((n - k).norm() < 1e-8);
    }

    // higher order tightens the geometric area error
    let coarse = build_sphere_mesh(r, 2.48, 2).unwrap();
    let fine = build_sphere_mesh(r, 2.48, 6).unwrap();
    let e_coarse = (coarse.area() - exact).abs();
    let e_fine = (fine.area() - exact).abs();
    assert!(e_fine < e_coarse);
}

#[test]
fn sphere_rejects_bad_input() {
    assert!(build_sphere_mesh(-1.0, 0.5, 3).is_err());
    assert!(build_sphere_mesh(10.0, 10.0, 3).is_err());
    assert!(build_sphere_mesh(10.0, 12.0, 3).is_err());
}

#[test]
fn gradient_linear_exact() {
    let mesh = build_plane_mesh(Extent::square(-2.0, 2.0), 1.0, 1).unwrap();
    let f = ScalarField {
        data: mesh.points().iter().map(|p| p.x).collect(),
    };
    let g = mesh.gradient(&f);
    for v in g.data {
        assert!((v - nalgebra::Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn gradient_bilinear_exact() {
    let mesh = build_plane_mesh(Extent::square(-2.0, 2.0), 1.0, 2).unwrap();
    let f = ScalarField {
        data: mesh.points().iter().map(|p| p.x * p.y).collect(),
    };
    let g = mesh.gradient(&f);
    for (p, v) in mesh.points().iter().zip(g.data.iter()) {
        assert!((v - nalgebra::Vector3::new(p.y, p.x, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn gradient_sine_spectral() {
    let mesh = build_plane_mesh(Extent::square(-1.0, 1.0), 0.5, 6).unwrap();
    let f = ScalarField {
        data: mesh.points().iter().map(|p| p.x.sin()).collect(),
    };
    let g = mesh.gradient(&f);
    let mut max_err = 0.0f64;
    for (p, v) in mesh.points().iter().zip(g.data.iter()) {
        max_err = max_err.max((v.x - p.x.cos()).abs());
        max_err = max_err.max(v.y.abs());
    }
    assert!(max_err < 1e-6, "max gradient error {max_err}");
}

#[test]
fn quadrature_weight_sum_matches_area() {
    let mesh = build_plane_mesh(Extent::square(0.0, 3.0), 0.7, 3).unwrap();
    let w: f64 = mesh.weights().iter().sum();
    assert!((w - 9.0).abs() < 1e-10 * 9.0);
}

#[test]
fn mesh_roundtrip_plane_and_sphere() {
    let dir = tempfile::tempdir().unwrap();
    for mesh in [
        build_plane_mesh(Extent::square(-1.0, 1.0), 0.5, 3).unwrap(),
        build_sphere_mesh(5.0, 2.0, 3).unwrap(),
    ] {
        let path = dir.path().join("mesh.mmf");
        save_mesh(&path, &mesh).unwrap();
        let loaded = load_mesh(&path).unwrap();
        assert_eq!(loaded.n_vertices(), mesh.n_vertices());
        assert_eq!(loaded.n_elements(), mesh.n_elements());
        for (a, b) in mesh.vertices().iter().zip(loaded.vertices()) {
            assert_eq!(a, b);
        }
        for (a, b) in mesh.elements().iter().zip(loaded.elements()) {
            assert_eq!(a.verts, b.verts);
            for (na, nb) in a.geom_nodes.iter().zip(&b.geom_nodes) {
                assert!((na - nb).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn truncated_mesh_file_is_parse_error() {
    let mesh = build_plane_mesh(Extent::square(0.0, 1.0), 0.5, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.mmf");
    save_mesh(&path, &mesh).unwrap();
    let full = std::fs::read_to_string(&path).unwrap();
    let truncated: String = full.lines().take(6).map(|l| format!("{l}\n")).collect();
    match parse_mesh(&truncated) {
        Err(Error::Parse { .. }) => {}
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn unknown_element_code_is_named() {
    let text = "MMFMESH 1\nSURFACE plane\nORDER 2 2\nVERTICES 3\n0 0 0\n1 0 0\n0 1 0\nELEMENTS 1\n7 0 1 2\nEND\n";
    match parse_mesh(text) {
        Err(Error::Parse { line, msg }) => {
            assert!(msg.contains('7'), "message should name the code: {msg}");
            assert_eq!(line, 9);
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn scalar_field_roundtrip() {
    let mesh = build_plane_mesh(Extent::square(0.0, 1.0), 0.5, 2).unwrap();
    let f = ScalarField {
        data: mesh.points().iter().map(|p| p.x - 2.0 * p.y).collect(),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    save_scalar_field(&path, &mesh, &f).unwrap();
    let g = mmf_core::mesh::io::load_scalar_field(&path, &mesh).unwrap();
    assert_eq!(f.data, g.data);
}

#[test]
fn surface_divergence_radial_plane() {
    // div(x, y, 0) = 2 on the plane
    let mesh = build_plane_mesh(Extent::square(-2.0, 2.0), 0.5, 3).unwrap();
    let f = mmf_core::mesh::VectorField {
        data: mesh
            .points()
            .iter()
            .map(|p| nalgebra::Vector3::new(p.x, p.y, 0.0))
            .collect(),
    };
    let div = mesh.surface_divergence(&f);
    for v in div.data {
        assert_relative_eq!(v, 2.0, epsilon = 1e-10);
    }
}

#[test]
fn surface_divergence_sphere_tangent_fields() {
    // div of the unit latitudinal field e_theta is cot(theta)/r
    let r = 4.0;
    let mesh = build_sphere_mesh(r, 1.0, 5).unwrap();
    let f = mmf_core::mesh::VectorField {
        data: mesh
            .points()
            .iter()
            .map(|p| {
                let theta = (p.z / p.norm()).acos();
                let phi = p.y.atan2(p.x);
                nalgebra::Vector3::new(
                    theta.cos() * phi.cos(),
                    theta.cos() * phi.sin(),
                    -theta.sin(),
                )
            })
            .collect(),
    };
    let div = mesh.surface_divergence(&f);
    let mut max_err = 0.0f64;
    for (p, v) in mesh.points().iter().zip(div.data.iter()) {
        let theta = (p.z / p.norm()).acos();
        // stay away from the poles where the field is singular
        if theta > 0.6 && theta < std::f64::consts::PI - 0.6 {
            max_err = max_err.max((v - theta.cos() / (theta.sin() * r)).abs());
        }
    }
    assert!(max_err < 1e-4, "divergence error {max_err}");
}
