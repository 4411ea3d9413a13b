mod common;

use std::f64::consts::PI;

use common::*;
use snkit::dg::{assemble_transport, DgSpace};
use snkit::problem::{BoundarySource, CoefficientField, Side, StructuredMesh};
use snkit::quadrature::AngularQuadrature;

#[test]
fn single_element_p1_matches_symbolic_integration() {
    let mesh = StructuredMesh::new(1, 1, 1.0, 1.0).unwrap();
    let space = DgSpace::new(mesh.clone(), 1).unwrap();
    let quad = AngularQuadrature::from_parts(vec![[0.6, 0.8, 0.0]], vec![4.0 * PI]).unwrap();
    let field = CoefficientField::uniform(1, 0.0, 2.0).unwrap();
    let sys = assemble_transport(space, quad, field, BoundarySource::zero(&mesh)).unwrap();
    // Exact rational entries of the element operator for Omega = (3/5, 4/5), sigma_t = 2.
    let exact = [
        [41.0 / 90.0, 5.0 / 18.0, 53.0 / 180.0, 31.0 / 180.0],
        [7.0 / 90.0, 41.0 / 90.0, 13.0 / 180.0, 53.0 / 180.0],
        [1.0 / 36.0, 7.0 / 180.0, 41.0 / 90.0, 5.0 / 18.0],
        [-11.0 / 180.0, 1.0 / 36.0, 7.0 / 90.0, 41.0 / 90.0],
    ];
    let l = sys.ordinate_matrix(0).unwrap().to_dense();
    for i in 0..4 {
        for j in 0..4 {
            assert!((l[(i, j)] - exact[i][j]).abs() < 1e-14, "({i},{j})");
        }
    }
    // The sweep inverts the same block.
    let rhs = [1.0, -2.0, 0.5, 3.0];
    let x = sys.sweep_solve(0, &rhs).unwrap();
    let back = l.matvec(&x).unwrap();
    assert!(max_abs_diff(&back, &rhs) < 1e-13);
}

#[test]
fn sweep_matches_dense_solve_of_assembled_operator() {
    for order in [1, 2] {
        let sys = heterogeneous_4x4(order, 4);
        let rhs = random_vec(sys.n_dofs(), 3);
        for d in 0..sys.n_ordinates() {
            let l = to_dense(&sys.ordinate_matrix(d).unwrap());
            let want = l.clone().lu().solve(&dvec(&rhs)).unwrap();
            let got = sys.sweep_solve(d, &rhs).unwrap();
            assert!(max_abs_diff(got.as_slice(), want.as_slice()) < 1e-11);
            let res = &l * dvec(&got) - dvec(&rhs);
            assert!(res.amax() <= 1e-11 * dvec(&rhs).amax());
        }
    }
}

#[test]
fn zero_rhs_sweeps_to_zero_in_pure_advection() {
    let sys = system(3, 3, 1.0, 2, 2, vec![0.0; 9], vec![0.0; 9]);
    for d in 0..sys.n_ordinates() {
        let x = sys.sweep_solve(d, &vec![0.0; sys.n_dofs()]).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn mass_matrix_is_linear_in_coefficient() {
    let sys = system(2, 2, 1.0, 2, 2, vec![1.0; 4], vec![1.0; 4]);
    let m1 = sys.mass_matrix(&[1.0; 4]);
    let m2 = sys.mass_matrix(&[2.0; 4]);
    assert_eq!(m1.scale(2.0), m2);
}

#[test]
fn sweep_order_respects_upwind_dependencies() {
    let sys = system(5, 3, 1.0, 1, 8, vec![0.0; 15], vec![1.0; 15]);
    let mesh = &sys.space.mesh;
    for d in 0..sys.n_ordinates() {
        let order = sys.sweep_order(d);
        let mut pos = vec![0; order.len()];
        for (k, &e) in order.iter().enumerate() {
            pos[e] = k;
        }
        let o = sys.quad.direction(d);
        for e in 0..mesh.n_elements() {
            for side in Side::ALL {
                let n = side.normal();
                if o[0] * n[0] + o[1] * n[1] < 0.0 {
                    if let Some(up) = mesh.neighbor(e, side) {
                        assert!(pos[up] < pos[e]);
                    }
                }
            }
        }
    }
}

#[test]
fn upwind_solution_obeys_maximum_principle() {
    let mesh = StructuredMesh::new(6, 6, 0.5, 0.5).unwrap();
    let space = DgSpace::new(mesh.clone(), 1).unwrap();
    let quad = AngularQuadrature::build(4).unwrap();
    let field = CoefficientField::uniform(36, 0.0, 1.5).unwrap();
    let sys = assemble_transport(space, quad, field, BoundarySource::uniform(&mesh, 1.0, 0.0)).unwrap();
    let n = sys.space.n_local();
    for d in 0..sys.n_ordinates() {
        let psi = sys.sweep_solve(d, &sys.source_rhs(d)).unwrap();
        assert!(psi.iter().all(|&v| v <= 1.0 + 1e-12));
        // The element nearest the inflow corner is brighter than the one at the outflow corner.
        let o = sys.quad.direction(d);
        let corner = |up: bool| {
            let i = if (o[0] > 0.0) == up { 0 } else { 5 };
            let j = if (o[1] > 0.0) == up { 0 } else { 5 };
            let e = mesh.element_id(i, j);
            psi[e * n..(e + 1) * n].iter().sum::<f64>() / n as f64
        };
        assert!(corner(false) < corner(true));
    }
}

#[test]
fn no_scattering_gives_identity_schur_operator() {
    let sys = system(3, 2, 1.0, 2, 4, vec![0.0; 6], vec![2.0; 6]);
    let phi = random_vec(sys.n_dofs(), 9);
    assert_eq!(sys.schur_apply(&phi).unwrap(), phi);
}

#[test]
fn schur_operator_matches_dense_brute_force() {
    for order in [1, 2] {
        for sn in [2, 4] {
            let sys = heterogeneous_4x4(order, sn);
            let dense = dense_schur(&sys);
            let n = sys.n_dofs();
            let mut worst: f64 = 0.0;
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let col = sys.schur_apply(&e).unwrap();
                for i in 0..n {
                    worst = worst.max((col[i] - dense[(i, j)]).abs());
                }
            }
            assert!(worst < 1e-11, "p={order} N={sn}: {worst}");
        }
    }
}

#[test]
fn vacuum_thin_region_makes_schur_block_upper_triangular() {
    // Thick elements first in the block ordering: thin rows below, thick above.
    let s: Vec<f64> = (0..16).map(|e| if e % 4 < 2 { 4.0 } else { 0.0 }).collect();
    let sys = system(4, 4, 0.5, 1, 4, s.clone(), vec![0.2; 16]);
    let dense = dense_schur(&sys);
    let n = sys.space.n_local();
    let thick: Vec<bool> = (0..16 * n).map(|i| s[i / n] > 0.0).collect();
    let mut lower_left: f64 = 0.0;
    let mut upper_right: f64 = 0.0;
    for i in 0..16 * n {
        for j in 0..16 * n {
            if !thick[i] && thick[j] {
                upper_right = upper_right.max(dense[(i, j)].abs());
            }
            if thick[i] && !thick[j] {
                lower_left = lower_left.max(dense[(i, j)].abs());
            }
        }
    }
    assert!(lower_left < 1e-11);
    assert!(upper_right > 1e-6);
}

#[test]
fn schur_rhs_of_single_void_element() {
    let mesh = StructuredMesh::new(1, 1, 1.0, 1.0).unwrap();
    let space = DgSpace::new(mesh.clone(), 2).unwrap();
    let quad = AngularQuadrature::build(4).unwrap();
    let field = CoefficientField::uniform(1, 0.0, 0.0).unwrap();
    let sys = assemble_transport(space, quad, field, BoundarySource::uniform(&mesh, 0.0, 1.0)).unwrap();
    let b = sys.schur_rhs().unwrap();
    let mut want = nalgebra::DVector::zeros(sys.n_dofs());
    for d in 0..sys.n_ordinates() {
        let l = to_dense(&sys.ordinate_matrix(d).unwrap());
        want += sys.quad.weight(d) * l.lu().solve(&dvec(&sys.source_rhs(d))).unwrap();
    }
    assert!(max_abs_diff(&b, want.as_slice()) < 1e-12);
    // Constant unit source over a unit void square: the mean chord gives
    // a scalar flux between 0 and 4 pi times the side length.
    assert!(b.iter().all(|&v| v > 0.0 && v < 4.0 * PI));
}

#[test]
fn schur_rhs_is_linear_in_sources() {
    let sys = heterogeneous_4x4(1, 2);
    let b = sys.schur_rhs().unwrap();
    let mut doubled = sys.clone();
    doubled.source = sys.source.scaled(2.0);
    let b2 = doubled.schur_rhs().unwrap();
    for (x, y) in b.iter().zip(&b2) {
        assert!((2.0 * x - y).abs() < 1e-13 * x.abs().max(1.0));
    }
    let mut none = sys.clone();
    none.source = sys.source.scaled(0.0);
    assert!(none.schur_rhs().unwrap().iter().all(|&v| v == 0.0));
}
