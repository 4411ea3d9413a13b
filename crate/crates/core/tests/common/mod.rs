#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snkit::dg::{DgSpace, TransportSystem};
use snkit::problem::{BoundarySource, CoefficientField, StructuredMesh};
use snkit::quadrature::AngularQuadrature;
use snkit::sparse::CsrMatrix;

pub fn to_dense(a: &CsrMatrix) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.n_rows(), a.n_cols());
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            m[(i, c)] = v;
        }
    }
    m
}

pub fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// System on an `nx x ny` unit-cell mesh with per-element coefficients.
pub fn system(
    nx: usize,
    ny: usize,
    h: f64,
    order: usize,
    sn: usize,
    sigma_s: Vec<f64>,
    sigma_a: Vec<f64>,
) -> TransportSystem {
    let mesh = StructuredMesh::new(nx, ny, h, h).unwrap();
    let space = DgSpace::new(mesh.clone(), order).unwrap();
    let quad = AngularQuadrature::build(sn).unwrap();
    let field = CoefficientField::from_scattering_absorption(sigma_s, sigma_a).unwrap();
    let source = BoundarySource::uniform(&mesh, 1.0, 0.5);
    snkit::dg::assemble_transport(space, quad, field, source).unwrap()
}

/// Checkerboard-ish heterogeneous coefficients on a 4x4 mesh.
pub fn heterogeneous_4x4(order: usize, sn: usize) -> TransportSystem {
    let s: Vec<f64> = (0..16).map(|e| if (e / 4 + e % 4) % 2 == 0 { 5.0 } else { 0.3 }).collect();
    let a = vec![0.1; 16];
    system(4, 4, 0.5, order, sn, s, a)
}

/// Dense `I - sum_d w_d L_d^{-1} Sigma_s` from assembled operators.
pub fn dense_schur(sys: &TransportSystem) -> DMatrix<f64> {
    let n = sys.n_dofs();
    let coef: Vec<f64> = sys
        .field
        .sigma_s
        .iter()
        .map(|s| s / (4.0 * std::f64::consts::PI))
        .collect();
    let sigma_s = to_dense(&sys.mass_matrix(&coef));
    let mut s = DMatrix::identity(n, n);
    for d in 0..sys.n_ordinates() {
        let l = to_dense(&sys.ordinate_matrix(d).unwrap());
        let lu = l.lu();
        let x = lu.solve(&sigma_s).unwrap();
        s -= sys.quad.weight(d) * x;
    }
    s
}

pub fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// Dense `[[I, 0], [0, I + D_ff^{-1} Sigma_tf]]` in global DOF order.
pub fn dense_het_diag(sys: &TransportSystem, kind: snkit::dg::DsaKind, eta: f64) -> DMatrix<f64> {
    let n = sys.n_dofs();
    let d = snkit::dg::assemble_dsa(sys, kind, snkit::dg::DsaScope::ThickOnly, eta).unwrap();
    let mut out = DMatrix::identity(n, n);
    if d.dofs.is_empty() {
        return out;
    }
    let dinv = to_dense(&d.matrix).try_inverse().unwrap();
    let mt = to_dense(&sys.mass_matrix(&sys.field.sigma_t));
    let mtf = DMatrix::from_fn(d.dofs.len(), d.dofs.len(), |i, j| mt[(d.dofs[i], d.dofs[j])]);
    let corr = dinv * mtf;
    for (i, &gi) in d.dofs.iter().enumerate() {
        for (j, &gj) in d.dofs.iter().enumerate() {
            out[(gi, gj)] += corr[(i, j)];
        }
    }
    out
}

/// Dense two-factor triangular preconditioner built from the 2x2 block inverse
/// of every `L_d`: `[[I, sum_d w_d (-L_ss^{-1} L_sf S_ff^{-1}) Sigma_sf], [0, I]] * diag`.
pub fn dense_het_tri(sys: &TransportSystem, kind: snkit::dg::DsaKind, eta: f64) -> DMatrix<f64> {
    let n = sys.n_dofs();
    let nl = sys.space.n_local();
    let thick: Vec<bool> = sys.field.sigma_s.iter().map(|&s| s >= eta).collect();
    let f: Vec<usize> = (0..n).filter(|&i| thick[i / nl]).collect();
    let s: Vec<usize> = (0..n).filter(|&i| !thick[i / nl]).collect();
    let sub = |m: &DMatrix<f64>, r: &[usize], c: &[usize]| DMatrix::from_fn(r.len(), c.len(), |i, j| m[(r[i], c[j])]);
    let coef: Vec<f64> = sys.field.sigma_s.iter().map(|x| x / (4.0 * std::f64::consts::PI)).collect();
    let sig = to_dense(&sys.mass_matrix(&coef));
    let sig_ff = sub(&sig, &f, &f);
    let mut x = DMatrix::zeros(s.len(), f.len());
    for d in 0..sys.n_ordinates() {
        let l = to_dense(&sys.ordinate_matrix(d).unwrap());
        let (lss, lsf, lfs, lff) = (sub(&l, &s, &s), sub(&l, &s, &f), sub(&l, &f, &s), sub(&l, &f, &f));
        let lss_inv = lss.try_inverse().unwrap();
        let sff = &lff - &lfs * &lss_inv * &lsf;
        let sff_inv = sff.try_inverse().unwrap();
        x -= sys.quad.weight(d) * (&lss_inv * &lsf * sff_inv * &sig_ff);
    }
    let mut upper = DMatrix::identity(n, n);
    for (i, &gi) in s.iter().enumerate() {
        for (j, &gj) in f.iter().enumerate() {
            upper[(gi, gj)] = x[(i, j)];
        }
    }
    upper * dense_het_diag(sys, kind, eta)
}

/// Apply a preconditioner handle to a vector.
pub fn apply(pc: &mut snkit::solver::DsaPreconditioner<'_>, v: &[f64]) -> Vec<f64> {
    pc.apply_vec(v).unwrap()
}
