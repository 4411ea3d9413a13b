use std::f64::consts::PI;

use crate::dg::forms::assemble_face_form;
use crate::dg::DgSpace;
use crate::error::{Error, Result};
use crate::problem::{BoundarySource, CoefficientField, Side};
use crate::quadrature::AngularQuadrature;
use crate::sparse::{CsrMatrix, DenseMatrix, LuFactors};

/// Upwind DG transport operators `L_d = Omega_d . G + F^(d) + M(sigma_t)`
/// for every ordinate, applied by sweeps.
#[derive(Debug, Clone)]
pub struct TransportSystem {
    pub space: DgSpace,
    pub quad: AngularQuadrature,
    pub field: CoefficientField,
    pub source: BoundarySource,
    class_of: Vec<usize>,
    classes: Vec<f64>,
    /// `diag[d][class]`: factored element block of ordinate `d`.
    diag: Vec<Vec<LuFactors>>,
    /// Face coupling `int l_s l_t` for x-normal and y-normal faces.
    coupling: [DenseMatrix; 2],
}

/// Inflow sides of an element for direction `omega`, x-side first.
fn inflow_sides(omega: [f64; 3]) -> [Side; 2] {
    [
        if omega[0] > 0.0 { Side::Left } else { Side::Right },
        if omega[1] > 0.0 { Side::Bottom } else { Side::Top },
    ]
}

pub fn assemble_transport(
    space: DgSpace,
    quad: AngularQuadrature,
    field: CoefficientField,
    source: BoundarySource,
) -> Result<TransportSystem> {
    let ne = space.n_elements();
    if field.len() != ne {
        return Err(Error::dim(format!(
            "coefficient field has {} entries for {ne} elements",
            field.len()
        )));
    }
    source.check(&space.mesh)?;
    if let Some(d) = quad
        .directions()
        .iter()
        .position(|o| o[0] == 0.0 || o[1] == 0.0)
    {
        return Err(Error::usage(format!(
            "ordinate {d} has a zero Cartesian component; sweeps need strict signs"
        )));
    }

    let mut classes: Vec<f64> = Vec::new();
    let class_of: Vec<usize> = field
        .sigma_t
        .iter()
        .map(|&t| match classes.iter().position(|&c| c == t) {
            Some(k) => k,
            None => {
                classes.push(t);
                classes.len() - 1
            }
        })
        .collect();

    let mut diag = Vec::with_capacity(quad.len());
    for (d, &omega) in quad.directions().iter().enumerate() {
        let mut adv = space.grad(0).scale(omega[0]);
        adv.add_scaled(omega[1], space.grad(1));
        for side in inflow_sides(omega) {
            let un = (omega[0] * side.normal()[0] + omega[1] * side.normal()[1]).abs();
            let fm = space.face_mass(side);
            let nodes = space.face_nodes(side);
            for (s, &a) in nodes.iter().enumerate() {
                for (t, &b) in nodes.iter().enumerate() {
                    adv[(a, b)] += un * fm[(s, t)];
                }
            }
        }
        let mut per_class = Vec::with_capacity(classes.len());
        for (k, &sigma_t) in classes.iter().enumerate() {
            let mut block = adv.clone();
            block.add_scaled(sigma_t, space.mass());
            let lu = LuFactors::factor(&block).map_err(|_| Error::SingularElement {
                element: class_of.iter().position(|&c| c == k).unwrap(),
                ordinate: d,
            })?;
            per_class.push(lu);
        }
        diag.push(per_class);
    }
    let coupling = [space.face_mass(Side::Left), space.face_mass(Side::Bottom)];
    Ok(TransportSystem {
        space,
        quad,
        field,
        source,
        class_of,
        classes,
        diag,
        coupling,
    })
}

impl TransportSystem {
    pub fn n_dofs(&self) -> usize {
        self.space.n_dofs()
    }

    pub fn n_ordinates(&self) -> usize {
        self.quad.len()
    }

    /// Distinct `sigma_t` values with cached element factorizations.
    pub fn sigma_t_classes(&self) -> &[f64] {
        &self.classes
    }

    /// Element visiting order for ordinate `d`: every element comes after its
    /// upwind neighbors.
    pub fn sweep_order(&self, d: usize) -> Vec<usize> {
        let omega = self.quad.direction(d);
        let m = &self.space.mesh;
        let is: Vec<usize> = if omega[0] > 0.0 {
            (0..m.nx).collect()
        } else {
            (0..m.nx).rev().collect()
        };
        let js: Vec<usize> = if omega[1] > 0.0 {
            (0..m.ny).collect()
        } else {
            (0..m.ny).rev().collect()
        };
        js.iter()
            .flat_map(|&j| is.iter().map(move |&i| m.element_id(i, j)))
            .collect()
    }

    /// Solve `L_d x = rhs` exactly by one sweep.
    pub fn sweep_solve(&self, d: usize, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.n_dofs()];
        self.sweep_into(d, rhs, &mut x)?;
        Ok(x)
    }

    pub fn sweep_into(&self, d: usize, rhs: &[f64], x: &mut [f64]) -> Result<()> {
        let n_dofs = self.n_dofs();
        if rhs.len() != n_dofs || x.len() != n_dofs {
            return Err(Error::dim(format!(
                "sweep on {n_dofs} DOFs with vectors of length {} and {}",
                rhs.len(),
                x.len()
            )));
        }
        let omega = self.quad.direction(d);
        let space = &self.space;
        let mesh = &space.mesh;
        let n = space.n_local();
        let mut local = vec![0.0; n];
        for e in self.sweep_order(d) {
            local.copy_from_slice(&rhs[e * n..(e + 1) * n]);
            for side in inflow_sides(omega) {
                let Some(up) = mesh.neighbor(e, side) else {
                    continue;
                };
                let axis = side.axis();
                let un = omega[axis].abs();
                let c = &self.coupling[axis];
                let mine = space.face_nodes(side);
                let theirs = space.face_nodes(side.opposite());
                let xu = &x[up * n..(up + 1) * n];
                for (s, &a) in mine.iter().enumerate() {
                    let row = c.row(s);
                    let mut acc = 0.0;
                    for (t, &b) in theirs.iter().enumerate() {
                        acc += row[t] * xu[b];
                    }
                    local[a] += un * acc;
                }
            }
            self.diag[d][self.class_of[e]].solve_in_place(&mut local)?;
            x[e * n..(e + 1) * n].copy_from_slice(&local);
        }
        Ok(())
    }

    /// `M(sigma_s) phi / (4 pi)`, the isotropic scattering source.
    pub fn scattering_source(&self, phi: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_dofs()];
        let coef: Vec<f64> = self.field.sigma_s.iter().map(|s| s / (4.0 * PI)).collect();
        self.space.weighted_mass_apply(&coef, phi, &mut y);
        y
    }

    /// `sum_d w_d L_d^{-1} src` for an isotropic source, ascending in `d`.
    pub fn transport_update(&self, src: &[f64]) -> Result<Vec<f64>> {
        let n = self.n_dofs();
        let mut acc = vec![0.0; n];
        let mut psi = vec![0.0; n];
        for d in 0..self.n_ordinates() {
            self.sweep_into(d, src, &mut psi)?;
            let w = self.quad.weight(d);
            for (a, p) in acc.iter_mut().zip(&psi) {
                *a += w * p;
            }
        }
        Ok(acc)
    }

    /// `S phi = phi - sum_d w_d L_d^{-1} Sigma_s phi`.
    pub fn schur_apply(&self, phi: &[f64]) -> Result<Vec<f64>> {
        if phi.len() != self.n_dofs() {
            return Err(Error::dim("schur_apply vector length"));
        }
        let upd = self.transport_update(&self.scattering_source(phi))?;
        Ok(phi.iter().zip(&upd).map(|(p, u)| p - u).collect())
    }

    /// `b = sum_d w_d L_d^{-1} (q + q_inc^(d))`.
    pub fn schur_rhs(&self) -> Result<Vec<f64>> {
        let n = self.n_dofs();
        let mut acc = vec![0.0; n];
        let mut psi = vec![0.0; n];
        for d in 0..self.n_ordinates() {
            let rhs = self.source_rhs(d);
            self.sweep_into(d, &rhs, &mut psi)?;
            let w = self.quad.weight(d);
            for (a, p) in acc.iter_mut().zip(&psi) {
                *a += w * p;
            }
        }
        Ok(acc)
    }

    /// `psi_d = L_d^{-1} (q_d + q_inc^(d) + Sigma_s phi)`.
    pub fn angular_flux(&self, phi: &[f64], d: usize) -> Result<Vec<f64>> {
        let mut rhs = self.source_rhs(d);
        for (r, s) in rhs.iter_mut().zip(self.scattering_source(phi)) {
            *r += s;
        }
        self.sweep_solve(d, &rhs)
    }

    /// Volumetric source plus inflow boundary term for ordinate `d`.
    pub fn source_rhs(&self, d: usize) -> Vec<f64> {
        let space = &self.space;
        let mesh = &space.mesh;
        let n = space.n_local();
        let mut rhs = vec![0.0; self.n_dofs()];
        let mass_rows: Vec<f64> = (0..n).map(|a| space.mass().row(a).iter().sum()).collect();
        for e in 0..mesh.n_elements() {
            let q = self.source.q[e];
            if q != 0.0 {
                for a in 0..n {
                    rhs[e * n + a] += q * mass_rows[a];
                }
            }
        }
        let omega = self.quad.direction(d);
        for side in inflow_sides(omega) {
            let un = omega[side.axis()].abs();
            let fm = space.face_mass(side);
            let nodes = space.face_nodes(side);
            for e in 0..mesh.n_elements() {
                if mesh.neighbor(e, side).is_some() {
                    continue;
                }
                let psi = self.source.incident(side, mesh.boundary_index(e, side));
                if psi == 0.0 {
                    continue;
                }
                for (s, &a) in nodes.iter().enumerate() {
                    let row_sum: f64 = fm.row(s).iter().sum();
                    rhs[e * n + a] += un * psi * row_sum;
                }
            }
        }
        rhs
    }

    /// Block-diagonal `M(c)` with `c` constant per element.
    pub fn mass_matrix(&self, coef: &[f64]) -> CsrMatrix {
        let blocks: Vec<DenseMatrix> = coef.iter().map(|&c| self.space.mass().scale(c)).collect();
        CsrMatrix::block_diagonal(&blocks)
    }

    /// Assembled `L_d` by element and face quadrature, independent of the sweep path.
    pub fn ordinate_matrix(&self, d: usize) -> Result<CsrMatrix> {
        let space = &self.space;
        let mesh = &space.mesh;
        let n = space.n_local();
        let omega = self.quad.direction(d);
        let b = &space.basis;

        let mut adv = DenseMatrix::zeros(n, n);
        let mut mass = DenseMatrix::zeros(n, n);
        for (&x, &wx) in b.quad_points.iter().zip(&b.quad_weights) {
            for (&y, &wy) in b.quad_points.iter().zip(&b.quad_weights) {
                let w = wx * wy * mesh.hx * mesh.hy;
                let v = space.eval(x, y);
                let g = space.eval_grad(x, y);
                for i in 0..n {
                    for j in 0..n {
                        adv[(i, j)] += w * v[i] * (omega[0] * g[j][0] + omega[1] * g[j][1]);
                        mass[(i, j)] += w * v[i] * v[j];
                    }
                }
            }
        }
        let mut triplets = Vec::new();
        for e in 0..mesh.n_elements() {
            let st = self.field.sigma_t[e];
            for i in 0..n {
                for j in 0..n {
                    let v = adv[(i, j)] + st * mass[(i, j)];
                    if v != 0.0 {
                        triplets.push((e * n + i, e * n + j, v));
                    }
                }
            }
        }
        let faces = mesh.faces();
        assemble_face_form(space, &faces, &mut triplets, |face, _| {
            let nrm = face.normal();
            let un = omega[0] * nrm[0] + omega[1] * nrm[1];
            (0.5 * un.abs(), -un)
        });
        CsrMatrix::from_triplets(self.n_dofs(), self.n_dofs(), &triplets)
    }
}
