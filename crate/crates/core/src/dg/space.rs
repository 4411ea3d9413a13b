use crate::dg::Basis1d;
use crate::error::{Error, Result};
use crate::problem::{Side, StructuredMesh};
use crate::sparse::DenseMatrix;

/// Discontinuous `Q_p` space on a structured mesh.
///
/// Local DOF `a = iy * (p + 1) + ix` sits at the tensor Gauss-Lobatto node
/// `(ix, iy)`; element `e` owns DOFs `e * n_local .. (e + 1) * n_local`.
#[derive(Debug, Clone)]
pub struct DgSpace {
    pub mesh: StructuredMesh,
    pub basis: Basis1d,
    n_local: usize,
    mass: DenseMatrix,
    grad: [DenseMatrix; 2],
    face_nodes: [Vec<usize>; 4],
}

pub(crate) fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
        Side::Bottom => 2,
        Side::Top => 3,
    }
}

impl DgSpace {
    pub fn new(mesh: StructuredMesh, order: usize) -> Result<Self> {
        if !(1..=4).contains(&order) {
            return Err(Error::usage(format!("DG order must be in 1..=4, got {order}")));
        }
        let basis = Basis1d::new(order);
        let n1 = order + 1;
        let n_local = n1 * n1;
        let (m1, d1) = (&basis.mass, &basis.deriv);
        let (hx, hy) = (mesh.hx, mesh.hy);
        let idx = |a: usize| (a % n1, a / n1);
        let mass = DenseMatrix::from_fn(n_local, n_local, |a, b| {
            let ((ax, ay), (bx, by)) = (idx(a), idx(b));
            hx * hy * m1[(ax, bx)] * m1[(ay, by)]
        });
        let gx = DenseMatrix::from_fn(n_local, n_local, |a, b| {
            let ((ax, ay), (bx, by)) = (idx(a), idx(b));
            hy * d1[(ax, bx)] * m1[(ay, by)]
        });
        let gy = DenseMatrix::from_fn(n_local, n_local, |a, b| {
            let ((ax, ay), (bx, by)) = (idx(a), idx(b));
            hx * m1[(ax, bx)] * d1[(ay, by)]
        });
        let p = order;
        let face_nodes = [
            (0..n1).map(|t| t * n1).collect(),
            (0..n1).map(|t| t * n1 + p).collect(),
            (0..n1).collect(),
            (0..n1).map(|t| p * n1 + t).collect(),
        ];
        Ok(Self {
            mesh,
            basis,
            n_local,
            mass,
            grad: [gx, gy],
            face_nodes,
        })
    }

    pub fn order(&self) -> usize {
        self.basis.order
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    pub fn n_elements(&self) -> usize {
        self.mesh.n_elements()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_elements() * self.n_local
    }

    pub fn dofs(&self, e: usize) -> std::ops::Range<usize> {
        e * self.n_local..(e + 1) * self.n_local
    }

    /// Element mass matrix (identical on every element).
    pub fn mass(&self) -> &DenseMatrix {
        &self.mass
    }

    /// `G_k[a][b] = int v_a d_k v_b` on one element, `k = 0` for x, `1` for y.
    pub fn grad(&self, k: usize) -> &DenseMatrix {
        &self.grad[k]
    }

    /// Local DOFs on `side`, ordered by the tangential node index.
    pub fn face_nodes(&self, side: Side) -> &[usize] {
        &self.face_nodes[side_index(side)]
    }

    /// Face mass `int l_s l_t` over a face on `side`, in tangential node order.
    pub fn face_mass(&self, side: Side) -> DenseMatrix {
        self.basis.mass.scale(self.mesh.face_length(side))
    }

    /// Values of all local basis functions at reference point `(xi, eta)` in `[0,1]^2`.
    pub fn eval(&self, xi: f64, eta: f64) -> Vec<f64> {
        let vx = self.basis.values(xi);
        let vy = self.basis.values(eta);
        let n1 = self.basis.n();
        (0..self.n_local).map(|a| vx[a % n1] * vy[a / n1]).collect()
    }

    /// Physical gradients of all local basis functions at `(xi, eta)`.
    pub fn eval_grad(&self, xi: f64, eta: f64) -> Vec<[f64; 2]> {
        let (vx, dx) = (self.basis.values(xi), self.basis.derivatives(xi));
        let (vy, dy) = (self.basis.values(eta), self.basis.derivatives(eta));
        let n1 = self.basis.n();
        let (hx, hy) = (self.mesh.hx, self.mesh.hy);
        (0..self.n_local)
            .map(|a| {
                let (ix, iy) = (a % n1, a / n1);
                [dx[ix] * vy[iy] / hx, vx[ix] * dy[iy] / hy]
            })
            .collect()
    }

    /// Reference coordinates of a point at tangential position `t in [0,1]` on `side`.
    pub fn face_point(side: Side, t: f64) -> (f64, f64) {
        match side {
            Side::Left => (0.0, t),
            Side::Right => (1.0, t),
            Side::Bottom => (t, 0.0),
            Side::Top => (t, 1.0),
        }
    }

    /// Interpolate a function at the nodes of every element.
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let n1 = self.basis.n();
        let mut out = vec![0.0; self.n_dofs()];
        for e in 0..self.n_elements() {
            let o = self.mesh.element_origin(e);
            for a in 0..self.n_local {
                let x = o[0] + self.basis.nodes[a % n1] * self.mesh.hx;
                let y = o[1] + self.basis.nodes[a / n1] * self.mesh.hy;
                out[e * self.n_local + a] = f(x, y);
            }
        }
        out
    }

    /// `y = M(c) x` with `c` constant on each element.
    pub fn weighted_mass_apply(&self, coef: &[f64], x: &[f64], y: &mut [f64]) {
        let n = self.n_local;
        for e in 0..self.n_elements() {
            let c = coef[e];
            let xe = &x[e * n..(e + 1) * n];
            let ye = &mut y[e * n..(e + 1) * n];
            if c == 0.0 {
                ye.iter_mut().for_each(|v| *v = 0.0);
                continue;
            }
            for a in 0..n {
                let row = self.mass.row(a);
                ye[a] = c * row.iter().zip(xe).map(|(m, v)| m * v).sum::<f64>();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_integrate(space: &DgSpace, f: impl Fn(&[f64], &[[f64; 2]]) -> f64) -> f64 {
        let b = &space.basis;
        let mut total = 0.0;
        for (&x, &wx) in b.quad_points.iter().zip(&b.quad_weights) {
            for (&y, &wy) in b.quad_points.iter().zip(&b.quad_weights) {
                let v = space.eval(x, y);
                let g = space.eval_grad(x, y);
                total += wx * wy * space.mesh.hx * space.mesh.hy * f(&v, &g);
            }
        }
        total
    }

    #[test]
    fn kronecker_matrices_match_quadrature() {
        let mesh = StructuredMesh::new(1, 1, 0.7, 1.3).unwrap();
        for p in 1..=3 {
            let s = DgSpace::new(mesh.clone(), p).unwrap();
            for a in 0..s.n_local() {
                for b in 0..s.n_local() {
                    let m = quad_integrate(&s, |v, _| v[a] * v[b]);
                    let gx = quad_integrate(&s, |v, g| v[a] * g[b][0]);
                    let gy = quad_integrate(&s, |v, g| v[a] * g[b][1]);
                    assert!((s.mass()[(a, b)] - m).abs() < 1e-14);
                    assert!((s.grad(0)[(a, b)] - gx).abs() < 1e-13);
                    assert!((s.grad(1)[(a, b)] - gy).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn face_nodes_lie_on_faces() {
        let s = DgSpace::new(StructuredMesh::new(1, 1, 1.0, 1.0).unwrap(), 2).unwrap();
        for side in Side::ALL {
            for (t, &a) in s.face_nodes(side).iter().enumerate() {
                let (xi, eta) = DgSpace::face_point(side, s.basis.nodes[t]);
                let v = s.eval(xi, eta);
                assert!((v[a] - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn orders_outside_range_rejected() {
        let m = StructuredMesh::new(1, 1, 1.0, 1.0).unwrap();
        assert!(DgSpace::new(m.clone(), 0).is_err());
        assert!(DgSpace::new(m, 5).is_err());
    }
}
