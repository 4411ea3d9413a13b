use crate::quadrature::{gauss_legendre, gauss_lobatto};
use crate::sparse::DenseMatrix;

/// Nodal Lagrange basis on Gauss-Lobatto points of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis1d {
    pub order: usize,
    pub nodes: Vec<f64>,
    /// Gauss-Legendre rule with `order + 2` points on `[0, 1]`.
    pub quad_points: Vec<f64>,
    pub quad_weights: Vec<f64>,
    /// `mass[i][j] = int l_i l_j`.
    pub mass: DenseMatrix,
    /// `deriv[i][j] = int l_i l_j'`.
    pub deriv: DenseMatrix,
}

impl Basis1d {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let nodes: Vec<f64> = gauss_lobatto(order + 1)
            .into_iter()
            .map(|x| 0.5 * (x + 1.0))
            .collect();
        let (x, w) = gauss_legendre(order + 2);
        let quad_points: Vec<f64> = x.iter().map(|x| 0.5 * (x + 1.0)).collect();
        let quad_weights: Vec<f64> = w.iter().map(|w| 0.5 * w).collect();
        let n = order + 1;
        let mut mass = DenseMatrix::zeros(n, n);
        let mut deriv = DenseMatrix::zeros(n, n);
        let mut basis = Self {
            order,
            nodes,
            quad_points,
            quad_weights,
            mass: DenseMatrix::zeros(0, 0),
            deriv: DenseMatrix::zeros(0, 0),
        };
        for (&xq, &wq) in basis.quad_points.iter().zip(&basis.quad_weights) {
            let v = basis.values(xq);
            let d = basis.derivatives(xq);
            for i in 0..n {
                for j in 0..n {
                    mass[(i, j)] += wq * v[i] * v[j];
                    deriv[(i, j)] += wq * v[i] * d[j];
                }
            }
        }
        basis.mass = mass;
        basis.deriv = deriv;
        basis
    }

    pub fn n(&self) -> usize {
        self.order + 1
    }

    pub fn values(&self, x: f64) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&m| m != i)
                    .map(|m| (x - self.nodes[m]) / (self.nodes[i] - self.nodes[m]))
                    .product()
            })
            .collect()
    }

    pub fn derivatives(&self, x: f64) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut total = 0.0;
                for k in (0..n).filter(|&k| k != i) {
                    let mut term = 1.0 / (self.nodes[i] - self.nodes[k]);
                    for m in (0..n).filter(|&m| m != i && m != k) {
                        term *= (x - self.nodes[m]) / (self.nodes[i] - self.nodes[m]);
                    }
                    total += term;
                }
                total
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_reference_matrices() {
        let b = Basis1d::new(1);
        let m = [[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]];
        let d = [[-0.5, 0.5], [-0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((b.mass[(i, j)] - m[i][j]).abs() < 1e-15);
                assert!((b.deriv[(i, j)] - d[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn partition_of_unity_and_nodal_property() {
        for p in 1..=4 {
            let b = Basis1d::new(p);
            for (k, &x) in b.nodes.iter().enumerate() {
                let v = b.values(x);
                for (i, vi) in v.iter().enumerate() {
                    assert!((vi - if i == k { 1.0 } else { 0.0 }).abs() < 1e-13);
                }
            }
            let x = 0.3217;
            assert!((b.values(x).iter().sum::<f64>() - 1.0).abs() < 1e-13);
            assert!(b.derivatives(x).iter().sum::<f64>().abs() < 1e-11);
            // Column sums of the derivative matrix equal l_j(1) - l_j(0).
            let total: f64 = b.mass.values().iter().sum();
            assert!((total - 1.0).abs() < 1e-14);
            for j in 0..b.n() {
                let col: f64 = (0..b.n()).map(|i| b.deriv[(i, j)]).sum();
                let want = if j == b.n() - 1 { 1.0 } else if j == 0 { -1.0 } else { 0.0 };
                assert!((col - want).abs() < 1e-12);
            }
        }
    }
}
