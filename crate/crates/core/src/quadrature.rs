//! S_N ordinate sets and the 1D Gauss rules used throughout.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::DenseMatrix;

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Lobatto-Legendre nodes (ascending) on `[-1, 1]`, `n >= 2` points.
pub fn gauss_lobatto(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let p = n - 1;
    let mut nodes = vec![0.0; n];
    nodes[0] = -1.0;
    nodes[p] = 1.0;
    // Interior nodes are the roots of P'_p; Newton on P'_p with the
    // Legendre ODE for P''_p.
    for i in 1..p {
        let mut x = -(PI * i as f64 / p as f64).cos();
        for _ in 0..100 {
            let (pp, dp) = legendre(p, x);
            let d2p = (2.0 * x * dp - (p * (p + 1)) as f64 * pp) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
    }
    nodes
}

/// Discrete-ordinates quadrature: unit directions and positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularQuadrature {
    order: usize,
    directions: Vec<[f64; 3]>,
    weights: Vec<f64>,
    /// Each stored direction stands for the pair `(x, y, +z)` and `(x, y, -z)`
    /// with half the stored weight each. Set for 2D product sets.
    mirrored: bool,
}

impl AngularQuadrature {
    /// Triangular Gauss-Legendre/Chebyshev product set of even order `n`,
    /// reduced to the upper hemisphere with doubled weights.
    ///
    /// Polar level `i` (counted from the pole) carries `4 i` equally spaced
    /// azimuths offset by half a spacing, so no direction lies on an axis.
    /// The set has `n (n + 2) / 2` directions.
    pub fn build(n: usize) -> Result<Self> {
        if n < 2 || n > 24 || n % 2 != 0 {
            return Err(Error::usage(format!(
                "S_N order must be even and in 2..=24, got {n}"
            )));
        }
        let (mu, w) = gauss_legendre(n);
        let half = n / 2;
        let mut directions = Vec::with_capacity(n * (n + 2) / 2);
        let mut weights = Vec::with_capacity(n * (n + 2) / 2);
        // Positive polar cosines, largest (closest to the pole) first.
        for level in 1..=half {
            let idx = n - level;
            let (mu_l, w_l) = (mu[idx], w[idx]);
            let sin_t = (1.0 - mu_l * mu_l).sqrt();
            let count = 4 * level;
            let dphi = 2.0 * PI / count as f64;
            for k in 0..count {
                let phi = (k as f64 + 0.5) * dphi;
                directions.push([sin_t * phi.cos(), sin_t * phi.sin(), mu_l]);
                weights.push(2.0 * w_l * dphi);
            }
        }
        Ok(Self {
            order: n,
            directions,
            weights,
            mirrored: true,
        })
    }

    /// Arbitrary direction set, summed as given (no hemisphere mirroring).
    pub fn from_parts(directions: Vec<[f64; 3]>, weights: Vec<f64>) -> Result<Self> {
        if directions.len() != weights.len() || directions.is_empty() {
            return Err(Error::usage("directions and weights must be nonempty and equally long"));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::usage("weights must be positive"));
        }
        Ok(Self {
            order: 0,
            directions,
            weights,
            mirrored: false,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn directions(&self) -> &[[f64; 3]] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn direction(&self, d: usize) -> [f64; 3] {
        self.directions[d]
    }

    pub fn weight(&self, d: usize) -> f64 {
        self.weights[d]
    }

    /// Sum of weights; `4 pi` for every built set.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Visit every represented direction with its weight, expanding mirrored pairs.
    fn for_each_point(&self, mut f: impl FnMut([f64; 3], f64)) {
        for (o, &w) in self.directions.iter().zip(&self.weights) {
            if self.mirrored {
                f(*o, 0.5 * w);
                f([o[0], o[1], -o[2]], 0.5 * w);
            } else {
                f(*o, w);
            }
        }
    }

    /// `sum_d w_d Omega_d`.
    pub fn first_moment(&self) -> [f64; 3] {
        let mut m = [0.0; 3];
        self.for_each_point(|o, w| {
            for k in 0..3 {
                m[k] += w * o[k];
            }
        });
        m
    }
}

/// `(1 / 4 pi) sum_d w_d Omega_d Omega_d^T`.
pub fn eddington_tensor(q: &AngularQuadrature) -> DenseMatrix {
    let mut t = DenseMatrix::zeros(3, 3);
    q.for_each_point(|o, w| {
        for i in 0..3 {
            for j in 0..3 {
                t[(i, j)] += w * o[i] * o[j];
            }
        }
    });
    t.scale(1.0 / (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_degree_2n_minus_1() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                assert!((got - exact).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn gauss_lobatto_low_orders() {
        let x = gauss_lobatto(3);
        assert_eq!(x, vec![-1.0, 0.0, 1.0]);
        let x = gauss_lobatto(4);
        assert!((x[2] - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        let x = gauss_lobatto(5);
        assert!((x[3] - (3.0f64 / 7.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn s8_has_forty_directions() {
        assert_eq!(AngularQuadrature::build(8).unwrap().len(), 40);
    }

    #[test]
    fn s2_has_four_equal_weights() {
        let q = AngularQuadrature::build(2).unwrap();
        assert_eq!(q.len(), 4);
        for w in q.weights() {
            assert!((w - q.weights()[0]).abs() < 1e-15);
        }
        assert!((q.total_weight() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn s12_second_moment() {
        let q = AngularQuadrature::build(12).unwrap();
        assert_eq!(q.len(), 84);
        let t = eddington_tensor(&q);
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((t[(i, j)] - target).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn s8_off_diagonals_vanish() {
        let t = eddington_tensor(&AngularQuadrature::build(8).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(t[(i, j)].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_direction_gives_rank_one_tensor() {
        let o = [0.6, 0.0, 0.8];
        let q = AngularQuadrature::from_parts(vec![o], vec![4.0 * PI]).unwrap();
        let t = eddington_tensor(&q);
        for i in 0..3 {
            for j in 0..3 {
                assert!((t[(i, j)] - o[i] * o[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn all_supported_orders_satisfy_moment_conditions() {
        for n in (2..=24).step_by(2) {
            let q = AngularQuadrature::build(n).unwrap();
            assert_eq!(q.len(), n * (n + 2) / 2);
            assert!((q.total_weight() - 4.0 * PI).abs() < 1e-12);
            for m in q.first_moment() {
                assert!(m.abs() < 1e-12);
            }
            let t = eddington_tensor(&q);
            for i in 0..3 {
                assert!((t[(i, i)] - 1.0 / 3.0).abs() < 1e-10, "n={n}");
            }
            for o in q.directions() {
                let norm = (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]).sqrt();
                assert!((norm - 1.0).abs() < 1e-14);
                assert!(o[0] != 0.0 && o[1] != 0.0);
            }
        }
    }

    #[test]
    fn rejects_odd_or_out_of_range_orders() {
        for n in [0, 3, 7, 26] {
            assert!(AngularQuadrature::build(n).is_err());
        }
    }
}
