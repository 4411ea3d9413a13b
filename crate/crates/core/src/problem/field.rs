use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Side, StructuredMesh};

/// Per-element cross sections with `sigma_t = sigma_s + sigma_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub sigma_s: Vec<f64>,
    pub sigma_t: Vec<f64>,
    pub sigma_a: Vec<f64>,
}

impl CoefficientField {
    pub fn from_scattering_absorption(sigma_s: Vec<f64>, sigma_a: Vec<f64>) -> Result<Self> {
        if sigma_s.len() != sigma_a.len() {
            return Err(Error::dim("sigma_s and sigma_a lengths differ"));
        }
        for (e, (&s, &a)) in sigma_s.iter().zip(&sigma_a).enumerate() {
            if !(s >= 0.0 && a >= 0.0) || !s.is_finite() || !a.is_finite() {
                return Err(Error::usage(format!(
                    "element {e}: coefficients must be finite and nonnegative (sigma_s={s}, sigma_a={a})"
                )));
            }
        }
        let sigma_t = sigma_s.iter().zip(&sigma_a).map(|(s, a)| s + a).collect();
        Ok(Self {
            sigma_s,
            sigma_t,
            sigma_a,
        })
    }

    pub fn uniform(n: usize, sigma_s: f64, sigma_a: f64) -> Result<Self> {
        Self::from_scattering_absorption(vec![sigma_s; n], vec![sigma_a; n])
    }

    pub fn len(&self) -> usize {
        self.sigma_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_t.is_empty()
    }

    pub fn check_invariants(&self) -> Result<()> {
        for e in 0..self.len() {
            let (s, t, a) = (self.sigma_s[e], self.sigma_t[e], self.sigma_a[e]);
            if (t - (s + a)).abs() > 1e-12 * t.max(1.0) || s < 0.0 || a < 0.0 || s > t {
                return Err(Error::usage(format!(
                    "element {e}: inconsistent coefficients s={s} t={t} a={a}"
                )));
            }
        }
        Ok(())
    }
}

/// Isotropic incident flux on each boundary face and an isotropic volumetric source.
///
/// Face values are indexed by position along the side: `j` for left and right,
/// `i` for bottom and top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySource {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
    /// Volumetric source per element, constant over the element.
    pub q: Vec<f64>,
}

impl BoundarySource {
    pub fn uniform(mesh: &StructuredMesh, psi_inc: f64, q: f64) -> Self {
        Self {
            left: vec![psi_inc; mesh.ny],
            right: vec![psi_inc; mesh.ny],
            bottom: vec![psi_inc; mesh.nx],
            top: vec![psi_inc; mesh.nx],
            q: vec![q; mesh.n_elements()],
        }
    }

    pub fn zero(mesh: &StructuredMesh) -> Self {
        Self::uniform(mesh, 0.0, 0.0)
    }

    pub fn incident(&self, side: Side, index: usize) -> f64 {
        match side {
            Side::Left => self.left[index],
            Side::Right => self.right[index],
            Side::Bottom => self.bottom[index],
            Side::Top => self.top[index],
        }
    }

    pub fn incident_mut(&mut self, side: Side) -> &mut Vec<f64> {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
            Side::Bottom => &mut self.bottom,
            Side::Top => &mut self.top,
        }
    }

    pub fn check(&self, mesh: &StructuredMesh) -> Result<()> {
        if self.left.len() != mesh.ny
            || self.right.len() != mesh.ny
            || self.bottom.len() != mesh.nx
            || self.top.len() != mesh.nx
            || self.q.len() != mesh.n_elements()
        {
            return Err(Error::dim("boundary source does not match the mesh"));
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let s = |v: &Vec<f64>| v.iter().map(|x| alpha * x).collect();
        Self {
            left: s(&self.left),
            right: s(&self.right),
            bottom: s(&self.bottom),
            top: s(&self.top),
            q: s(&self.q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_is_sum() {
        let f = CoefficientField::from_scattering_absorption(vec![1.0, 0.0], vec![0.5, 0.0]).unwrap();
        assert_eq!(f.sigma_t, vec![1.5, 0.0]);
        f.check_invariants().unwrap();
    }

    #[test]
    fn negative_coefficients_rejected() {
        assert!(CoefficientField::from_scattering_absorption(vec![-1.0], vec![0.0]).is_err());
        assert!(CoefficientField::from_scattering_absorption(vec![1.0], vec![f64::NAN]).is_err());
    }
}
