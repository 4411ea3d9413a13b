use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::CoefficientField;

/// Element-level split into thick (`sigma_s >= eta`) and thin parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThickPartition {
    pub eta: f64,
    pub thick_elements: Vec<usize>,
    pub thin_elements: Vec<usize>,
    /// All DOFs of thick elements, ascending.
    pub thick_dofs: Vec<usize>,
    pub dofs_per_element: usize,
}

impl ThickPartition {
    pub fn n_elements(&self) -> usize {
        self.thick_elements.len() + self.thin_elements.len()
    }

    /// Percentage of elements (and DOFs) that are thick.
    pub fn thick_pct(&self) -> f64 {
        if self.n_elements() == 0 {
            return 0.0;
        }
        100.0 * self.thick_elements.len() as f64 / self.n_elements() as f64
    }

    /// `mask[e]` is true for thick elements.
    pub fn element_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n_elements()];
        for &e in &self.thick_elements {
            m[e] = true;
        }
        m
    }

    /// `mask[i]` is true for DOFs of thick elements.
    pub fn dof_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n_elements() * self.dofs_per_element];
        for &i in &self.thick_dofs {
            m[i] = true;
        }
        m
    }
}

pub fn partition_thick(
    field: &CoefficientField,
    eta: f64,
    dofs_per_element: usize,
) -> Result<ThickPartition> {
    if !(eta >= 0.0) {
        return Err(Error::usage(format!("eta must be nonnegative, got {eta}")));
    }
    let (thick, thin): (Vec<usize>, Vec<usize>) =
        (0..field.len()).partition(|&e| field.sigma_s[e] >= eta);
    let thick_dofs = thick
        .iter()
        .flat_map(|&e| e * dofs_per_element..(e + 1) * dofs_per_element)
        .collect();
    Ok(ThickPartition {
        eta,
        thick_elements: thick,
        thin_elements: thin,
        thick_dofs,
        dofs_per_element,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{five_region_problem, make_crooked_pipe, PipeVariant};
    use proptest::prelude::*;

    #[test]
    fn problem_two_thick_regions() {
        let p = make_crooked_pipe(PipeVariant::FiveRegion, &five_region_problem(2).unwrap(), 1.0)
            .unwrap();
        let part = partition_thick(&p.field, 1.0, 9).unwrap();
        let mut regions: Vec<&str> = part
            .thick_elements
            .iter()
            .map(|&e| p.materials.name(e))
            .collect();
        regions.sort();
        regions.dedup();
        assert_eq!(regions, vec!["block", "edge", "wall"]);
        assert!(part.thin_elements.iter().all(|&e| p.materials.name(e) == "pipe"));
        assert_eq!(part.thick_dofs.len(), 9 * part.thick_elements.len());
    }

    #[test]
    fn degenerate_thresholds() {
        let f = CoefficientField::from_scattering_absorption(vec![0.0, 1.0, 5.0], vec![0.0; 3]).unwrap();
        assert_eq!(partition_thick(&f, 0.0, 1).unwrap().thick_elements, vec![0, 1, 2]);
        let all_thin = partition_thick(&f, f64::INFINITY, 1).unwrap();
        assert!(all_thin.thick_elements.is_empty());
        assert_eq!(all_thin.thick_pct(), 0.0);
        assert!(partition_thick(&f, -1.0, 1).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_eta(
            s in proptest::collection::vec(0.0f64..10.0, 1..40),
            a in 0.0f64..10.0,
            b in 0.0f64..10.0,
        ) {
            let f = CoefficientField::from_scattering_absorption(s.clone(), vec![0.0; s.len()]).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let t_lo = partition_thick(&f, lo, 4).unwrap();
            let t_hi = partition_thick(&f, hi, 4).unwrap();
            prop_assert!(t_hi.thick_elements.iter().all(|e| t_lo.thick_elements.contains(e)));
            prop_assert_eq!(t_lo.n_elements(), s.len());
        }
    }
}
