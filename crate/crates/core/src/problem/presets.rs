use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{
    crooked_pipe_map, BoundarySource, CoefficientField, MaterialMap, Side, StructuredMesh,
};

/// A fully specified transport problem on a structured mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: String,
    pub mesh: StructuredMesh,
    pub materials: MaterialMap,
    pub field: CoefficientField,
    pub source: BoundarySource,
    /// Thick/thin threshold on `sigma_s`.
    pub eta: f64,
}

impl ProblemSpec {
    /// Homogeneous problem on an arbitrary grid with one region.
    pub fn homogeneous(
        mesh: StructuredMesh,
        sigma_s: f64,
        sigma_a: f64,
        psi_inc: f64,
        q: f64,
    ) -> Result<Self> {
        let n = mesh.n_elements();
        Ok(Self {
            name: "homogeneous".into(),
            field: CoefficientField::uniform(n, sigma_s, sigma_a)?,
            source: BoundarySource::uniform(&mesh, psi_inc, q),
            materials: MaterialMap::new(vec![0; n], vec!["medium".into()])?,
            mesh,
            eta: 1.0,
        })
    }

    /// Same problem on the mesh with every cell split into `r x r` cells.
    pub fn refined(&self, r: usize) -> Result<Self> {
        let mesh = self.mesh.refined(r)?;
        let materials = self.materials.refined(&self.mesh, r)?;
        let coarse_of = |e: usize| {
            let (i, j) = mesh.element_ij(e);
            self.mesh.element_id(i / r, j / r)
        };
        let per_elem = |v: &[f64]| (0..mesh.n_elements()).map(|e| v[coarse_of(e)]).collect();
        let per_face = |v: &[f64]| (0..v.len() * r).map(|k| v[k / r]).collect();
        Ok(Self {
            name: self.name.clone(),
            field: CoefficientField {
                sigma_s: per_elem(&self.field.sigma_s),
                sigma_t: per_elem(&self.field.sigma_t),
                sigma_a: per_elem(&self.field.sigma_a),
            },
            source: BoundarySource {
                left: per_face(&self.source.left),
                right: per_face(&self.source.right),
                bottom: per_face(&self.source.bottom),
                top: per_face(&self.source.top),
                q: per_elem(&self.source.q),
            },
            materials,
            mesh,
            eta: self.eta,
        })
    }

    /// Make a region void: `sigma_s = sigma_a = sigma_t = 0` there.
    pub fn with_void_region(mut self, region: &str) -> Result<Self> {
        let id = self
            .materials
            .region_id(region)
            .ok_or_else(|| Error::usage(format!("unknown region {region:?}")))?;
        for e in 0..self.mesh.n_elements() {
            if self.materials.id(e) == id {
                self.field.sigma_s[e] = 0.0;
                self.field.sigma_a[e] = 0.0;
                self.field.sigma_t[e] = 0.0;
            }
        }
        Ok(self)
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipeVariant {
    /// Regions `pipe` and `outside` (every non-pipe cell).
    TwoRegion,
    /// Regions `pipe`, `wall`, `edge` and `block`.
    FiveRegion,
}

impl PipeVariant {
    pub fn region_keys(self) -> &'static [&'static str] {
        match self {
            PipeVariant::TwoRegion => &["pipe", "outside"],
            PipeVariant::FiveRegion => &["pipe", "wall", "edge", "block"],
        }
    }
}

/// Scattering cross sections `[pipe, wall, edge, block]` of the five benchmark problems.
pub const FIVE_REGION_SIGMA_S: [[f64; 4]; 5] = [
    [1e-3, 500.0, 1e-4, 100.0],
    [0.1, 200.0, 200.0, 5.0],
    [1e-4, 10.0, 500.0, 0.1],
    [1e-6, 0.1, 100.0, 1000.0],
    [1e-4, 10.0, 500.0, 100.0],
];

/// Region map for benchmark problem `k` in `1..=5`.
pub fn five_region_problem(k: usize) -> Result<BTreeMap<String, f64>> {
    let row = FIVE_REGION_SIGMA_S
        .get(k.wrapping_sub(1))
        .ok_or_else(|| Error::usage(format!("five-region problem must be 1..=5, got {k}")))?;
    Ok(PipeVariant::FiveRegion
        .region_keys()
        .iter()
        .zip(row)
        .map(|(k, &v)| (k.to_string(), v))
        .collect())
}

/// Two-region map with the given pipe and complement values.
pub fn two_region_sigma(pipe: f64, outside: f64) -> BTreeMap<String, f64> {
    BTreeMap::from([("pipe".to_string(), pipe), ("outside".to_string(), outside)])
}

pub const DEFAULT_AMBIENT_FLUX: f64 = 1.0;
pub const DEFAULT_INLET_FLUX: f64 = 1e4;

/// Crooked-pipe problem on the bundled base mesh.
///
/// `cdt = f64::INFINITY` means no absorption. The exterior boundary carries
/// an isotropic incident flux of 1; the pipe inlet faces on the left boundary
/// carry 1e4. There is no volumetric source.
pub fn make_crooked_pipe(
    variant: PipeVariant,
    sigma_by_region: &BTreeMap<String, f64>,
    cdt: f64,
) -> Result<ProblemSpec> {
    let keys = variant.region_keys();
    for k in sigma_by_region.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(Error::usage(format!(
                "region {k:?} is not part of the {variant:?} crooked pipe (expected {keys:?})"
            )));
        }
    }
    let mut by_key = Vec::with_capacity(keys.len());
    for k in keys {
        let v = *sigma_by_region
            .get(*k)
            .ok_or_else(|| Error::usage(format!("missing sigma_s for region {k:?}")))?;
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::usage(format!("sigma_s for {k:?} must be nonnegative, got {v}")));
        }
        by_key.push(v);
    }
    if !(cdt > 0.0) {
        return Err(Error::usage(format!("cdt must be positive or infinite, got {cdt}")));
    }
    let sigma_a = 1.0 / cdt;

    let (mesh, materials) = crooked_pipe_map();
    let region_sigma = |name: &str| -> f64 {
        match variant {
            PipeVariant::TwoRegion => by_key[usize::from(name != "pipe")],
            PipeVariant::FiveRegion => by_key[keys.iter().position(|k| *k == name).unwrap()],
        }
    };
    let sigma_s: Vec<f64> = (0..mesh.n_elements())
        .map(|e| region_sigma(materials.name(e)))
        .collect();
    let field = CoefficientField::from_scattering_absorption(sigma_s, vec![sigma_a; mesh.n_elements()])?;

    let mut source = BoundarySource::uniform(&mesh, DEFAULT_AMBIENT_FLUX, 0.0);
    let pipe = materials.region_id("pipe").expect("bundled map has a pipe");
    for j in 0..mesh.ny {
        if materials.id(mesh.element_id(0, j)) == pipe {
            source.incident_mut(Side::Left)[j] = DEFAULT_INLET_FLUX;
        }
    }
    Ok(ProblemSpec {
        name: format!("crooked-pipe-{}", serde_json::to_value(variant)?.as_str().unwrap()),
        mesh,
        materials,
        field,
        source,
        eta: 1.0,
    })
}

/// JSON description of a crooked-pipe problem and its discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub variant: PipeVariant,
    /// Five-region benchmark number; fills `sigma_s` when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<usize>,
    #[serde(default)]
    pub sigma_s: BTreeMap<String, f64>,
    #[serde(with = "cdt_serde", default = "no_absorption")]
    pub cdt: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_sn_order")]
    pub sn_order: usize,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_refinement")]
    pub refinement: usize,
    /// Regions forced to `sigma_t = 0`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub void_regions: Vec<String>,
}

fn no_absorption() -> f64 {
    f64::INFINITY
}
fn default_eta() -> f64 {
    1.0
}
fn default_sn_order() -> usize {
    8
}
fn default_order() -> usize {
    2
}
fn default_refinement() -> usize {
    1
}

impl ProblemConfig {
    pub fn build(&self) -> Result<ProblemSpec> {
        let sigma = match (self.problem, self.variant) {
            (Some(k), PipeVariant::FiveRegion) => {
                if !self.sigma_s.is_empty() {
                    return Err(Error::Config {
                        path: "sigma_s".into(),
                        message: "give either `problem` or `sigma_s`, not both".into(),
                    });
                }
                five_region_problem(k)?
            }
            (Some(_), PipeVariant::TwoRegion) => {
                return Err(Error::Config {
                    path: "problem".into(),
                    message: "numbered problems exist only for the five-region variant".into(),
                })
            }
            (None, _) => self.sigma_s.clone(),
        };
        if self.refinement == 0 {
            return Err(Error::Config {
                path: "refinement".into(),
                message: "must be at least 1".into(),
            });
        }
        if !(self.eta >= 0.0) {
            return Err(Error::Config {
                path: "eta".into(),
                message: "must be nonnegative".into(),
            });
        }
        let mut spec = make_crooked_pipe(self.variant, &sigma, self.cdt)?;
        for r in &self.void_regions {
            spec = spec.with_void_region(r)?;
        }
        if self.refinement > 1 {
            spec = spec.refined(self.refinement)?;
        }
        Ok(spec.with_eta(self.eta))
    }
}

/// `cdt` as a JSON number, or `null` / `"inf"` / `"none"` for no absorption.
pub mod cdt_serde {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str("inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
        Null(()),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Option::<Raw>::deserialize(d)? {
            Some(Raw::Num(v)) => Ok(v),
            None | Some(Raw::Null(())) => Ok(f64::INFINITY),
            Some(Raw::Text(t)) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "none" | "no-absorption" => Ok(f64::INFINITY),
                other => other
                    .parse()
                    .map_err(|_| de::Error::custom(format!("invalid cdt {t:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_region_total_outside_pipe() {
        let p = make_crooked_pipe(PipeVariant::TwoRegion, &two_region_sigma(0.2, 200.0), 1000.0)
            .unwrap();
        let pipe = p.materials.region_id("pipe").unwrap();
        for e in 0..p.mesh.n_elements() {
            if p.materials.id(e) != pipe {
                assert!((p.field.sigma_t[e] - 200.001).abs() < 1e-12);
            } else {
                assert!((p.field.sigma_t[e] - 0.201).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn problem_one_coefficients() {
        let p = make_crooked_pipe(PipeVariant::FiveRegion, &five_region_problem(1).unwrap(), 1.0)
            .unwrap();
        for (name, want) in [("pipe", 1e-3), ("wall", 500.0), ("edge", 1e-4), ("block", 100.0)] {
            let id = p.materials.region_id(name).unwrap();
            let e = (0..p.mesh.n_elements()).find(|&e| p.materials.id(e) == id).unwrap();
            assert_eq!(p.field.sigma_s[e], want);
        }
    }

    #[test]
    fn no_absorption_gives_total_equal_scattering() {
        let p = make_crooked_pipe(
            PipeVariant::FiveRegion,
            &five_region_problem(3).unwrap(),
            f64::INFINITY,
        )
        .unwrap();
        assert_eq!(p.field.sigma_t, p.field.sigma_s);
    }

    #[test]
    fn all_presets_satisfy_invariants() {
        for k in 1..=5 {
            for cdt in [1.0, 1e3, 1e8, f64::INFINITY] {
                let p = make_crooked_pipe(PipeVariant::FiveRegion, &five_region_problem(k).unwrap(), cdt)
                    .unwrap();
                p.field.check_invariants().unwrap();
            }
        }
    }

    #[test]
    fn equal_regions_are_homogeneous() {
        let sigma = five_region_problem(1)
            .unwrap()
            .into_keys()
            .map(|k| (k, 7.0))
            .collect();
        let p = make_crooked_pipe(PipeVariant::FiveRegion, &sigma, 10.0).unwrap();
        assert!(p.field.sigma_t.iter().all(|&t| t == p.field.sigma_t[0]));
    }

    #[test]
    fn negative_or_missing_coefficients_rejected() {
        assert!(make_crooked_pipe(PipeVariant::TwoRegion, &two_region_sigma(-1.0, 1.0), 1.0).is_err());
        let mut m = two_region_sigma(1.0, 1.0);
        m.remove("outside");
        assert!(make_crooked_pipe(PipeVariant::TwoRegion, &m, 1.0).is_err());
        assert!(make_crooked_pipe(PipeVariant::TwoRegion, &two_region_sigma(1.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn inlet_is_on_left_pipe_faces() {
        let p = make_crooked_pipe(PipeVariant::TwoRegion, &two_region_sigma(0.1, 1.0), 1.0).unwrap();
        let hot: Vec<usize> = (0..p.mesh.ny).filter(|&j| p.source.left[j] == 1e4).collect();
        assert_eq!(hot, vec![7, 8, 9]);
        assert!(p.source.right.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn refinement_replicates_sources() {
        let p = make_crooked_pipe(PipeVariant::TwoRegion, &two_region_sigma(0.1, 1.0), 1.0).unwrap();
        let f = p.refined(2).unwrap();
        assert_eq!(f.source.left.iter().filter(|&&v| v == 1e4).count(), 6);
        assert_eq!(f.mesh.n_elements(), 4 * p.mesh.n_elements());
        f.field.check_invariants().unwrap();
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{"variant": "five-region", "problem": 5, "cdt": null, "order": 2}"#;
        let cfg: ProblemConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.cdt, f64::INFINITY);
        let back: ProblemConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let spec = cfg.build().unwrap();
        assert_eq!(spec.field.sigma_t, spec.field.sigma_s);

        let cfg: ProblemConfig =
            serde_json::from_str(r#"{"variant": "two-region", "sigma_s": {"pipe": 0.2, "outside": 200}, "cdt": 1000}"#)
                .unwrap();
        assert_eq!(cfg.cdt, 1000.0);
        assert!(serde_json::from_str::<ProblemConfig>(r#"{"variant": "two-region", "bogus": 1}"#).is_err());
    }

    #[test]
    fn void_region_zeroes_total() {
        let p = make_crooked_pipe(PipeVariant::TwoRegion, &two_region_sigma(0.0, 200.0), 1000.0)
            .unwrap()
            .with_void_region("pipe")
            .unwrap();
        let pipe = p.materials.region_id("pipe").unwrap();
        for e in 0..p.mesh.n_elements() {
            assert_eq!(p.field.sigma_t[e] == 0.0, p.materials.id(e) == pipe);
        }
    }
}
