use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dg::DsaKind;
use crate::error::{Error, Result};
use crate::problem::ProblemConfig;
use crate::solver::{InnerSolver, PreconditionerSpec, Variant};
use crate::sparse::KrylovConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Two-region pipe, outer iterations against `sigma_pipe`.
    PipeSweep,
    /// Numbered five-region problems across `cdt` and order.
    FiveRegion,
    /// Inner AMG solvability under mesh refinement.
    AmgStudy,
    /// Two-region pipe with a void pipe.
    VoidDemo,
    /// Explicit list of problem configs.
    Custom,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::PipeSweep,
        Experiment::FiveRegion,
        Experiment::AmgStudy,
        Experiment::VoidDemo,
        Experiment::Custom,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Experiment::PipeSweep => "pipe-sweep",
            Experiment::FiveRegion => "five-region",
            Experiment::AmgStudy => "amg-study",
            Experiment::VoidDemo => "void-demo",
            Experiment::Custom => "custom",
        }
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.label() == s)
            .ok_or_else(|| Error::usage(format!("unknown experiment {s:?}")))
    }
}

/// A list of `cdt` values, each a number or `"inf"` / `null`.
mod cdt_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Cdt(#[serde(with = "crate::problem::cdt_serde")] f64);

    pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|&c| Cdt(c)).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        Ok(Option::<Vec<Cdt>>::deserialize(d)?.map(|v| v.into_iter().map(|c| c.0).collect()))
    }
}

/// Benchmark configuration. Absent lists take experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_pipe: Option<Vec<f64>>,
    pub sigma_outside: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problems: Option<Vec<usize>>,
    #[serde(with = "cdt_list", skip_serializing_if = "Option::is_none")]
    pub cdt: Option<Vec<f64>>,
    pub eta: f64,
    pub sn_order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinements: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preconditioners: Option<Vec<PreconditionerSpec>>,
    pub outer: KrylovConfig,
    /// Problems for the `custom` experiment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom: Option<Vec<ProblemConfig>>,
    /// Outer tolerance `1e-12` with restart 30, whatever `outer` says.
    pub strict_paper: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            sigma_pipe: None,
            sigma_outside: 200.0,
            problems: None,
            cdt: None,
            eta: 1.0,
            sn_order: 8,
            orders: None,
            refinements: None,
            preconditioners: None,
            outer: KrylovConfig {
                restart: 30,
                max_iters: 500,
                rel_tol: 1e-8,
                abs_tol: 0.0,
                flexible: true,
            },
            custom: None,
            strict_paper: false,
        }
    }
}

fn field_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn pc(variant: Variant, kind: DsaKind, inner: InnerSolver) -> PreconditionerSpec {
    PreconditionerSpec::new(variant, kind, 1.0, inner)
}

/// Read any JSON config file, reporting the field path of a type error.
pub fn load_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_json(&text)
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        field_err(path, e.into_inner().to_string())
    })
}

impl BenchConfig {
    pub fn for_experiment(experiment: Experiment) -> Self {
        Self {
            experiment: Some(experiment),
            ..Self::default()
        }
    }

    /// Parse JSON, reporting the field path of any type error.
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        load_json(path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn experiment(&self) -> Result<Experiment> {
        self.experiment
            .ok_or_else(|| field_err("experiment", "missing; pass it on the command line or in the config"))
    }

    /// Fill every absent list with the experiment's defaults and apply `strict_paper`.
    pub fn resolved(&self) -> Result<Self> {
        let exp = self.experiment()?;
        let mut c = self.clone();
        use Experiment::*;
        use InnerSolver::*;
        use Variant::{FullDsa, HetDsaDiag, HetDsaTri};
        let pipe_default = match exp {
            PipeSweep => Some(vec![1e-6, 1e-4, 1e-2, 0.1, 1.0, 10.0, 100.0]),
            AmgStudy => Some(vec![1e-3]),
            VoidDemo => Some(vec![0.0]),
            FiveRegion | Custom => None,
        };
        if c.sigma_pipe.is_none() {
            c.sigma_pipe = pipe_default;
        }
        if c.problems.is_none() && exp == FiveRegion {
            c.problems = Some(vec![1, 2, 3, 4, 5]);
        }
        c.cdt.get_or_insert_with(|| match exp {
            FiveRegion => vec![1.0, 1e3],
            _ => vec![1e3],
        });
        c.orders.get_or_insert_with(|| vec![2]);
        c.refinements.get_or_insert_with(|| match exp {
            AmgStudy => vec![1, 2, 4],
            _ => vec![1],
        });
        if c.preconditioners.is_none() {
            let mut list = match exp {
                PipeSweep | FiveRegion | VoidDemo => vec![
                    pc(FullDsa, DsaKind::Nip, Direct),
                    pc(FullDsa, DsaKind::Mnip, Direct),
                    pc(HetDsaDiag, DsaKind::Nip, Direct),
                    pc(HetDsaTri, DsaKind::Nip, Direct),
                ],
                AmgStudy => vec![
                    pc(FullDsa, DsaKind::Nip, AmgFgmres),
                    pc(FullDsa, DsaKind::Mnip, AmgFgmres),
                    pc(HetDsaDiag, DsaKind::Nip, AmgFgmres),
                ],
                Custom => vec![pc(HetDsaDiag, DsaKind::Nip, Direct)],
            };
            for p in &mut list {
                p.eta = c.eta;
            }
            c.preconditioners = Some(list);
        }
        if c.strict_paper {
            c.outer.rel_tol = 1e-12;
            c.outer.restart = 30;
        }
        c.validate()?;
        Ok(c)
    }

    /// Check a resolved config; every list the experiment uses must be present and nonempty.
    pub fn validate(&self) -> Result<()> {
        let exp = self.experiment()?;
        fn list<'a, T>(name: &str, v: &'a Option<Vec<T>>) -> Result<&'a [T]> {
            match v {
                Some(v) if !v.is_empty() => Ok(v),
                _ => Err(field_err(name, "must be a nonempty list")),
            }
        }
        match exp {
            Experiment::PipeSweep | Experiment::AmgStudy | Experiment::VoidDemo => {
                for (i, &s) in list("sigma_pipe", &self.sigma_pipe)?.iter().enumerate() {
                    if !(s >= 0.0 && s.is_finite()) {
                        return Err(field_err(format!("sigma_pipe[{i}]"), "must be finite and nonnegative"));
                    }
                }
            }
            Experiment::FiveRegion => {
                for (i, &k) in list("problems", &self.problems)?.iter().enumerate() {
                    if !(1..=5).contains(&k) {
                        return Err(field_err(format!("problems[{i}]"), "five-region problems are numbered 1 to 5"));
                    }
                }
            }
            Experiment::Custom => {
                for (i, c) in list("custom", &self.custom)?.iter().enumerate() {
                    if c.refinement == 0 {
                        return Err(field_err(format!("custom[{i}].refinement"), "must be at least 1"));
                    }
                }
            }
        }
        if exp != Experiment::Custom {
            for (i, &c) in list("cdt", &self.cdt)?.iter().enumerate() {
                if !(c > 0.0) {
                    return Err(field_err(format!("cdt[{i}]"), "must be positive or \"inf\""));
                }
            }
            for (i, &p) in list("orders", &self.orders)?.iter().enumerate() {
                if !(1..=4).contains(&p) {
                    return Err(field_err(format!("orders[{i}]"), "DG order must be 1 to 4"));
                }
            }
            for (i, &r) in list("refinements", &self.refinements)?.iter().enumerate() {
                if r == 0 {
                    return Err(field_err(format!("refinements[{i}]"), "must be at least 1"));
                }
            }
        }
        if !(self.sigma_outside >= 0.0 && self.sigma_outside.is_finite()) {
            return Err(field_err("sigma_outside", "must be finite and nonnegative"));
        }
        if self.sn_order < 2 || self.sn_order % 2 != 0 {
            return Err(field_err("sn_order", "must be even and at least 2"));
        }
        if !(self.eta >= 0.0) {
            return Err(field_err("eta", "must be nonnegative"));
        }
        for (i, p) in list("preconditioners", &self.preconditioners)?.iter().enumerate() {
            p.validate()
                .map_err(|e| field_err(format!("preconditioners[{i}]"), e.to_string()))?;
        }
        self.outer
            .validate()
            .map_err(|e| field_err("outer", e.to_string()))?;
        Ok(())
    }
}
