//! Outer Krylov iteration on the scalar flux with DSA-type preconditioners.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::amg::{amg_setup, AmgConfig, AmgHierarchy};
use crate::dg::{assemble_dsa, DsaKind, DsaMatrix, DsaScope, TransportSystem};
use crate::error::{Error, Result};
use crate::problem::{partition_thick, ThickPartition};
use crate::sparse::{gmres, CsrMatrix, FnOperator, KrylovConfig, LuFactors, Preconditioner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    None,
    FullDsa,
    HetDsaDiag,
    HetDsaTri,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::None => "none",
            Variant::FullDsa => "full-dsa",
            Variant::HetDsaDiag => "het-dsa-diag",
            Variant::HetDsaTri => "het-dsa-tri",
        }
    }

    pub fn is_het(self) -> bool {
        matches!(self, Variant::HetDsaDiag | Variant::HetDsaTri)
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerSolver {
    Direct,
    AmgFgmres,
}

/// Coefficient of the mass matrix in `I + D^{-1} Sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassWeight {
    SigmaT,
    SigmaS,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreconditionerSpec {
    pub variant: Variant,
    pub dsa_kind: DsaKind,
    /// Thick threshold; elements with `sigma_s >= eta` are thick. Ignored unless het.
    pub eta: f64,
    pub inner: InnerSolver,
    pub inner_tol: f64,
    pub inner_max_amg: usize,
    pub mass_weight: MassWeight,
    pub amg: AmgConfig,
}

impl Default for PreconditionerSpec {
    fn default() -> Self {
        Self {
            variant: Variant::FullDsa,
            dsa_kind: DsaKind::Nip,
            eta: 1.0,
            inner: InnerSolver::Direct,
            inner_tol: 1e-4,
            inner_max_amg: 250,
            mass_weight: MassWeight::SigmaT,
            amg: AmgConfig::dg_diffusion(),
        }
    }
}

impl PreconditionerSpec {
    pub fn new(variant: Variant, dsa_kind: DsaKind, eta: f64, inner: InnerSolver) -> Self {
        Self {
            variant,
            dsa_kind,
            eta,
            inner,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variant.is_het() && !(self.eta >= 0.0) {
            return Err(Error::usage(format!("eta must be nonnegative, got {}", self.eta)));
        }
        if !(self.inner_tol > 0.0 && self.inner_tol < 1.0) {
            return Err(Error::usage("inner_tol must lie in (0, 1)"));
        }
        if self.inner_max_amg == 0 {
            return Err(Error::usage("inner_max_amg must be at least 1"));
        }
        self.amg.validate()
    }
}

#[derive(Debug, Clone)]
enum InnerFactor {
    Direct(LuFactors),
    Amg(Box<AmgHierarchy>),
}

/// Statistics accumulated over preconditioner applications.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ApplyStats {
    pub applications: usize,
    /// AMG-FGMRES iterations of each inner solve.
    pub inner_iterations: Vec<usize>,
    pub inner_failures: usize,
    /// Full transport updates spent inside the preconditioner.
    pub extra_transport_updates: usize,
}

/// A built preconditioner for the scalar-flux system of one transport system.
pub struct DsaPreconditioner<'a> {
    sys: &'a TransportSystem,
    spec: PreconditionerSpec,
    partition: ThickPartition,
    dsa: Option<DsaMatrix>,
    inner: Option<InnerFactor>,
    /// Block-diagonal `Sigma` on the DSA DOFs.
    mass: Option<CsrMatrix>,
    pub stats: ApplyStats,
}

pub fn build_preconditioner<'a>(
    sys: &'a TransportSystem,
    spec: &PreconditionerSpec,
) -> Result<DsaPreconditioner<'a>> {
    spec.validate()?;
    let nl = sys.space.n_local();
    let eta = match spec.variant {
        Variant::HetDsaDiag | Variant::HetDsaTri => spec.eta,
        _ => 0.0,
    };
    let partition = partition_thick(&sys.field, eta, nl)?;
    let scope = if spec.variant.is_het() {
        Some(DsaScope::ThickOnly)
    } else if spec.variant == Variant::FullDsa {
        Some(DsaScope::Full)
    } else {
        None
    };
    let (mut dsa, mut inner, mut mass) = (None, None, None);
    if let Some(scope) = scope.filter(|_| !partition.thick_elements.is_empty()) {
        let d = assemble_dsa(sys, spec.dsa_kind, scope, spec.eta)?;
        let coef = match spec.mass_weight {
            MassWeight::SigmaT => &sys.field.sigma_t,
            MassWeight::SigmaS => &sys.field.sigma_s,
        };
        let blocks: Vec<_> = d
            .elements
            .iter()
            .map(|&e| sys.space.mass().scale(coef[e]))
            .collect();
        mass = Some(CsrMatrix::block_diagonal(&blocks));
        inner = Some(match spec.inner {
            InnerSolver::Direct => InnerFactor::Direct(LuFactors::factor_csr(&d.matrix)?),
            InnerSolver::AmgFgmres => InnerFactor::Amg(Box::new(amg_setup(&d.matrix, &spec.amg)?)),
        });
        dsa = Some(d);
    }
    Ok(DsaPreconditioner {
        sys,
        spec: spec.clone(),
        partition,
        dsa,
        inner,
        mass,
        stats: ApplyStats::default(),
    })
}

impl<'a> DsaPreconditioner<'a> {
    pub fn spec(&self) -> &PreconditionerSpec {
        &self.spec
    }

    pub fn partition(&self) -> &ThickPartition {
        &self.partition
    }

    pub fn dsa_matrix(&self) -> Option<&DsaMatrix> {
        self.dsa.as_ref()
    }

    pub fn amg(&self) -> Option<&AmgHierarchy> {
        match &self.inner {
            Some(InnerFactor::Amg(h)) => Some(h),
            _ => None,
        }
    }

    /// Solve `D x = rhs` on the DSA DOFs.
    fn inner_solve(&mut self, rhs: &[f64]) -> Result<Vec<f64>> {
        let d = self.dsa.as_ref().expect("inner solve without DSA matrix");
        match self.inner.as_ref().expect("inner solve without factors") {
            InnerFactor::Direct(lu) => lu.solve(rhs),
            InnerFactor::Amg(h) => {
                let cfg = KrylovConfig {
                    restart: 30,
                    max_iters: self.spec.inner_max_amg,
                    rel_tol: self.spec.inner_tol,
                    abs_tol: 0.0,
                    flexible: true,
                };
                let mut pc: &AmgHierarchy = h;
                let (x, report) = gmres(&d.matrix, Some(&mut pc), rhs, &cfg)?;
                self.stats.inner_iterations.push(report.iterations);
                if !report.converged {
                    self.stats.inner_failures += 1;
                }
                Ok(x)
            }
        }
    }

    /// `phi_f + D^{-1} Sigma phi_f` on the DSA DOFs, everything else unchanged.
    fn dsa_correction(&mut self, phi: &[f64]) -> Result<Vec<f64>> {
        let mut out = phi.to_vec();
        let Some(d) = self.dsa.as_ref() else {
            return Ok(out);
        };
        let local: Vec<f64> = d.dofs.iter().map(|&g| phi[g]).collect();
        let rhs = self.mass.as_ref().unwrap().spmv(&local)?;
        let dofs = d.dofs.clone();
        let corr = self.inner_solve(&rhs)?;
        for (&g, c) in dofs.iter().zip(&corr) {
            out[g] += c;
        }
        Ok(out)
    }

    fn check_len(&self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.sys.n_dofs() {
            return Err(Error::dim(format!(
                "preconditioner on {} DOFs applied to vector of length {}",
                self.sys.n_dofs(),
                phi.len()
            )));
        }
        Ok(())
    }

    /// Diagonal heterogeneous DSA: thick entries receive `phi_f + D_ff^{-1} Sigma_tf phi_f`.
    pub fn apply_het_diag(&mut self, phi: &[f64]) -> Result<Vec<f64>> {
        self.check_len(phi)?;
        self.dsa_correction(phi)
    }

    /// Triangular heterogeneous DSA: the diagonal step, then a transport update of
    /// the thick values accumulated into the thin entries.
    pub fn apply_het_tri(&mut self, phi: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.apply_het_diag(phi)?;
        if self.partition.thick_dofs.is_empty() || self.partition.thin_elements.is_empty() {
            return Ok(out);
        }
        let mask = self.partition.dof_mask();
        let bar: Vec<f64> = out
            .iter()
            .zip(&mask)
            .map(|(&v, &thick)| if thick { v } else { 0.0 })
            .collect();
        let upd = self.sys.transport_update(&self.sys.scattering_source(&bar))?;
        self.stats.extra_transport_updates += 1;
        for ((o, u), &thick) in out.iter_mut().zip(&upd).zip(&mask) {
            if !thick {
                *o += u;
            }
        }
        Ok(out)
    }

    pub fn apply_vec(&mut self, phi: &[f64]) -> Result<Vec<f64>> {
        self.check_len(phi)?;
        self.stats.applications += 1;
        match self.spec.variant {
            Variant::None => Ok(phi.to_vec()),
            Variant::FullDsa | Variant::HetDsaDiag => self.dsa_correction(phi),
            Variant::HetDsaTri => self.apply_het_tri(phi),
        }
    }
}

impl Preconditioner for DsaPreconditioner<'_> {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(&self.apply_vec(r)?);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportRunStats {
    pub outer_iterations: usize,
    pub converged: bool,
    pub final_rel_residual: f64,
    pub outer_residual_history: Vec<f64>,
    pub inner_amg_iterations_per_outer: Vec<usize>,
    pub inner_failures: usize,
    pub extra_transport_updates: usize,
    pub thick_dof_fraction: f64,
    pub n_dofs: usize,
    pub dsa_dofs: usize,
    pub setup_time: f64,
    pub wall_time: f64,
}

impl TransportRunStats {
    pub fn mean_inner_amg_iterations(&self) -> Option<f64> {
        let v = &self.inner_amg_iterations_per_outer;
        (!v.is_empty()).then(|| v.iter().sum::<usize>() as f64 / v.len() as f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

/// Solve `S phi = b` by right-preconditioned FGMRES from a zero initial guess.
pub fn solve_transport(
    sys: &TransportSystem,
    spec: &PreconditionerSpec,
    outer_cfg: &KrylovConfig,
) -> Result<(Vec<f64>, TransportRunStats)> {
    let start = Instant::now();
    let mut pc = build_preconditioner(sys, spec)?;
    let setup_time = start.elapsed().as_secs_f64();
    let n = sys.n_dofs();
    let op = FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
        y.copy_from_slice(&sys.schur_apply(x)?);
        Ok(())
    });
    let b = sys.schur_rhs()?;
    let cfg = KrylovConfig {
        flexible: true,
        ..*outer_cfg
    };
    let (phi, report) = gmres(&op, Some(&mut pc), &b, &cfg)?;
    let thick = pc.partition.thick_dofs.len();
    let stats = TransportRunStats {
        outer_iterations: report.iterations,
        converged: report.converged,
        final_rel_residual: report.final_rel_residual,
        outer_residual_history: report.residual_history,
        inner_amg_iterations_per_outer: pc.stats.inner_iterations.clone(),
        inner_failures: pc.stats.inner_failures,
        extra_transport_updates: pc.stats.extra_transport_updates,
        thick_dof_fraction: if spec.variant.is_het() {
            thick as f64 / n.max(1) as f64
        } else if spec.variant == Variant::FullDsa {
            1.0
        } else {
            0.0
        },
        n_dofs: n,
        dsa_dofs: pc.dsa.as_ref().map_or(0, DsaMatrix::dim),
        setup_time,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok((phi, stats))
}

/// `psi_d = L_d^{-1} (q_d + Sigma_s phi)` for one ordinate.
pub fn recover_angular_flux(sys: &TransportSystem, phi: &[f64], d: usize) -> Result<Vec<f64>> {
    if d >= sys.n_ordinates() {
        return Err(Error::usage(format!(
            "ordinate {d} out of range for {} directions",
            sys.n_ordinates()
        )));
    }
    if phi.len() != sys.n_dofs() {
        return Err(Error::dim("scalar flux length"));
    }
    sys.angular_flux(phi, d)
}
