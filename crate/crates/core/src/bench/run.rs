use serde::{Deserialize, Serialize};

use crate::bench::{BenchConfig, Experiment};
use crate::dg::{build_system, DsaKind};
use crate::error::Result;
use crate::problem::{partition_thick, two_region_sigma, PipeVariant, ProblemConfig};
use crate::solver::{solve_transport, InnerSolver, PreconditionerSpec, TransportRunStats, Variant};

/// One CSV line; the column set is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub problem: String,
    pub cdt: f64,
    pub order: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub variant: Variant,
    pub kind: DsaKind,
    pub eta: f64,
    pub outer_iters: Option<usize>,
    pub mean_inner_amg_iters: Option<f64>,
    pub thick_pct: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Converged,
    /// Did not converge within the outer iteration limit.
    Dnc,
    /// Setup or solve raised an error, recorded in `error`.
    Failed,
}

/// Everything known about one (problem, preconditioner) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub row: BenchRow,
    pub preconditioner: PreconditionerSpec,
    pub sigma_pipe: Option<f64>,
    pub refinement: usize,
    pub n_dofs: usize,
    pub status: CellStatus,
    pub error: Option<String>,
    pub stats: Option<TransportRunStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemCell {
    pub label: String,
    pub sigma_pipe: Option<f64>,
    pub config: ProblemConfig,
}

fn fmt_sigma(s: f64) -> String {
    if s == 0.0 || (1e-2..1e4).contains(&s) {
        format!("{s}")
    } else {
        format!("{s:e}")
    }
}

/// Problems of an already resolved config, in run order.
pub fn problem_cells(cfg: &BenchConfig) -> Result<Vec<ProblemCell>> {
    let exp = cfg.experiment()?;
    let mut out = Vec::new();
    let suffix = |r: usize| if r > 1 { format!(" x{r}") } else { String::new() };
    let base = |cdt: f64, order: usize, refinement: usize| ProblemConfig {
        variant: PipeVariant::TwoRegion,
        problem: None,
        sigma_s: Default::default(),
        cdt,
        eta: cfg.eta,
        sn_order: cfg.sn_order,
        order,
        refinement,
        void_regions: Vec::new(),
    };
    match exp {
        Experiment::PipeSweep | Experiment::AmgStudy | Experiment::VoidDemo => {
            for &s in cfg.sigma_pipe.as_deref().unwrap_or_default() {
                for &cdt in cfg.cdt.as_deref().unwrap_or_default() {
                    for &order in cfg.orders.as_deref().unwrap_or_default() {
                        for &r in cfg.refinements.as_deref().unwrap_or_default() {
                            let mut c = base(cdt, order, r);
                            c.sigma_s = two_region_sigma(s, cfg.sigma_outside);
                            let label = if exp == Experiment::VoidDemo {
                                c.void_regions = vec!["pipe".into()];
                                format!("void pipe{}", suffix(r))
                            } else {
                                format!("pipe={}{}", fmt_sigma(s), suffix(r))
                            };
                            out.push(ProblemCell {
                                label,
                                sigma_pipe: Some(s),
                                config: c,
                            });
                        }
                    }
                }
            }
        }
        Experiment::FiveRegion => {
            for &k in cfg.problems.as_deref().unwrap_or_default() {
                for &cdt in cfg.cdt.as_deref().unwrap_or_default() {
                    for &order in cfg.orders.as_deref().unwrap_or_default() {
                        for &r in cfg.refinements.as_deref().unwrap_or_default() {
                            let mut c = base(cdt, order, r);
                            c.variant = PipeVariant::FiveRegion;
                            c.problem = Some(k);
                            out.push(ProblemCell {
                                label: format!("#{k}{}", suffix(r)),
                                sigma_pipe: None,
                                config: c,
                            });
                        }
                    }
                }
            }
        }
        Experiment::Custom => {
            for (i, c) in cfg.custom.as_deref().unwrap_or_default().iter().enumerate() {
                out.push(ProblemCell {
                    label: match c.problem {
                        Some(k) => format!("#{k}{}", suffix(c.refinement)),
                        None => format!("custom-{i}{}", suffix(c.refinement)),
                    },
                    sigma_pipe: c.sigma_s.get("pipe").copied(),
                    config: c.clone(),
                });
            }
        }
    }
    Ok(out)
}

fn row_for(cell: &ProblemCell, pc: &PreconditionerSpec, thick_pct: f64) -> BenchRow {
    BenchRow {
        problem: cell.label.clone(),
        cdt: cell.config.cdt,
        order: cell.config.order,
        n: cell.config.sn_order,
        variant: pc.variant,
        kind: pc.dsa_kind,
        eta: pc.eta,
        outer_iters: None,
        mean_inner_amg_iters: None,
        thick_pct,
        converged: false,
    }
}

fn failed(cell: &ProblemCell, pc: &PreconditionerSpec, thick_pct: f64, n_dofs: usize, e: String) -> CellResult {
    CellResult {
        row: row_for(cell, pc, thick_pct),
        preconditioner: pc.clone(),
        sigma_pipe: cell.sigma_pipe,
        refinement: cell.config.refinement,
        n_dofs,
        status: CellStatus::Failed,
        error: Some(e),
        stats: None,
    }
}

/// Run every (problem x preconditioner) cell, calling `progress` after each.
///
/// Cell failures are recorded, never propagated; only config errors are.
pub fn run_experiment_with(
    cfg: &BenchConfig,
    progress: &mut dyn FnMut(&CellResult),
) -> Result<Vec<CellResult>> {
    let cfg = cfg.resolved()?;
    let preconditioners = cfg.preconditioners.clone().unwrap_or_default();
    let mut out = Vec::new();
    for cell in problem_cells(&cfg)? {
        let built = cell
            .config
            .build()
            .and_then(|spec| build_system(&spec, cell.config.order, cell.config.sn_order));
        let sys = match built {
            Ok(sys) => sys,
            Err(e) => {
                for pc in &preconditioners {
                    let r = failed(&cell, pc, 0.0, 0, e.to_string());
                    progress(&r);
                    out.push(r);
                }
                continue;
            }
        };
        for pc in &preconditioners {
            let thick_pct = match pc.variant {
                Variant::None => 0.0,
                Variant::FullDsa => 100.0,
                Variant::HetDsaDiag | Variant::HetDsaTri => {
                    partition_thick(&sys.field, pc.eta, sys.space.n_local())?.thick_pct()
                }
            };
            let r = match solve_transport(&sys, pc, &cfg.outer) {
                Ok((_, stats)) => {
                    let mut row = row_for(&cell, pc, thick_pct);
                    row.outer_iters = Some(stats.outer_iterations);
                    row.converged = stats.converged;
                    row.mean_inner_amg_iters = match pc.inner {
                        InnerSolver::AmgFgmres => stats.mean_inner_amg_iterations(),
                        InnerSolver::Direct => None,
                    };
                    CellResult {
                        row,
                        preconditioner: pc.clone(),
                        sigma_pipe: cell.sigma_pipe,
                        refinement: cell.config.refinement,
                        n_dofs: sys.n_dofs(),
                        status: if stats.converged {
                            CellStatus::Converged
                        } else {
                            CellStatus::Dnc
                        },
                        error: None,
                        stats: Some(stats),
                    }
                }
                Err(e) => failed(&cell, pc, thick_pct, sys.n_dofs(), e.to_string()),
            };
            progress(&r);
            out.push(r);
        }
    }
    Ok(out)
}

pub fn run_experiment(cfg: &BenchConfig) -> Result<Vec<CellResult>> {
    run_experiment_with(cfg, &mut |_| {})
}
