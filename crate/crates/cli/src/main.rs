use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use snkit::amg::amg_setup;
use snkit::bench::{emit_report, preconditioner_label, load_json, run_experiment_with, BenchConfig, Experiment};
use snkit::dg::{assemble_dsa, build_system, DsaKind, DsaScope};
use snkit::problem::ProblemConfig;
use snkit::solver::{solve_transport, InnerSolver, PreconditionerSpec, Variant};
use snkit::sparse::KrylovConfig;
use snkit::{Error, Result};

#[derive(Parser)]
#[command(name = "snkit", version, about = "S_N transport with heterogeneous DSA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    PipeSweep,
    FiveRegion,
    AmgStudy,
    VoidDemo,
    Custom,
}

impl From<ExperimentArg> for Experiment {
    fn from(e: ExperimentArg) -> Self {
        match e {
            ExperimentArg::PipeSweep => Experiment::PipeSweep,
            ExperimentArg::FiveRegion => Experiment::FiveRegion,
            ExperimentArg::AmgStudy => Experiment::AmgStudy,
            ExperimentArg::VoidDemo => Experiment::VoidDemo,
            ExperimentArg::Custom => Experiment::Custom,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    None,
    FullDsa,
    HetDsaDiag,
    HetDsaTri,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Sip,
    Nip,
    Mnip,
}

#[derive(Clone, Copy, ValueEnum)]
enum InnerArg {
    Direct,
    AmgFgmres,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Full,
    ThickOnly,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment matrix and write CSV, JSON and markdown reports.
    Bench {
        #[arg(long, value_enum)]
        experiment: Option<ExperimentArg>,
        /// JSON benchmark config; lists left out take the experiment defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Outer tolerance 1e-12 with restart 30.
        #[arg(long)]
        strict_paper: bool,
        #[arg(long, short)]
        quiet: bool,
    },
    /// Print the fully resolved default config of an experiment.
    Config {
        #[arg(long, value_enum)]
        experiment: ExperimentArg,
    },
    /// Solve one problem and print its run statistics as JSON.
    Solve {
        /// JSON problem config.
        #[arg(long)]
        config: PathBuf,
        /// JSON preconditioner spec; overrides the flags below.
        #[arg(long)]
        preconditioner: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "het-dsa-diag")]
        variant: VariantArg,
        #[arg(long, value_enum, default_value = "nip")]
        kind: KindArg,
        #[arg(long, value_enum, default_value = "direct")]
        inner: InnerArg,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a DSA matrix in Matrix Market format.
    Export {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "nip")]
        kind: KindArg,
        #[arg(long, value_enum, default_value = "thick-only")]
        scope: ScopeArg,
        #[arg(long)]
        out: PathBuf,
        /// Also build an AMG hierarchy and write its level statistics here.
        #[arg(long)]
        amg_stats: Option<PathBuf>,
    },
}

fn kind(k: KindArg) -> DsaKind {
    match k {
        KindArg::Sip => DsaKind::Sip,
        KindArg::Nip => DsaKind::Nip,
        KindArg::Mnip => DsaKind::Mnip,
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn bench(
    experiment: Option<ExperimentArg>,
    config: Option<PathBuf>,
    out: PathBuf,
    strict_paper: bool,
    quiet: bool,
) -> Result<()> {
    let mut cfg = match &config {
        Some(p) => BenchConfig::load(p)?,
        None => BenchConfig::default(),
    };
    if let Some(e) = experiment.map(Experiment::from) {
        match cfg.experiment {
            Some(c) if c != e => {
                return Err(Error::Config {
                    path: "experiment".into(),
                    message: format!("config says {c} but --experiment says {e}"),
                })
            }
            _ => cfg.experiment = Some(e),
        }
    }
    cfg.strict_paper |= strict_paper;
    let cfg = cfg.resolved()?;
    let mut done = 0usize;
    let cells = run_experiment_with(&cfg, &mut |c| {
        done += 1;
        if !quiet {
            let status = match (&c.error, c.row.outer_iters) {
                (Some(e), _) => format!("error: {e}"),
                (None, Some(i)) if c.row.converged => format!("{i} iterations"),
                (None, _) => "did not converge".into(),
            };
            eprintln!(
                "[{done}] {} cdt={} p={} {}: {status}",
                c.row.problem,
                snkit::bench::fmt_cdt(c.row.cdt),
                c.row.order,
                preconditioner_label(&c.preconditioner)
            );
        }
    })?;
    let files = emit_report(&cfg, &cells, &out)?;
    if !quiet {
        eprintln!("wrote {}", files.markdown.display());
    }
    Ok(())
}

fn solve(
    config: PathBuf,
    preconditioner: Option<PathBuf>,
    spec: PreconditionerSpec,
    outer: KrylovConfig,
    out: Option<PathBuf>,
) -> Result<()> {
    let problem: ProblemConfig = load_json(&config)?;
    let spec = match preconditioner {
        Some(p) => load_json(&p)?,
        None => PreconditionerSpec {
            eta: problem.eta,
            ..spec
        },
    };
    let sys = build_system(&problem.build()?, problem.order, problem.sn_order)?;
    let (_, stats) = solve_transport(&sys, &spec, &outer)?;
    let json = stats.to_json();
    match out {
        Some(p) => write_text(&p, &json)?,
        None => println!("{json}"),
    }
    if !stats.converged {
        eprintln!("warning: outer iteration did not converge");
    }
    Ok(())
}

fn export(config: PathBuf, k: KindArg, scope: ScopeArg, out: PathBuf, amg_stats: Option<PathBuf>) -> Result<()> {
    let problem: ProblemConfig = load_json(&config)?;
    let sys = build_system(&problem.build()?, problem.order, problem.sn_order)?;
    let scope = match scope {
        ScopeArg::Full => DsaScope::Full,
        ScopeArg::ThickOnly => DsaScope::ThickOnly,
    };
    let d = assemble_dsa(&sys, kind(k), scope, problem.eta)?;
    d.write_matrix_market(&out)?;
    if let Some(p) = amg_stats {
        let h = amg_setup(&d.matrix, &PreconditionerSpec::default().amg)?;
        write_text(&p, &h.stats_json())?;
    }
    eprintln!("{} x {} with {} nonzeros", d.dim(), d.dim(), d.matrix.nnz());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench {
            experiment,
            config,
            out,
            strict_paper,
            quiet,
        } => bench(experiment, config, out, strict_paper, quiet),
        Command::Config { experiment } => {
            let cfg = BenchConfig::for_experiment(experiment.into()).resolved()?;
            println!("{}", cfg.to_json());
            Ok(())
        }
        Command::Solve {
            config,
            preconditioner,
            variant,
            kind: k,
            inner,
            tol,
            max_iters,
            out,
        } => {
            let variant = match variant {
                VariantArg::None => Variant::None,
                VariantArg::FullDsa => Variant::FullDsa,
                VariantArg::HetDsaDiag => Variant::HetDsaDiag,
                VariantArg::HetDsaTri => Variant::HetDsaTri,
            };
            let inner = match inner {
                InnerArg::Direct => InnerSolver::Direct,
                InnerArg::AmgFgmres => InnerSolver::AmgFgmres,
            };
            let outer = KrylovConfig {
                rel_tol: tol,
                max_iters,
                ..KrylovConfig::default()
            };
            solve(config, preconditioner, PreconditionerSpec::new(variant, kind(k), 1.0, inner), outer, out)
        }
        Command::Export {
            config,
            kind: k,
            scope,
            out,
            amg_stats,
        } => export(config, k, scope, out, amg_stats),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
