use proptest::prelude::*;
use snkit::bench::{
    csv_string, emit_report, parse_csv, problem_cells, render_markdown, render_sigma_data, run_experiment,
    BenchConfig, BenchRow, CellResult, CellStatus, Experiment,
};
use snkit::dg::DsaKind;
use snkit::solver::{InnerSolver, PreconditionerSpec, Variant};
use snkit::Error;

fn row(problem: &str, variant: Variant, iters: Option<usize>, thick: f64) -> BenchRow {
    BenchRow {
        problem: problem.into(),
        cdt: 1e3,
        order: 2,
        n: 8,
        variant,
        kind: DsaKind::Nip,
        eta: 1.0,
        outer_iters: iters,
        mean_inner_amg_iters: None,
        thick_pct: thick,
        converged: iters.is_some(),
    }
}

fn cell(problem: &str, sigma: f64, variant: Variant, status: CellStatus, iters: Option<usize>) -> CellResult {
    let thick = if variant.is_het() { 70.53571428571429 } else { 100.0 };
    CellResult {
        row: row(problem, variant, iters, thick),
        preconditioner: PreconditionerSpec::new(variant, DsaKind::Nip, 1.0, InnerSolver::Direct),
        sigma_pipe: Some(sigma),
        refinement: 1,
        n_dofs: 3024,
        status,
        error: (status == CellStatus::Failed).then(|| "DSA scope contains void element 12".to_string()),
        stats: None,
    }
}

fn fixture() -> Vec<CellResult> {
    vec![
        cell("pipe=1e-6", 1e-6, Variant::FullDsa, CellStatus::Converged, Some(38)),
        cell("pipe=1e-6", 1e-6, Variant::HetDsaDiag, CellStatus::Converged, Some(26)),
        cell("pipe=0", 0.0, Variant::FullDsa, CellStatus::Failed, None),
    ]
}

fn config_err(json: &str) -> String {
    match BenchConfig::from_json(json).and_then(|c| c.resolved()) {
        Err(Error::Config { path, .. }) => path,
        other => panic!("expected a config error for {json}, got {other:?}"),
    }
}

#[test]
fn config_errors_name_fields() {
    let p = r#""experiment": "pipe-sweep""#;
    assert_eq!(config_err(&format!("{{{p}, \"sigma_pipe\": [1, -1e-3]}}")), "sigma_pipe[1]");
    assert_eq!(config_err(&format!("{{{p}, \"sigma_pipe\": []}}")), "sigma_pipe");
    assert_eq!(config_err(&format!("{{{p}, \"orders\": [2, 0]}}")), "orders[1]");
    assert_eq!(config_err(&format!("{{{p}, \"refinements\": [0]}}")), "refinements[0]");
    assert_eq!(config_err(&format!("{{{p}, \"cdt\": [-1]}}")), "cdt[0]");
    assert_eq!(config_err(&format!("{{{p}, \"preconditioners\": []}}")), "preconditioners");
    assert_eq!(
        config_err(&format!("{{{p}, \"preconditioners\": [{{\"variant\": \"het-dsa-diag\", \"eta\": -1}}]}}")),
        "preconditioners[0]"
    );
    assert_eq!(config_err(r#"{"experiment": "five-region", "problems": [6]}"#), "problems[0]");
    assert_eq!(config_err(&format!("{{{p}, \"outer\": {{\"rel_tol\": \"x\"}}}}")), "outer.rel_tol");
    assert_eq!(config_err(&format!("{{{p}, \"sigma_pipe\": [1, \"a\"]}}")), "sigma_pipe[1]");
    assert_eq!(config_err(r#"{"experiment": "nope"}"#), "experiment");
    assert_eq!(config_err(r#"{"sigma_pipe": [1]}"#), "experiment");
    assert!(BenchConfig::from_json(&format!("{{{p}, \"bogus\": 1}}")).is_err());
}

#[test]
fn defaults_follow_the_experiment() {
    let c = BenchConfig::for_experiment(Experiment::PipeSweep).resolved().unwrap();
    assert_eq!(c.sigma_pipe.as_deref().unwrap(), &[1e-6, 1e-4, 1e-2, 0.1, 1.0, 10.0, 100.0]);
    assert_eq!(c.cdt.as_deref().unwrap(), &[1e3]);
    let c = BenchConfig::for_experiment(Experiment::FiveRegion).resolved().unwrap();
    assert_eq!(c.problems.as_deref().unwrap(), &[1, 2, 3, 4, 5]);
    assert_eq!(c.cdt.as_deref().unwrap(), &[1.0, 1e3]);
    let c = BenchConfig::for_experiment(Experiment::AmgStudy).resolved().unwrap();
    assert_eq!(c.refinements.as_deref().unwrap(), &[1, 2, 4]);
    assert!(c
        .preconditioners
        .unwrap()
        .iter()
        .all(|p| p.inner == InnerSolver::AmgFgmres));
    let strict = BenchConfig::from_json(r#"{"experiment": "pipe-sweep", "strict_paper": true}"#)
        .unwrap()
        .resolved()
        .unwrap();
    assert_eq!(strict.outer.rel_tol, 1e-12);
    assert_eq!(strict.outer.restart, 30);
}

#[test]
fn resolved_config_round_trips() {
    for e in Experiment::ALL {
        let c = BenchConfig::for_experiment(e);
        if e == Experiment::Custom {
            continue;
        }
        let r = c.resolved().unwrap();
        assert_eq!(BenchConfig::from_json(&r.to_json()).unwrap(), r);
    }
}

#[test]
fn cells_cover_the_product() {
    let c = BenchConfig::from_json(
        r#"{"experiment": "five-region", "problems": [1, 4], "cdt": [1, 1000, "inf"], "orders": [1, 2]}"#,
    )
    .unwrap()
    .resolved()
    .unwrap();
    let cells = problem_cells(&c).unwrap();
    assert_eq!(cells.len(), 2 * 3 * 2);
    assert_eq!(cells[0].label, "#1");
    assert!(cells.iter().any(|p| p.config.cdt.is_infinite()));
}

#[test]
fn markdown_matches_golden() {
    let md = render_markdown("pipe-sweep", &fixture());
    let golden = include_str!("golden/report.md");
    assert_eq!(md, golden);
}

#[test]
fn single_row_table() {
    let md = render_markdown("one", &fixture()[..1]);
    let lines: Vec<&str> = md.lines().filter(|l| l.starts_with('|')).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[2].contains("| 38 |"));
    assert!(lines[2].ends_with("| - |"));
}

#[test]
fn sigma_data_is_sorted() {
    let mut cells = fixture();
    cells.reverse();
    cells.push(cell("pipe=10", 10.0, Variant::HetDsaDiag, CellStatus::Dnc, Some(500)));
    let tsv = render_sigma_data(&cells).unwrap();
    let sigmas: Vec<f64> = tsv
        .lines()
        .skip(1)
        .map(|l| l.split('\t').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(sigmas, vec![0.0, 1e-6, 10.0]);
    assert!(tsv.lines().nth(3).unwrap().ends_with("nan\tnan"));
}

#[test]
fn csv_handles_missing_values_and_infinity() {
    let mut rows: Vec<BenchRow> = fixture().into_iter().map(|c| c.row).collect();
    rows[0].cdt = f64::INFINITY;
    rows[1].mean_inner_amg_iters = Some(5.75);
    let text = csv_string(&rows).unwrap();
    assert!(text.lines().next().unwrap() == "problem,cdt,order,N,variant,kind,eta,outer_iters,mean_inner_amg_iters,thick_pct,converged");
    assert!(text.contains("inf"));
    assert_eq!(parse_csv(&text).unwrap(), rows);
}

fn arb_row() -> impl Strategy<Value = BenchRow> {
    (
        "[a-z#=0-9. -]{1,12}",
        prop_oneof![Just(f64::INFINITY), 1e-3..1e6f64],
        1usize..4,
        1usize..64,
        prop_oneof![
            Just(Variant::None),
            Just(Variant::FullDsa),
            Just(Variant::HetDsaDiag),
            Just(Variant::HetDsaTri)
        ],
        prop_oneof![Just(DsaKind::Sip), Just(DsaKind::Nip), Just(DsaKind::Mnip)],
        0.0..1e3f64,
        proptest::option::of(0usize..1000),
        proptest::option::of(0.0..300.0f64),
        0.0..=100.0f64,
        any::<bool>(),
    )
        .prop_map(|(problem, cdt, order, n, variant, kind, eta, outer_iters, mean, thick_pct, converged)| BenchRow {
            problem,
            cdt,
            order,
            n,
            variant,
            kind,
            eta,
            outer_iters,
            mean_inner_amg_iters: mean,
            thick_pct,
            converged,
        })
}

proptest! {
    #[test]
    fn csv_round_trip(rows in proptest::collection::vec(arb_row(), 1..8)) {
        let text = csv_string(&rows).unwrap();
        prop_assert_eq!(parse_csv(&text).unwrap(), rows);
    }
}

fn small(json: &str) -> BenchConfig {
    BenchConfig::from_json(json).unwrap().resolved().unwrap()
}

#[test]
fn runs_are_deterministic() {
    let cfg = small(
        r#"{"experiment": "pipe-sweep", "sigma_pipe": [1e-2], "orders": [1], "sn_order": 4,
            "preconditioners": [{"variant": "het-dsa-tri", "dsa_kind": "NIP"}]}"#,
    );
    let a = csv_string(&run_experiment(&cfg).unwrap().into_iter().map(|c| c.row).collect::<Vec<_>>()).unwrap();
    let b = csv_string(&run_experiment(&cfg).unwrap().into_iter().map(|c| c.row).collect::<Vec<_>>()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn void_demo_reports_per_cell() {
    let cfg = small(r#"{"experiment": "void-demo", "orders": [1], "sn_order": 4, "strict_paper": true}"#);
    let cells = run_experiment(&cfg).unwrap();
    assert_eq!(cells.len(), 4);
    for c in &cells {
        if c.row.variant.is_het() {
            assert_eq!(c.status, CellStatus::Converged, "{c:?}");
            assert!(c.stats.as_ref().unwrap().final_rel_residual <= 1e-12);
        } else {
            assert_eq!(c.status, CellStatus::Failed);
            assert!(c.error.as_deref().unwrap().contains("void"), "{:?}", c.error);
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&cfg, &cells, dir.path()).unwrap();
    let md = std::fs::read_to_string(files.markdown).unwrap();
    assert!(md.contains("Errors:"));
    assert_eq!(snkit::bench::read_csv(files.csv).unwrap().len(), 4);
}
