use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{BenchConfig, BenchRow, CellResult, CellStatus};
use crate::error::{Error, Result};
use crate::solver::{InnerSolver, PreconditionerSpec, Variant};

/// Short column label for a preconditioner, e.g. `Het NIP` or `Full mNIP (AMG)`.
pub fn preconditioner_label(p: &PreconditionerSpec) -> String {
    let base = match p.variant {
        Variant::None => return "None".into(),
        Variant::FullDsa => format!("Full {}", p.dsa_kind),
        Variant::HetDsaDiag => format!("Het {}", p.dsa_kind),
        Variant::HetDsaTri => format!("Tri-Het {}", p.dsa_kind),
    };
    match p.inner {
        InnerSolver::Direct => base,
        InnerSolver::AmgFgmres => format!("{base} (AMG)"),
    }
}

pub fn fmt_cdt(c: f64) -> String {
    if c.is_infinite() {
        "inf".into()
    } else if c >= 1e4 {
        format!("{c:e}")
    } else {
        format!("{c}")
    }
}

pub fn write_csv(rows: &[BenchRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn csv_string(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_csv(text: &str) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

fn cell_text(c: &CellResult) -> String {
    match c.status {
        CellStatus::Converged => c.row.outer_iters.map_or("-".into(), |i| i.to_string()),
        CellStatus::Dnc => "DNC".into(),
        CellStatus::Failed => "err".into(),
    }
}

/// Markdown summary: one line per problem, one column group per preconditioner.
pub fn render_markdown(title: &str, cells: &[CellResult]) -> String {
    let mut labels: Vec<String> = Vec::new();
    let mut with_amg: BTreeMap<String, bool> = BTreeMap::new();
    let mut groups: Vec<((String, String, usize, usize), Vec<&CellResult>)> = Vec::new();
    for c in cells {
        let label = preconditioner_label(&c.preconditioner);
        if !labels.contains(&label) {
            labels.push(label.clone());
        }
        *with_amg.entry(label).or_default() |= c.preconditioner.inner == InnerSolver::AmgFgmres;
        let key = (c.row.problem.clone(), fmt_cdt(c.row.cdt), c.row.order, c.row.n);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(c),
            None => groups.push((key, vec![c])),
        }
    }

    let mut md = String::new();
    let _ = writeln!(md, "# {title}\n");
    let mut header = vec!["Problem".to_string(), "cdt".into(), "order".into(), "N".into(), "DOFs".into()];
    for l in &labels {
        header.push(format!("{l} Iters."));
        if with_amg[l] {
            header.push(format!("{l} AMG it."));
        }
    }
    header.push("% Thick DOFs".into());
    let _ = writeln!(md, "| {} |", header.join(" | "));
    let _ = writeln!(md, "|{}|", vec!["---"; header.len()].join("|"));
    for ((problem, cdt, order, n), members) in &groups {
        let dofs = members.iter().map(|c| c.n_dofs).max().unwrap_or(0);
        let mut line = vec![problem.clone(), cdt.clone(), order.to_string(), n.to_string(), dofs.to_string()];
        for l in &labels {
            let c = members.iter().find(|c| preconditioner_label(&c.preconditioner) == *l);
            line.push(c.map_or("-".into(), |c| cell_text(c)));
            if with_amg[l] {
                line.push(
                    c.and_then(|c| c.row.mean_inner_amg_iters)
                        .map_or("-".into(), |m| format!("{m:.1}")),
                );
            }
        }
        let thick = members
            .iter()
            .find(|c| c.row.variant.is_het())
            .map_or("-".into(), |c| format!("{:.1}", c.row.thick_pct));
        line.push(thick);
        let _ = writeln!(md, "| {} |", line.join(" | "));
    }
    let failures: Vec<&CellResult> = cells.iter().filter(|c| c.error.is_some()).collect();
    if !failures.is_empty() {
        let _ = writeln!(md, "\nErrors:\n");
        for c in failures {
            let _ = writeln!(
                md,
                "- {} (cdt {}), {}: {}",
                c.row.problem,
                fmt_cdt(c.row.cdt),
                preconditioner_label(&c.preconditioner),
                c.error.as_deref().unwrap_or("")
            );
        }
    }
    md
}

/// Tab-separated outer iteration counts against `sigma_pipe`, ascending.
pub fn render_sigma_data(cells: &[CellResult]) -> Option<String> {
    let mut labels: Vec<String> = Vec::new();
    let mut table: BTreeMap<(u64, usize), BTreeMap<String, String>> = BTreeMap::new();
    for c in cells {
        let s = c.sigma_pipe?;
        let label = preconditioner_label(&c.preconditioner);
        if !labels.contains(&label) {
            labels.push(label.clone());
        }
        let value = match c.status {
            CellStatus::Converged => c.row.outer_iters.map_or("nan".into(), |i| i.to_string()),
            _ => "nan".into(),
        };
        // Nonnegative floats order like their bit patterns.
        table
            .entry((s.to_bits(), c.refinement))
            .or_default()
            .insert(label, value);
    }
    if table.is_empty() {
        return None;
    }
    let mut out = String::new();
    let _ = writeln!(out, "# sigma_pipe\trefinement\t{}", labels.join("\t"));
    for ((bits, r), values) in &table {
        let cols: Vec<&str> = labels
            .iter()
            .map(|l| values.get(l).map_or("nan", String::as_str))
            .collect();
        let _ = writeln!(out, "{:e}\t{r}\t{}", f64::from_bits(*bits), cols.join("\t"));
    }
    Some(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultsFile {
    pub config: BenchConfig,
    pub cells: Vec<CellResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub markdown: PathBuf,
    pub sigma_data: Option<PathBuf>,
}

/// Write `results.csv`, `results.json`, `report.md` and, for pipe sweeps,
/// `sigma_pipe.tsv` under `dir`.
pub fn emit_report(cfg: &BenchConfig, cells: &[CellResult], dir: impl AsRef<Path>) -> Result<ReportFiles> {
    if cells.is_empty() {
        return Err(Error::usage("no cells to report"));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, text: &str| -> Result<PathBuf> {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        Ok(p)
    };
    let rows: Vec<BenchRow> = cells.iter().map(|c| c.row.clone()).collect();
    let csv = write("results.csv", &csv_string(&rows)?)?;
    let results = ResultsFile {
        config: cfg.clone(),
        cells: cells.to_vec(),
    };
    let json = write("results.json", &serde_json::to_string_pretty(&results)?)?;
    let title = cfg.experiment.map_or("benchmark".to_string(), |e| e.to_string());
    let markdown = write("report.md", &render_markdown(&title, cells))?;
    let sigma_data = match render_sigma_data(cells) {
        Some(text) => Some(write("sigma_pipe.tsv", &text)?),
        None => None,
    };
    Ok(ReportFiles {
        csv,
        json,
        markdown,
        sigma_data,
    })
}
