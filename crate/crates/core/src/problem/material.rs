use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::StructuredMesh;

/// Character-to-region table read from the JSON sidecar of a map file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Legend {
    /// Cell edge length applied to both directions.
    #[serde(default = "default_cell_size")]
    pub cell_size: f64,
    pub regions: Vec<LegendEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegendEntry {
    pub symbol: char,
    pub name: String,
}

fn default_cell_size() -> f64 {
    0.5
}

impl Legend {
    /// Region ids follow the order of `pairs`.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (char, &'a str)>) -> Self {
        Self {
            cell_size: default_cell_size(),
            regions: pairs
                .into_iter()
                .map(|(symbol, name)| LegendEntry {
                    symbol,
                    name: name.to_string(),
                })
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::usage("legend has no regions"));
        }
        if !(self.cell_size > 0.0) {
            return Err(Error::usage("legend cell_size must be positive"));
        }
        for (k, a) in self.regions.iter().enumerate() {
            for b in &self.regions[..k] {
                if a.symbol == b.symbol || a.name == b.name {
                    return Err(Error::usage(format!(
                        "legend repeats symbol or name: {:?} / {:?}",
                        a.symbol, a.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Per-element region ids, dense in `0..names.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialMap {
    ids: Vec<usize>,
    names: Vec<String>,
}

impl MaterialMap {
    pub fn new(ids: Vec<usize>, names: Vec<String>) -> Result<Self> {
        if let Some(&bad) = ids.iter().find(|&&id| id >= names.len()) {
            return Err(Error::usage(format!(
                "material id {bad} out of range for {} regions",
                names.len()
            )));
        }
        Ok(Self { ids, names })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn id(&self, e: usize) -> usize {
        self.ids[e]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[self.ids[e]]
    }

    pub fn region_id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Number of elements per region, in id order.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.names.len()];
        for &id in &self.ids {
            c[id] += 1;
        }
        c
    }

    /// Map on the `r`-times refined mesh; each coarse cell becomes an `r x r` patch.
    pub fn refined(&self, coarse: &StructuredMesh, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::usage("refinement factor must be at least 1"));
        }
        let nx = coarse.nx * r;
        let ny = coarse.ny * r;
        let mut ids = vec![0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                ids[j * nx + i] = self.ids[coarse.element_id(i / r, j / r)];
            }
        }
        Ok(Self {
            ids,
            names: self.names.clone(),
        })
    }
}

/// Parse a rectangular character grid. The first line is element row `j = 0`.
pub fn parse_material_map(text: &str, legend: &Legend) -> Result<(StructuredMesh, MaterialMap)> {
    legend.validate()?;
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .collect::<Vec<_>>();
    let lines: Vec<&str> = match lines.iter().rposition(|l| !l.is_empty()) {
        Some(last) => lines[..=last].to_vec(),
        None => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "material map is empty".into(),
            })
        }
    };
    let nx = lines[0].chars().count();
    let mut ids = Vec::with_capacity(nx * lines.len());
    for (li, line) in lines.iter().enumerate() {
        let width = line.chars().count();
        if width != nx {
            return Err(Error::Parse {
                line: li + 1,
                column: width.min(nx) + 1,
                message: format!("row has {width} cells, expected {nx}"),
            });
        }
        for (ci, ch) in line.chars().enumerate() {
            let id = legend
                .regions
                .iter()
                .position(|r| r.symbol == ch)
                .ok_or_else(|| Error::Parse {
                    line: li + 1,
                    column: ci + 1,
                    message: format!("unknown material symbol {ch:?}"),
                })?;
            ids.push(id);
        }
    }
    let mesh = StructuredMesh::new(nx, lines.len(), legend.cell_size, legend.cell_size)?;
    let names = legend.regions.iter().map(|r| r.name.clone()).collect();
    Ok((mesh, MaterialMap::new(ids, names)?))
}

/// Read a map file and its legend sidecar (`<stem>.legend.json` next to it).
pub fn load_material_map(path: &Path) -> Result<(StructuredMesh, MaterialMap)> {
    let legend_path = path.with_extension("legend.json");
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let legend_text =
        std::fs::read_to_string(&legend_path).map_err(|e| Error::io(&legend_path, e))?;
    let legend: Legend = serde_json::from_str(&legend_text)?;
    parse_material_map(&text, &legend)
}

pub const CROOKED_PIPE_MAP: &str = include_str!("../../data/crooked_pipe.txt");
pub const CROOKED_PIPE_LEGEND: &str = include_str!("../../data/crooked_pipe.legend.json");

/// The bundled crooked-pipe geometry: 28 x 12 cells of 0.5 x 0.5 with regions
/// pipe, wall, edge and block.
pub fn crooked_pipe_map() -> (StructuredMesh, MaterialMap) {
    let legend: Legend = serde_json::from_str(CROOKED_PIPE_LEGEND).expect("bundled legend parses");
    parse_material_map(CROOKED_PIPE_MAP, &legend).expect("bundled map parses")
}
