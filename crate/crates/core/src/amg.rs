//! Classical (Ruge-Stueben) algebraic multigrid used as a preconditioner.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, LuFactors, Preconditioner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoother {
    /// `x += w D^{-1} r`.
    WeightedJacobi,
    /// `x += D_l1^{-1} r` with `D_l1 = diag(a_ii + sum_{j != i} |a_ij| / 2)`.
    L1Jacobi,
    /// Forward Gauss-Seidel before, backward after coarse correction.
    HybridGaussSeidelL1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cycle {
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmgConfig {
    pub strength_threshold: f64,
    pub max_levels: usize,
    pub min_coarse_size: usize,
    /// Levels above this size are smoothed instead of factored when coarsening stalls.
    pub max_direct_size: usize,
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    pub smoother: Smoother,
    pub jacobi_weight: f64,
    pub cycle: Cycle,
}

impl Default for AmgConfig {
    fn default() -> Self {
        Self {
            strength_threshold: 0.05,
            max_levels: 25,
            min_coarse_size: 40,
            max_direct_size: 6000,
            pre_sweeps: 1,
            post_sweeps: 1,
            smoother: Smoother::L1Jacobi,
            jacobi_weight: 2.0 / 3.0,
            cycle: Cycle::V,
        }
    }
}

impl AmgConfig {
    /// Settings for interior-penalty DG diffusion matrices, where intra-element
    /// couplings are dense and only the strongest ones should drive coarsening.
    pub fn dg_diffusion() -> Self {
        Self {
            strength_threshold: 0.5,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strength_threshold > 0.0 && self.strength_threshold < 1.0) {
            return Err(Error::usage("strength_threshold must lie in (0, 1)"));
        }
        if self.max_levels == 0 {
            return Err(Error::usage("max_levels must be at least 1"));
        }
        if !(self.jacobi_weight > 0.0) {
            return Err(Error::usage("jacobi_weight must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AmgLevel {
    pub a: CsrMatrix,
    /// Prolongation to this level from the next coarser one.
    pub p: CsrMatrix,
    pub r: CsrMatrix,
    /// Inverse smoother diagonal (Jacobi variants) or the plain diagonal (Gauss-Seidel).
    diag: Vec<f64>,
}

#[derive(Debug, Clone)]
enum CoarseSolve {
    Direct(LuFactors),
    Smooth { diag: Vec<f64>, sweeps: usize },
}

/// Multigrid hierarchy; immutable after setup.
#[derive(Debug, Clone)]
pub struct AmgHierarchy {
    cfg: AmgConfig,
    levels: Vec<AmgLevel>,
    coarse: CsrMatrix,
    coarse_solve: CoarseSolve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmgLevelInfo {
    pub rows: usize,
    pub nnz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmgStats {
    pub levels: Vec<AmgLevelInfo>,
    pub grid_complexity: f64,
    pub operator_complexity: f64,
    pub coarse_direct: bool,
}

fn abs_matrix(a: &CsrMatrix) -> CsrMatrix {
    CsrMatrix::from_raw(
        a.n_rows(),
        a.n_cols(),
        a.row_ptr().to_vec(),
        a.col_idx().to_vec(),
        a.values().iter().map(|v| v.abs()).collect(),
    )
    .expect("structure copied from a valid matrix")
}

fn check_diagonal(a: &CsrMatrix) -> Result<Vec<f64>> {
    let d = a.diagonal();
    match d.iter().position(|&v| v == 0.0) {
        Some(row) => Err(Error::ZeroDiagonal { row }),
        None => Ok(d),
    }
}

/// Strong dependencies `S_i` of every row on `(|A| + |A^T|) / 2`.
fn strength(a: &CsrMatrix, theta: f64) -> Result<Vec<Vec<usize>>> {
    let abs = abs_matrix(a);
    let b = abs.add_scaled(0.5, &abs.transpose(), 0.5)?;
    Ok((0..b.n_rows())
        .map(|i| {
            let (cols, vals) = b.row(i);
            let max = cols
                .iter()
                .zip(vals)
                .filter(|(&c, _)| c != i)
                .fold(0.0f64, |m, (_, &v)| m.max(v));
            if max == 0.0 {
                return Vec::new();
            }
            cols.iter()
                .zip(vals)
                .filter(|(&c, &v)| c != i && v >= theta * max)
                .map(|(&c, _)| c)
                .collect()
        })
        .collect())
}

const UNDECIDED: u8 = 0;
const COARSE: u8 = 1;
const FINE: u8 = 2;

/// Ruge-Stueben C/F splitting.
fn rs_coarsen(s: &[Vec<usize>]) -> Vec<u8> {
    let n = s.len();
    let mut st: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, row) in s.iter().enumerate() {
        for &j in row {
            st[j].push(i);
        }
    }
    let mut state = vec![UNDECIDED; n];
    let mut lambda: Vec<usize> = st.iter().map(Vec::len).collect();
    let mut heap = BinaryHeap::with_capacity(n);
    for i in 0..n {
        if s[i].is_empty() && st[i].is_empty() {
            state[i] = FINE;
        } else {
            heap.push((lambda[i], Reverse(i)));
        }
    }
    while let Some((l, Reverse(i))) = heap.pop() {
        if state[i] != UNDECIDED || lambda[i] != l {
            continue;
        }
        state[i] = COARSE;
        for &j in &st[i] {
            if state[j] == UNDECIDED {
                state[j] = FINE;
                for &k in &s[j] {
                    if state[k] == UNDECIDED {
                        lambda[k] += 1;
                        heap.push((lambda[k], Reverse(k)));
                    }
                }
            }
        }
        for &k in &s[i] {
            if state[k] == UNDECIDED && lambda[k] > 0 {
                lambda[k] -= 1;
                heap.push((lambda[k], Reverse(k)));
            }
        }
    }
    second_pass(s, &mut state);
    state
}

/// Promote F points so that strongly connected F pairs share a strong C point.
fn second_pass(s: &[Vec<usize>], state: &mut [u8]) {
    let n = s.len();
    let mut marker = vec![usize::MAX; n];
    for i in 0..n {
        if state[i] != FINE {
            continue;
        }
        for &k in &s[i] {
            if state[k] == COARSE {
                marker[k] = i;
            }
        }
        for &j in &s[i] {
            if state[j] != FINE {
                continue;
            }
            let shared = s[j].iter().any(|&k| state[k] == COARSE && marker[k] == i);
            if !shared {
                state[j] = COARSE;
                marker[j] = i;
            }
        }
    }
}

/// Direct interpolation with separate scaling of negative and positive couplings.
fn direct_interpolation(a: &CsrMatrix, s: &[Vec<usize>], state: &[u8]) -> Result<CsrMatrix> {
    let n = a.n_rows();
    let mut coarse_index = vec![usize::MAX; n];
    let mut nc = 0;
    for i in 0..n {
        if state[i] == COARSE {
            coarse_index[i] = nc;
            nc += 1;
        }
    }
    let mut triplets = Vec::new();
    let mut strong_c = vec![false; n];
    for i in 0..n {
        if state[i] == COARSE {
            triplets.push((i, coarse_index[i], 1.0));
            continue;
        }
        let interp: Vec<usize> = s[i].iter().copied().filter(|&j| state[j] == COARSE).collect();
        if interp.is_empty() {
            continue;
        }
        for &j in &interp {
            strong_c[j] = true;
        }
        let (cols, vals) = a.row(i);
        let mut diag = 0.0;
        let (mut sum_neg, mut sum_pos, mut c_neg, mut c_pos) = (0.0, 0.0, 0.0, 0.0);
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i {
                diag = v;
                continue;
            }
            if v < 0.0 {
                sum_neg += v;
                if strong_c[j] {
                    c_neg += v;
                }
            } else {
                sum_pos += v;
                if strong_c[j] {
                    c_pos += v;
                }
            }
        }
        let sign = diag.signum();
        let (mut a_neg, mut a_pos) = (sum_neg, sum_pos);
        // Couplings of the same sign as the diagonal with no C partner are lumped.
        if sign > 0.0 && c_pos == 0.0 {
            diag += sum_pos;
            a_pos = 0.0;
        }
        if sign < 0.0 && c_neg == 0.0 {
            diag += sum_neg;
            a_neg = 0.0;
        }
        let alpha = if c_neg != 0.0 { a_neg / c_neg } else { 0.0 };
        let beta = if c_pos != 0.0 { a_pos / c_pos } else { 0.0 };
        if diag != 0.0 {
            for (&j, &v) in cols.iter().zip(vals) {
                if j != i && strong_c[j] {
                    let scale = if v < 0.0 { alpha } else { beta };
                    let w = -scale * v / diag;
                    if w != 0.0 {
                        triplets.push((i, coarse_index[j], w));
                    }
                }
            }
        }
        for &j in &interp {
            strong_c[j] = false;
        }
    }
    CsrMatrix::from_triplets(n, nc, &triplets)
}

fn smoother_diag(a: &CsrMatrix, cfg: &AmgConfig, diag: &[f64]) -> Vec<f64> {
    match cfg.smoother {
        Smoother::WeightedJacobi => diag.iter().map(|d| cfg.jacobi_weight / d).collect(),
        Smoother::L1Jacobi => (0..a.n_rows())
            .map(|i| {
                let (cols, vals) = a.row(i);
                let off: f64 = cols
                    .iter()
                    .zip(vals)
                    .filter(|(&c, _)| c != i)
                    .map(|(_, v)| v.abs())
                    .sum();
                1.0 / (diag[i] + diag[i].signum() * 0.5 * off)
            })
            .collect(),
        Smoother::HybridGaussSeidelL1 => diag.to_vec(),
    }
}

pub fn amg_setup(a: &CsrMatrix, cfg: &AmgConfig) -> Result<AmgHierarchy> {
    cfg.validate()?;
    if !a.is_square() {
        return Err(Error::usage("AMG needs a square matrix"));
    }
    let mut levels = Vec::new();
    let mut current = a.clone();
    loop {
        let diag = check_diagonal(&current)?;
        let n = current.n_rows();
        if levels.len() + 1 >= cfg.max_levels || n <= cfg.min_coarse_size {
            break;
        }
        let s = strength(&current, cfg.strength_threshold)?;
        let state = rs_coarsen(&s);
        let nc = state.iter().filter(|&&c| c == COARSE).count();
        if nc == 0 || nc >= n {
            break;
        }
        let p = direct_interpolation(&current, &s, &state)?;
        let r = p.transpose();
        let coarse = r.matmul(&current.matmul(&p)?)?;
        let sdiag = smoother_diag(&current, cfg, &diag);
        levels.push(AmgLevel {
            a: current,
            p,
            r,
            diag: sdiag,
        });
        current = coarse;
    }
    let coarse_solve = if current.n_rows() <= cfg.max_direct_size {
        CoarseSolve::Direct(LuFactors::factor_csr(&current)?)
    } else {
        let diag = check_diagonal(&current)?;
        CoarseSolve::Smooth {
            diag: smoother_diag(&current, cfg, &diag),
            sweeps: 4,
        }
    };
    Ok(AmgHierarchy {
        cfg: *cfg,
        levels,
        coarse: current,
        coarse_solve,
    })
}

fn residual(a: &CsrMatrix, x: &[f64], b: &[f64], r: &mut [f64]) {
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        let mut acc = b[i];
        for (&c, &v) in cols.iter().zip(vals) {
            acc -= v * x[c];
        }
        r[i] = acc;
    }
}

fn gauss_seidel(a: &CsrMatrix, diag: &[f64], x: &mut [f64], b: &[f64], forward: bool) {
    let n = a.n_rows();
    let mut sweep = |i: usize| {
        let (cols, vals) = a.row(i);
        let mut acc = b[i];
        for (&c, &v) in cols.iter().zip(vals) {
            if c != i {
                acc -= v * x[c];
            }
        }
        x[i] = acc / diag[i];
    };
    if forward {
        (0..n).for_each(&mut sweep);
    } else {
        (0..n).rev().for_each(&mut sweep);
    }
}

fn smooth(
    smoother: Smoother,
    a: &CsrMatrix,
    diag: &[f64],
    x: &mut [f64],
    b: &[f64],
    sweeps: usize,
    forward: bool,
) {
    let mut r = vec![0.0; x.len()];
    for _ in 0..sweeps {
        match smoother {
            Smoother::HybridGaussSeidelL1 => gauss_seidel(a, diag, x, b, forward),
            Smoother::WeightedJacobi | Smoother::L1Jacobi => {
                residual(a, x, b, &mut r);
                for i in 0..x.len() {
                    x[i] += diag[i] * r[i];
                }
            }
        }
    }
}

impl AmgHierarchy {
    pub fn n_levels(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn levels(&self) -> &[AmgLevel] {
        &self.levels
    }

    /// Operator on level `l`, `0` being the finest.
    pub fn operator(&self, l: usize) -> &CsrMatrix {
        if l < self.levels.len() {
            &self.levels[l].a
        } else {
            &self.coarse
        }
    }

    pub fn dim(&self) -> usize {
        self.operator(0).n_rows()
    }

    pub fn stats(&self) -> AmgStats {
        let levels: Vec<AmgLevelInfo> = (0..self.n_levels())
            .map(|l| AmgLevelInfo {
                rows: self.operator(l).n_rows(),
                nnz: self.operator(l).nnz(),
            })
            .collect();
        let rows0 = levels[0].rows.max(1) as f64;
        let nnz0 = levels[0].nnz.max(1) as f64;
        AmgStats {
            grid_complexity: levels.iter().map(|l| l.rows as f64).sum::<f64>() / rows0,
            operator_complexity: levels.iter().map(|l| l.nnz as f64).sum::<f64>() / nnz0,
            coarse_direct: matches!(self.coarse_solve, CoarseSolve::Direct(_)),
            levels,
        }
    }

    pub fn stats_json(&self) -> String {
        serde_json::to_string_pretty(&self.stats()).expect("stats serialize")
    }

    fn cycle(&self, l: usize, b: &[f64]) -> Vec<f64> {
        if l == self.levels.len() {
            return match &self.coarse_solve {
                CoarseSolve::Direct(lu) => lu.solve(b).expect("coarse dimension matches"),
                CoarseSolve::Smooth { diag, sweeps } => {
                    let mut x = vec![0.0; b.len()];
                    let sm = self.cfg.smoother;
                    smooth(sm, &self.coarse, diag, &mut x, b, *sweeps, true);
                    smooth(sm, &self.coarse, diag, &mut x, b, *sweeps, false);
                    x
                }
            };
        }
        let lev = &self.levels[l];
        let mut x = vec![0.0; b.len()];
        smooth(self.cfg.smoother, &lev.a, &lev.diag, &mut x, b, self.cfg.pre_sweeps, true);
        let mut r = vec![0.0; b.len()];
        residual(&lev.a, &x, b, &mut r);
        let rc = lev.r.spmv(&r).expect("restriction dimension");
        let ec = self.cycle(l + 1, &rc);
        let e = lev.p.spmv(&ec).expect("prolongation dimension");
        for (xi, ei) in x.iter_mut().zip(&e) {
            *xi += ei;
        }
        smooth(self.cfg.smoother, &lev.a, &lev.diag, &mut x, b, self.cfg.post_sweeps, false);
        x
    }
}

/// One V-cycle from a zero initial guess.
pub fn amg_apply(h: &AmgHierarchy, r: &[f64]) -> Result<Vec<f64>> {
    if r.len() != h.dim() {
        return Err(Error::dim(format!(
            "AMG of dimension {} applied to vector of length {}",
            h.dim(),
            r.len()
        )));
    }
    Ok(h.cycle(0, r))
}

impl Preconditioner for AmgHierarchy {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(&amg_apply(self, r)?);
        Ok(())
    }
}

impl Preconditioner for &AmgHierarchy {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(&amg_apply(self, r)?);
        Ok(())
    }
}
