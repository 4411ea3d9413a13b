//! Restarted GMRES with right preconditioning, including the flexible
//! variant (FGMRES) that stores one preconditioned vector per iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Action of a square linear operator.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

/// Action of a (possibly iteration-dependent) preconditioner `z = M^{-1} r`.
pub trait Preconditioner {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()>;
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.spmv_into(x, y)
    }
}

/// The identity preconditioner.
pub struct NoPreconditioner;

impl Preconditioner for NoPreconditioner {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(r);
        Ok(())
    }
}

/// Adapts a closure into a [`LinearOperator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()>,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> LinearOperator for FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        (self.f)(x, y)
    }
}

/// Adapts a closure into a [`Preconditioner`].
pub struct FnPreconditioner<F>(pub F);

impl<F> Preconditioner for FnPreconditioner<F>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()> {
        (self.0)(r, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KrylovConfig {
    pub restart: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub flexible: bool,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            restart: 30,
            max_iters: 500,
            rel_tol: 1e-12,
            abs_tol: 0.0,
            flexible: true,
        }
    }
}

impl KrylovConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restart == 0 {
            return Err(Error::usage("restart must be at least 1"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::usage("rel_tol must be positive"));
        }
        if self.abs_tol < 0.0 {
            return Err(Error::usage("abs_tol must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    MaxIterations,
    /// Arnoldi produced a zero vector while the residual was still nonzero.
    Breakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_rel_residual: f64,
    pub converged: bool,
    /// Residual 2-norms, entry 0 is `||b||`.
    pub residual_history: Vec<f64>,
    pub stop_reason: StopReason,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Solve `A x = b` from a zero initial guess.
///
/// With `cfg.flexible` the preconditioned basis `Z` is stored and the update
/// is `x += Z y`; otherwise the update is `x += M^{-1} (V y)`, which requires
/// a fixed preconditioner. The reported residual is the true residual
/// `||b - A x||` at every restart boundary and the Arnoldi estimate in between.
pub fn gmres(
    a: &dyn LinearOperator,
    m: Option<&mut dyn Preconditioner>,
    b: &[f64],
    cfg: &KrylovConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    cfg.validate()?;
    let n = a.dim();
    if b.len() != n {
        return Err(Error::dim(format!(
            "gmres with operator of dimension {n} and rhs of length {}",
            b.len()
        )));
    }
    let mut identity = NoPreconditioner;
    let m: &mut dyn Preconditioner = match m {
        Some(m) => m,
        None => &mut identity,
    };

    let mut x = vec![0.0; n];
    let b_norm = norm(b);
    let mut history = vec![b_norm];
    if !b_norm.is_finite() {
        return Err(Error::NonFinite { iteration: 0 });
    }
    let target = (cfg.rel_tol * b_norm).max(cfg.abs_tol);
    let report = |history: Vec<f64>, iterations: usize, stop: StopReason| {
        let last = *history.last().unwrap();
        SolveReport {
            iterations,
            final_rel_residual: if b_norm > 0.0 { last / b_norm } else { 0.0 },
            converged: stop == StopReason::Converged,
            residual_history: history,
            stop_reason: stop,
        }
    };
    if b_norm <= target || b_norm == 0.0 {
        return Ok((x, report(history, 0, StopReason::Converged)));
    }

    let restart = cfg.restart.min(n.max(1));
    let mut r = b.to_vec();
    let mut beta = b_norm;
    let mut iterations = 0usize;
    let mut av = vec![0.0; n];

    let mut v: Vec<Vec<f64>> = Vec::with_capacity(restart + 1);
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(restart);
    let mut h = vec![vec![0.0; restart]; restart + 1];
    let mut cs = vec![0.0; restart];
    let mut sn = vec![0.0; restart];
    let mut g = vec![0.0; restart + 1];

    loop {
        v.clear();
        z.clear();
        v.push(r.iter().map(|ri| ri / beta).collect());
        g.iter_mut().for_each(|gi| *gi = 0.0);
        g[0] = beta;
        let mut k = 0usize;
        let mut broke_down = false;

        while k < restart && iterations < cfg.max_iters {
            let mut zk = vec![0.0; n];
            m.apply(&v[k], &mut zk)?;
            a.apply(&zk, &mut av)?;
            if cfg.flexible {
                z.push(zk);
            }
            let mut w = av.clone();
            // Modified Gram-Schmidt.
            for i in 0..=k {
                let hik = dot(&w, &v[i]);
                h[i][k] = hik;
                axpy(-hik, &v[i], &mut w);
            }
            let w_norm = norm(&w);
            h[k + 1][k] = w_norm;

            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                broke_down = true;
                break;
            }
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];

            iterations += 1;
            let est = g[k + 1].abs();
            if !est.is_finite() {
                return Err(Error::NonFinite { iteration: iterations });
            }
            history.push(est);
            k += 1;

            if est <= target {
                break;
            }
            if w_norm <= 1e-14 * denom.max(f64::MIN_POSITIVE) {
                // Invariant subspace found; the update below is exact in it.
                broke_down = true;
                break;
            }
            v.push(w.iter().map(|wi| wi / w_norm).collect());
        }

        if k > 0 {
            // Back substitution for the least-squares coefficients.
            let mut y = vec![0.0; k];
            for i in (0..k).rev() {
                let mut acc = g[i];
                for j in i + 1..k {
                    acc -= h[i][j] * y[j];
                }
                y[i] = acc / h[i][i];
            }
            if cfg.flexible {
                for (j, yj) in y.iter().enumerate() {
                    axpy(*yj, &z[j], &mut x);
                }
            } else {
                let mut vy = vec![0.0; n];
                for (j, yj) in y.iter().enumerate() {
                    axpy(*yj, &v[j], &mut vy);
                }
                let mut dx = vec![0.0; n];
                m.apply(&vy, &mut dx)?;
                axpy(1.0, &dx, &mut x);
            }
        }

        a.apply(&x, &mut av)?;
        for i in 0..n {
            r[i] = b[i] - av[i];
        }
        beta = norm(&r);
        if !beta.is_finite() {
            return Err(Error::NonFinite { iteration: iterations });
        }
        if k > 0 {
            *history.last_mut().unwrap() = beta;
        }

        if beta <= target {
            return Ok((x, report(history, iterations, StopReason::Converged)));
        }
        if broke_down {
            return Ok((x, report(history, iterations, StopReason::Breakdown)));
        }
        if iterations >= cfg.max_iters {
            return Ok((x, report(history, iterations, StopReason::MaxIterations)));
        }
    }
}
