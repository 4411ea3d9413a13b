use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dg::forms::assemble_face_form;
use crate::dg::TransportSystem;
use crate::error::{Error, Result};
use crate::problem::{partition_thick, Face};
use crate::quadrature::eddington_tensor;
use crate::sparse::{mm, CsrMatrix, DenseMatrix, LuFactors};

/// Multiplier `C` of the modified penalty constant `c(p) = C p (p + 1)`.
pub const MNIP_PENALTY_SCALE: f64 = 0.1;

pub fn mnip_penalty_constant(p: usize) -> f64 {
    MNIP_PENALTY_SCALE * (p * (p + 1)) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DsaKind {
    #[serde(rename = "SIP", alias = "sip")]
    Sip,
    #[serde(rename = "NIP", alias = "nip")]
    Nip,
    #[serde(rename = "mNIP", alias = "mnip")]
    Mnip,
}

impl DsaKind {
    pub fn label(self) -> &'static str {
        match self {
            DsaKind::Sip => "SIP",
            DsaKind::Nip => "NIP",
            DsaKind::Mnip => "mNIP",
        }
    }
}

impl std::fmt::Display for DsaKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DsaScope {
    Full,
    ThickOnly,
}

/// An assembled diffusion operator, possibly restricted to thick DOFs.
#[derive(Debug, Clone)]
pub struct DsaMatrix {
    pub kind: DsaKind,
    pub scope: DsaScope,
    pub matrix: CsrMatrix,
    /// Global DOF of each row; all DOFs for full scope.
    pub dofs: Vec<usize>,
    /// Elements in scope, ascending.
    pub elements: Vec<usize>,
}

impl DsaMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn write_matrix_market(&self, path: impl AsRef<Path>) -> Result<()> {
        mm::write_matrix_market(&self.matrix, path)
    }
}

fn normal_of(face: &Face) -> [f64; 3] {
    let n = face.normal();
    [n[0], n[1], 0.0]
}

/// `alpha(n) = (1 / 8 pi) sum_d w_d |Omega_d . n|`.
fn penalty_weight(sys: &TransportSystem, n: [f64; 3]) -> f64 {
    sys.quad
        .directions()
        .iter()
        .zip(sys.quad.weights())
        .map(|(o, w)| w * (o[0] * n[0] + o[1] * n[1]).abs())
        .sum::<f64>()
        / (8.0 * PI)
}

/// `F_0 = int alpha(n) [[u]][[v]]` with the angular sum done first.
pub fn penalty_matrix(sys: &TransportSystem) -> Result<CsrMatrix> {
    let faces = sys.space.mesh.faces();
    let mut t = Vec::new();
    assemble_face_form(&sys.space, &faces, &mut t, |f, _| (penalty_weight(sys, normal_of(f)), 0.0));
    CsrMatrix::from_triplets(sys.n_dofs(), sys.n_dofs(), &t)
}

/// `(1 / 4 pi) sum_d w_d F^(d)_jump`, accumulating one assembled matrix per ordinate.
pub fn penalty_matrix_by_ordinate(sys: &TransportSystem) -> Result<CsrMatrix> {
    let faces = sys.space.mesh.faces();
    let n = sys.n_dofs();
    let mut acc = CsrMatrix::zeros(n, n);
    for (o, &w) in sys.quad.directions().iter().zip(sys.quad.weights()) {
        let mut t = Vec::new();
        assemble_face_form(&sys.space, &faces, &mut t, |f, _| {
            let nn = f.normal();
            (0.5 * (o[0] * nn[0] + o[1] * nn[1]).abs(), 0.0)
        });
        let fd = CsrMatrix::from_triplets(n, n, &t)?;
        acc = acc.add_scaled(1.0, &fd, w / (4.0 * PI))?;
    }
    Ok(acc)
}

/// Modified penalty with per-ordinate upwind factor
/// `max(c(p) / (sigma_t^up h^up), 1)`, on faces touching `in_scope` elements.
fn modified_penalty_matrix(sys: &TransportSystem, in_scope: &[bool]) -> Result<CsrMatrix> {
    let mesh = &sys.space.mesh;
    let c = mnip_penalty_constant(sys.space.order());
    let faces: Vec<Face> = mesh
        .faces()
        .into_iter()
        .filter(|f| in_scope[f.minus] || f.plus.is_some_and(|p| in_scope[p]))
        .collect();
    let mut void = None;
    let mut t = Vec::new();
    assemble_face_form(&sys.space, &faces, &mut t, |f, _q| {
        let n = f.normal();
        let h = mesh.normal_extent(f.side);
        let mut acc = 0.0;
        for (o, &w) in sys.quad.directions().iter().zip(sys.quad.weights()) {
            let un = o[0] * n[0] + o[1] * n[1];
            let up = match f.plus {
                Some(p) if un < 0.0 => p,
                _ => f.minus,
            };
            let st = sys.field.sigma_t[up];
            if st == 0.0 {
                void.get_or_insert(up);
                continue;
            }
            acc += w * (c / (st * h)).max(1.0) * un.abs();
        }
        (acc / (8.0 * PI), 0.0)
    });
    if let Some(element) = void {
        return Err(Error::VoidInScope { element });
    }
    CsrMatrix::from_triplets(sys.n_dofs(), sys.n_dofs(), &t)
}

/// `F1_k = -int (I n)_k [[u]]{v}` for `k` in x, y.
fn lifting_matrices(sys: &TransportSystem) -> Result<[CsrMatrix; 2]> {
    let tensor = eddington_tensor(&sys.quad);
    let faces = sys.space.mesh.faces();
    let n = sys.n_dofs();
    let mut out = Vec::with_capacity(2);
    for k in 0..2 {
        let mut t = Vec::new();
        assemble_face_form(&sys.space, &faces, &mut t, |f, _| {
            let nn = normal_of(f);
            let tn: f64 = (0..3).map(|l| tensor[(k, l)] * nn[l]).sum();
            (0.0, -tn)
        });
        out.push(CsrMatrix::from_triplets(n, n, &t)?);
    }
    Ok([out.remove(0), out.remove(0)])
}

/// Block-diagonal `M(sigma_t)^{-1}` on in-scope elements, zero elsewhere.
fn inverse_total_mass(sys: &TransportSystem, in_scope: &[bool]) -> Result<CsrMatrix> {
    let inv = LuFactors::factor(sys.space.mass())?.inverse();
    let inv = {
        let mut s = inv.clone();
        s.add_scaled(1.0, &inv.transpose());
        s.scale(0.5)
    };
    let nl = sys.space.n_local();
    let blocks: Vec<DenseMatrix> = (0..sys.space.n_elements())
        .map(|e| {
            if in_scope[e] {
                inv.scale(1.0 / sys.field.sigma_t[e])
            } else {
                DenseMatrix::zeros(nl, nl)
            }
        })
        .collect();
    Ok(CsrMatrix::block_diagonal(&blocks))
}

/// Assemble the SIP, NIP or mNIP diffusion operator.
///
/// With `DsaScope::ThickOnly` only elements with `sigma_s >= eta` are kept
/// and the result is the principal submatrix on their DOFs.
pub fn assemble_dsa(
    sys: &TransportSystem,
    kind: DsaKind,
    scope: DsaScope,
    eta: f64,
) -> Result<DsaMatrix> {
    let ne = sys.space.n_elements();
    let nl = sys.space.n_local();
    let elements: Vec<usize> = match scope {
        DsaScope::Full => (0..ne).collect(),
        DsaScope::ThickOnly => partition_thick(&sys.field, eta, nl)?.thick_elements,
    };
    if let Some(&element) = elements.iter().find(|&&e| sys.field.sigma_t[e] == 0.0) {
        return Err(Error::VoidInScope { element });
    }
    let mut in_scope = vec![false; ne];
    for &e in &elements {
        in_scope[e] = true;
    }

    let grads: Vec<CsrMatrix> = (0..2)
        .map(|k| CsrMatrix::block_diagonal(&vec![sys.space.grad(k).clone(); ne]))
        .collect();
    let minv = inverse_total_mass(sys, &in_scope)?;
    let minv_g: Vec<CsrMatrix> = grads
        .iter()
        .map(|g| minv.matmul(g))
        .collect::<Result<_>>()?;
    let grads_t: Vec<CsrMatrix> = grads.iter().map(CsrMatrix::transpose).collect();
    let lift = lifting_matrices(sys)?;

    let mut d = match kind {
        DsaKind::Sip | DsaKind::Nip => penalty_matrix(sys)?,
        DsaKind::Mnip => modified_penalty_matrix(sys, &in_scope)?,
    };
    match kind {
        DsaKind::Nip | DsaKind::Mnip => {
            for k in 0..2 {
                d = d.add_scaled(1.0, &grads_t[k].matmul(&minv_g[k])?, 1.0 / 3.0)?;
            }
            for k in 0..2 {
                d = d.add(&lift[k].transpose().matmul(&minv_g[k])?)?;
            }
        }
        DsaKind::Sip => {
            let tensor = eddington_tensor(&sys.quad);
            for k in 0..2 {
                for l in 0..2 {
                    let c = tensor[(k, l)];
                    if c != 0.0 {
                        d = d.add_scaled(1.0, &grads_t[k].matmul(&minv_g[l])?, c)?;
                    }
                }
            }
            for k in 0..2 {
                let cross = lift[k].transpose().matmul(&minv_g[k])?;
                d = d.add(&cross)?;
                d = d.add(&grads_t[k].matmul(&minv.matmul(&lift[k])?)?)?;
            }
        }
    }
    d = d.add(&sys.mass_matrix(&sys.field.sigma_a))?;

    let dofs: Vec<usize> = elements.iter().flat_map(|&e| e * nl..(e + 1) * nl).collect();
    let matrix = match scope {
        DsaScope::Full => d,
        DsaScope::ThickOnly => d.extract_principal_submatrix(&dofs)?,
    };
    Ok(DsaMatrix {
        kind,
        scope,
        matrix,
        dofs,
        elements,
    })
}
