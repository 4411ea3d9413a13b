use crate::dg::DgSpace;
use crate::problem::Face;

/// Triplet accumulator for face bilinear forms evaluated by quadrature.
///
/// For each face quadrature point the caller returns `(c_jj, c_ja)` and the
/// form `c_jj [[u]][[v]] + c_ja [[u]]{v}` is integrated. Interior faces use
/// `[[u]] = u- - u+` and `{v} = (v- + v+) / 2`; boundary faces use
/// `[[u]] = u` and `{v} = v / 2`.
pub(crate) fn assemble_face_form(
    space: &DgSpace,
    faces: &[Face],
    triplets: &mut Vec<(usize, usize, f64)>,
    mut coef: impl FnMut(&Face, usize) -> (f64, f64),
) {
    let b = &space.basis;
    let n = space.n_local();
    for face in faces {
        let len = space.mesh.face_length(face.side);
        let opp = face.side.opposite();
        for (q, (&t, &w)) in b.quad_points.iter().zip(&b.quad_weights).enumerate() {
            let (c_jj, c_ja) = coef(face, q);
            if c_jj == 0.0 && c_ja == 0.0 {
                continue;
            }
            // (dof, jump factor, average factor) of every trace function.
            let mut traces: Vec<(usize, f64, f64)> = Vec::with_capacity(2 * n);
            let (xi, eta) = DgSpace::face_point(face.side, t);
            for (a, v) in space.eval(xi, eta).into_iter().enumerate() {
                if v != 0.0 {
                    traces.push((face.minus * n + a, v, 0.5 * v));
                }
            }
            if let Some(plus) = face.plus {
                let (xi, eta) = DgSpace::face_point(opp, t);
                for (a, v) in space.eval(xi, eta).into_iter().enumerate() {
                    if v != 0.0 {
                        traces.push((plus * n + a, -v, 0.5 * v));
                    }
                }
            }
            let wq = w * len;
            for &(i, jump_v, avg_v) in &traces {
                for &(j, jump_u, _) in &traces {
                    let val = wq * jump_u * (c_jj * jump_v + c_ja * avg_v);
                    if val != 0.0 {
                        triplets.push((i, j, val));
                    }
                }
            }
        }
    }
}
