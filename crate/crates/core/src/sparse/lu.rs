use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, DenseMatrix};

/// LU factors with partial pivoting, `P A = L U`, stored in place.
///
/// Elimination skips exact zeros, so banded matrices (DG operators in
/// lexicographic element order) factor in roughly `n * bw^2` work.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

impl LuFactors {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if a.n_rows() != a.n_cols() {
            return Err(Error::usage("LU of a non-square matrix"));
        }
        Self::factor_row_major(a.n_rows(), a.values().to_vec())
    }

    pub fn factor_csr(a: &CsrMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::usage("LU of a non-square matrix"));
        }
        let n = a.n_rows();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                values[i * n + c] = v;
            }
        }
        Self::factor_row_major(n, values)
    }

    fn factor_row_major(n: usize, mut lu: Vec<f64>) -> Result<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        // last_nz[i]: one past the last structurally nonzero column of row i.
        let mut last_nz: Vec<usize> = (0..n)
            .map(|i| {
                lu[i * n..(i + 1) * n]
                    .iter()
                    .rposition(|&v| v != 0.0)
                    .map_or(0, |c| c + 1)
            })
            .collect();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;

        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for i in k + 1..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularMatrix { column: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                last_nz.swap(k, p);
            }
            min_pivot = min_pivot.min(best);
            max_pivot = max_pivot.max(best);

            let pivot = lu[k * n + k];
            let end = last_nz[k];
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            for i in k + 1..n {
                let row = &mut tail[(i - k - 1) * n..(i - k) * n];
                if row[k] == 0.0 {
                    continue;
                }
                let l = row[k] / pivot;
                row[k] = l;
                for j in k + 1..end {
                    row[j] -= l * pivot_row[j];
                }
                last_nz[i] = last_nz[i].max(end);
            }
        }
        Ok(Self {
            n,
            lu,
            perm,
            min_pivot: if n == 0 { 1.0 } else { min_pivot },
            max_pivot: if n == 0 { 1.0 } else { max_pivot },
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Ratio of smallest to largest pivot magnitude; a cheap singularity hint.
    pub fn pivot_ratio(&self) -> f64 {
        self.min_pivot / self.max_pivot
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        let n = self.n;
        if x.len() != n {
            return Err(Error::dim(format!(
                "LU solve of dimension {n} with rhs of length {}",
                x.len()
            )));
        }
        let b: Vec<f64> = self.perm.iter().map(|&p| x[p]).collect();
        x.copy_from_slice(&b);
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let mut acc = x[i];
            for (j, &l) in row.iter().enumerate() {
                acc -= l * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= row[j] * x[j];
            }
            x[i] = acc / row[i];
        }
        Ok(())
    }

    /// Explicit inverse, column by column.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.n;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            self.solve_in_place(&mut e).expect("dimension matches");
            for i in 0..n {
                inv[(i, j)] = e[i];
            }
        }
        inv
    }
}

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors> {
    LuFactors::factor(a)
}

pub fn lu_solve(f: &LuFactors, b: &[f64]) -> Result<Vec<f64>> {
    f.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_solve() {
        let f = lu_factor(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(lu_solve(&f, &[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn diagonal_solve() {
        let a = DenseMatrix::from_row_major(2, 2, vec![2.0, 0.0, 0.0, 3.0]).unwrap();
        let x = lu_solve(&lu_factor(&a).unwrap(), &[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
    }

    fn binom(n: i64, k: i64) -> f64 {
        if k < 0 || k > n {
            return 0.0;
        }
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn hilbert_inverse_matches_exact_rational_inverse() {
        let n = 6usize;
        let h = DenseMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64);
        let inv = lu_factor(&h).unwrap().inverse();
        let nn = n as i64;
        for i in 1..=nn {
            for j in 1..=nn {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let exact = sign
                    * (i + j - 1) as f64
                    * binom(nn + i - 1, nn - j)
                    * binom(nn + j - 1, nn - i)
                    * binom(i + j - 2, i - 1).powi(2);
                let got = inv[(i as usize - 1, j as usize - 1)];
                assert!(
                    ((got - exact) / exact).abs() < 1e-6,
                    "({i},{j}): {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn zero_pivot_column_is_singular() {
        let a = DenseMatrix::from_row_major(3, 3, vec![1.0, 0.0, 2.0, 3.0, 0.0, 1.0, 0.0, 0.0, 4.0])
            .unwrap();
        assert!(matches!(lu_factor(&a), Err(Error::SingularMatrix { column: 1 })));
    }

    #[test]
    fn csr_and_dense_factor_agree() {
        let a = DenseMatrix::from_fn(5, 5, |i, j| if i == j { 4.0 } else if i.abs_diff(j) == 1 { -1.0 } else { 0.0 });
        let s = CsrMatrix::from_triplets(
            5,
            5,
            &(0..5)
                .flat_map(|i| (0..5).map(move |j| (i, j)))
                .filter(|&(i, j)| a[(i, j)] != 0.0)
                .map(|(i, j)| (i, j, a[(i, j)]))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let b = [1.0, 0.0, -2.0, 3.0, 0.5];
        let x1 = lu_factor(&a).unwrap().solve(&b).unwrap();
        let x2 = LuFactors::factor_csr(&s).unwrap().solve(&b).unwrap();
        assert_eq!(x1, x2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn right_inverse_on_random_well_conditioned(seed in 0u64..10_000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 50;
            // Diagonally dominated random matrix keeps the condition number modest.
            let mut a = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = rng.gen_range(-1.0..1.0) + if i == j { n as f64 * 0.5 } else { 0.0 };
                }
            }
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = lu_solve(&lu_factor(&a).unwrap(), &b).unwrap();
            let r: Vec<f64> = a.matvec(&x).unwrap().iter().zip(&b).map(|(p, q)| p - q).collect();
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(rn < 1e-10 * bn);
        }
    }
}
