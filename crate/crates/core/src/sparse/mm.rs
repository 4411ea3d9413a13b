//! Matrix Market coordinate format (`real general`, 1-based indices).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

pub fn to_matrix_market(a: &CsrMatrix) -> String {
    let mut out = String::with_capacity(32 * a.nnz() + 64);
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz()).unwrap();
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            writeln!(out, "{} {} {:e}", i + 1, c + 1, v).unwrap();
        }
    }
    out
}

pub fn from_matrix_market(text: &str) -> Result<CsrMatrix> {
    let mut lines = text.lines().enumerate();
    let parse_err = |line: usize, message: &str| Error::Parse {
        line: line + 1,
        column: 1,
        message: message.to_string(),
    };
    let (_, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
    let header_lc = header.trim().to_ascii_lowercase();
    if header_lc != HEADER.to_ascii_lowercase() {
        return Err(parse_err(0, "expected `%%MatrixMarket matrix coordinate real general`"));
    }
    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(ln, "size line needs `rows cols nnz`"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| parse_err(ln, "bad integer"));
                size = Some((p(fields[0])?, p(fields[1])?, p(fields[2])?));
                triplets.reserve(size.unwrap().2);
            }
            Some((rows, cols, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(ln, "entry line needs `row col value`"));
                }
                let i: usize = fields[0].parse().map_err(|_| parse_err(ln, "bad row index"))?;
                let j: usize = fields[1].parse().map_err(|_| parse_err(ln, "bad column index"))?;
                let v: f64 = fields[2].parse().map_err(|_| parse_err(ln, "bad value"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(ln, "index out of range"));
                }
                triplets.push((i - 1, j - 1, v));
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if triplets.len() != nnz {
        return Err(parse_err(1, "entry count does not match header"));
    }
    CsrMatrix::from_triplets(rows, cols, &triplets)
}

pub fn write_matrix_market(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_matrix_market(a)).map_err(|e| Error::io(path, e))
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_matrix_market(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_entries_exactly() {
        let a = CsrMatrix::from_triplets(3, 2, &[(0, 1, 0.1), (2, 0, -3.25e-17), (1, 1, 1.0 / 3.0)])
            .unwrap();
        let text = to_matrix_market(&a);
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n3 2 3\n"));
        assert_eq!(from_matrix_market(&text).unwrap(), a);
    }

    #[test]
    fn rejects_zero_based_index() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1.0\n";
        assert!(matches!(from_matrix_market(text), Err(Error::Parse { line: 3, .. })));
    }
}
