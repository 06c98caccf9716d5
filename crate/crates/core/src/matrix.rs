//! Dense nonnegative integer matrices with checked arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {left_rows}x{left_cols} times {right_rows}x{right_cols}")]
    Dimension {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("integer overflow in matrix arithmetic")]
    Overflow,
    #[error("matrix is not square")]
    NotSquare,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Row-major matrix over ℕ.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>", into = "Vec<Vec<u64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.data.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| format!("{x:>width$}")).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<u64>>> for IntMatrix {
    type Error = String;

    fn try_from(rows: Vec<Vec<u64>>) -> Result<Self, String> {
        IntMatrix::from_rows(&rows).ok_or_else(|| "ragged matrix rows".to_owned())
    }
}

impl From<IntMatrix> for Vec<Vec<u64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Returns `None` for ragged input. An empty slice gives the 0×0 matrix.
    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R]) -> Option<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.as_ref().len() != cols {
                return None;
            }
            data.extend_from_slice(r.as_ref());
        }
        Some(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u64>) -> Option<Self> {
        (data.len() == rows * cols).then_some(IntMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_entry(&self) -> u64 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Dimension {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.checked_mul(other.get(k, j)).ok_or(MatrixError::Overflow)?;
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].checked_add(t).ok_or(MatrixError::Overflow)?;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_pow(&self, mut e: u32) -> Result<IntMatrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare);
        }
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `P A Pᵀ` for the permutation sending index `i` to `perm[i]`, so that
    /// `result[perm[i]][perm[j]] = self[i][j]`.
    pub fn permute(&self, perm: &[usize]) -> IntMatrix {
        assert!(self.is_square() && perm.len() == self.rows);
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }

    /// Parses the text format: first line `n`, then `n` rows of `n`
    /// whitespace-separated entries. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<IntMatrix, MatrixError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, first) = lines
            .next()
            .ok_or(MatrixError::Parse { line: 1, msg: "missing dimension line".into() })?;
        let n: usize = first
            .parse()
            .map_err(|_| MatrixError::Parse { line, msg: format!("bad dimension {first:?}") })?;
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, l) = lines
                .next()
                .ok_or(MatrixError::Parse { line: line + 1, msg: "too few rows".into() })?;
            let row = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| MatrixError::Parse { line, msg: format!("bad entry {t:?}") })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != n {
                return Err(MatrixError::Parse {
                    line,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if let Some((line, _)) = lines.next() {
            return Err(MatrixError::Parse { line, msg: "trailing data".into() });
        }
        Ok(IntMatrix::from_rows(&rows).expect("rows checked"))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.rows);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(u64::to_string).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn product_and_power() {
        let a = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(a.checked_pow(3).unwrap(), m(&[&[1, 3], &[0, 1]]));
        assert_eq!(a.checked_pow(0).unwrap(), IntMatrix::identity(2));
        let r = m(&[&[1, 0, 2]]);
        let s = m(&[&[1], &[1], &[1]]);
        assert_eq!(r.checked_mul(&s).unwrap(), m(&[&[3]]));
        assert!(matches!(s.checked_mul(&s), Err(MatrixError::Dimension { .. })));
    }

    #[test]
    fn overflow_is_reported() {
        let a = m(&[&[u64::MAX / 2 + 1]]);
        assert_eq!(a.checked_pow(2), Err(MatrixError::Overflow));
    }

    #[test]
    fn permute_moves_entries() {
        let a = m(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.permute(&[1, 0]), m(&[&[4, 3], &[2, 1]]));
    }

    #[test]
    fn text_round_trip() {
        let a = m(&[&[1, 2], &[0, 7]]);
        assert_eq!(IntMatrix::parse(&a.to_text()).unwrap(), a);
        assert_eq!(IntMatrix::parse("# c\n1\n\n5\n").unwrap(), m(&[&[5]]));
        match IntMatrix::parse("2\n1 2\n3\n") {
            Err(MatrixError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_shape() {
        let a = m(&[&[1, 2], &[0, 7]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[1,2],[0,7]]");
        assert_eq!(serde_json::from_str::<IntMatrix>(&s).unwrap(), a);
        assert!(serde_json::from_str::<IntMatrix>("[[1],[1,2]]").is_err());
    }
}
