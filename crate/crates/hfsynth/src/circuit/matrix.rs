use std::fmt;

use crate::error::{Error, Result};
use crate::kleene::Trit;

/// Dense row-major ternary matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TernaryMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Trit>,
}

impl TernaryMatrix {
    pub fn filled(rows: usize, cols: usize, value: Trit) -> TernaryMatrix {
        TernaryMatrix {
            rows,
            cols,
            entries: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Trit>>) -> Result<TernaryMatrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::WidthMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(TernaryMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_bools(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> TernaryMatrix {
        let mut m = TernaryMatrix::filled(rows, cols, Trit::Zero);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, Trit::from_bool(f(r, c)));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Trit {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Trit) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Trit] {
        &self.entries
    }

    pub fn is_stable(&self) -> bool {
        self.entries.iter().all(|t| t.is_stable())
    }

    /// Replaces every u entry by `b`.
    pub fn project(&self, b: bool) -> TernaryMatrix {
        let fill = Trit::from_bool(b);
        TernaryMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|&t| if t == Trit::U { fill } else { t })
                .collect(),
        }
    }

    /// Entry-wise star with a matrix of equal shape.
    pub fn star(&self, other: &TernaryMatrix) -> Result<TernaryMatrix> {
        self.same_shape(other)?;
        Ok(TernaryMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a.star(b))
                .collect(),
        })
    }

    fn same_shape(&self, other: &TernaryMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::WidthMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(())
    }
}

impl fmt::Display for TernaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Exact product over the Boolean semiring; both operands must be stable.
pub fn bool_matmul(a: &TernaryMatrix, b: &TernaryMatrix) -> Result<TernaryMatrix> {
    if a.cols != b.rows {
        return Err(Error::WidthMismatch {
            expected: a.cols,
            got: b.rows,
        });
    }
    if !a.is_stable() || !b.is_stable() {
        return Err(Error::InvalidParameters("boolean product of a ternary matrix".into()));
    }
    Ok(TernaryMatrix::from_bools(a.rows, b.cols, |r, c| {
        (0..a.cols).any(|m| a.get(r, m) == Trit::One && b.get(m, c) == Trit::One)
    }))
}
