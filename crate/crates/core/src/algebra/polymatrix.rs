//! Matrices of polynomials and their minors.
//!
//! Determinants are computed by Laplace expansion along rows with a memo keyed on the
//! set of columns still available. When many minors share the same rows (the common
//! case here: all `s` rows, varying column sets) the memo is shared, so each
//! sub-determinant is computed once.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;

use super::matrix::RationalMatrix;
use super::poly::{MultiPoly, Vars};
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    vars: Vars,
    entries: Vec<MultiPoly>,
}

/// One minor: the rows and columns it uses and its determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: MultiPoly,
}

const MAX_COLS: usize = 64;

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, vars: &Vars) -> Self {
        PolyMatrix {
            rows,
            cols,
            vars: vars.clone(),
            entries: vec![MultiPoly::zero(vars); rows * cols],
        }
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        vars: &Vars,
        entries: Vec<MultiPoly>,
    ) -> Result<Self, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|p| p.vars() != vars) {
            return Err(AlgebraError::VariableMismatch(format!(
                "entry over {:?}, matrix over {:?}",
                bad.vars().names(),
                vars.names()
            )));
        }
        Ok(PolyMatrix {
            rows,
            cols,
            vars: vars.clone(),
            entries,
        })
    }

    pub fn from_rational(m: &RationalMatrix, vars: &Vars) -> Self {
        let entries = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .map(|(i, j)| MultiPoly::constant(vars, m.get(i, j).clone()))
            .collect();
        PolyMatrix {
            rows: m.rows(),
            cols: m.cols(),
            vars: vars.clone(),
            entries,
        }
    }

    pub fn identity(n: usize, vars: &Vars) -> Self {
        PolyMatrix::from_rational(&RationalMatrix::identity(n), vars)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: MultiPoly) {
        assert_eq!(
            p.vars(),
            &self.vars,
            "entry variables must match the matrix"
        );
        self.entries[i * self.cols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MultiPoly::is_zero)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        PolyMatrix {
            rows: rows.len(),
            cols: cols.len(),
            vars: self.vars.clone(),
            entries,
        }
    }

    pub fn remove_col(&self, col: usize) -> PolyMatrix {
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != col).collect();
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), &cols)
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &PolyMatrix) -> Result<PolyMatrix, AlgebraError> {
        if self.cols != below.cols || self.vars != below.vars {
            return Err(AlgebraError::Dimension(format!(
                "cannot stack {}x{} over {}x{}",
                self.rows, self.cols, below.rows, below.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend(below.entries.iter().cloned());
        Ok(PolyMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            vars: self.vars.clone(),
            entries,
        })
    }

    /// Multiplies column `j` by `factors[j]`.
    pub fn scale_columns(&self, factors: &[MultiPoly]) -> PolyMatrix {
        assert_eq!(factors.len(), self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            for (j, f) in factors.iter().enumerate() {
                out.entries[i * self.cols + j] = self.get(i, j) * f;
            }
        }
        out
    }

    /// Applies `f` to every entry, e.g. substitution into another variable list.
    pub fn map(&self, vars: &Vars, f: impl Fn(&MultiPoly) -> MultiPoly) -> PolyMatrix {
        let entries: Vec<MultiPoly> = self.entries.iter().map(f).collect();
        PolyMatrix::from_entries(self.rows, self.cols, vars, entries)
            .expect("mapped entries share the target variables")
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[crate::algebra::Rational]) -> RationalMatrix {
        let data = self.entries.iter().map(|p| p.eval(point)).collect();
        RationalMatrix::from_vec(self.rows, self.cols, data).expect("same shape")
    }

    pub fn det(&self) -> Result<MultiPoly, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::Dimension(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.cols > MAX_COLS {
            return Err(AlgebraError::TooLarge(self.cols));
        }
        let rows: Vec<usize> = (0..self.rows).collect();
        let mut cache = LaplaceCache::new(self, rows);
        let all: u64 = if self.cols == 64 {
            u64::MAX
        } else {
            (1u64 << self.cols) - 1
        };
        Ok(cache.det(all))
    }

    /// All `size`-minors whose columns avoid `excluded_cols`, ordered lexicographically by
    /// column set (and then by row set when `size < rows`).
    pub fn minors(&self, size: usize, excluded_cols: &[usize]) -> Result<Vec<Minor>, AlgebraError> {
        let mut out = Vec::new();
        self.for_each_minor(size, excluded_cols, |m| {
            out.push(m);
            true
        })?;
        Ok(out)
    }

    /// First minor (in [`PolyMatrix::minors`] order) satisfying `pred`, computing no more
    /// determinants than necessary.
    pub fn find_minor(
        &self,
        size: usize,
        excluded_cols: &[usize],
        pred: impl Fn(&MultiPoly) -> bool,
    ) -> Result<Option<Minor>, AlgebraError> {
        let mut found = None;
        self.for_each_minor(size, excluded_cols, |m| {
            if pred(&m.value) {
                found = Some(m);
                false
            } else {
                true
            }
        })?;
        Ok(found)
    }

    fn for_each_minor(
        &self,
        size: usize,
        excluded_cols: &[usize],
        mut visit: impl FnMut(Minor) -> bool,
    ) -> Result<(), AlgebraError> {
        let avail: Vec<usize> = (0..self.cols)
            .filter(|j| !excluded_cols.contains(j))
            .collect();
        if size > self.rows || size > avail.len() {
            return Err(AlgebraError::Dimension(format!(
                "no {size}x{size} minors in a {}x{} matrix with {} usable columns",
                self.rows,
                self.cols,
                avail.len()
            )));
        }
        if self.cols > MAX_COLS {
            return Err(AlgebraError::TooLarge(self.cols));
        }
        let row_sets: Vec<Vec<usize>> = (0..self.rows).combinations(size).collect();
        let mut caches: Vec<LaplaceCache> = row_sets
            .iter()
            .map(|rs| LaplaceCache::new(self, rs.clone()))
            .collect();
        for cols in avail.iter().copied().combinations(size) {
            let mask = cols.iter().fold(0u64, |m, &j| m | (1 << j));
            for (rs, cache) in row_sets.iter().zip(caches.iter_mut()) {
                let value = cache.det(mask);
                let keep_going = visit(Minor {
                    rows: rs.clone(),
                    cols: cols.clone(),
                    value,
                });
                if !keep_going {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

struct LaplaceCache<'a> {
    m: &'a PolyMatrix,
    rows: Vec<usize>,
    memo: HashMap<u64, MultiPoly>,
}

impl<'a> LaplaceCache<'a> {
    fn new(m: &'a PolyMatrix, rows: Vec<usize>) -> Self {
        LaplaceCache {
            m,
            rows,
            memo: HashMap::new(),
        }
    }

    /// Determinant of the submatrix on the last `popcount(mask)` rows of `self.rows` and
    /// the columns in `mask`.
    fn det(&mut self, mask: u64) -> MultiPoly {
        let k = mask.count_ones() as usize;
        if k == 0 {
            return MultiPoly::one(&self.m.vars);
        }
        if let Some(p) = self.memo.get(&mask) {
            return p.clone();
        }
        let row = self.rows[self.rows.len() - k];
        let mut acc = MultiPoly::zero(&self.m.vars);
        let mut bits = mask;
        let mut position = 0;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let entry = self.m.get(row, j);
            if !entry.is_zero() {
                let sub = self.det(mask & !(1u64 << j));
                if !sub.is_zero() {
                    let term = entry * &sub;
                    acc = if position % 2 == 0 {
                        &acc + &term
                    } else {
                        &acc - &term
                    };
                }
            }
            position += 1;
        }
        self.memo.insert(mask, acc.clone());
        acc
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[{}]", line.join("  "))?;
        }
        Ok(())
    }
}
