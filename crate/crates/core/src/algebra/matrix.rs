//! Dense matrices over ℚ.
//!
//! Rank and kernels go through a fraction-free (Bareiss) echelon form: each row is first
//! scaled to integers, then eliminated with exact integer divisions by the previous
//! pivot, so intermediate entries stay bounded by minors of the input.

use std::fmt;

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Zero};

use super::rational::{canonical_vector, denominator_lcm, fmt_rational, int, Rational};
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, AlgebraError> {
        if data.len() != rows * cols {
            return Err(AlgebraError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, data })
    }

    /// Builds from row vectors. All rows must have the same length; `cols` is needed so
    /// that a matrix with zero rows still has a width.
    pub fn from_rows(cols: usize, rows: &[Vec<Rational>]) -> Result<Self, AlgebraError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(AlgebraError::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().cloned());
        }
        Ok(RationalMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Convenience constructor for integer literals. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rs: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        RationalMatrix::from_rows(cols, &rs).expect("ragged integer matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_integer(&self) -> bool {
        self.data.iter().all(|q| q.is_integer())
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut t = RationalMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix, AlgebraError> {
        if self.cols != rhs.rows {
            return Err(AlgebraError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, AlgebraError> {
        if v.len() != self.cols {
            return Err(AlgebraError::Dimension(format!(
                "vector of length {} for a matrix with {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn select_rows(&self, idx: &[usize]) -> RationalMatrix {
        let rows: Vec<Vec<Rational>> = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        RationalMatrix::from_rows(self.cols, &rows).expect("rows of one matrix")
    }

    pub fn select_cols(&self, idx: &[usize]) -> RationalMatrix {
        let rows: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| idx.iter().map(|&j| self.get(i, j).clone()).collect())
            .collect();
        RationalMatrix::from_rows(idx.len(), &rows).expect("columns of one matrix")
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &RationalMatrix) -> Result<RationalMatrix, AlgebraError> {
        if self.cols != below.cols {
            return Err(AlgebraError::Dimension(format!(
                "cannot stack {} columns over {}",
                self.cols, below.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(below.data.iter().cloned());
        Ok(RationalMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn rank(&self) -> usize {
        echelon(self).pivots.len()
    }

    /// Exact determinant of a square matrix.
    pub fn det(&self) -> Result<Rational, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::Dimension(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rows == 0 {
            return Ok(Rational::one());
        }
        let e = echelon(self);
        if e.pivots.len() < self.rows {
            return Ok(Rational::zero());
        }
        // The last Bareiss pivot is the determinant of the row-scaled, row-permuted input.
        let last = e.rows[self.rows - 1][self.cols - 1].clone();
        let mut d = Rational::new(last, e.row_scale_product);
        if e.swaps % 2 == 1 {
            d = -d;
        }
        Ok(d)
    }

    /// Canonical basis of `{v : self * v = 0}`: one vector per free column of the
    /// reduced echelon form, in increasing column order, each scaled to a primitive
    /// integer vector whose first nonzero entry is positive.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let e = echelon(self);
        let pivot_cols: Vec<usize> = e.pivots.iter().map(|&(_, c)| c).collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut x = vec![Rational::zero(); self.cols];
            x[f] = Rational::one();
            for (k, &(row, pc)) in e.pivots.iter().enumerate().rev() {
                let r = &e.rows[row];
                let mut acc = Rational::zero();
                for j in pc + 1..self.cols {
                    if !r[j].is_zero() && !x[j].is_zero() {
                        acc += &x[j] * Rational::from_integer(r[j].clone());
                    }
                }
                debug_assert_eq!(row, k);
                x[pc] = -acc / Rational::from_integer(r[pc].clone());
            }
            basis.push(canonical_vector(&x));
        }
        basis
    }

    /// Canonical basis of `{w : w * self = 0}`.
    pub fn left_kernel_basis(&self) -> Vec<Vec<Rational>> {
        self.transpose().kernel_basis()
    }

    /// Greedy top-down choice of a maximal set of independent rows; returns their indices
    /// and the corresponding submatrix.
    pub fn select_independent_rows(&self) -> (Vec<usize>, RationalMatrix) {
        let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
        let mut chosen = Vec::new();
        for i in 0..self.rows {
            let mut r = self.row(i).to_vec();
            for (pc, b) in &basis {
                if r[*pc].is_zero() {
                    continue;
                }
                let f = r[*pc].clone() / &b[*pc];
                for (x, y) in r.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
            if let Some(pc) = r.iter().position(|x| !x.is_zero()) {
                basis.push((pc, r));
                chosen.push(i);
            }
        }
        let sub = self.select_rows(&chosen);
        (chosen, sub)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(fmt_rational).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

struct Echelon {
    /// Integer rows after fraction-free elimination; pivot rows come first.
    rows: Vec<Vec<BigInt>>,
    /// `(row, column)` of each pivot, in order.
    pivots: Vec<(usize, usize)>,
    swaps: usize,
    /// Product of the integer factors used to clear denominators row by row.
    row_scale_product: BigInt,
}

fn echelon(m: &RationalMatrix) -> Echelon {
    let mut scale_product = BigInt::one();
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| {
            let l = denominator_lcm(m.row(i));
            scale_product *= &l;
            m.row(i).iter().map(|q| (q * &l).to_integer()).collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            rows.swap(p, r);
            swaps += 1;
        }
        let pivot = rows[r][c].clone();
        for i in r + 1..m.rows {
            let lead = rows[i][c].clone();
            for j in c + 1..m.cols {
                let v = &pivot * &rows[i][j] - &lead * &rows[r][j];
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                rows[i][j] = q;
            }
            rows[i][c] = BigInt::zero();
        }
        // Rows above the pivot row that were skipped are untouched; the identity keeps
        // each later entry equal to a minor of the scaled input.
        pivots.push((r, c));
        prev = pivot;
        r += 1;
    }
    Echelon {
        rows,
        pivots,
        swaps,
        row_scale_product: scale_product,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use proptest::prelude::*;

    /// Plain Gauss-Jordan over ℚ, used as an independent reference.
    fn naive_rank(m: &RationalMatrix) -> usize {
        let mut a = m.row_vecs();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for i in 0..a.len() {
                if i != rank && !a[i][c].is_zero() {
                    let f = a[i][c].clone() / &a[rank][c];
                    let pr = a[rank].clone();
                    for (x, y) in a[i].iter_mut().zip(&pr) {
                        *x -= &f * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn naive_det(m: &RationalMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return Rational::one();
        }
        let mut total = Rational::zero();
        for j in 0..n {
            if m.get(0, j).is_zero() {
                continue;
            }
            let rest: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = m
                .select_rows(&(1..n).collect::<Vec<_>>())
                .select_cols(&rest);
            let t = m.get(0, j) * naive_det(&minor);
            if j % 2 == 0 {
                total += t;
            } else {
                total -= t;
            }
        }
        total
    }

    #[test]
    fn rank_examples() {
        assert_eq!(
            RationalMatrix::from_i64(&[&[1, -2, 1], &[-1, 2, -1]]).rank(),
            1
        );
        assert_eq!(RationalMatrix::identity(3).rank(), 3);
        assert_eq!(
            RationalMatrix::from_i64(&[&[-1, 1, 1, 0], &[0, 0, 1, -1]]).rank(),
            2
        );
        assert_eq!(RationalMatrix::zeros(2, 3).rank(), 0);
    }

    #[test]
    fn kernel_of_single_row() {
        let n = RationalMatrix::from_i64(&[&[1, -2, 1]]);
        let k = n.kernel_basis();
        assert_eq!(
            k,
            vec![vec![int(2), int(1), int(0)], vec![int(1), int(0), int(-1)]]
        );
        assert!(RationalMatrix::identity(4).kernel_basis().is_empty());
    }

    #[test]
    fn left_kernel_of_conservative_pair() {
        let g = RationalMatrix::from_i64(&[&[-1, 1], &[1, -1]]);
        assert_eq!(g.left_kernel_basis(), vec![vec![int(1), int(1)]]);
        let full = RationalMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert!(full.left_kernel_basis().is_empty());
    }

    #[test]
    fn independent_rows_greedy() {
        let g = RationalMatrix::from_i64(&[&[1, -2, 1], &[-1, 2, -1]]);
        let (idx, n) = g.select_independent_rows();
        assert_eq!(idx, vec![0]);
        assert_eq!(n, RationalMatrix::from_i64(&[&[1, -2, 1]]));
        let (idx, _) = RationalMatrix::identity(3).select_independent_rows();
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn determinant_with_fractions() {
        let m =
            RationalMatrix::from_rows(2, &[vec![rat(1, 2), rat(1, 3)], vec![rat(2, 5), int(7)]])
                .unwrap();
        assert_eq!(m.det().unwrap(), naive_det(&m));
        let p = RationalMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(p.det().unwrap(), int(-1));
        assert!(RationalMatrix::zeros(2, 3).det().is_err());
    }

    fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-3i64..4, 1i64..3), r * c).prop_map(move |v| {
                let data = v.into_iter().map(|(n, d)| rat(n, d)).collect();
                RationalMatrix::from_vec(r, c, data).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity_and_exact_kernel(m in small_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.len(), m.cols());
            prop_assert_eq!(m.rank(), naive_rank(&m));
            for v in &k {
                prop_assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
                let lead = v.iter().find(|x| !x.is_zero()).unwrap();
                prop_assert!(*lead > Rational::zero());
            }
        }

        #[test]
        fn kernel_canonicalization_is_idempotent(m in small_matrix()) {
            let k = m.kernel_basis();
            // Rebuild a matrix whose kernel is exactly span(k) and take its kernel again.
            let kmat = RationalMatrix::from_rows(m.cols(), &k).unwrap();
            let complement = kmat.kernel_basis();
            let rebuilt = RationalMatrix::from_rows(m.cols(), &complement).unwrap();
            prop_assert_eq!(&k, &rebuilt.kernel_basis());
        }

        #[test]
        fn independent_rows_preserve_row_space(m in small_matrix()) {
            let (idx, n) = m.select_independent_rows();
            prop_assert_eq!(idx.len(), m.rank());
            prop_assert_eq!(n.rank(), m.rank());
            for i in 0..m.rows() {
                let stacked = n.vstack(&m.select_rows(&[i])).unwrap();
                prop_assert_eq!(stacked.rank(), n.rank());
            }
        }

        #[test]
        fn det_matches_cofactor_expansion(v in proptest::collection::vec((-4i64..5, 1i64..4), 16), n in 1usize..5) {
            let data: Vec<Rational> = v.into_iter().take(n * n).map(|(a, b)| rat(a, b)).collect();
            let m = RationalMatrix::from_vec(n, n, data).unwrap();
            prop_assert_eq!(m.det().unwrap(), naive_det(&m));
        }
    }
}
