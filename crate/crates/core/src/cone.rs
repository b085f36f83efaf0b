//! Extreme rays of the flux cone `ker(N) ∩ ℝ^r_{≥0}` by double description.
//!
//! The cone is handled in kernel coordinates: with `K` the `r×k` kernel basis matrix it is
//! `{a : K·a ≥ 0}`. Starting from the simplicial cone cut out by `k` independent rows of
//! `K`, the remaining rows are added one at a time. Two rays are combined across a new
//! hyperplane only when they are adjacent, tested algebraically: the constraints tight at
//! both have rank `k − 2`.

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Signed, Zero};

use crate::algebra::rational::canonical_vector;
use crate::algebra::{Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeRays {
    rays: Vec<Vec<BigInt>>,
}

impl ConeRays {
    /// Rays as primitive integer vectors, sorted lexicographically.
    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// The cone is `{0}`.
    pub fn is_trivial(&self) -> bool {
        self.rays.is_empty()
    }

    /// The sum of the rays; strictly positive iff the cone meets the open orthant.
    pub fn ray_sum(&self) -> Option<Vec<BigInt>> {
        let first = self.rays.first()?;
        let mut sum = vec![BigInt::zero(); first.len()];
        for ray in &self.rays {
            for (s, x) in sum.iter_mut().zip(ray) {
                *s += x;
            }
        }
        Some(sum)
    }

    pub fn has_positive_point(&self) -> bool {
        self.ray_sum()
            .is_some_and(|s| s.iter().all(BigInt::is_positive))
    }

    pub fn rational_rays(&self) -> Vec<Vec<Rational>> {
        self.rays
            .iter()
            .map(|r| r.iter().cloned().map(Rational::from_integer).collect())
            .collect()
    }
}

/// Scales by a positive factor to a primitive integer vector.
fn positive_primitive(v: &[Rational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| (q * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

fn dot(row: &[Rational], a: &[BigInt]) -> Rational {
    row.iter()
        .zip(a)
        .map(|(r, x)| r * Rational::from_integer(x.clone()))
        .fold(Rational::zero(), |acc, t| acc + t)
}

pub fn extreme_rays(n: &RationalMatrix) -> ConeRays {
    let basis = n.kernel_basis();
    let r = n.cols();
    let k = basis.len();
    if k == 0 {
        return ConeRays { rays: Vec::new() };
    }
    // K has the kernel vectors as columns; its rows are the inequalities.
    let kmat = RationalMatrix::from_rows(r, &basis)
        .expect("kernel vectors have length r")
        .transpose();
    let constraints: Vec<Vec<Rational>> = kmat.row_vecs();
    let (initial, a0) = kmat.select_independent_rows();
    debug_assert_eq!(initial.len(), k);

    // Rays of {a : A0·a ≥ 0} are the columns of A0⁻¹.
    let inv = inverse(&a0);
    let mut rays: Vec<Vec<BigInt>> = (0..k).map(|j| positive_primitive(&inv.column(j))).collect();
    let mut processed: Vec<usize> = initial.clone();

    for i in (0..r).filter(|i| !initial.contains(i)) {
        let row = &constraints[i];
        let values: Vec<Rational> = rays.iter().map(|ray| dot(row, ray)).collect();
        let pos: Vec<usize> = (0..rays.len())
            .filter(|&j| values[j].is_positive())
            .collect();
        let neg: Vec<usize> = (0..rays.len())
            .filter(|&j| values[j].is_negative())
            .collect();
        let mut next: Vec<Vec<BigInt>> = (0..rays.len())
            .filter(|&j| !values[j].is_negative())
            .map(|j| rays[j].clone())
            .collect();
        for &p in &pos {
            for &q in &neg {
                if !adjacent(&constraints, &processed, &rays[p], &rays[q], k) {
                    continue;
                }
                let combined: Vec<Rational> = rays[q]
                    .iter()
                    .zip(&rays[p])
                    .map(|(xq, xp)| {
                        &values[p] * Rational::from_integer(xq.clone())
                            - &values[q] * Rational::from_integer(xp.clone())
                    })
                    .collect();
                let ray = positive_primitive(&combined);
                if !next.contains(&ray) {
                    next.push(ray);
                }
            }
        }
        rays = next;
        processed.push(i);
        if rays.is_empty() {
            break;
        }
    }

    let mut out: Vec<Vec<BigInt>> = rays
        .iter()
        .map(|a| {
            let v: Vec<Rational> = constraints.iter().map(|row| dot(row, a)).collect();
            canonical_vector(&v)
                .into_iter()
                .map(|q| q.to_integer())
                .collect()
        })
        .filter(|v: &Vec<BigInt>| v.iter().any(|x| !x.is_zero()))
        .collect();
    out.sort();
    out.dedup();
    ConeRays { rays: out }
}

/// Two rays are adjacent iff the processed constraints tight at both have rank `k − 2`.
fn adjacent(
    constraints: &[Vec<Rational>],
    processed: &[usize],
    p: &[BigInt],
    q: &[BigInt],
    k: usize,
) -> bool {
    if k < 2 {
        return false;
    }
    let tight: Vec<Vec<Rational>> = processed
        .iter()
        .filter(|&&i| dot(&constraints[i], p).is_zero() && dot(&constraints[i], q).is_zero())
        .map(|&i| constraints[i].clone())
        .collect();
    if tight.len() < k - 2 {
        return false;
    }
    if k == 2 {
        return true;
    }
    RationalMatrix::from_rows(k, &tight)
        .expect("rows of length k")
        .rank()
        == k - 2
}

/// Inverse of a square invertible matrix, one column per kernel of `[A | e_j]`.
fn inverse(a: &RationalMatrix) -> RationalMatrix {
    let k = a.rows();
    let mut inv = RationalMatrix::zeros(k, k);
    for j in 0..k {
        // The kernel of [A | e_j] is spanned by (x, t) with A·x = −t·e_j.
        let mut aug = RationalMatrix::zeros(k, k + 1);
        for r in 0..k {
            for c in 0..k {
                aug.set(r, c, a.get(r, c).clone());
            }
        }
        aug.set(j, k, Rational::one());
        let ker = aug.kernel_basis();
        debug_assert_eq!(ker.len(), 1);
        let v = &ker[0];
        let t = v[k].clone();
        for r in 0..k {
            inv.set(r, j, -(&v[r] / &t));
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn two_ray_cone() {
        let n = RationalMatrix::from_i64(&[&[-1, 1, 1, 0], &[0, 0, 1, -1]]);
        let c = extreme_rays(&n);
        assert_eq!(c.rays(), &[ints(&[1, 0, 1, 1]), ints(&[1, 1, 0, 0])]);
        assert!(c.has_positive_point());
    }

    #[test]
    fn single_row() {
        let c = extreme_rays(&RationalMatrix::from_i64(&[&[1, -2, 1]]));
        assert_eq!(c.rays(), &[ints(&[0, 1, 2]), ints(&[2, 1, 0])]);
        assert!(c.has_positive_point());
    }

    #[test]
    fn identity_gives_trivial_cone() {
        let c = extreme_rays(&RationalMatrix::identity(3));
        assert!(c.is_trivial());
        assert!(!c.has_positive_point());
    }

    #[test]
    fn cone_without_interior_points() {
        // v1 = v2 + v3 and v2 = -v3 force v2 = v3 = 0.
        let n = RationalMatrix::from_i64(&[&[1, -1, -1], &[0, 1, 1]]);
        let c = extreme_rays(&n);
        assert!(c.is_trivial());
        // v1 = v2 leaves v3 free: one ray misses coordinate 3, the other covers it.
        let c = extreme_rays(&RationalMatrix::from_i64(&[&[1, -1, 0]]));
        assert_eq!(c.rays(), &[ints(&[0, 0, 1]), ints(&[1, 1, 0])]);
        assert!(c.has_positive_point());
        let c = extreme_rays(&RationalMatrix::from_i64(&[&[1, -1, 0], &[0, 0, 1]]));
        assert_eq!(c.rays(), &[ints(&[1, 1, 0])]);
        assert!(!c.has_positive_point());
    }

    #[test]
    fn inverse_is_exact() {
        let a = RationalMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a);
        assert_eq!(a.mul(&inv).unwrap(), RationalMatrix::identity(2));
    }

    proptest! {
        #[test]
        fn rays_are_sound(entries in proptest::collection::vec(-2i64..3, 10)) {
            let rows: Vec<Vec<Rational>> = entries.chunks(5).map(|c| c.iter().map(|&x| int(x)).collect()).collect();
            let n = RationalMatrix::from_rows(5, &rows).unwrap();
            for ray in extreme_rays(&n).rational_rays() {
                prop_assert!(n.mul_vec(&ray).unwrap().iter().all(Zero::is_zero));
                prop_assert!(ray.iter().all(|x| !x.is_negative()));
                prop_assert!(ray.iter().any(|x| !x.is_zero()));
            }
        }

        #[test]
        fn rays_match_support_enumeration(entries in proptest::collection::vec(-2i64..3, 12), rows in 1usize..3) {
            let rows: Vec<Vec<Rational>> = entries.chunks(6).take(rows).map(|c| c.iter().map(|&x| int(x)).collect()).collect();
            let n = RationalMatrix::from_rows(6, &rows).unwrap();
            let dd = extreme_rays(&n);
            let brute = crate::oracle::brute_force_extreme_rays(&n);
            prop_assert_eq!(dd.rays(), brute.as_slice());
        }
    }
}
