//! Independent brute-force references used by the test suites.

use itertools::Itertools;
use num::bigint::BigInt;
use num::traits::{Signed, Zero};

use crate::algebra::rational::canonical_vector;
use crate::algebra::{MultiPoly, PolyMatrix, Rational, RationalMatrix};

/// Extreme rays by support enumeration: a support `S` carries a ray iff `ker N[:, S]` is
/// one-dimensional and spanned by a vector that is nonzero with one sign on all of `S`.
pub fn brute_force_extreme_rays(n: &RationalMatrix) -> Vec<Vec<BigInt>> {
    let r = n.cols();
    let mut out = Vec::new();
    for size in 1..=r {
        for support in (0..r).combinations(size) {
            let ker = n.select_cols(&support).kernel_basis();
            if ker.len() != 1 {
                continue;
            }
            let v = &ker[0];
            let all_pos = v.iter().all(Signed::is_positive);
            let all_neg = v.iter().all(Signed::is_negative);
            if !(all_pos || all_neg) {
                continue;
            }
            let mut full = vec![Rational::zero(); r];
            for (&j, x) in support.iter().zip(v) {
                full[j] = if all_neg { -x.clone() } else { x.clone() };
            }
            out.push(
                canonical_vector(&full)
                    .into_iter()
                    .map(|q| q.to_integer())
                    .collect(),
            );
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Leibniz determinant, summing over all permutations.
pub fn permutation_det(m: &PolyMatrix) -> MultiPoly {
    let n = m.rows();
    assert_eq!(n, m.cols(), "square matrix required");
    let mut total = MultiPoly::zero(m.vars());
    for perm in (0..n).permutations(n) {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let mut t = MultiPoly::one(m.vars());
        for (i, &j) in perm.iter().enumerate() {
            t = &t * m.get(i, j);
        }
        total = if inversions % 2 == 0 {
            &total + &t
        } else {
            &total - &t
        };
    }
    total
}

/// Central difference `(c(h) − c(−h))/(2h)` along the curve of steady states on the fibers
/// `W·x = T* ± h·e_j`, each point found by Newton from `x*`.
pub fn continuation_oracle(
    sys: &crate::network::PowerLawSystem,
    k: &[f64],
    x: &[f64],
    j: usize,
    h: f64,
) -> Result<Vec<f64>, crate::sensitivity::SensitivityError> {
    use crate::algebra::rational::to_f64;
    use crate::sensitivity::{newton_steady_state, SensitivityError};
    let w = sys.conservation().ok_or(SensitivityError::NoConservation)?;
    if j >= w.rows() {
        return Err(SensitivityError::PerturbationOutOfRange {
            index: j,
            d: w.rows(),
        });
    }
    let t: Vec<f64> = (0..w.rows())
        .map(|r| (0..w.cols()).map(|c| to_f64(w.get(r, c)) * x[c]).sum())
        .collect();
    let shifted = |sign: f64| {
        let mut t = t.clone();
        t[j] += sign * h;
        newton_steady_state(sys, k, x, &t)
    };
    let plus = shifted(1.0)?;
    let minus = shifted(-1.0)?;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect())
}
