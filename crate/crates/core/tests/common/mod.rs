#![allow(dead_code)]

use std::path::PathBuf;

use acr_core::algebra::rational::{int, to_f64};
use acr_core::algebra::{Rational, RationalMatrix};
use acr_core::cone::extreme_rays;
use acr_core::network::{ExponentMatrix, PowerLawSystem};
use acr_core::parser::parse_system;
use acr_core::sensitivity::{newton_steady_state, SteadyStatePoint};
use num::traits::{Pow, Zero};
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn system(name: &str) -> PowerLawSystem {
    parse_system(&fixture(name)).unwrap()
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(
        rng.gen_range(1..=12i64).into(),
        rng.gen_range(1..=12i64).into(),
    )
}

/// A random invertible rational matrix of size `k`.
pub fn random_invertible(rng: &mut impl Rng, k: usize) -> RationalMatrix {
    loop {
        let rows: Vec<Vec<Rational>> = (0..k)
            .map(|_| (0..k).map(|_| int(rng.gen_range(-3..=3))).collect())
            .collect();
        let m = RationalMatrix::from_rows(k, &rows).unwrap();
        if m.rank() == k {
            return m;
        }
    }
}

/// A random mass-action-like system from Γ with a strictly positive flux vector.
pub fn random_system(rng: &mut impl Rng, n: usize, r: usize) -> PowerLawSystem {
    loop {
        let gamma_rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..r).map(|_| int(rng.gen_range(-2..=2))).collect())
            .collect();
        let gamma = RationalMatrix::from_rows(r, &gamma_rows).unwrap();
        if gamma.is_zero() || gamma.rank() == n {
            continue;
        }
        let b_rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..r).map(|_| int(rng.gen_range(0..=2))).collect())
            .collect();
        let b = RationalMatrix::from_rows(r, &b_rows).unwrap();
        let species = (1..=n).map(|i| format!("X{i}")).collect();
        let rates = (1..=r).map(|i| format!("k{i}")).collect();
        let Ok(sys) =
            PowerLawSystem::from_gamma(species, rates, gamma, ExponentMatrix::from_numeric(&b))
        else {
            continue;
        };
        if extreme_rays(sys.coefficient_matrix()).has_positive_point() {
            return sys;
        }
    }
}

/// An exact steady state: a random positive `x` and flux `v` in the open cone give
/// `k_j = v_j / x^{B_j}`. Requires integer exponents.
pub fn exact_steady_state(
    sys: &PowerLawSystem,
    rng: &mut impl Rng,
) -> (Vec<Rational>, Vec<Rational>) {
    let b = sys.numeric_exponents().unwrap();
    let rays = extreme_rays(sys.coefficient_matrix()).rational_rays();
    let r = sys.num_reactions();
    let mut v = vec![Rational::zero(); r];
    for ray in &rays {
        let l = random_rational(rng);
        for (vj, e) in v.iter_mut().zip(ray) {
            *vj += &l * e;
        }
    }
    let x: Vec<Rational> = (0..sys.num_species())
        .map(|_| random_rational(rng))
        .collect();
    let k = (0..r)
        .map(|j| {
            let mono = (0..b.rows()).fold(int(1), |acc, i| {
                let e: i32 = b.get(i, j).to_integer().try_into().unwrap();
                acc * Pow::pow(&x[i], e)
            });
            &v[j] / mono
        })
        .collect();
    (k, x)
}

/// Steady states found by damped Newton from random seeds and random rate constants.
/// Failed draws (empty fibers, non-convergence) are retried.
pub fn newton_points(
    sys: &PowerLawSystem,
    rng: &mut impl Rng,
    count: usize,
) -> Vec<SteadyStatePoint> {
    let w = sys.conservation().cloned();
    let mut out = Vec::new();
    for _ in 0..(200 * count) {
        if out.len() == count {
            break;
        }
        let k: Vec<f64> = (0..sys.num_reactions())
            .map(|_| 10f64.powf(rng.gen_range(-1.0..1.0)))
            .collect();
        let x0: Vec<f64> = (0..sys.num_species())
            .map(|_| 10f64.powf(rng.gen_range(-1.0..1.0)))
            .collect();
        let t: Vec<f64> = match &w {
            Some(w) => (0..w.rows())
                .map(|r| (0..w.cols()).map(|c| to_f64(w.get(r, c)) * x0[c]).sum())
                .collect(),
            None => Vec::new(),
        };
        let Ok(x) = newton_steady_state(sys, &k, &x0, &t) else {
            continue;
        };
        if let Ok(p) = SteadyStatePoint::admit(sys, k, x) {
            out.push(p);
        }
    }
    out
}

/// Root of `f` in `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
