//! Pointwise numerics at a steady state: Jacobians, degeneracy, sensitivity vectors with
//! respect to the conservation totals `T`, and the rank test for zero sensitivity.
//!
//! The augmented map is `F_T(x) = (g(x), W·x − T)`. Perturbing `T` along `e_j` moves the
//! steady state with velocity `Sen_j` solving `[∂g/∂x; W]·Sen_j = (0, e_j)`.

use nalgebra::{DMatrix, DVector};
use num::traits::{Pow, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::rational::to_f64;
use crate::algebra::{Rational, RationalMatrix};
use crate::network::{ModelError, PowerLawSystem};

/// Pivots below this fraction of a scale count as zero. Degeneracy and zero-sensitivity
/// tests take the largest row norm of the Jacobian's term magnitudes as the scale.
pub const RANK_TOLERANCE: f64 = 1e-9;
/// Steady-state admission: `max|g| ≤ ADMISSION_TOLERANCE·scale`, where `scale` is the
/// largest sum of term magnitudes in one equation.
pub const ADMISSION_TOLERANCE: f64 = 1e-9;
/// Relative agreement required between the Cramer and linear-solve sensitivities.
pub const METHOD_AGREEMENT: f64 = 1e-9;
pub const NEWTON_MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("{0} must be strictly positive")]
    Domain(&'static str),
    #[error("expected {expected} values for {what}, got {got}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("exponent matrix has unassigned symbols")]
    Symbolic,
    #[error("no conservation matrix W is available")]
    NoConservation,
    #[error("not a steady state: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("the point is degenerate with respect to S: [dg/dx; W] is singular")]
    DegenerateWrtS,
    #[error("perturbation index {index} out of range for d = {d}")]
    PerturbationOutOfRange { index: usize, d: usize },
    #[error("species index {index} out of range for {count} species")]
    SpeciesOutOfRange { index: usize, count: usize },
    #[error("Cramer and linear solve disagree by {0:.3e}")]
    MethodMismatch(f64),
    #[error("Newton iteration did not converge: {0}")]
    Newton(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Fluxes `k_j·x^{B_{·j}}` in floating point.
fn float_fluxes(b: &RationalMatrix, k: &[f64], x: &[f64]) -> Vec<f64> {
    crate::network::fluxes(b, k, x)
}

/// Fluxes over ℚ; `None` unless every exponent is an integer.
fn exact_fluxes(b: &RationalMatrix, k: &[Rational], x: &[Rational]) -> Option<Vec<Rational>> {
    if !b.is_integer() {
        return None;
    }
    Some(
        (0..b.cols())
            .map(|j| {
                (0..b.rows()).fold(k[j].clone(), |acc, i| {
                    let e: i32 = b.get(i, j).to_integer().try_into().expect("small exponent");
                    acc * Pow::pow(&x[i], e)
                })
            })
            .collect(),
    )
}

fn positive_f64(what: &'static str, v: &[f64]) -> Result<(), SensitivityError> {
    if v.iter().all(|&t| t > 0.0 && t.is_finite()) {
        Ok(())
    } else {
        Err(SensitivityError::Domain(what))
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), SensitivityError> {
    if expected == got {
        Ok(())
    } else {
        Err(SensitivityError::Length {
            what,
            expected,
            got,
        })
    }
}

fn numeric_b(sys: &PowerLawSystem) -> Result<RationalMatrix, SensitivityError> {
    sys.exponents().numeric().ok_or(SensitivityError::Symbolic)
}

fn to_dmatrix(m: &RationalMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| to_f64(m.get(i, j)))
}

/// `g_k(x) = N·(k ∘ x^B)`.
pub fn evaluate(sys: &PowerLawSystem, k: &[f64], x: &[f64]) -> Result<Vec<f64>, SensitivityError> {
    let b = numeric_b(sys)?;
    Ok(crate::network::evaluate_g(sys, &b, k, x))
}

/// Residual `max|g_k(x)|` and the scale `max_i Σ_j |N_ij·flux_j|` it is measured against.
fn residual_and_scale(
    sys: &PowerLawSystem,
    b: &RationalMatrix,
    k: &[f64],
    x: &[f64],
) -> (f64, f64) {
    let flux = float_fluxes(b, k, x);
    let n = sys.coefficient_matrix();
    let mut residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n.rows() {
        let terms = (0..n.cols()).map(|j| to_f64(n.get(i, j)) * flux[j]);
        residual = residual.max(terms.clone().sum::<f64>().abs());
        scale = scale.max(terms.map(f64::abs).sum());
    }
    (residual, scale)
}

/// An admitted positive steady state of `g_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStatePoint {
    pub k: Vec<f64>,
    pub x: Vec<f64>,
    pub residual: f64,
    exact: Option<(Vec<Rational>, Vec<Rational>)>,
}

impl SteadyStatePoint {
    /// Admits a floating-point point whose residual is within tolerance.
    pub fn admit(sys: &PowerLawSystem, k: Vec<f64>, x: Vec<f64>) -> Result<Self, SensitivityError> {
        let b = numeric_b(sys)?;
        check_len("k", sys.num_reactions(), k.len())?;
        check_len("x", sys.num_species(), x.len())?;
        positive_f64("k", &k)?;
        positive_f64("x", &x)?;
        let (residual, scale) = residual_and_scale(sys, &b, &k, &x);
        let tolerance = ADMISSION_TOLERANCE * scale;
        if residual > tolerance {
            return Err(SensitivityError::Residual {
                residual,
                tolerance,
            });
        }
        Ok(SteadyStatePoint {
            k,
            x,
            residual,
            exact: None,
        })
    }

    /// Admits a rational point. With integer exponents the residual is computed exactly and
    /// later rank decisions are exact.
    pub fn admit_exact(
        sys: &PowerLawSystem,
        k: Vec<Rational>,
        x: Vec<Rational>,
    ) -> Result<Self, SensitivityError> {
        let b = numeric_b(sys)?;
        check_len("k", sys.num_reactions(), k.len())?;
        check_len("x", sys.num_species(), x.len())?;
        if !k.iter().all(Signed::is_positive) {
            return Err(SensitivityError::Domain("k"));
        }
        if !x.iter().all(Signed::is_positive) {
            return Err(SensitivityError::Domain("x"));
        }
        let kf: Vec<f64> = k.iter().map(to_f64).collect();
        let xf: Vec<f64> = x.iter().map(to_f64).collect();
        let Some(flux) = exact_fluxes(&b, &k, &x) else {
            return Self::admit(sys, kf, xf);
        };
        let g = sys.coefficient_matrix().mul_vec(&flux).expect("N is s×r");
        let residual = g.iter().map(|v| to_f64(&v.abs())).fold(0.0, f64::max);
        let (_, scale) = residual_and_scale(sys, &b, &kf, &xf);
        let tolerance = ADMISSION_TOLERANCE * scale;
        if residual > tolerance {
            return Err(SensitivityError::Residual {
                residual,
                tolerance,
            });
        }
        // Exact rank decisions only make sense at an exact zero.
        let exact = g.iter().all(Zero::is_zero).then_some((k, x));
        Ok(SteadyStatePoint {
            k: kf,
            x: xf,
            residual,
            exact,
        })
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

/// `∂g/∂x = N·diag(k ∘ x^B)·Bᵗ·diag(1/x)` in floating point.
pub fn jacobian_at(
    sys: &PowerLawSystem,
    k: &[f64],
    x: &[f64],
) -> Result<DMatrix<f64>, SensitivityError> {
    let b = numeric_b(sys)?;
    check_len("k", sys.num_reactions(), k.len())?;
    check_len("x", sys.num_species(), x.len())?;
    positive_f64("k", k)?;
    positive_f64("x", x)?;
    let flux = DVector::from_vec(float_fluxes(&b, k, x));
    let n = to_dmatrix(sys.coefficient_matrix());
    let bt = to_dmatrix(&b).transpose();
    let inv_x = DVector::from_iterator(x.len(), x.iter().map(|v| 1.0 / v));
    Ok(n * DMatrix::from_diagonal(&flux) * bt * DMatrix::from_diagonal(&inv_x))
}

/// The same factorization over ℚ; `None` unless every exponent is an integer.
pub fn exact_jacobian_at(
    sys: &PowerLawSystem,
    k: &[Rational],
    x: &[Rational],
) -> Result<Option<RationalMatrix>, SensitivityError> {
    let b = numeric_b(sys)?;
    check_len("k", sys.num_reactions(), k.len())?;
    check_len("x", sys.num_species(), x.len())?;
    if !k.iter().chain(x).all(Signed::is_positive) {
        return Err(SensitivityError::Domain("k and x"));
    }
    let Some(flux) = exact_fluxes(&b, k, x) else {
        return Ok(None);
    };
    let n = sys.coefficient_matrix();
    let mut m = RationalMatrix::zeros(n.rows(), b.rows());
    for i in 0..n.rows() {
        for c in 0..b.rows() {
            let sum = (0..n.cols())
                .filter(|&j| !n.get(i, j).is_zero() && !b.get(c, j).is_zero())
                .map(|j| n.get(i, j) * &flux[j] * b.get(c, j))
                .fold(Rational::zero(), |acc, t| acc + t);
            m.set(i, c, sum / &x[c]);
        }
    }
    Ok(Some(m))
}

fn point_jacobian(
    sys: &PowerLawSystem,
    p: &SteadyStatePoint,
) -> Result<DMatrix<f64>, SensitivityError> {
    jacobian_at(sys, &p.k, &p.x)
}

/// Row norms of `|N|·diag(flux)·|B|ᵗ·diag(1/x)`, the magnitudes cancelling inside each
/// Jacobian entry. Rank thresholds are taken relative to this so that a Jacobian which
/// vanishes up to roundoff has rank zero.
fn jacobian_term_scale(
    sys: &PowerLawSystem,
    p: &SteadyStatePoint,
) -> Result<f64, SensitivityError> {
    let b = numeric_b(sys)?;
    let flux = DVector::from_vec(float_fluxes(&b, &p.k, &p.x));
    let n = to_dmatrix(sys.coefficient_matrix()).abs();
    let bt = to_dmatrix(&b).abs().transpose();
    let inv_x = DVector::from_iterator(p.x.len(), p.x.iter().map(|v| 1.0 / v));
    let terms = n * DMatrix::from_diagonal(&flux) * bt * DMatrix::from_diagonal(&inv_x);
    Ok(max_row_norm(&terms))
}

fn point_exact_jacobian(
    sys: &PowerLawSystem,
    p: &SteadyStatePoint,
) -> Result<Option<RationalMatrix>, SensitivityError> {
    match &p.exact {
        Some((k, x)) => exact_jacobian_at(sys, k, x),
        None => Ok(None),
    }
}

fn max_row_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.norm()).fold(0.0, f64::max)
}

/// Rank by fully pivoted elimination: pivots at most `RANK_TOLERANCE·scale` count as zero.
pub fn numeric_rank(m: &DMatrix<f64>, scale: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let threshold = RANK_TOLERANCE * scale;
    let u = m.clone().full_piv_lu().u();
    (0..u.nrows().min(u.ncols()))
        .filter(|&i| u[(i, i)].abs() > threshold)
        .count()
}

/// `[∂g/∂x; W]`, an `n×n` matrix.
pub fn augmented_jacobian(j: &DMatrix<f64>, w: &RationalMatrix) -> DMatrix<f64> {
    let (s, n) = (j.nrows(), j.ncols());
    let d = w.rows();
    DMatrix::from_fn(s + d, n, |r, c| {
        if r < s {
            j[(r, c)]
        } else {
            to_f64(w.get(r - s, c))
        }
    })
}

fn conservation(sys: &PowerLawSystem) -> Result<&RationalMatrix, SensitivityError> {
    sys.conservation().ok_or(SensitivityError::NoConservation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Degeneracy {
    Nondeg,
    Deg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DegeneracyWrtS {
    NondegWrtS,
    DegWrtS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyClass {
    pub plain: Degeneracy,
    pub wrt_s: DegeneracyWrtS,
    pub jacobian_rank: usize,
    pub augmented_rank: usize,
    pub exact: bool,
}

impl DegeneracyClass {
    pub fn is_nondegenerate_wrt_s(&self) -> bool {
        self.wrt_s == DegeneracyWrtS::NondegWrtS
    }
}

/// Classifies a point as degenerate (rank `∂g/∂x < s`) and degenerate with respect to `S`
/// (`[∂g/∂x; W]` singular). Uses exact ranks for exact points with integer exponents.
pub fn classify_degeneracy(
    sys: &PowerLawSystem,
    p: &SteadyStatePoint,
) -> Result<DegeneracyClass, SensitivityError> {
    let w = match sys.codimension() {
        0 => RationalMatrix::zeros(0, sys.num_species()),
        _ => conservation(sys)?.clone(),
    };
    let s = sys.rank();
    let n = sys.num_species();
    let (jacobian_rank, augmented_rank, exact) = match point_exact_jacobian(sys, p)? {
        Some(j) => {
            let aug = j.vstack(&w).expect("W has n columns");
            (j.rank(), aug.rank(), true)
        }
        None => {
            let j = point_jacobian(sys, p)?;
            let aug = augmented_jacobian(&j, &w);
            let scale = jacobian_term_scale(sys, p)?;
            let w_scale = max_row_norm(&augmented_jacobian(&DMatrix::zeros(0, n), &w));
            (
                numeric_rank(&j, scale),
                numeric_rank(&aug, scale.max(w_scale)),
                false,
            )
        }
    };
    Ok(DegeneracyClass {
        plain: if jacobian_rank < s {
            Degeneracy::Deg
        } else {
            Degeneracy::Nondeg
        },
        wrt_s: if augmented_rank < n {
            DegeneracyWrtS::DegWrtS
        } else {
            DegeneracyWrtS::NondegWrtS
        },
        jacobian_rank,
        augmented_rank,
        exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SensitivityMethod {
    Cramer,
    Solve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityVector {
    /// `Sen_γ(x*)`, one entry per species.
    pub values: Vec<f64>,
    /// `γ'(0)`, one entry per conservation law.
    pub perturbation: Vec<f64>,
    pub method: SensitivityMethod,
}

/// `Sen_{γ_j}` for the canonical perturbation `T* + u·e_j`, computed by a linear solve
/// and cross-checked against Cramer's rule.
pub fn sensitivity_canonical(
    sys: &PowerLawSystem,
    p: &SteadyStatePoint,
    w: &RationalMatrix,
    j: usize,
) -> Result<SensitivityVector, SensitivityError> {
    let jac = point_jacobian(sys, p)?;
    canonical_from_jacobian(&jac, w, j)
}

fn canonical_from_jacobian(
    jac: &DMatrix<f64>,
    w: &RationalMatrix,
    j: usize,
) -> Result<SensitivityVector, SensitivityError> {
    let (s, n) = (jac.nrows(), jac.ncols());
    let d = w.rows();
    check_len("W rows", n - s, d)?;
    check_len("W columns", n, w.cols())?;
    if j >= d {
        return Err(SensitivityError::PerturbationOutOfRange { index: j, d });
    }
    let aug = augmented_jacobian(jac, w);
    if numeric_rank(&aug, max_row_norm(&aug)) < n {
        return Err(SensitivityError::DegenerateWrtS);
    }
    let mut rhs = DVector::zeros(n);
    rhs[s + j] = 1.0;
    let solved = aug
        .clone()
        .full_piv_lu()
        .solve(&rhs)
        .ok_or(SensitivityError::DegenerateWrtS)?;
    let cramer = cramer_column(&aug, s + j);
    let gap = solved
        .iter()
        .zip(&cramer)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = solved.amax().max(1.0);
    if gap > METHOD_AGREEMENT * scale {
        return Err(SensitivityError::MethodMismatch(gap));
    }
    let mut perturbation = vec![0.0; d];
    perturbation[j] = 1.0;
    Ok(SensitivityVector {
        values: solved.iter().copied().collect(),
        perturbation,
        method: SensitivityMethod::Solve,
    })
}

/// Solution of `A·x = e_row` by Cramer's rule: `x_i = (−1)^{i+row}·det(A without row, col i)/det(A)`.
pub fn cramer_column(a: &DMatrix<f64>, row: usize) -> Vec<f64> {
    let n = a.ncols();
    let det = a.clone().full_piv_lu().determinant();
    (0..n)
        .map(|i| {
            let minor = a.clone().remove_row(row).remove_column(i);
            let cof = if minor.nrows() == 0 {
                1.0
            } else {
                minor.full_piv_lu().determinant()
            };
            let sign = if (i + row).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            sign * cof / det
        })
        .collect()
}

/// The Cramer-rule values alone, for reporting both methods side by side.
pub fn sensitivity_canonical_cramer(
    sys: &PowerLawSystem,
    p: &SteadyStatePoint,
    w: &RationalMatrix,
    j: usize,
) -> Result<SensitivityVector, SensitivityError> {
    let jac = point_jacobian(sys, p)?;
    let (s, n) = (jac.nrows(), jac.ncols());
    check_len("W rows", n - s, w.rows())?;
    if j >= w.rows() {
        return Err(SensitivityError::PerturbationOutOfRange {
            index: j,
            d: w.rows(),
        });
    }
    let aug = augmented_jacobian(&jac, w);
    if numeric_rank(&aug, max_row_norm(&aug)) < n {
        return Err(SensitivityError::DegenerateWrtS);
    }
    let mut perturbation = vec![0.0; w.rows()];
    perturbation[j] = 1.0;
    Ok(SensitivityVector {
        values: cramer_column(&aug, s + j),
        perturbation,
        method: SensitivityMethod::Cramer,
    })
}

/// All canonical sensitivities at a point, using the system's `W`. Empty when `d = 0`.
pub fn all_canonical(
    sys: &PowerLawSystem,
    p: &SteadyStatePoint,
) -> Result<Vec<SensitivityVector>, SensitivityError> {
    if sys.codimension() == 0 {
        return Ok(Vec::new());
    }
    let w = conservation(sys)?;
    let jac = point_jacobian(sys, p)?;
    (0..w.rows())
        .map(|j| canonical_from_jacobian(&jac, w, j))
        .collect()
}

/// `Sen_γ = Σ_j γ'(0)_j·Sen_{γ_j}`.
pub fn sensitivity_general(
    canon: &[SensitivityVector],
    gamma_prime: &[f64],
) -> Result<SensitivityVector, SensitivityError> {
    check_len("gamma'(0)", canon.len(), gamma_prime.len())?;
    let n = canon.first().map_or(0, |c| c.values.len());
    let mut values = vec![0.0; n];
    for (c, g) in canon.iter().zip(gamma_prime) {
        check_len("sensitivity vector", n, c.values.len())?;
        for (v, s) in values.iter_mut().zip(&c.values) {
            *v += g * s;
        }
    }
    Ok(SensitivityVector {
        values,
        perturbation: gamma_prime.to_vec(),
        method: SensitivityMethod::Solve,
    })
}

/// `W·dir`: the perturbation of `T` induced by moving the state along `dir`.
pub fn state_perturbation_direction(
    w: &RationalMatrix,
    dir: &[f64],
) -> Result<Vec<f64>, SensitivityError> {
    check_len("direction", w.cols(), dir.len())?;
    Ok((0..w.rows())
        .map(|r| (0..w.cols()).map(|c| to_f64(w.get(r, c)) * dir[c]).sum())
        .collect())
}

/// Zero sensitivity of `x_i`: `∂g/∂x` without column `i` has rank below `s`.
/// Requires the point to be non-degenerate with respect to `S`.
pub fn zero_sensitivity_test(
    sys: &PowerLawSystem,
    p: &SteadyStatePoint,
    i: usize,
) -> Result<bool, SensitivityError> {
    let n = sys.num_species();
    if i >= n {
        return Err(SensitivityError::SpeciesOutOfRange { index: i, count: n });
    }
    if !classify_degeneracy(sys, p)?.is_nondegenerate_wrt_s() {
        return Err(SensitivityError::DegenerateWrtS);
    }
    let s = sys.rank();
    if let Some(j) = point_exact_jacobian(sys, p)? {
        let keep: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        return Ok(j.select_cols(&keep).rank() < s);
    }
    let j = point_jacobian(sys, p)?;
    // The threshold does not depend on the removed column.
    let scale = jacobian_term_scale(sys, p)?;
    Ok(numeric_rank(&j.remove_column(i), scale) < s)
}

/// `F_T(x) = (g_k(x), W·x − T)`.
fn augmented_residual(
    sys: &PowerLawSystem,
    b: &RationalMatrix,
    w: &DMatrix<f64>,
    k: &[f64],
    x: &[f64],
    t: &[f64],
) -> DVector<f64> {
    let g = crate::network::evaluate_g(sys, b, k, x);
    let xv = DVector::from_column_slice(x);
    let c = w * xv;
    DVector::from_iterator(
        g.len() + t.len(),
        g.into_iter().chain(c.iter().zip(t).map(|(a, b)| a - b)),
    )
}

/// Solves `g_k(x) = 0, W·x = T` by damped Newton from `x0`, halving steps to stay positive
/// and to decrease the residual.
pub fn newton_steady_state(
    sys: &PowerLawSystem,
    k: &[f64],
    x0: &[f64],
    t: &[f64],
) -> Result<Vec<f64>, SensitivityError> {
    let b = numeric_b(sys)?;
    let n = sys.num_species();
    check_len("x0", n, x0.len())?;
    check_len("k", sys.num_reactions(), k.len())?;
    positive_f64("k", k)?;
    positive_f64("x0", x0)?;
    let w_exact = match sys.codimension() {
        0 => RationalMatrix::zeros(0, n),
        _ => conservation(sys)?.clone(),
    };
    let w = to_dmatrix(&w_exact);
    check_len("T", w.nrows(), t.len())?;
    let s = sys.rank();
    let t_scale = t.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    // g is measured against its own term magnitudes, W·x − T against |T|.
    let converged = |x: &[f64], f: &DVector<f64>, tol: f64| {
        let (_, scale) = residual_and_scale(sys, &b, k, x);
        let (g, c) = f.as_slice().split_at(s);
        g.iter().all(|v| v.abs() <= tol * scale) && c.iter().all(|v| v.abs() <= tol * t_scale)
    };
    let mut x = x0.to_vec();
    let mut f = augmented_residual(sys, &b, &w, k, &x, t);
    for _ in 0..NEWTON_MAX_ITERATIONS {
        if converged(&x, &f, 1e-14) {
            return Ok(x);
        }
        let jac = jacobian_at(sys, k, &x)?;
        let step = augmented_jacobian(&jac, &w_exact)
            .full_piv_lu()
            .solve(&(-&f))
            .ok_or_else(|| SensitivityError::Newton("singular Jacobian".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(a, d)| a + lambda * d)
                .collect();
            if trial.iter().all(|&v| v > 0.0) {
                let ft = augmented_residual(sys, &b, &w, k, &trial, t);
                if ft.amax() < f.amax() || converged(&trial, &ft, 1e-14) {
                    x = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if converged(&x, &f, 1e-10) {
        Ok(x)
    } else {
        Err(SensitivityError::Newton(format!(
            "residual {:.3e} after {NEWTON_MAX_ITERATIONS} iterations",
            f.amax()
        )))
    }
}
