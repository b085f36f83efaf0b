//! Clearing rational exponents from generalized polynomials.
//!
//! With `m_j` the lcm of the exponent denominators of `x_j` and `β(i)` the smallest shift
//! making every exponent of equation `i` non-negative, `g̃_i(z) = z^{β(i)}·g_i(z^m)` is a
//! polynomial whose positive zeros correspond to those of `g` through `φ(z) = z^m`.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::rational::{denominator_lcm, fmt_rational, to_f64};
use crate::algebra::{MultiPoly, Rational, Vars};
use crate::network::{ModelError, PowerLawSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolynomializeError {
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("coordinate {0} is not strictly positive")]
    Domain(usize),
    #[error("exponent too large after clearing denominators")]
    Overflow,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One term `c·x^α` with rational exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedTerm {
    pub coeff: Rational,
    pub exponents: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedSystem {
    pub vars: Vec<String>,
    pub equations: Vec<Vec<GeneralizedTerm>>,
}

impl GeneralizedSystem {
    /// Equations with like terms merged and zero terms dropped.
    pub fn new(
        vars: Vec<String>,
        equations: Vec<Vec<GeneralizedTerm>>,
    ) -> Result<Self, PolynomializeError> {
        let n = vars.len();
        let mut merged = Vec::with_capacity(equations.len());
        for eq in equations {
            let mut acc: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
            for t in eq {
                if t.exponents.len() != n {
                    return Err(PolynomializeError::Length {
                        expected: n,
                        got: t.exponents.len(),
                    });
                }
                *acc.entry(t.exponents).or_insert_with(Rational::zero) += t.coeff;
            }
            merged.push(
                acc.into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(exponents, coeff)| GeneralizedTerm { coeff, exponents })
                    .collect(),
            );
        }
        Ok(GeneralizedSystem {
            vars,
            equations: merged,
        })
    }

    /// `g_k` of a power-law system at rational rate constants.
    pub fn from_power_law(
        sys: &PowerLawSystem,
        k: &[Rational],
    ) -> Result<Self, PolynomializeError> {
        let b = sys.numeric_exponents()?;
        let n = sys.coefficient_matrix();
        if k.len() != n.cols() {
            return Err(PolynomializeError::Length {
                expected: n.cols(),
                got: k.len(),
            });
        }
        let equations = (0..n.rows())
            .map(|i| {
                (0..n.cols())
                    .map(|j| GeneralizedTerm {
                        coeff: n.get(i, j) * &k[j],
                        exponents: b.column(j),
                    })
                    .collect()
            })
            .collect();
        GeneralizedSystem::new(sys.species().to_vec(), equations)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.equations
            .iter()
            .map(|eq| {
                eq.iter()
                    .map(|t| {
                        let mono: f64 = t
                            .exponents
                            .iter()
                            .zip(x)
                            .filter(|(e, _)| !e.is_zero())
                            .map(|(e, xi)| xi.powf(to_f64(e)))
                            .product();
                        to_f64(&t.coeff) * mono
                    })
                    .sum()
            })
            .collect()
    }

    /// Partial derivatives, one row per equation.
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.equations
            .iter()
            .map(|eq| {
                (0..self.vars.len())
                    .map(|j| {
                        eq.iter()
                            .filter(|t| !t.exponents[j].is_zero())
                            .map(|t| {
                                let mut term = to_f64(&t.coeff) * to_f64(&t.exponents[j]);
                                for (l, (e, xl)) in t.exponents.iter().zip(x).enumerate() {
                                    let p = if l == j { to_f64(e) - 1.0 } else { to_f64(e) };
                                    term *= xl.powf(p);
                                }
                                term
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for GeneralizedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, eq) in self.equations.iter().enumerate() {
            let terms: Vec<String> = eq
                .iter()
                .map(|t| {
                    let mut parts = vec![fmt_rational(&t.coeff)];
                    for (v, e) in self.vars.iter().zip(&t.exponents) {
                        if e.is_zero() {
                            continue;
                        }
                        if e.is_integer() && e.numer() == &BigInt::from(1) {
                            parts.push(v.clone());
                        } else {
                            parts.push(format!("{v}^({})", fmt_rational(e)));
                        }
                    }
                    parts.join("*")
                })
                .collect();
            let body = if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            };
            writeln!(f, "g{}: {}", i + 1, body)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomializedSystem {
    pub m: Vec<u32>,
    pub beta: Vec<Vec<u32>>,
    pub gtilde: Vec<MultiPoly>,
}

impl PolynomializedSystem {
    /// True when `g̃ = g` (all `m_j = 1`, all shifts zero).
    pub fn is_identity(&self) -> bool {
        self.m.iter().all(|&m| m == 1) && self.beta.iter().flatten().all(|&b| b == 0)
    }

    pub fn vars(&self) -> Option<&Vars> {
        self.gtilde.first().map(MultiPoly::vars)
    }

    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        self.gtilde.iter().map(|p| p.eval_f64(z)).collect()
    }

    pub fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        self.gtilde
            .iter()
            .map(|p| (0..z.len()).map(|j| p.derivative(j).eval_f64(z)).collect())
            .collect()
    }
}

impl fmt::Display for PolynomializedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(", ");
        writeln!(f, "m = ({})", list(&self.m))?;
        for (i, (b, g)) in self.beta.iter().zip(&self.gtilde).enumerate() {
            writeln!(f, "beta({}) = ({})", i + 1, list(b))?;
            writeln!(f, "gtilde{} = {}", i + 1, g)?;
        }
        Ok(())
    }
}

pub fn polynomialize(g: &GeneralizedSystem) -> Result<PolynomializedSystem, PolynomializeError> {
    let n = g.vars.len();
    let m: Vec<BigInt> = (0..n)
        .map(|j| denominator_lcm(g.equations.iter().flatten().map(|t| &t.exponents[j])))
        .collect();
    let vars = Vars::indexed("z", n);
    let mut beta = Vec::with_capacity(g.equations.len());
    let mut gtilde = Vec::with_capacity(g.equations.len());
    for eq in &g.equations {
        let scaled: Vec<Vec<BigInt>> = eq
            .iter()
            .map(|t| {
                t.exponents
                    .iter()
                    .zip(&m)
                    .map(|(e, mj)| (e * Rational::from_integer(mj.clone())).to_integer())
                    .collect()
            })
            .collect();
        let shift: Vec<BigInt> = (0..n)
            .map(|j| {
                let min = scaled
                    .iter()
                    .map(|row| row[j].clone())
                    .min()
                    .unwrap_or_default();
                if min < BigInt::zero() {
                    -min
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        let terms = scaled
            .iter()
            .zip(eq)
            .map(|(row, t)| {
                let mono = row
                    .iter()
                    .zip(&shift)
                    .map(|(e, s)| (e + s).to_u32().ok_or(PolynomializeError::Overflow))
                    .collect::<Result<Vec<u32>, _>>()?;
                Ok((mono, t.coeff.clone()))
            })
            .collect::<Result<Vec<_>, PolynomializeError>>()?;
        gtilde.push(MultiPoly::from_terms(&vars, terms));
        beta.push(to_u32_vec(&shift)?);
    }
    Ok(PolynomializedSystem {
        m: to_u32_vec(&m)?,
        beta,
        gtilde,
    })
}

fn to_u32_vec(v: &[BigInt]) -> Result<Vec<u32>, PolynomializeError> {
    v.iter()
        .map(|x| x.to_u32().ok_or(PolynomializeError::Overflow))
        .collect()
}

/// `φ(z) = (z_1^{m_1}, …, z_n^{m_n})`.
pub fn phi(z: &[f64], m: &[u32]) -> Result<Vec<f64>, PolynomializeError> {
    check_positive(z, m)?;
    Ok(z.iter()
        .zip(m)
        .map(|(zj, &mj)| zj.powi(mj as i32))
        .collect())
}

/// Inverse of [`phi`]: the positive `m_j`-th root of each coordinate.
pub fn phi_inverse(x: &[f64], m: &[u32]) -> Result<Vec<f64>, PolynomializeError> {
    check_positive(x, m)?;
    Ok(x.iter()
        .zip(m)
        .map(|(xj, &mj)| xj.powf(1.0 / f64::from(mj)))
        .collect())
}

fn check_positive(v: &[f64], m: &[u32]) -> Result<(), PolynomializeError> {
    if v.len() != m.len() {
        return Err(PolynomializeError::Length {
            expected: m.len(),
            got: v.len(),
        });
    }
    match v.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
        Some(j) => Err(PolynomializeError::Domain(j)),
        None => Ok(()),
    }
}
