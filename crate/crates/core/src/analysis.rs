//! Family-level analysis over convex parameters.
//!
//! At a steady state the flux `diag(k)·x^B` lies in `ker(N) ∩ ℝ^r_{>0}`, so the Jacobian
//! `N·diag(diag(k)·x^B)·Bᵗ·diag(1/x)` has the same rank pattern as `N·diag(v)·Bᵗ` for a
//! kernel vector `v`. Parametrizing `v = Σ a_j·w_j` over a kernel basis turns questions
//! about every steady state of every `k` into identities between polynomials in `a`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::rational::fmt_rational;
use crate::algebra::{AlgebraError, Minor, MultiPoly, PolyMatrix, Rational, RationalMatrix, Vars};
use crate::cone::{extreme_rays, ConeRays};
use crate::network::{ModelError, PowerLawSystem};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("species index {index} out of range for {count} species")]
    SpeciesOutOfRange { index: usize, count: usize },
    #[error("invalid kernel basis: {0}")]
    Basis(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub seed: u64,
    pub samples: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
        }
    }
}

/// `N·diag(v)·Bᵗ` for polynomial `v` and a polynomial exponent matrix `b` (n×r).
pub fn flux_jacobian(n: &RationalMatrix, b: &PolyMatrix, v: &[MultiPoly]) -> PolyMatrix {
    let vars = b.vars();
    let species = b.rows();
    let mut out = PolyMatrix::zeros(n.rows(), species, vars);
    for i in 0..n.rows() {
        for c in 0..species {
            let mut acc = MultiPoly::zero(vars);
            for (j, vj) in v.iter().enumerate() {
                let nij = n.get(i, j);
                let bcj = b.get(c, j);
                if num::Zero::is_zero(nij) || bcj.is_zero() {
                    continue;
                }
                acc = &acc + &(vj * bcj).scale(nij);
            }
            out.set(i, c, acc);
        }
    }
    out
}

/// `N·diag(v)·Bᵗ` over ℚ.
pub fn numeric_flux_jacobian(
    n: &RationalMatrix,
    b: &RationalMatrix,
    v: &[Rational],
) -> RationalMatrix {
    let mut scaled = n.clone();
    for i in 0..n.rows() {
        for (j, vj) in v.iter().enumerate() {
            scaled.set(i, j, n.get(i, j) * vj);
        }
    }
    scaled.mul(&b.transpose()).expect("N is s×r and B is n×r")
}

/// Variable list `prefix1..prefixK` followed by the exponent symbols.
fn vars_with_symbols(prefix: &str, count: usize, symbols: &[String]) -> Vars {
    let names: Vec<String> = (1..=count)
        .map(|i| format!("{prefix}{i}"))
        .chain(symbols.iter().cloned())
        .collect();
    Vars::new(names)
}

/// `Σ_l coeffs_l[j]·var_l` for each coordinate `j`, over the first `vectors.len()` variables.
fn combinations(vars: &Vars, vectors: &[Vec<Rational>], len: usize) -> Vec<MultiPoly> {
    (0..len)
        .map(|j| {
            MultiPoly::from_terms(
                vars,
                vectors.iter().enumerate().map(|(l, w)| {
                    let mut e = vec![0; vars.len()];
                    e[l] = 1;
                    (e, w[j].clone())
                }),
            )
        })
        .collect()
}

/// The convex-parameter Jacobian `N·diag(v(a))·Bᵗ` with `v(a) = Σ a_j·w_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexJacobian {
    matrix: PolyMatrix,
    basis: Vec<Vec<Rational>>,
    params: usize,
    reactions: usize,
    symbols: Vec<String>,
}

impl ConvexJacobian {
    /// Uses the canonical kernel basis of `N`.
    pub fn new(sys: &PowerLawSystem) -> Result<Self, AnalysisError> {
        let basis = sys.coefficient_matrix().kernel_basis();
        Self::build(sys, basis)
    }

    /// Uses a caller-supplied basis of `ker(N)`.
    pub fn with_basis(
        sys: &PowerLawSystem,
        basis: Vec<Vec<Rational>>,
    ) -> Result<Self, AnalysisError> {
        let n = sys.coefficient_matrix();
        let expected = n.cols() - sys.rank();
        if basis.len() != expected {
            return Err(AnalysisError::Basis(format!(
                "{} vectors given, ker(N) has dimension {expected}",
                basis.len()
            )));
        }
        for w in &basis {
            if w.len() != n.cols() || !n.mul_vec(w)?.iter().all(num::Zero::is_zero) {
                return Err(AnalysisError::Basis("a vector is not in ker(N)".into()));
            }
        }
        if expected > 0 && RationalMatrix::from_rows(n.cols(), &basis)?.rank() != expected {
            return Err(AnalysisError::Basis(
                "vectors are linearly dependent".into(),
            ));
        }
        Self::build(sys, basis)
    }

    fn build(sys: &PowerLawSystem, basis: Vec<Vec<Rational>>) -> Result<Self, AnalysisError> {
        let symbols = sys.exponents().symbols();
        let vars = vars_with_symbols("a", basis.len(), &symbols);
        let b = sys.exponents().to_poly(&vars)?;
        let v = combinations(&vars, &basis, sys.num_reactions());
        let matrix = flux_jacobian(sys.coefficient_matrix(), &b, &v);
        Ok(ConvexJacobian {
            matrix,
            params: basis.len(),
            reactions: sys.num_reactions(),
            basis,
            symbols,
        })
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    /// Names `a1..aK` of the kernel parameters.
    pub fn param_names(&self) -> &[String] {
        &self.matrix.vars().names()[..self.params]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn vars(&self) -> &Vars {
        self.matrix.vars()
    }

    /// `v(a)` as polynomials.
    pub fn kernel_vector(&self) -> Vec<MultiPoly> {
        combinations(self.vars(), &self.basis, self.reactions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AcrStatus {
    Yes,
    No,
    /// Symbolic exponents: local ACR holds exactly when the listed conditions vanish.
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcrVerdict {
    pub species: usize,
    pub status: AcrStatus,
    /// A minor avoiding the species column that is not identically zero.
    pub witness: Option<Minor>,
    /// Polynomials in the exponent symbols that must all vanish (`Conditional` only).
    pub conditions: Vec<MultiPoly>,
    /// `s = n`: no `s×s` minor avoids the column, and the steady-state set is finite.
    pub vacuous: bool,
}

/// Local ACR in `x_i`: every `s×s` minor of the convex Jacobian without column `i`
/// vanishes identically in `a`.
pub fn local_acr_test(cj: &ConvexJacobian, i: usize) -> Result<AcrVerdict, AnalysisError> {
    let m = cj.matrix();
    let (s, n) = (m.rows(), m.cols());
    if i >= n {
        return Err(AnalysisError::SpeciesOutOfRange { index: i, count: n });
    }
    if s + 1 > n {
        return Ok(AcrVerdict {
            species: i,
            status: AcrStatus::Yes,
            witness: None,
            conditions: Vec::new(),
            vacuous: true,
        });
    }
    let witness = m.find_minor(s, &[i], |p| !p.is_zero())?;
    if cj.symbols().is_empty() {
        let status = if witness.is_some() {
            AcrStatus::No
        } else {
            AcrStatus::Yes
        };
        return Ok(AcrVerdict {
            species: i,
            status,
            witness,
            conditions: Vec::new(),
            vacuous: false,
        });
    }
    let conditions = symbolic_acr_condition(cj, i)?;
    // A condition with coefficients of one sign cannot vanish at positive symbols.
    let (status, conditions) = if conditions.is_empty() {
        (AcrStatus::Yes, conditions)
    } else if conditions.iter().any(MultiPoly::is_same_sign) {
        (AcrStatus::No, Vec::new())
    } else {
        (AcrStatus::Conditional, conditions)
    };
    Ok(AcrVerdict {
        species: i,
        status,
        witness,
        conditions,
        vacuous: false,
    })
}

/// The coefficients (in the exponent symbols) of every `a`-monomial of every minor
/// avoiding column `i`, normalized to primitive form and deduplicated. Local ACR in
/// `x_i` holds exactly when all of them vanish. Symbols are taken positive, so monomial
/// factors are dropped. The result lives over the symbols only.
pub fn symbolic_acr_condition(
    cj: &ConvexJacobian,
    i: usize,
) -> Result<Vec<MultiPoly>, AnalysisError> {
    let m = cj.matrix();
    if i >= m.cols() {
        return Err(AnalysisError::SpeciesOutOfRange {
            index: i,
            count: m.cols(),
        });
    }
    if m.rows() + 1 > m.cols() {
        return Ok(Vec::new());
    }
    let symbol_vars = Vars::new(cj.symbols().to_vec());
    let params: Vec<usize> = (0..cj.param_names().len()).collect();
    let mut out: Vec<MultiPoly> = Vec::new();
    for minor in m.minors(m.rows(), &[i])? {
        for coeff in minor.value.coefficients_in(&params).into_values() {
            let c = coeff
                .without_monomial_factor()
                .primitive()
                .embed(&symbol_vars)?;
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out.sort_by_cached_key(ToString::to_string);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NondegeneracyStatus {
    Certified,
    Fails,
    Inconclusive,
    EmptyCone,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NondegeneracyEvidence {
    /// A minor in free `v1..vr` with nonzero coefficients of one sign.
    FreeMinor {
        minor: Minor,
    },
    /// A minor in ray coordinates `l1..lm` (`v = Σ l_i·E_i`) with coefficients of one sign.
    RayMinor {
        minor: Minor,
        matrix: PolyMatrix,
    },
    /// A strictly positive kernel vector at which every `s×s` minor vanishes.
    Sample {
        v: Vec<Rational>,
    },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NondegeneracyVerdict {
    pub status: NondegeneracyStatus,
    pub evidence: NondegeneracyEvidence,
    pub samples_tried: usize,
}

/// `N·diag(v)·Bᵗ` over free variables `v1..vr` followed by the exponent symbols.
pub fn free_flux_jacobian(sys: &PowerLawSystem) -> Result<PolyMatrix, AnalysisError> {
    let r = sys.num_reactions();
    let vars = vars_with_symbols("v", r, &sys.exponents().symbols());
    let b = sys.exponents().to_poly(&vars)?;
    let v: Vec<MultiPoly> = (0..r).map(|j| MultiPoly::var(&vars, j)).collect();
    Ok(flux_jacobian(sys.coefficient_matrix(), &b, &v))
}

/// `N·diag(Σ l_i·E_i)·Bᵗ` over the extreme rays `E_i`, in variables `l1..lm` and the symbols.
pub fn ray_flux_jacobian(
    sys: &PowerLawSystem,
    rays: &ConeRays,
) -> Result<PolyMatrix, AnalysisError> {
    let vectors = rays.rational_rays();
    let vars = vars_with_symbols("l", vectors.len(), &sys.exponents().symbols());
    let b = sys.exponents().to_poly(&vars)?;
    let v = combinations(&vars, &vectors, sys.num_reactions());
    Ok(flux_jacobian(sys.coefficient_matrix(), &b, &v))
}

/// Decides whether `N·diag(v)·Bᵗ` has full rank `s` on the open flux cone.
///
/// Runs, in order: an empty-cone check; a search for a same-sign minor in free `v`; the
/// same search after substituting `v = Σ l_i·E_i` over the extreme rays (sound because
/// every interior point is a strictly positive combination of all rays); and finally exact
/// rank checks at the barycenter `l = (1,…,1)` followed by seeded random positive `l`.
/// Exponent symbols are treated as positive; the sampling stage is skipped for them.
pub fn nondegeneracy_test(
    sys: &PowerLawSystem,
    rays: &ConeRays,
    opts: &AnalysisOptions,
) -> Result<NondegeneracyVerdict, AnalysisError> {
    let verdict = |status, evidence, samples_tried| NondegeneracyVerdict {
        status,
        evidence,
        samples_tried,
    };
    if !rays.has_positive_point() {
        return Ok(verdict(
            NondegeneracyStatus::EmptyCone,
            NondegeneracyEvidence::None,
            0,
        ));
    }
    let n = sys.coefficient_matrix();
    let s = sys.rank();
    let r = sys.num_reactions();
    let same_sign = |p: &MultiPoly| p.is_same_sign();

    let m_free = free_flux_jacobian(sys)?;
    if let Some(minor) = m_free.find_minor(s, &[], same_sign)? {
        return Ok(verdict(
            NondegeneracyStatus::Certified,
            NondegeneracyEvidence::FreeMinor { minor },
            0,
        ));
    }

    let ray_vectors = rays.rational_rays();
    let m_rays = ray_flux_jacobian(sys, rays)?;
    if let Some(minor) = m_rays.find_minor(s, &[], same_sign)? {
        return Ok(verdict(
            NondegeneracyStatus::Certified,
            NondegeneracyEvidence::RayMinor {
                minor,
                matrix: m_rays,
            },
            0,
        ));
    }

    let Some(b_num) = sys.exponents().numeric() else {
        return Ok(verdict(
            NondegeneracyStatus::Inconclusive,
            NondegeneracyEvidence::None,
            0,
        ));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tried = 0;
    for sample in 0..=opts.samples {
        let lambda: Vec<Rational> = if sample == 0 {
            vec![Rational::from_integer(1.into()); ray_vectors.len()]
        } else {
            (0..ray_vectors.len())
                .map(|_| Rational::new(rng.gen_range(1..=97).into(), rng.gen_range(1..=97).into()))
                .collect()
        };
        tried += 1;
        let v: Vec<Rational> = (0..r)
            .map(|j| {
                lambda
                    .iter()
                    .zip(&ray_vectors)
                    .map(|(l, e)| l * &e[j])
                    .sum::<Rational>()
            })
            .collect();
        if numeric_flux_jacobian(n, &b_num, &v).rank() < s {
            return Ok(verdict(
                NondegeneracyStatus::Fails,
                NondegeneracyEvidence::Sample { v },
                tried,
            ));
        }
    }
    Ok(verdict(
        NondegeneracyStatus::Inconclusive,
        NondegeneracyEvidence::None,
        tried,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DivisibilityStatus {
    Divisible,
    NotDivisible,
    /// `p_v(h) ≡ 0`, so divisibility carries no information.
    NonInformative,
    Skipped,
}

/// The determinant `p_v(h) = det[N·diag(v(a))·Bᵗ·diag(h); W]` over `(a, h, symbols)`.
/// `None` when the system has no `W` or `d = 0`.
pub fn divisibility_polynomial(
    sys: &PowerLawSystem,
    cj: &ConvexJacobian,
) -> Result<Option<MultiPoly>, AnalysisError> {
    let Some(w) = sys.conservation() else {
        return Ok(None);
    };
    if sys.codimension() == 0 {
        return Ok(None);
    }
    let n = sys.num_species();
    let names: Vec<String> = cj
        .param_names()
        .iter()
        .cloned()
        .chain((1..=n).map(|i| format!("h{i}")))
        .chain(cj.symbols().iter().cloned())
        .collect();
    let vars = Vars::new(names);
    let lifted = cj.matrix().map(&vars, |p| {
        p.embed(&vars).expect("target contains every variable")
    });
    let h: Vec<MultiPoly> = (0..n)
        .map(|i| MultiPoly::var(&vars, cj.param_names().len() + i))
        .collect();
    let top = lifted.scale_columns(&h);
    let stacked = top.vstack(&PolyMatrix::from_rational(w, &vars))?;
    Ok(Some(stacked.det()?))
}

/// Necessary-only test: if `x_i` has local ACR (and non-degeneracy holds), `h_i` divides `p_v(h)`.
pub fn divisibility_of(
    p: Option<&MultiPoly>,
    i: usize,
) -> Result<DivisibilityStatus, AnalysisError> {
    Ok(match p {
        None => DivisibilityStatus::Skipped,
        Some(p) if p.is_zero() => DivisibilityStatus::NonInformative,
        Some(p) => {
            if p.divisible_by(&format!("h{}", i + 1))? {
                DivisibilityStatus::Divisible
            } else {
                DivisibilityStatus::NotDivisible
            }
        }
    })
}

pub fn divisibility_test(
    sys: &PowerLawSystem,
    cj: &ConvexJacobian,
    i: usize,
) -> Result<DivisibilityStatus, AnalysisError> {
    if i >= sys.num_species() {
        return Err(AnalysisError::SpeciesOutOfRange {
            index: i,
            count: sys.num_species(),
        });
    }
    divisibility_of(divisibility_polynomial(sys, cj)?.as_ref(), i)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeciesAnalysis {
    /// `None` when the flux cone has no interior point.
    pub acr: Option<AcrVerdict>,
    pub divisibility: DivisibilityStatus,
    /// Local ACR (condition (3)) implies zero sensitivity at every non-degenerate point.
    pub zero_sensitivity_implied: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub jacobian: ConvexJacobian,
    pub rays: ConeRays,
    pub nondegeneracy: NondegeneracyVerdict,
    pub species: Vec<SpeciesAnalysis>,
    pub divisibility_polynomial: Option<MultiPoly>,
    pub notes: Vec<String>,
}

pub fn analyze_detailed(
    sys: &PowerLawSystem,
    opts: &AnalysisOptions,
) -> Result<Analysis, AnalysisError> {
    let jacobian = ConvexJacobian::new(sys)?;
    let rays = extreme_rays(sys.coefficient_matrix());
    let nondegeneracy = nondegeneracy_test(sys, &rays, opts)?;
    let n = sys.num_species();
    let mut notes = Vec::new();

    if nondegeneracy.status == NondegeneracyStatus::EmptyCone {
        notes.push(
            "ker(N) contains no strictly positive vector: there are no positive steady states for any k"
                .to_string(),
        );
        let species = (0..n)
            .map(|_| SpeciesAnalysis {
                acr: None,
                divisibility: DivisibilityStatus::Skipped,
                zero_sensitivity_implied: None,
            })
            .collect();
        return Ok(Analysis {
            jacobian,
            rays,
            nondegeneracy,
            species,
            divisibility_polynomial: None,
            notes,
        });
    }

    let divisibility_polynomial = divisibility_polynomial(sys, &jacobian)?;
    let mut species = Vec::with_capacity(n);
    for i in 0..n {
        let acr = local_acr_test(&jacobian, i)?;
        let divisibility = divisibility_of(divisibility_polynomial.as_ref(), i)?;
        species.push(SpeciesAnalysis {
            zero_sensitivity_implied: Some(acr.status == AcrStatus::Yes),
            acr: Some(acr),
            divisibility,
        });
    }

    if nondegeneracy.status == NondegeneracyStatus::Certified {
        notes.push(
            "every positive steady state is non-degenerate: YES means local ACR over all positive steady states, for every k with one"
                .to_string(),
        );
    } else {
        notes.push(
            "non-degeneracy not certified: YES means local ACR over the components with a non-degenerate point"
                .to_string(),
        );
    }
    if sys.codimension() == 0 {
        notes.push("s = n: the steady-state set is finite, so local ACR holds vacuously for every species (finite solution set); divisibility skipped".to_string());
    } else if sys.conservation().is_none() {
        notes.push("no conservation matrix W given: divisibility test skipped".to_string());
    } else if divisibility_polynomial
        .as_ref()
        .is_some_and(MultiPoly::is_zero)
    {
        notes.push(
            "p_v(h) is identically zero: the divisibility test is not informative".to_string(),
        );
    }
    if !jacobian.symbols().is_empty() {
        notes.push(format!(
            "exponent symbols {} are assumed positive in the non-degeneracy test",
            jacobian.symbols().join(", ")
        ));
    }
    notes.push("local ACR coincides with ACR when the positive steady-state set is connected (not checked)".to_string());

    Ok(Analysis {
        jacobian,
        rays,
        nondegeneracy,
        species,
        divisibility_polynomial,
        notes,
    })
}

pub fn analyze(
    sys: &PowerLawSystem,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport, AnalysisError> {
    Ok(AnalysisReport::new(
        sys,
        &analyze_detailed(sys, opts)?,
        opts,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub d: usize,
    pub species: Vec<String>,
    pub rates: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symbols: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorReport {
    /// Species labelling the minor's columns.
    pub columns: Vec<String>,
    pub minor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceReport {
    FreeMinor {
        columns: Vec<String>,
        minor: String,
    },
    RayMinor {
        columns: Vec<String>,
        minor: String,
        ray_matrix: Vec<Vec<String>>,
    },
    Sample {
        v: Vec<String>,
    },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeciesReport {
    pub species: String,
    pub local_acr: Option<AcrStatus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<MinorReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<String>,
    pub divisibility: DivisibilityStatus,
    pub zero_sensitivity_implied: Option<bool>,
}

/// Serializable summary of an [`Analysis`]. Polynomials are rendered in graded
/// lexicographic order and rationals as `n` or `n/d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub system: SystemSummary,
    pub nondegeneracy: NondegeneracyStatus,
    pub nondegeneracy_evidence: EvidenceReport,
    pub species: Vec<SpeciesReport>,
    pub kernel_basis: Vec<Vec<String>>,
    pub extreme_rays: Vec<Vec<String>>,
    pub convex_jacobian: Vec<Vec<String>>,
    pub seed: u64,
    pub samples: usize,
    pub notes: Vec<String>,
}

fn render_rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

fn render_matrix(m: &PolyMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
        .collect()
}

impl AnalysisReport {
    pub fn new(sys: &PowerLawSystem, a: &Analysis, opts: &AnalysisOptions) -> Self {
        let names = sys.species();
        let minor = |m: &Minor| MinorReport {
            columns: m.cols.iter().map(|&c| names[c].clone()).collect(),
            minor: m.value.to_string(),
        };
        let nondegeneracy_evidence = match &a.nondegeneracy.evidence {
            NondegeneracyEvidence::FreeMinor { minor: m } => {
                let r = minor(m);
                EvidenceReport::FreeMinor {
                    columns: r.columns,
                    minor: r.minor,
                }
            }
            NondegeneracyEvidence::RayMinor { minor: m, matrix } => {
                let r = minor(m);
                EvidenceReport::RayMinor {
                    columns: r.columns,
                    minor: r.minor,
                    ray_matrix: render_matrix(matrix),
                }
            }
            NondegeneracyEvidence::Sample { v } => EvidenceReport::Sample {
                v: render_rationals(v),
            },
            NondegeneracyEvidence::None => EvidenceReport::None,
        };
        let species = a
            .species
            .iter()
            .enumerate()
            .map(|(i, sp)| SpeciesReport {
                species: names[i].clone(),
                local_acr: sp.acr.as_ref().map(|v| v.status),
                witness: sp
                    .acr
                    .as_ref()
                    .filter(|v| v.status != AcrStatus::Yes)
                    .and_then(|v| v.witness.as_ref())
                    .map(minor),
                conditions: sp
                    .acr
                    .as_ref()
                    .map(|v| v.conditions.iter().map(|c| format!("{c} = 0")).collect())
                    .unwrap_or_default(),
                divisibility: sp.divisibility,
                zero_sensitivity_implied: sp.zero_sensitivity_implied,
            })
            .collect();
        AnalysisReport {
            system: SystemSummary {
                n: sys.num_species(),
                r: sys.num_reactions(),
                s: sys.rank(),
                d: sys.codimension(),
                species: names.to_vec(),
                rates: sys.rates().to_vec(),
                symbols: a.jacobian.symbols().to_vec(),
            },
            nondegeneracy: a.nondegeneracy.status,
            nondegeneracy_evidence,
            species,
            kernel_basis: a
                .jacobian
                .basis()
                .iter()
                .map(|w| render_rationals(w))
                .collect(),
            extreme_rays: a
                .rays
                .rays()
                .iter()
                .map(|e| e.iter().map(|x| x.to_string()).collect())
                .collect(),
            convex_jacobian: render_matrix(a.jacobian.matrix()),
            seed: opts.seed,
            samples: opts.samples,
            notes: a.notes.clone(),
        }
    }
}
