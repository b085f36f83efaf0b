//! Reaction networks and the power-law systems `g_k(x) = N·diag(k)·x^B` built from them.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num::traits::Zero;
use thiserror::Error;

use crate::algebra::rational::fmt_rational;
use crate::algebra::{AlgebraError, MultiPoly, PolyMatrix, Rational, RationalMatrix, Vars};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a network needs at least one reaction")]
    NoReactions,
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("duplicate species `{0}`")]
    DuplicateSpecies(String),
    #[error("duplicate rate constant `{0}`")]
    DuplicateRate(String),
    #[error("reaction {0} has identical reactant and product complexes")]
    NullReaction(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("the stoichiometric matrix is zero, so every criterion is vacuous")]
    ZeroStoichiometry,
    #[error(
        "symbol `{0}` collides with a reserved parameter name (a*, v*, h*, l* followed by digits)"
    )]
    ReservedSymbol(String),
    #[error("conservation matrix: {0}")]
    Conservation(String),
    #[error("exponent matrix has symbolic entries; a numeric matrix is required here")]
    SymbolicExponents,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub(crate) fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Names the analysis uses for its own polynomial variables.
pub(crate) fn is_reserved_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a' | 'v' | 'h' | 'l'))
        && !chars.as_str().is_empty()
        && chars.all(|c| c.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    pub reactant: Vec<u32>,
    pub product: Vec<u32>,
    pub rate: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    species: Vec<String>,
    reactions: Vec<Reaction>,
}

impl Network {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for s in &species {
            if !is_valid_name(s) {
                return Err(ModelError::InvalidName(s.clone()));
            }
            if !seen.insert(s.as_str()) {
                return Err(ModelError::DuplicateSpecies(s.clone()));
            }
        }
        if reactions.is_empty() {
            return Err(ModelError::NoReactions);
        }
        let mut rates = HashSet::new();
        for (j, r) in reactions.iter().enumerate() {
            if r.reactant.len() != species.len() || r.product.len() != species.len() {
                return Err(ModelError::Dimension(format!(
                    "reaction {j} has complexes of length {} and {}, expected {}",
                    r.reactant.len(),
                    r.product.len(),
                    species.len()
                )));
            }
            if r.reactant == r.product {
                return Err(ModelError::NullReaction(j));
            }
            if !is_valid_name(&r.rate) {
                return Err(ModelError::InvalidName(r.rate.clone()));
            }
            if !rates.insert(r.rate.as_str()) {
                return Err(ModelError::DuplicateRate(r.rate.clone()));
            }
        }
        Ok(Network { species, reactions })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn rates(&self) -> Vec<String> {
        self.reactions.iter().map(|r| r.rate.clone()).collect()
    }

    /// Γ with `gamma_ij = β_ij − α_ij`.
    pub fn stoichiometric_matrix(&self) -> RationalMatrix {
        self.matrix_from(|r, i| i64::from(r.product[i]) - i64::from(r.reactant[i]))
    }

    /// The mass-action exponent matrix: reactant coefficients.
    pub fn reactant_matrix(&self) -> RationalMatrix {
        self.matrix_from(|r, i| i64::from(r.reactant[i]))
    }

    fn matrix_from(&self, f: impl Fn(&Reaction, usize) -> i64) -> RationalMatrix {
        let n = self.species.len();
        let r = self.reactions.len();
        let mut m = RationalMatrix::zeros(n, r);
        for (j, reaction) in self.reactions.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, Rational::from_integer(f(reaction, i).into()));
            }
        }
        m
    }

    fn fmt_complex(&self, coeffs: &[u32]) -> String {
        let parts: Vec<String> = coeffs
            .iter()
            .zip(&self.species)
            .filter(|(c, _)| **c > 0)
            .map(|(c, s)| {
                if *c == 1 {
                    s.clone()
                } else {
                    format!("{c} {s}")
                }
            })
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// Prints the network in the `.crn` syntax accepted by the parser.
impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "species: {}", self.species.join(", "))?;
        for r in &self.reactions {
            writeln!(
                f,
                "{} -> {} ; {}",
                self.fmt_complex(&r.reactant),
                self.fmt_complex(&r.product),
                r.rate
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Value(Rational),
    Symbol(String),
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Value(q) => f.write_str(&fmt_rational(q)),
            Exponent::Symbol(s) => f.write_str(s),
        }
    }
}

/// The kinetic exponent matrix `B`, whose entries may be opaque symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Exponent>,
}

impl ExponentMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Exponent>) -> Result<Self, ModelError> {
        if entries.len() != rows * cols {
            return Err(ModelError::Dimension(format!(
                "{} exponent entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        for e in &entries {
            if let Exponent::Symbol(s) = e {
                if !is_valid_name(s) {
                    return Err(ModelError::InvalidName(s.clone()));
                }
                if is_reserved_symbol(s) {
                    return Err(ModelError::ReservedSymbol(s.clone()));
                }
            }
        }
        Ok(ExponentMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_numeric(m: &RationalMatrix) -> Self {
        let entries = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .map(|(i, j)| Exponent::Value(m.get(i, j).clone()))
            .collect();
        ExponentMatrix {
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Exponent {
        &self.entries[i * self.cols + j]
    }

    /// Distinct symbols in row-major order of first appearance.
    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.entries {
            if let Exponent::Symbol(s) = e {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    pub fn is_symbolic(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e, Exponent::Symbol(_)))
    }

    pub fn numeric(&self) -> Option<RationalMatrix> {
        let data = self
            .entries
            .iter()
            .map(|e| match e {
                Exponent::Value(q) => Some(q.clone()),
                Exponent::Symbol(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        RationalMatrix::from_vec(self.rows, self.cols, data).ok()
    }

    /// Replaces every symbol by its value; all symbols must be assigned.
    pub fn substitute(
        &self,
        values: &BTreeMap<String, Rational>,
    ) -> Result<RationalMatrix, ModelError> {
        let data =
            self.entries
                .iter()
                .map(|e| match e {
                    Exponent::Value(q) => Ok(q.clone()),
                    Exponent::Symbol(s) => values.get(s).cloned().ok_or_else(|| {
                        ModelError::Algebra(AlgebraError::UnknownVariable(s.clone()))
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
        Ok(RationalMatrix::from_vec(self.rows, self.cols, data)?)
    }

    /// The matrix over `vars`, which must contain every symbol.
    pub fn to_poly(&self, vars: &Vars) -> Result<PolyMatrix, AlgebraError> {
        let entries = self
            .entries
            .iter()
            .map(|e| match e {
                Exponent::Value(q) => Ok(MultiPoly::constant(vars, q.clone())),
                Exponent::Symbol(s) => MultiPoly::var_named(vars, s),
            })
            .collect::<Result<Vec<_>, _>>()?;
        PolyMatrix::from_entries(self.rows, self.cols, vars, entries)
    }
}

impl fmt::Display for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kinetics {
    MassAction,
    Explicit(ExponentMatrix),
}

/// A power-law steady-state system `g_k(x) = N·diag(k)·x^B` with its conservation matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerLawSystem {
    species: Vec<String>,
    rates: Vec<String>,
    gamma: Option<RationalMatrix>,
    b: ExponentMatrix,
    n: RationalMatrix,
    selected_rows: Vec<usize>,
    w: Option<RationalMatrix>,
    s: usize,
}

impl PowerLawSystem {
    pub fn from_network(net: &Network, kinetics: &Kinetics) -> Result<Self, ModelError> {
        let b = match kinetics {
            Kinetics::MassAction => ExponentMatrix::from_numeric(&net.reactant_matrix()),
            Kinetics::Explicit(b) => b.clone(),
        };
        PowerLawSystem::from_gamma(
            net.species().to_vec(),
            net.rates(),
            net.stoichiometric_matrix(),
            b,
        )
    }

    /// Builds from Γ: `N` is the greedy independent-row selection and `W` the left kernel.
    pub fn from_gamma(
        species: Vec<String>,
        rates: Vec<String>,
        gamma: RationalMatrix,
        b: ExponentMatrix,
    ) -> Result<Self, ModelError> {
        check_shapes(&species, &rates, gamma.rows(), gamma.cols(), &b, "Gamma")?;
        let (selected_rows, n) = gamma.select_independent_rows();
        if selected_rows.is_empty() {
            return Err(ModelError::ZeroStoichiometry);
        }
        let w = RationalMatrix::from_rows(species.len(), &gamma.left_kernel_basis())?;
        let s = selected_rows.len();
        Ok(PowerLawSystem {
            species,
            rates,
            gamma: Some(gamma),
            b,
            n,
            selected_rows,
            w: Some(w),
            s,
        })
    }

    /// Builds from a coefficient matrix `N` (n columns of species are given by `B`).
    /// Dependent rows of `N` are dropped. `W`, when given, must have `n − s` independent rows.
    pub fn from_coefficients(
        species: Vec<String>,
        rates: Vec<String>,
        n_matrix: RationalMatrix,
        b: ExponentMatrix,
        w: Option<RationalMatrix>,
    ) -> Result<Self, ModelError> {
        check_shapes(&species, &rates, b.rows(), n_matrix.cols(), &b, "N")?;
        let (selected_rows, n) = n_matrix.select_independent_rows();
        if selected_rows.is_empty() {
            return Err(ModelError::ZeroStoichiometry);
        }
        let s = selected_rows.len();
        let sys = PowerLawSystem {
            species,
            rates,
            gamma: None,
            b,
            n,
            selected_rows,
            w: None,
            s,
        };
        match w {
            Some(w) => sys.with_conservation(w),
            None => Ok(sys),
        }
    }

    /// Replaces `W`. Rows must be independent and number `n − s`; when Γ is known they
    /// must also annihilate it.
    pub fn with_conservation(mut self, w: RationalMatrix) -> Result<Self, ModelError> {
        let n = self.species.len();
        let d = n - self.s;
        if w.cols() != n || w.rows() != d {
            return Err(ModelError::Conservation(format!(
                "expected a {d}x{n} matrix, got {}x{}",
                w.rows(),
                w.cols()
            )));
        }
        if w.rank() != d {
            return Err(ModelError::Conservation("rows are not independent".into()));
        }
        if let Some(gamma) = &self.gamma {
            if !w.mul(gamma)?.is_zero() {
                return Err(ModelError::Conservation("W·Gamma is not zero".into()));
            }
        }
        self.w = Some(w);
        Ok(self)
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn rates(&self) -> &[String] {
        &self.rates
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn num_reactions(&self) -> usize {
        self.rates.len()
    }

    /// `s = rank(N)`.
    pub fn rank(&self) -> usize {
        self.s
    }

    /// `d = n − s`.
    pub fn codimension(&self) -> usize {
        self.species.len() - self.s
    }

    pub fn gamma(&self) -> Option<&RationalMatrix> {
        self.gamma.as_ref()
    }

    pub fn exponents(&self) -> &ExponentMatrix {
        &self.b
    }

    pub fn numeric_exponents(&self) -> Result<RationalMatrix, ModelError> {
        self.b.numeric().ok_or(ModelError::SymbolicExponents)
    }

    pub fn coefficient_matrix(&self) -> &RationalMatrix {
        &self.n
    }

    pub fn selected_rows(&self) -> &[usize] {
        &self.selected_rows
    }

    pub fn conservation(&self) -> Option<&RationalMatrix> {
        self.w.as_ref()
    }

    /// The same system with every symbol in `B` replaced by a value.
    pub fn specialize(&self, values: &BTreeMap<String, Rational>) -> Result<Self, ModelError> {
        let b = ExponentMatrix::from_numeric(&self.b.substitute(values)?);
        Ok(PowerLawSystem { b, ..self.clone() })
    }
}

fn check_shapes(
    species: &[String],
    rates: &[String],
    rows: usize,
    cols: usize,
    b: &ExponentMatrix,
    what: &str,
) -> Result<(), ModelError> {
    let n = species.len();
    let r = rates.len();
    if what == "Gamma" && (rows != n || cols != r) {
        return Err(ModelError::Dimension(format!(
            "Gamma is {rows}x{cols}, expected {n}x{r}"
        )));
    }
    if what == "N" && cols != r {
        return Err(ModelError::Dimension(format!(
            "N has {cols} columns, expected {r}"
        )));
    }
    if b.rows() != n || b.cols() != r {
        return Err(ModelError::Dimension(format!(
            "B is {}x{}, expected {n}x{r}",
            b.rows(),
            b.cols()
        )));
    }
    if r == 0 {
        return Err(ModelError::NoReactions);
    }
    let mut seen = HashSet::new();
    for s in species {
        if !is_valid_name(s) {
            return Err(ModelError::InvalidName(s.clone()));
        }
        if !seen.insert(s) {
            return Err(ModelError::DuplicateSpecies(s.clone()));
        }
    }
    let mut seen = HashSet::new();
    for k in rates {
        if !is_valid_name(k) {
            return Err(ModelError::InvalidName(k.clone()));
        }
        if !seen.insert(k) {
            return Err(ModelError::DuplicateRate(k.clone()));
        }
    }
    Ok(())
}

/// Evaluates `g_k(x)` in floating point. `B` must be numeric.
pub fn evaluate_g(sys: &PowerLawSystem, b: &RationalMatrix, k: &[f64], x: &[f64]) -> Vec<f64> {
    let flux = fluxes(b, k, x);
    let n = sys.coefficient_matrix();
    (0..n.rows())
        .map(|i| {
            (0..n.cols())
                .map(|j| crate::algebra::rational::to_f64(n.get(i, j)) * flux[j])
                .sum()
        })
        .collect()
}

/// `diag(k)·x^B`, one entry per reaction.
pub fn fluxes(b: &RationalMatrix, k: &[f64], x: &[f64]) -> Vec<f64> {
    (0..b.cols())
        .map(|j| {
            let mono: f64 = (0..b.rows())
                .filter(|&i| !b.get(i, j).is_zero())
                .map(|i| x[i].powf(crate::algebra::rational::to_f64(b.get(i, j))))
                .product();
            k[j] * mono
        })
        .collect()
}
