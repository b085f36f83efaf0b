//! Sparse multivariate polynomials with rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Signed, Zero};

use super::rational::{denominator_lcm, fmt_rational, is_unit, to_f64, Rational};
use super::AlgebraError;

/// An ordered list of variable names shared by every polynomial of one computation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Vars(names.into_iter().map(Into::into).collect::<Vec<_>>().into())
    }

    /// `prefix1, prefix2, ..., prefix{count}`.
    pub fn indexed(prefix: &str, count: usize) -> Self {
        Vars::new((1..=count).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Concatenation; `None` if a name would repeat.
    pub fn concat(&self, other: &Vars) -> Option<Vars> {
        let mut names: Vec<String> = self.0.to_vec();
        for n in other.names() {
            if names.contains(n) {
                return None;
            }
            names.push(n.clone());
        }
        Some(Vars(names.into()))
    }

    fn same(&self, other: &Vars) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

/// Coefficient sign classification of a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignProfile {
    AllPositive,
    AllNegative,
    Mixed,
    Zero,
}

/// A polynomial as a map from exponent vectors to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &Vars) -> Self {
        MultiPoly::constant(vars, Rational::one())
    }

    /// The variable with index `i`.
    pub fn var(vars: &Vars, i: usize) -> Self {
        assert!(i < vars.len(), "variable index {i} out of range");
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        MultiPoly::monomial(vars, e, Rational::one())
    }

    pub fn var_named(vars: &Vars, name: &str) -> Result<Self, AlgebraError> {
        let i = vars
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))?;
        Ok(MultiPoly::var(vars, i))
    }

    pub fn monomial(vars: &Vars, exponents: Monomial, c: Rational) -> Self {
        assert_eq!(exponents.len(), vars.len(), "exponent vector length");
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, merging repeats and dropping zeros.
    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Linear form `sum_i coeffs[i] * var_i`.
    pub fn linear(vars: &Vars, coeffs: &[Rational]) -> Self {
        assert_eq!(coeffs.len(), vars.len());
        MultiPoly::from_terms(
            vars,
            coeffs.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; vars.len()];
                e[i] = 1;
                (e, c.clone())
            }),
        )
    }

    fn add_term(&mut self, e: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Degree in the variables whose indices are listed.
    pub fn degree_in(&self, indices: &[usize]) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| indices.iter().map(|&i| e[i]).sum())
            .max()
    }

    pub fn sign_profile(&self) -> SignProfile {
        let mut pos = false;
        let mut neg = false;
        for c in self.terms.values() {
            if c.is_positive() {
                pos = true;
            } else {
                neg = true;
            }
        }
        match (pos, neg) {
            (false, false) => SignProfile::Zero,
            (true, false) => SignProfile::AllPositive,
            (false, true) => SignProfile::AllNegative,
            (true, true) => SignProfile::Mixed,
        }
    }

    /// Nonzero with every coefficient of one sign.
    pub fn is_same_sign(&self) -> bool {
        matches!(
            self.sign_profile(),
            SignProfile::AllPositive | SignProfile::AllNegative
        )
    }

    /// True iff every term carries a positive power of `name`. The zero polynomial is
    /// divisible by every variable.
    pub fn divisible_by(&self, name: &str) -> Result<bool, AlgebraError> {
        let i = self
            .vars
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))?;
        Ok(self.terms.keys().all(|e| e[i] > 0))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = MultiPoly::one(&self.vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Self {
        MultiPoly::from_terms(
            &self.vars,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, c * Rational::from_integer(BigInt::from(e[i])))
            }),
        )
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len(), "evaluation point length");
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.vars.len(), "evaluation point length");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(to_f64(c), |acc, (&k, x)| acc * x.powi(k as i32))
            })
            .sum()
    }

    /// Substitutes `images[i]` for variable `i`; the result lives over the images' variables.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.vars.len(), "one image per variable");
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => {
                return MultiPoly::constant(&Vars::new(Vec::<String>::new()), self.constant_term())
            }
        };
        let mut out = MultiPoly::zero(&target);
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::one(&target), p.clone()])
            .collect();
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    fn constant_term(&self) -> Rational {
        self.terms
            .iter()
            .find(|(e, _)| e.iter().all(|&x| x == 0))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Re-expresses the polynomial over `target`, which must contain every variable that
    /// occurs with a nonzero exponent.
    pub fn embed(&self, target: &Vars) -> Result<MultiPoly, AlgebraError> {
        let map: Vec<Option<usize>> = self
            .vars
            .names()
            .iter()
            .map(|n| target.index_of(n))
            .collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (k, &x) in e.iter().enumerate() {
                match map[k] {
                    Some(j) => e2[j] = x,
                    None if x == 0 => {}
                    None => {
                        return Err(AlgebraError::UnknownVariable(self.vars.names()[k].clone()))
                    }
                }
            }
            terms.push((e2, c.clone()));
        }
        Ok(MultiPoly::from_terms(target, terms))
    }

    /// Splits by the exponents of the variables in `split`: returns, for each distinct
    /// exponent pattern on those variables, the coefficient polynomial in the remaining ones.
    /// Coefficients keep the full variable list (the split variables have exponent zero).
    pub fn coefficients_in(&self, split: &[usize]) -> BTreeMap<Vec<u32>, MultiPoly> {
        let mut out: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let key: Vec<u32> = split.iter().map(|&i| e[i]).collect();
            let mut rest = e.clone();
            for &i in split {
                rest[i] = 0;
            }
            out.entry(key)
                .or_insert_with(|| MultiPoly::zero(&self.vars))
                .add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Divides by the rational content and makes the leading (graded-lex largest)
    /// coefficient positive.
    pub fn primitive(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = denominator_lcm(self.terms.values());
        let g = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c * &l).to_integer()));
        let mut factor = Rational::new(l, g);
        let lead = self.sorted_terms().into_iter().next().unwrap().1;
        if lead.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Divides by the largest monomial dividing every term.
    pub fn without_monomial_factor(&self) -> MultiPoly {
        let Some(first) = self.terms.keys().next() else {
            return self.clone();
        };
        let common: Monomial = (0..self.vars.len())
            .map(|i| self.terms.keys().map(|e| e[i]).min().unwrap_or(first[i]))
            .collect();
        MultiPoly::from_terms(
            &self.vars,
            self.terms.iter().map(|(e, c)| {
                (
                    e.iter().zip(&common).map(|(a, b)| a - b).collect(),
                    c.clone(),
                )
            }),
        )
    }

    /// Terms in graded lexicographic order, largest first.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex(b.0, a.0));
        v
    }

    fn check_vars(&self, other: &MultiPoly) {
        assert!(
            self.vars.same(&other.vars),
            "polynomials over different variable lists: {:?} vs {:?}",
            self.vars.names(),
            other.vars.names()
        );
    }
}

/// Graded lexicographic comparison: total degree first, then lexicographic.
pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = MultiPoly::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    /// Canonical rendering, e.g. `-2*a + 2*c` or `-v1*v3*v4`, terms in graded-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            let abs = c.abs();
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    let name = &self.vars.names()[i];
                    if x == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{x}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if is_unit(&abs) {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn vars() -> Vars {
        Vars::new(["h1", "a", "c"])
    }

    #[test]
    fn zero_polynomial_properties() {
        let p = MultiPoly::zero(&vars());
        assert!(p.is_zero());
        assert_eq!(p.sign_profile(), SignProfile::Zero);
        for v in ["h1", "a", "c"] {
            assert!(p.divisible_by(v).unwrap());
        }
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn monomial_factor_removal() {
        let vs = vars();
        let h = MultiPoly::var(&vs, 0);
        let a = MultiPoly::var(&vs, 1);
        let c = MultiPoly::var(&vs, 2);
        let p = &(&h * &a) * &(&a - &c);
        assert_eq!(p.without_monomial_factor(), &a - &c);
        assert_eq!((&h * &a).without_monomial_factor(), MultiPoly::one(&vs));
        assert!(MultiPoly::zero(&vs).without_monomial_factor().is_zero());
    }

    #[test]
    fn product_of_variables() {
        let vs = vars();
        let p = &MultiPoly::var(&vs, 0) * &MultiPoly::var(&vs, 1);
        assert!(p.divisible_by("h1").unwrap());
        assert!(p.divisible_by("a").unwrap());
        assert!(!p.divisible_by("c").unwrap());
        assert_eq!(p.sign_profile(), SignProfile::AllPositive);
        assert_eq!(p.to_string(), "h1*a");
    }

    #[test]
    fn mixed_signs() {
        let vs = vars();
        let p = MultiPoly::linear(&vs, &[int(0), int(-1), int(2)]);
        assert_eq!(p.sign_profile(), SignProfile::Mixed);
        assert_eq!(p.to_string(), "-a + 2*c");
        assert!(!p.divisible_by("a").unwrap());
        assert!(matches!(
            p.divisible_by("z"),
            Err(AlgebraError::UnknownVariable(_))
        ));
    }

    #[test]
    fn arithmetic_cancels_to_zero() {
        let vs = vars();
        let a = MultiPoly::var(&vs, 1);
        let c = MultiPoly::var(&vs, 2);
        let s = &(&a + &c) * &(&a - &c);
        let t = &(&a * &a) - &(&c * &c);
        assert_eq!(s, t);
        assert!((&s - &t).is_zero());
    }

    #[test]
    fn evaluation_and_composition() {
        let vs = vars();
        let p = &MultiPoly::var(&vs, 1).pow(2) - &MultiPoly::var(&vs, 2).scale(&rat(1, 2));
        assert_eq!(p.eval(&[int(0), int(3), int(4)]), int(7));
        assert!((p.eval_f64(&[0.0, 3.0, 4.0]) - 7.0).abs() < 1e-12);
        let t = Vars::new(["u"]);
        let u = MultiPoly::var(&t, 0);
        let images = vec![u.clone(), u.clone(), &u + &u];
        let q = p.compose(&images);
        assert_eq!(q.to_string(), "u^2 - u");
    }

    #[test]
    fn primitive_form_and_coefficient_split() {
        let vs = vars();
        let p = MultiPoly::linear(&vs, &[int(0), int(-4), int(6)]);
        assert_eq!(p.primitive().to_string(), "2*a - 3*c");
        let q = &(&MultiPoly::var(&vs, 0) * &MultiPoly::var(&vs, 1)) + &MultiPoly::var(&vs, 2);
        let split = q.coefficients_in(&[0]);
        assert_eq!(split.len(), 2);
        assert_eq!(split[&vec![1]].to_string(), "a");
        assert_eq!(split[&vec![0]].to_string(), "c");
    }

    #[test]
    fn derivative_and_embedding() {
        let vs = Vars::new(["x"]);
        let x = MultiPoly::var(&vs, 0);
        let p = &x.pow(3).scale(&int(2)) - &x;
        assert_eq!(p.derivative(0).to_string(), "6*x^2 - 1");
        let big = Vars::new(["y", "x"]);
        assert_eq!(p.embed(&big).unwrap().to_string(), "2*x^3 - x");
        let lifted = p.embed(&big).unwrap();
        assert_eq!(lifted.embed(&vs).unwrap(), p);
        assert!(p.embed(&Vars::new(["y"])).is_err());
    }
}
