//! Exact representation of integral homogeneous forms, simplex points, and
//! coefficient sign summaries.
//!
//! A form is stored sparsely as a map from exponent vectors to nonzero
//! arbitrary-precision integer coefficients, keyed in graded-lexicographic
//! order so that emission, equality, and digests are deterministic. All
//! evaluation is exact rational arithmetic; there is no floating-point path.

mod parse;

use crate::util::{binomial, ratio_to_string};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

/// Errors from form construction, parsing, and evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormError {
    /// Text does not match the polynomial grammar; byte position included.
    Syntax { position: usize, message: String },
    /// A coefficient with a decimal point or other non-integer syntax.
    NonIntegerCoefficient { position: usize },
    /// Two monomials with different total degrees.
    NonHomogeneous { first: u32, second: u32 },
    /// All terms cancelled (or none were given); the degree is undefined.
    ZeroForm,
    /// Point or exponent length differs from the variable count.
    DimensionMismatch { expected: usize, got: usize },
    /// A variable index above the explicitly requested variable count.
    VariableOutOfRange { index: usize, n: usize },
    /// Coordinates that are not a point of the standard simplex.
    NotASimplexPoint(String),
}

impl fmt::Display for FormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormError::Syntax { position, message } => {
                write!(f, "syntax error at byte {position}: {message}")
            }
            FormError::NonIntegerCoefficient { position } => {
                write!(f, "non-integer coefficient at byte {position}")
            }
            FormError::NonHomogeneous { first, second } => {
                write!(f, "non-homogeneous input: monomial degrees {first} and {second} differ")
            }
            FormError::ZeroForm => write!(f, "zero form: degree undefined"),
            FormError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected} coordinates, got {got}")
            }
            FormError::VariableOutOfRange { index, n } => {
                write!(f, "variable x{index} exceeds declared variable count {n}")
            }
            FormError::NotASimplexPoint(reason) => write!(f, "not a simplex point: {reason}"),
        }
    }
}

impl std::error::Error for FormError {}

/// Exponent vector of a monomial: one nonnegative exponent per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVec(Vec<u32>);

impl ExponentVec {
    pub fn new(exponents: Vec<u32>) -> Self {
        ExponentVec(exponents)
    }

    /// The exponent vector of `x_i^d` (1-based variable index).
    pub fn axis(n: usize, index: usize, degree: u32) -> Self {
        debug_assert!(index >= 1 && index <= n);
        let mut e = vec![0u32; n];
        e[index - 1] = degree;
        ExponentVec(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Componentwise sum, the exponent vector of a monomial product.
    pub fn mul(&self, other: &ExponentVec) -> ExponentVec {
        debug_assert_eq!(self.len(), other.len());
        ExponentVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for ExponentVec {
    fn cmp(&self, other: &Self) -> Ordering {
        // Graded-lexicographic: total degree first, then lexicographic.
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A nonzero homogeneous polynomial with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    n: usize,
    degree: u32,
    terms: BTreeMap<ExponentVec, BigInt>,
}

impl Form {
    /// Builds a form from raw terms: combines like terms, drops zero
    /// coefficients, checks homogeneity, and rejects the zero polynomial.
    pub fn from_terms(
        n: usize,
        raw: impl IntoIterator<Item = (ExponentVec, BigInt)>,
    ) -> Result<Form, FormError> {
        assert!(n >= 1, "variable count must be at least 1");
        let mut terms: BTreeMap<ExponentVec, BigInt> = BTreeMap::new();
        let mut degree: Option<u32> = None;
        for (exp, coef) in raw {
            if exp.len() != n {
                return Err(FormError::DimensionMismatch { expected: n, got: exp.len() });
            }
            let d = exp.degree();
            match degree {
                None => degree = Some(d),
                Some(existing) if existing != d => {
                    return Err(FormError::NonHomogeneous { first: existing, second: d })
                }
                _ => {}
            }
            let entry = terms.entry(exp.clone()).or_insert_with(BigInt::zero);
            *entry += coef;
            if entry.is_zero() {
                // The map only holds nonzero coefficients.
                terms.remove(&exp);
            }
        }
        if terms.is_empty() {
            return Err(FormError::ZeroForm);
        }
        let degree = degree.expect("nonempty");
        Ok(Form { n, degree, terms })
    }

    /// Parses the text grammar, inferring the variable count from the
    /// largest index used.
    pub fn parse(text: &str) -> Result<Form, FormError> {
        parse::parse_with_vars(text, None)
    }

    /// Parses with an explicit variable count, which must cover every index
    /// used in the text.
    pub fn parse_with_vars(text: &str, n: usize) -> Result<Form, FormError> {
        parse::parse_with_vars(text, Some(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lexicographic key order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVec, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &ExponentVec) -> Option<&BigInt> {
        self.terms.get(exp)
    }

    /// Coefficient of `x_i^d` (1-based), which equals the value of the form
    /// at the i-th simplex vertex.
    pub fn axis_coefficient(&self, index: usize) -> Option<&BigInt> {
        self.terms.get(&ExponentVec::axis(self.n, index, self.degree))
    }

    /// Number of degree-d monomials in n variables: C(d+n-1, n-1).
    pub fn monomial_capacity(&self) -> BigUint {
        binomial(self.degree as u64 + self.n as u64 - 1, self.n as u64 - 1)
    }

    /// True when every degree-d monomial carries a nonzero coefficient.
    pub fn is_complete(&self) -> bool {
        BigUint::from(self.terms.len()) == self.monomial_capacity()
    }

    /// The tightest coefficient bound: max |c| over all terms.
    pub fn coefficient_bound(&self) -> BigUint {
        self.terms
            .values()
            .map(|c| c.abs().to_biguint().expect("abs"))
            .max()
            .expect("nonzero form")
    }

    /// Exact value at an arbitrary rational point.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational, FormError> {
        if point.len() != self.n {
            return Err(FormError::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let mut acc = BigRational::zero();
        for (exp, coef) in &self.terms {
            let mut num = coef.clone();
            let mut den = BigInt::one();
            for (p, &e) in point.iter().zip(exp.exponents()) {
                if e > 0 {
                    num *= p.numer().pow(e);
                    den *= p.denom().pow(e);
                }
            }
            acc += BigRational::new(num, den);
        }
        Ok(acc)
    }

    /// Exact value at a simplex point of matching dimension.
    pub fn evaluate_point(&self, p: &SimplexPoint) -> BigRational {
        self.evaluate(p.coords()).expect("simplex point dimension")
    }

    /// Classifies the coefficient sign pattern and the pure-power slots.
    pub fn sign_summary(&self) -> SignSummary {
        let mut negative_axis_powers = BTreeSet::new();
        let mut zero_axis_powers = BTreeSet::new();
        for i in 1..=self.n {
            match self.axis_coefficient(i) {
                Some(c) if c.is_negative() => {
                    negative_axis_powers.insert(i);
                }
                Some(_) => {}
                None => {
                    zero_axis_powers.insert(i);
                }
            }
        }
        let any_negative = self.terms.values().any(|c| c.is_negative());
        let all_negative = self.terms.values().all(|c| c.is_negative());
        let complete = self.is_complete();
        let category = if complete && !any_negative {
            SignCategory::AllPositiveComplete
        } else if !any_negative {
            SignCategory::AllNonnegative
        } else if complete && all_negative {
            SignCategory::AllNegativeComplete
        } else {
            SignCategory::Mixed
        };
        SignSummary { category, negative_axis_powers, zero_axis_powers }
    }

    /// GCD of the coefficient magnitudes.
    pub fn content(&self) -> BigUint {
        let mut g = BigUint::zero();
        for c in self.terms.values() {
            g = g.gcd(&c.abs().to_biguint().expect("abs"));
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides every coefficient by the content. Signs and the root set on
    /// the simplex are unchanged.
    pub fn content_normalized(&self) -> Form {
        let g = self.content();
        if g.is_one() {
            return self.clone();
        }
        let g = BigInt::from(g);
        Form {
            n: self.n,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c / &g)).collect(),
        }
    }

    /// Canonical text of the form, highest graded-lex monomial first.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (idx, (exp, coef)) in self.terms.iter().rev().enumerate() {
            let neg = coef.is_negative();
            let mag = coef.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || exp.degree() == 0 {
                factors.push(mag.to_string());
            }
            for (i, &e) in exp.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    _ => factors.push(format!("x{}^{}", i + 1, e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Content hash binding certificates to this exact form (including the
    /// ambient variable count, which the text alone may not mention).
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("n={};{}", self.n, self.emit()).as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit())
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    exp: Vec<u32>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct FormWire {
    n: usize,
    terms: Vec<TermWire>,
}

impl Serialize for Form {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let wire = FormWire {
            n: self.n,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(e, c)| TermWire { exp: e.exponents().to_vec(), coef: c.to_string() })
                .collect(),
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Form {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Form, D::Error> {
        let wire = FormWire::deserialize(d)?;
        if wire.n == 0 {
            return Err(D::Error::custom("variable count must be at least 1"));
        }
        let mut raw = Vec::with_capacity(wire.terms.len());
        for t in wire.terms {
            let coef = BigInt::from_str(&t.coef)
                .map_err(|_| D::Error::custom(format!("invalid coefficient `{}`", t.coef)))?;
            raw.push((ExponentVec::new(t.exp), coef));
        }
        Form::from_terms(wire.n, raw).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Coefficient sign classification of a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCategory {
    /// Complete monomials, every coefficient strictly positive.
    AllPositiveComplete,
    /// No negative coefficient stored (some monomials may be missing).
    AllNonnegative,
    /// Both signs present, or negatives with gaps.
    Mixed,
    /// Complete monomials, every coefficient strictly negative.
    AllNegativeComplete,
}

/// Sign pattern of a form together with its pure-power diagnostics.
/// Indices are 1-based variable numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSummary {
    pub category: SignCategory,
    /// Variables i whose `x_i^d` coefficient is strictly negative.
    pub negative_axis_powers: BTreeSet<usize>,
    /// Variables i whose `x_i^d` coefficient is absent (zero).
    pub zero_axis_powers: BTreeSet<usize>,
}

/// A point of the standard simplex: nonnegative exact rationals with
/// coordinate sum exactly 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimplexPoint(Vec<BigRational>);

impl SimplexPoint {
    pub fn new(coords: Vec<BigRational>) -> Result<Self, FormError> {
        if coords.is_empty() {
            return Err(FormError::NotASimplexPoint("no coordinates".into()));
        }
        if coords.iter().any(|c| c.is_negative()) {
            return Err(FormError::NotASimplexPoint("negative coordinate".into()));
        }
        let sum: BigRational = coords.iter().sum();
        if !sum.is_one() {
            return Err(FormError::NotASimplexPoint(format!(
                "coordinates sum to {}, not 1",
                ratio_to_string(&sum)
            )));
        }
        Ok(SimplexPoint(coords))
    }

    /// The i-th vertex `e_i` (1-based).
    pub fn vertex(n: usize, index: usize) -> Self {
        debug_assert!(index >= 1 && index <= n);
        let mut coords = vec![BigRational::zero(); n];
        coords[index - 1] = BigRational::one();
        SimplexPoint(coords)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ratio_to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for SimplexPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.0.iter().map(ratio_to_string).collect();
        parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimplexPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<SimplexPoint, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        let coords = parts
            .iter()
            .map(|p| crate::util::ratio_from_string(p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        SimplexPoint::new(coords).map_err(|e| D::Error::custom(e.to_string()))
    }
}
