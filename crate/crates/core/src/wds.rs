//! Weighted-difference substitution matrices and exact form substitution.
//!
//! The generator `t_matrix(n)` is upper triangular with column j constant
//! `1/j` on its first j rows. A substitution matrix is `P * T_n` for a
//! permutation matrix `P`; all of them, and all of their products, are
//! column-stochastic with nonnegative entries, so composed substitutions
//! map the simplex onto nested subdivision cells whose vertices are the
//! matrix columns.
//!
//! `substitute` pushes a form through a composed substitution and rescales
//! the exact rational result to a primitive integer form, recording the
//! positive rational scale so that values are recoverable exactly:
//! `g(y) = s * f(A y)`.

use crate::form::{ExponentVec, Form, SimplexPoint};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// Errors from permutation construction and substitution plumbing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WdsError {
    InvalidPermutation(String),
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for WdsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WdsError::InvalidPermutation(reason) => write!(f, "invalid permutation: {reason}"),
            WdsError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: substitution is {expected}-dimensional, form has {got} variables")
            }
        }
    }
}

impl std::error::Error for WdsError {}

/// A permutation of `{1, ..., n}` stored as its image sequence `(k_1, ..., k_n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, WdsError> {
        let n = images.len();
        if n == 0 {
            return Err(WdsError::InvalidPermutation("empty image list".into()));
        }
        let mut seen = vec![false; n];
        for &k in &images {
            if k == 0 || k > n {
                return Err(WdsError::InvalidPermutation(format!("image {k} out of range 1..={n}")));
            }
            if seen[k - 1] {
                return Err(WdsError::InvalidPermutation(format!("image {k} repeated")));
            }
            seen[k - 1] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    /// All n! permutations in lexicographic order of their image sequences.
    pub fn all(n: usize) -> Vec<Permutation> {
        assert!(n >= 1);
        let mut current: Vec<usize> = (1..=n).collect();
        let mut out = Vec::new();
        loop {
            out.push(Permutation(current.clone()));
            // Standard next-permutation step.
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1])
            else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).expect("successor");
            current.swap(i, j);
            current[i + 1..].reverse();
        }
        out
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Image of position i (both 1-based).
    pub fn image(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Permutation, D::Error> {
        let images = Vec::<usize>::deserialize(d)?;
        Permutation::new(images).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Dense square matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        let mut m = RatMatrix { n, entries: vec![BigRational::zero(); n * n] };
        for i in 0..n {
            m.entries[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let n = rows.len();
        assert!(n >= 1 && rows.iter().all(|r| r.len() == n));
        RatMatrix { n, entries: rows.into_iter().flatten().collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at (row, col), 0-based.
    pub fn get(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[BigRational] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    /// Column as an owned vector (0-based).
    pub fn column(&self, col: usize) -> Vec<BigRational> {
        (0..self.n).map(|i| self.get(i, col).clone()).collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        RatMatrix { n, entries }
    }

    /// True iff every column sums to exactly 1.
    pub fn is_normal(&self) -> bool {
        (0..self.n).all(|j| {
            let sum: BigRational = (0..self.n).map(|i| self.get(i, j)).sum();
            sum.is_one()
        })
    }

    pub fn entries_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }
}

/// The triangular generator: column j constant `1/j` on rows 1..=j, 0 below.
pub fn t_matrix(n: usize) -> RatMatrix {
    assert!(n >= 1, "dimension must be at least 1");
    let mut rows = vec![vec![BigRational::zero(); n]; n];
    for j in 0..n {
        let w = BigRational::new(BigInt::one(), BigInt::from(j as u64 + 1));
        for row in rows.iter_mut().take(j + 1) {
            row[j] = w.clone();
        }
    }
    RatMatrix::from_rows(rows)
}

/// The substitution matrix `P * T_n` for a permutation with images
/// `(k_1, ..., k_n)`: entry (i, j) is `1/j` when `k_i <= j`, else 0.
pub fn wds_matrix(theta: &Permutation) -> RatMatrix {
    let n = theta.n();
    let mut rows = vec![vec![BigRational::zero(); n]; n];
    for i in 1..=n {
        let k = theta.image(i);
        for j in k..=n {
            rows[i - 1][j - 1] = BigRational::new(BigInt::one(), BigInt::from(j as u64));
        }
    }
    RatMatrix::from_rows(rows)
}

/// A composed substitution: the product of the matrices along a permutation
/// path, together with the path itself. Columns are the vertices of the
/// corresponding subdivision cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedSubstitution {
    path: Vec<Permutation>,
    matrix: RatMatrix,
}

impl ComposedSubstitution {
    /// Depth-0 substitution: the identity on n variables.
    pub fn identity(n: usize) -> Self {
        ComposedSubstitution { path: Vec::new(), matrix: RatMatrix::identity(n) }
    }

    pub fn from_path(n: usize, path: &[Permutation]) -> Result<Self, WdsError> {
        let mut c = ComposedSubstitution::identity(n);
        for theta in path {
            if theta.n() != n {
                return Err(WdsError::DimensionMismatch { expected: n, got: theta.n() });
            }
            c = c.compose(theta);
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn path(&self) -> &[Permutation] {
        &self.path
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// Extends the path by one step: multiply by that step's matrix on the
    /// right.
    pub fn compose(&self, theta: &Permutation) -> ComposedSubstitution {
        assert_eq!(theta.n(), self.n());
        let mut path = self.path.clone();
        path.push(theta.clone());
        ComposedSubstitution { path, matrix: self.matrix.mul(&wds_matrix(theta)) }
    }

    /// Decomposition of the matrix as `a_{ij} = alpha_i + beta_{ij}` with
    /// `beta_{i1} = 0`: alpha is column 1, beta columns j = 2..=n sum to 0.
    /// Returns `(alpha, beta)` with beta as an n-by-(n-1) row-major table.
    pub fn alpha_beta(&self) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
        let n = self.n();
        let alpha = self.matrix.column(0);
        let beta = (0..n)
            .map(|i| (1..n).map(|j| self.matrix.get(i, j) - &alpha[i]).collect())
            .collect();
        (alpha, beta)
    }

    /// Vertex i (1-based) of the subdivision cell: column i of the matrix.
    pub fn cell_vertex(&self, index: usize) -> SimplexPoint {
        debug_assert!(index >= 1 && index <= self.n());
        SimplexPoint::new(self.matrix.column(index - 1)).expect("columns of stochastic products are simplex points")
    }

    pub fn cell_vertices(&self) -> Vec<SimplexPoint> {
        (1..=self.n()).map(|i| self.cell_vertex(i)).collect()
    }
}

/// Substitution output: a primitive integer form `g` and the positive scale
/// `s` with `g(y) = s * f(A y)` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substituted {
    pub form: Form,
    pub scale: BigRational,
}

/// Applies a composed substitution to a form.
pub fn substitute(f: &Form, c: &ComposedSubstitution) -> Result<Substituted, WdsError> {
    if f.n() != c.n() {
        return Err(WdsError::DimensionMismatch { expected: c.n(), got: f.n() });
    }
    Ok(substitute_matrix(f, c.matrix()))
}

/// Applies a single substitution step.
pub fn substitute_step(f: &Form, theta: &Permutation) -> Result<Substituted, WdsError> {
    if f.n() != theta.n() {
        return Err(WdsError::DimensionMismatch { expected: theta.n(), got: f.n() });
    }
    Ok(substitute_matrix(f, &wds_matrix(theta)))
}

/// All n! single-step children of a form, in lexicographic permutation
/// order, each rescaled to a primitive integer form.
pub fn wds_children(f: &Form) -> Vec<(Permutation, Substituted)> {
    Permutation::all(f.n())
        .into_iter()
        .map(|theta| {
            let sub = substitute_step(f, &theta).expect("dimensions match");
            (theta, sub)
        })
        .collect()
}

type RatPoly = BTreeMap<ExponentVec, BigRational>;

fn poly_mul(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut out = RatPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let key = ea.mul(eb);
            let entry = out.entry(key).or_insert_with(BigRational::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn substitute_matrix(f: &Form, a: &RatMatrix) -> Substituted {
    let n = f.n();
    debug_assert_eq!(a.n(), n);

    // Linear form for each original variable, as a degree-1 polynomial in
    // the new variables.
    let linears: Vec<RatPoly> = (0..n)
        .map(|i| {
            let mut p = RatPoly::new();
            for j in 0..n {
                let coef = a.get(i, j);
                if !coef.is_zero() {
                    let mut exps = vec![0u32; n];
                    exps[j] = 1;
                    p.insert(ExponentVec::new(exps), coef.clone());
                }
            }
            p
        })
        .collect();

    // Powers of each linear form, cached across all terms.
    let mut max_exp = vec![0u32; n];
    for (exp, _) in f.terms() {
        for (i, &e) in exp.exponents().iter().enumerate() {
            max_exp[i] = max_exp[i].max(e);
        }
    }
    let one_poly: RatPoly =
        std::iter::once((ExponentVec::new(vec![0u32; n]), BigRational::one())).collect();
    let mut powers: Vec<Vec<RatPoly>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut cache = Vec::with_capacity(max_exp[i] as usize + 1);
        cache.push(one_poly.clone());
        for k in 1..=max_exp[i] as usize {
            let next = poly_mul(&cache[k - 1], &linears[i]);
            cache.push(next);
        }
        powers.push(cache);
    }

    // Expand term by term.
    let mut acc = RatPoly::new();
    for (exp, coef) in f.terms() {
        let mut prod = one_poly.clone();
        for (i, &e) in exp.exponents().iter().enumerate() {
            if e > 0 {
                prod = poly_mul(&prod, &powers[i][e as usize]);
            }
        }
        let c = BigRational::from(coef.clone());
        for (e, v) in prod {
            let entry = acc.entry(e).or_insert_with(BigRational::zero);
            *entry += &c * v;
        }
    }
    acc.retain(|_, c| !c.is_zero());

    // Rescale to the primitive integer form and record the exact scale.
    let mut den_lcm = BigInt::one();
    for c in acc.values() {
        den_lcm = den_lcm.lcm(c.denom());
    }
    let ints: Vec<(ExponentVec, BigInt)> = acc
        .into_iter()
        .map(|(e, c)| {
            let v = c.numer() * (&den_lcm / c.denom());
            (e, v)
        })
        .collect();
    let mut content = BigInt::zero();
    for (_, v) in &ints {
        content = content.gcd(v);
        if content.is_one() {
            break;
        }
    }
    let scale = BigRational::new(den_lcm, content.clone());
    let form = Form::from_terms(n, ints.into_iter().map(|(e, v)| (e, v / &content)))
        .expect("substitution of a nonzero form by an invertible matrix is nonzero");
    Substituted { form, scale }
}
