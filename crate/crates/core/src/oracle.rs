//! Independent brute-force ground truth: exact minimization of a form over
//! rational grids on the simplex.
//!
//! The grid with denominator N consists of all points `(k_1/N, ..., k_n/N)`
//! with nonnegative integers summing to N. Evaluation at such a point
//! reduces to one big-integer sum per point (the common denominator `N^d`
//! is factored out), so the whole scan is exact and reasonably fast. The
//! grid refines as N is replaced by a multiple, and the minimum can only
//! decrease under refinement.

use crate::form::{Form, SimplexPoint};
use crate::rng::SplitMix64;
use crate::util::{binomial, biguint_pow, Compositions};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use std::fmt;

/// Default cap on the number of grid points examined in one call.
pub const DEFAULT_POINT_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    BudgetExceeded { points: BigUint, budget: u64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BudgetExceeded { points, budget } => {
                write!(f, "grid has {points} points, over the budget of {budget}")
            }
        }
    }
}

impl std::error::Error for OracleError {}

/// A rational grid on the simplex in n variables with denominator N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub denominator: u64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(denominator: u64, n: usize) -> Self {
        assert!(denominator >= 1 && n >= 1);
        GridSpec { denominator, n }
    }

    /// Number of grid points: C(N+n-1, n-1).
    pub fn point_count(&self) -> BigUint {
        binomial(self.denominator + self.n as u64 - 1, self.n as u64 - 1)
    }

    /// Integer numerator tuples `(k_1, ..., k_n)` in colex order.
    pub fn numerators(&self) -> Compositions {
        Compositions::new(self.denominator, self.n)
    }
}

fn point_from_numerators(ks: &[u64], denominator: u64) -> SimplexPoint {
    let coords = ks
        .iter()
        .map(|&k| BigRational::new(BigInt::from(k), BigInt::from(denominator)))
        .collect();
    SimplexPoint::new(coords).expect("grid points lie on the simplex")
}

/// Exact minimum of the form over the grid with denominator N, together
/// with the first attaining point in colex enumeration order.
pub fn grid_min(f: &Form, denominator: u64) -> Result<(BigRational, SimplexPoint), OracleError> {
    grid_min_with_budget(f, denominator, DEFAULT_POINT_BUDGET)
}

pub fn grid_min_with_budget(
    f: &Form,
    denominator: u64,
    budget: u64,
) -> Result<(BigRational, SimplexPoint), OracleError> {
    let spec = GridSpec::new(denominator, f.n());
    let points = spec.point_count();
    if points > BigUint::from(budget) {
        return Err(OracleError::BudgetExceeded { points, budget });
    }
    // Value at k/N is (sum_a c_a * prod k_i^(a_i)) / N^d; minimize the
    // integer numerators over the common denominator N^d.
    let mut best_num: Option<BigInt> = None;
    let mut best_ks: Vec<u64> = Vec::new();
    for ks in spec.numerators() {
        let mut num = BigInt::from(0);
        for (exp, coef) in f.terms() {
            let mut prod = coef.clone();
            let mut skip = false;
            for (&k, &e) in ks.iter().zip(exp.exponents()) {
                if e > 0 {
                    if k == 0 {
                        skip = true;
                        break;
                    }
                    prod *= BigInt::from(biguint_pow(&BigUint::from(k), e as u64));
                }
            }
            if !skip {
                num += prod;
            }
        }
        if best_num.as_ref().is_none_or(|b| &num < b) {
            best_num = Some(num);
            best_ks = ks;
        }
    }
    let den = BigInt::from(biguint_pow(&BigUint::from(denominator), f.degree() as u64));
    let value = BigRational::new(best_num.expect("grid nonempty"), den);
    Ok((value, point_from_numerators(&best_ks, denominator)))
}

/// Minimum of the form over `trials` pseudorandom simplex points with
/// bounded denominators. Deterministic for a fixed seed.
pub fn random_probe(f: &Form, trials: u32, seed: u64) -> (BigRational, SimplexPoint) {
    assert!(trials >= 1);
    let mut rng = SplitMix64::new(seed);
    let n = f.n();
    let mut best: Option<(BigRational, SimplexPoint)> = None;
    for _ in 0..trials {
        let q = 1 + rng.below(1000);
        // Uniform composition of q into n parts via sorted cut points.
        let mut cuts: Vec<u64> = (0..n - 1).map(|_| rng.below(q + 1)).collect();
        cuts.sort_unstable();
        cuts.insert(0, 0);
        cuts.push(q);
        let ks: Vec<u64> = cuts.windows(2).map(|w| w[1] - w[0]).collect();
        let point = point_from_numerators(&ks, q);
        let value = f.evaluate_point(&point);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, point));
        }
    }
    best.expect("at least one trial")
}

/// Convenience used by cross-checks: the smallest denominator `N <= cap`
/// whose grid contains a negative point, with that point.
pub fn first_negative_grid(
    f: &Form,
    cap: u64,
) -> Result<Option<(u64, BigRational, SimplexPoint)>, OracleError> {
    use num_traits::Signed;
    for denominator in 1..=cap {
        let (value, point) = grid_min(f, denominator)?;
        if value.is_negative() {
            return Ok(Some((denominator, value, point)));
        }
    }
    Ok(None)
}
