//! Exact evaluation of the simplex minimum lower bounds and the
//! substitution step-count bounds for integral forms.
//!
//! For an integral form of degree d in n variables with coefficient bound M,
//! the quantities computed here are:
//!
//! * `c1_lower_bound`: `(2M)^(-d^n) * n^(-d^(n+1)-d) * d^(-n*d^n)`, a lower
//!   bound on `|min|` over the simplex whenever that minimum is nonzero;
//! * `jp_simplex_bound`: `(2M)^(-d^(n+1)) * d^(-(n+1)*d^(n+1))`, the
//!   analogous bound over the corner region;
//! * `cp_steps` / `cnps_steps`: `floor(ln X / (ln n - ln(n-1))) + 2` where X
//!   is an explicit integer product; after that many substitution steps a
//!   positive definite form must show all-positive complete coefficients,
//!   and a non-PSD form must show an all-negative complete branch.
//!
//! X has millions of digits for moderate inputs, so it is kept in factored
//! form (base, exponent pairs) and the floor of the log ratio is computed by
//! adaptive-precision interval logarithms, doubling the working precision
//! until the floor is pinned. Exact big-integer cross-multiplication is the
//! fallback when the true quotient sits on (or next to) an integer, and is
//! also exposed directly as an independent route.

use crate::util::{approx_decimal, biguint_pow, ratio_to_string};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Decimal-digit budget for materializing factored integers exactly.
pub const DEFAULT_DIGIT_BUDGET: u64 = 10_000_000;

/// Cap on the bit size of a stored exponent such as d^n. Anything larger
/// could never be materialized within any sane digit budget.
const EXPONENT_BIT_CAP: f64 = (1u64 << 26) as f64;

const PRECISIONS: [u64; 8] = [64, 128, 256, 512, 1024, 2048, 4096, 8192];

#[derive(Debug, Clone, PartialEq)]
pub enum BoundsError {
    /// The log-ratio floor is only defined for X >= 1.
    XBelowOne,
    /// n = 0 everywhere; n = 1 for the step counts (the denominator
    /// ln n - ln(n-1) is undefined there).
    InvalidDimension { n: u32 },
    /// d must be at least 1.
    InvalidDegree,
    /// M must be at least 1 (M = 0 forces the zero form).
    InvalidCoefficientBound,
    /// Materializing the value would need more digits than the budget;
    /// the estimate of the required count is reported.
    DigitBudgetExceeded { required_digits: f64, budget: u64 },
    /// Interval precision was exhausted and the exact tie-break was itself
    /// beyond the digit budget.
    TieUnresolved,
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::XBelowOne => write!(f, "argument below 1"),
            BoundsError::InvalidDimension { n } => write!(f, "invalid dimension n = {n}"),
            BoundsError::InvalidDegree => write!(f, "degree must be at least 1"),
            BoundsError::InvalidCoefficientBound => {
                write!(f, "coefficient bound must be at least 1")
            }
            BoundsError::DigitBudgetExceeded { required_digits, budget } => write!(
                f,
                "exact value needs about {required_digits:.3e} decimal digits, over the budget of {budget}"
            ),
            BoundsError::TieUnresolved => {
                write!(f, "log-ratio floor sits on an integer that exceeds the exact-comparison budget")
            }
        }
    }
}

impl std::error::Error for BoundsError {}

/// An integer kept as a product of (base, exponent) pairs with like bases
/// merged, sorted by base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInt {
    factors: Vec<(BigUint, BigUint)>,
}

impl FactoredInt {
    pub fn one() -> Self {
        FactoredInt { factors: Vec::new() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (BigUint, BigUint)>) -> Self {
        let mut map: BTreeMap<BigUint, BigUint> = BTreeMap::new();
        for (base, exp) in pairs {
            if base.is_one() || exp.is_zero() {
                continue;
            }
            assert!(!base.is_zero(), "factored integers are positive");
            *map.entry(base).or_insert_with(BigUint::zero) += exp;
        }
        FactoredInt { factors: map.into_iter().collect() }
    }

    pub fn factors(&self) -> &[(BigUint, BigUint)] {
        &self.factors
    }

    /// Doubles the value.
    pub fn times_two(&self) -> Self {
        FactoredInt::from_pairs(
            self.factors
                .iter()
                .cloned()
                .chain(std::iter::once((BigUint::from(2u32), BigUint::one()))),
        )
    }

    pub fn log2_estimate(&self) -> f64 {
        self.factors
            .iter()
            .map(|(b, e)| e.to_f64().unwrap_or(f64::INFINITY) * biguint_log2(b))
            .sum()
    }

    pub fn decimal_digits_estimate(&self) -> f64 {
        self.log2_estimate() * std::f64::consts::LOG10_2
    }

    /// Multiplies the value out, refusing when the estimated digit count
    /// exceeds the budget.
    pub fn to_biguint(&self, digit_budget: u64) -> Result<BigUint, BoundsError> {
        let digits = self.decimal_digits_estimate();
        if !digits.is_finite() || digits > digit_budget as f64 {
            return Err(BoundsError::DigitBudgetExceeded {
                required_digits: digits,
                budget: digit_budget,
            });
        }
        let mut acc = BigUint::one();
        for (base, exp) in &self.factors {
            let e = exp.to_u64().ok_or(BoundsError::DigitBudgetExceeded {
                required_digits: digits,
                budget: digit_budget,
            })?;
            acc *= biguint_pow(base, e);
        }
        Ok(acc)
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.factors.iter().map(|(b, e)| format!("{b}^{e}")).collect();
        write!(f, "{}", parts.join(" * "))
    }
}

fn biguint_log2(b: &BigUint) -> f64 {
    if let Some(v) = b.to_u64() {
        return (v as f64).log2();
    }
    let bits = b.bits();
    let shift = bits - 53;
    let top = (b >> shift).to_u64().expect("53 bits") as f64;
    shift as f64 + top.log2()
}

// ---------------------------------------------------------------------------
// Rational interval arithmetic with outward dyadic rounding.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Interval {
    lo: BigRational,
    hi: BigRational,
}

fn dyadic_floor(x: &BigRational, prec: u64) -> BigRational {
    let scale = BigInt::from(BigUint::one() << prec);
    let scaled = (x.numer() * &scale).div_floor(x.denom());
    BigRational::new(scaled, scale)
}

fn dyadic_ceil(x: &BigRational, prec: u64) -> BigRational {
    let scale = BigInt::from(BigUint::one() << prec);
    let scaled = (x.numer() * &scale).div_ceil(x.denom());
    BigRational::new(scaled, scale)
}

impl Interval {
    fn exact(v: BigRational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    fn zero() -> Self {
        Interval::exact(BigRational::zero())
    }

    fn round(self, prec: u64) -> Self {
        Interval { lo: dyadic_floor(&self.lo, prec), hi: dyadic_ceil(&self.hi, prec) }
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    /// Scale by a nonnegative exact rational.
    fn scale(&self, r: &BigRational) -> Interval {
        debug_assert!(!r.is_negative());
        Interval { lo: &self.lo * r, hi: &self.hi * r }
    }

    /// Quotient with a strictly positive denominator interval.
    fn div(&self, den: &Interval) -> Interval {
        debug_assert!(den.lo.is_positive());
        let candidates = [
            &self.lo / &den.lo,
            &self.lo / &den.hi,
            &self.hi / &den.lo,
            &self.hi / &den.hi,
        ];
        Interval {
            lo: candidates.iter().min().expect("nonempty").clone(),
            hi: candidates.iter().max().expect("nonempty").clone(),
        }
    }
}

/// Interval for `atanh(t)` with exact rational `0 <= t <= 1/3`.
fn atanh_interval(t: &BigRational, prec: u64) -> Interval {
    debug_assert!(!t.is_negative());
    debug_assert!(t <= &BigRational::new(BigInt::one(), BigInt::from(3)));
    if t.is_zero() {
        return Interval::zero();
    }
    let wp = prec + 32;
    let t2 = t * t;
    let nine_eighths = BigRational::new(BigInt::from(9), BigInt::from(8));
    let threshold = BigRational::new(BigInt::one(), BigInt::from(BigUint::one() << (wp + 4)));

    let mut sum = Interval::zero();
    let mut power = Interval::exact(t.clone()); // t^(2j+1)
    let mut j: u64 = 0;
    loop {
        let inv = BigRational::new(BigInt::one(), BigInt::from(2 * j + 1));
        sum = sum.add(&power.scale(&inv)).round(wp);
        // Rounded finer than the stop threshold so the loop can reach it.
        power = power.scale(&t2).round(wp + 16);
        j += 1;
        if power.hi < threshold || j > 4 * wp {
            // Tail: sum_{i>=j} t^(2i+1)/(2i+1) <= t^(2j+1) / ((2j+1)(1-t^2))
            // and 1/(1-t^2) <= 9/8 for t <= 1/3.
            let tail =
                &power.hi * &nine_eighths / BigRational::from(BigInt::from(2 * j + 1));
            sum.hi += tail;
            break;
        }
    }
    sum.round(prec)
}

/// Interval for ln 2.
fn ln2_interval(prec: u64) -> Interval {
    let t = BigRational::new(BigInt::one(), BigInt::from(3));
    let a = atanh_interval(&t, prec + 2);
    a.scale(&BigRational::from(BigInt::from(2))).round(prec)
}

/// Interval for `ln v` where v fits in about prec bits.
fn ln_small(v: &BigUint, prec: u64) -> Interval {
    debug_assert!(!v.is_zero());
    if v.is_one() {
        return Interval::zero();
    }
    let k = v.bits() - 1;
    let ln2 = ln2_interval(prec + 2);
    let pow2 = BigUint::one() << k;
    if *v == pow2 {
        return ln2.scale(&BigRational::from(BigInt::from(k))).round(prec);
    }
    // v = m * 2^k with m in (1, 2): ln v = 2 atanh((v - 2^k)/(v + 2^k)) + k ln 2.
    let t = BigRational::new(BigInt::from(v - &pow2), BigInt::from(v + &pow2));
    let a = atanh_interval(&t, prec + 2).scale(&BigRational::from(BigInt::from(2)));
    a.add(&ln2.scale(&BigRational::from(BigInt::from(k)))).round(prec)
}

/// Interval for `ln b` for arbitrary positive integers: big operands are
/// truncated to a prec-sized mantissa first, with the truncation absorbed
/// into the interval.
fn ln_uint(b: &BigUint, prec: u64) -> Interval {
    debug_assert!(!b.is_zero());
    let bits = b.bits();
    let mant_bits = prec + 16;
    if bits <= mant_bits {
        return ln_small(b, prec);
    }
    let shift = bits - mant_bits;
    let lo_mant = b >> shift;
    let hi_mant = &lo_mant + BigUint::one();
    let ln2 = ln2_interval(prec + 2);
    let shift_term = ln2.scale(&BigRational::from(BigInt::from(shift)));
    Interval {
        lo: ln_small(&lo_mant, prec + 2).add(&shift_term).lo.clone(),
        hi: ln_small(&hi_mant, prec + 2).add(&shift_term).hi.clone(),
    }
    .round(prec)
}

/// Interval for `ln n - ln(n-1)`, the per-step contraction rate.
fn ln_ratio_interval(n: u32, prec: u64) -> Interval {
    ln_uint(&BigUint::from(n), prec).sub(&ln_uint(&BigUint::from(n - 1), prec))
}

// ---------------------------------------------------------------------------
// Floor of ln X / (ln n - ln(n-1)).
// ---------------------------------------------------------------------------

fn floor_big(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Exact route: the largest m >= 0 with `(n/(n-1))^m <= X`, decided by
/// big-integer cross-multiplication and binary search.
pub fn floor_log_ratio_exact(x: &BigRational, n: u32) -> Result<u64, BoundsError> {
    floor_log_ratio_exact_with_budget(x, n, DEFAULT_DIGIT_BUDGET)
}

pub fn floor_log_ratio_exact_with_budget(
    x: &BigRational,
    n: u32,
    digit_budget: u64,
) -> Result<u64, BoundsError> {
    validate_ratio_args(x, n)?;
    let le = |mm: u64| exact_power_le(mm, n, x, digit_budget);
    if !le(1)? {
        return Ok(0);
    }
    let mut hi: u64 = 2;
    while le(hi)? {
        hi = hi.checked_mul(2).ok_or(BoundsError::TieUnresolved)?;
    }
    let mut lo = hi / 2; // le(lo) holds, le(hi) fails
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if le(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn validate_ratio_args(x: &BigRational, n: u32) -> Result<(), BoundsError> {
    if n < 2 {
        return Err(BoundsError::InvalidDimension { n });
    }
    if x < &BigRational::one() {
        return Err(BoundsError::XBelowOne);
    }
    Ok(())
}

fn exact_power_le(m: u64, n: u32, x: &BigRational, digit_budget: u64) -> Result<bool, BoundsError> {
    let bits_needed = m as f64 * (n as f64).log2() + x.numer().bits() as f64;
    if bits_needed * std::f64::consts::LOG10_2 > digit_budget as f64 {
        return Err(BoundsError::DigitBudgetExceeded {
            required_digits: bits_needed * std::f64::consts::LOG10_2,
            budget: digit_budget,
        });
    }
    let p = x.numer().to_biguint().expect("x >= 1");
    let q = x.denom().to_biguint().expect("positive denominator");
    // (n/(n-1))^m <= p/q  <=>  n^m * q <= p * (n-1)^m.
    Ok(biguint_pow(&BigUint::from(n), m) * q <= p * biguint_pow(&BigUint::from(n - 1), m))
}

/// Shared adaptive driver: evaluates the numerator interval `ln X` at
/// doubling precisions until the floor of the quotient is pinned, falling
/// back to one exact power comparison when the quotient sits on an integer.
fn floor_by_intervals(
    num_at: &dyn Fn(u64) -> Interval,
    n: u32,
    exact_le: &dyn Fn(u64) -> Result<bool, BoundsError>,
) -> Result<u64, BoundsError> {
    let mut tie_error: Option<BoundsError> = None;
    for &prec in &PRECISIONS {
        let den = ln_ratio_interval(n, prec);
        if !den.lo.is_positive() {
            continue;
        }
        let q = num_at(prec).div(&den);
        let flo = floor_big(&q.lo);
        let fhi = floor_big(&q.hi);
        if flo == fhi {
            return fhi.to_u64().ok_or(BoundsError::TieUnresolved);
        }
        if &fhi - &flo == BigInt::one() && prec >= 256 {
            // Likely an exact integer quotient: settle it with a single
            // exact comparison at the candidate.
            let candidate = fhi.to_u64().ok_or(BoundsError::TieUnresolved)?;
            match exact_le(candidate) {
                Ok(true) => return Ok(candidate),
                Ok(false) => {
                    return flo.max(BigInt::zero()).to_u64().ok_or(BoundsError::TieUnresolved)
                }
                Err(e) => tie_error = Some(e),
            }
        }
    }
    Err(tie_error.unwrap_or(BoundsError::TieUnresolved))
}

/// Adaptive-precision route for rational arguments.
pub fn floor_log_ratio_adaptive(x: &BigRational, n: u32) -> Result<u64, BoundsError> {
    validate_ratio_args(x, n)?;
    let p = x.numer().to_biguint().expect("x >= 1");
    let q = x.denom().to_biguint().expect("positive denominator");
    let num_at = move |prec: u64| ln_uint(&p, prec).sub(&ln_uint(&q, prec));
    let exact_le =
        |m: u64| -> Result<bool, BoundsError> { exact_power_le(m, n, x, DEFAULT_DIGIT_BUDGET) };
    floor_by_intervals(&num_at, n, &exact_le)
}

/// The largest integer m >= 0 with `(n/(n-1))^m <= X`. Routes small inputs
/// through the exact comparison and large ones through adaptive intervals.
pub fn floor_log_ratio(x: &BigRational, n: u32) -> Result<u64, BoundsError> {
    validate_ratio_args(x, n)?;
    if x.numer().bits() + x.denom().bits() <= 2048 {
        floor_log_ratio_exact(x, n)
    } else {
        floor_log_ratio_adaptive(x, n)
    }
}

/// Adaptive route for factored arguments; X is only materialized if an
/// exact tie-break is required, and then under the digit budget.
pub fn floor_log_ratio_factored(
    x: &FactoredInt,
    n: u32,
    digit_budget: u64,
) -> Result<u64, BoundsError> {
    if n < 2 {
        return Err(BoundsError::InvalidDimension { n });
    }
    let factors = x.factors.clone();
    let num_at = move |prec: u64| {
        let mut acc = Interval::zero();
        for (base, exp) in &factors {
            let term =
                ln_uint(base, prec + 8).scale(&BigRational::from(BigInt::from(exp.clone())));
            acc = acc.add(&term).round(prec + 4);
        }
        acc
    };
    let exact_le = |m: u64| -> Result<bool, BoundsError> {
        let value = x.to_biguint(digit_budget)?;
        exact_power_le(m, n, &BigRational::from(BigInt::from(value)), digit_budget)
    };
    floor_by_intervals(&num_at, n, &exact_le)
}

// ---------------------------------------------------------------------------
// The bound formulas.
// ---------------------------------------------------------------------------

fn checked_pow(base: u64, exp: u32) -> Result<BigUint, BoundsError> {
    if base >= 2 && exp as f64 * (base as f64).log2() > EXPONENT_BIT_CAP {
        return Err(BoundsError::DigitBudgetExceeded {
            required_digits: f64::INFINITY,
            budget: DEFAULT_DIGIT_BUDGET,
        });
    }
    Ok(biguint_pow(&BigUint::from(base), exp as u64))
}

fn validate_mnd(m: &BigUint, n: u32, d: u32) -> Result<(), BoundsError> {
    if m.is_zero() {
        return Err(BoundsError::InvalidCoefficientBound);
    }
    if n == 0 {
        return Err(BoundsError::InvalidDimension { n });
    }
    if d == 0 {
        return Err(BoundsError::InvalidDegree);
    }
    Ok(())
}

/// Denominator of `c1_lower_bound` in factored form:
/// `(2M)^(d^n) * n^(d^(n+1)+d) * d^(n*d^n)`.
pub fn c1_denominator_factored(m: &BigUint, n: u32, d: u32) -> Result<FactoredInt, BoundsError> {
    validate_mnd(m, n, d)?;
    let dn = checked_pow(d as u64, n)?;
    let dn1 = checked_pow(d as u64, n + 1)?;
    Ok(FactoredInt::from_pairs([
        (m * 2u32, dn.clone()),
        (BigUint::from(n), dn1 + BigUint::from(d)),
        (BigUint::from(d), BigUint::from(n) * dn),
    ]))
}

/// `(2M)^(-d^n) * n^(-d^(n+1)-d) * d^(-n*d^n)` as an exact rational.
pub fn c1_lower_bound(m: &BigUint, n: u32, d: u32) -> Result<BigRational, BoundsError> {
    c1_lower_bound_with_budget(m, n, d, DEFAULT_DIGIT_BUDGET)
}

pub fn c1_lower_bound_with_budget(
    m: &BigUint,
    n: u32,
    d: u32,
    digit_budget: u64,
) -> Result<BigRational, BoundsError> {
    let den = c1_denominator_factored(m, n, d)?.to_biguint(digit_budget)?;
    Ok(BigRational::new(BigInt::one(), BigInt::from(den)))
}

/// Denominator of `jp_simplex_bound` in factored form:
/// `(2M)^(d^(n+1)) * d^((n+1)*d^(n+1))`.
pub fn jp_denominator_factored(m: &BigUint, n: u32, d: u32) -> Result<FactoredInt, BoundsError> {
    validate_mnd(m, n, d)?;
    let dn1 = checked_pow(d as u64, n + 1)?;
    Ok(FactoredInt::from_pairs([
        (m * 2u32, dn1.clone()),
        (BigUint::from(d), BigUint::from(n + 1) * dn1),
    ]))
}

/// `(2M)^(-d^(n+1)) * d^(-(n+1)*d^(n+1))` as an exact rational.
pub fn jp_simplex_bound(m: &BigUint, n: u32, d: u32) -> Result<BigRational, BoundsError> {
    jp_simplex_bound_with_budget(m, n, d, DEFAULT_DIGIT_BUDGET)
}

pub fn jp_simplex_bound_with_budget(
    m: &BigUint,
    n: u32,
    d: u32,
    digit_budget: u64,
) -> Result<BigRational, BoundsError> {
    let den = jp_denominator_factored(m, n, d)?.to_biguint(digit_budget)?;
    Ok(BigRational::new(BigInt::one(), BigInt::from(den)))
}

/// The integer whose log ratio drives `cp_steps`:
/// `2^(d^n) * M^(d^n+1) * n^(d^(n+1)+d) * d^((n+1)d + n*d^n) * (d+1)^((n-1)(n+2))`.
pub fn xp_factored(m: &BigUint, n: u32, d: u32) -> Result<FactoredInt, BoundsError> {
    validate_mnd(m, n, d)?;
    if n < 2 {
        return Err(BoundsError::InvalidDimension { n });
    }
    let dn = checked_pow(d as u64, n)?;
    let dn1 = checked_pow(d as u64, n + 1)?;
    Ok(FactoredInt::from_pairs([
        (BigUint::from(2u32), dn.clone()),
        (m.clone(), &dn + BigUint::one()),
        (BigUint::from(n), dn1 + BigUint::from(d)),
        (
            BigUint::from(d),
            BigUint::from((n as u64 + 1) * d as u64) + BigUint::from(n) * &dn,
        ),
        (
            BigUint::from(d) + BigUint::one(),
            BigUint::from((n as u64 - 1) * (n as u64 + 2)),
        ),
    ]))
}

/// The `cnps_steps` integer, which is exactly twice `xp_factored`.
pub fn xnps_factored(m: &BigUint, n: u32, d: u32) -> Result<FactoredInt, BoundsError> {
    Ok(xp_factored(m, n, d)?.times_two())
}

/// Steps after which a positive definite integral form must exhibit
/// all-positive complete coefficients on every branch.
pub fn cp_steps(m: &BigUint, n: u32, d: u32) -> Result<u64, BoundsError> {
    let x = xp_factored(m, n, d)?;
    Ok(floor_log_ratio_factored(&x, n, DEFAULT_DIGIT_BUDGET)? + 2)
}

/// Steps after which a non-PSD integral form must exhibit an all-negative
/// complete branch.
pub fn cnps_steps(m: &BigUint, n: u32, d: u32) -> Result<u64, BoundsError> {
    let x = xnps_factored(m, n, d)?;
    Ok(floor_log_ratio_factored(&x, n, DEFAULT_DIGIT_BUDGET)? + 2)
}

// ---------------------------------------------------------------------------
// Bound report.
// ---------------------------------------------------------------------------

/// One bound value: exact when it fits the digit budget, otherwise the
/// factored denominator with a non-certified order-of-magnitude estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub exact: Option<BigRational>,
    pub denominator_factored: FactoredInt,
    pub approx: String,
    pub certified: bool,
}

impl BoundValue {
    fn build(factored: FactoredInt, digit_budget: u64) -> BoundValue {
        match factored.to_biguint(digit_budget) {
            Ok(den) => {
                let exact = BigRational::new(BigInt::one(), BigInt::from(den));
                let approx = approx_decimal(&exact, 5);
                BoundValue {
                    exact: Some(exact),
                    denominator_factored: factored,
                    approx,
                    certified: true,
                }
            }
            Err(_) => {
                let log10 = factored.log2_estimate() * std::f64::consts::LOG10_2;
                BoundValue {
                    exact: None,
                    denominator_factored: factored,
                    approx: format!("10^-{log10:.3}"),
                    certified: false,
                }
            }
        }
    }
}

/// Exact values of the lower bounds and step counts for given (M, n, d).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub coefficient_bound: BigUint,
    pub n: u32,
    pub d: u32,
    pub c1: BoundValue,
    pub jp: BoundValue,
    pub cp: u64,
    pub cnps: u64,
    pub xp: FactoredInt,
    pub xnps: FactoredInt,
    /// How the integer-part bracket in the step-count formulas is read.
    pub bracket: &'static str,
}

/// Computes the full report. Requires n >= 2 (the step-count denominator is
/// undefined at n = 1; handle single-variable forms by the sign of their
/// one coefficient).
pub fn bound_report(
    m: &BigUint,
    n: u32,
    d: u32,
    digit_budget: u64,
) -> Result<BoundReport, BoundsError> {
    validate_mnd(m, n, d)?;
    if n < 2 {
        return Err(BoundsError::InvalidDimension { n });
    }
    let xp = xp_factored(m, n, d)?;
    let xnps = xnps_factored(m, n, d)?;
    let cp = floor_log_ratio_factored(&xp, n, digit_budget)? + 2;
    let cnps = floor_log_ratio_factored(&xnps, n, digit_budget)? + 2;
    debug_assert!(cnps >= cp);
    Ok(BoundReport {
        coefficient_bound: m.clone(),
        n,
        d,
        c1: BoundValue::build(c1_denominator_factored(m, n, d)?, digit_budget),
        jp: BoundValue::build(jp_denominator_factored(m, n, d)?, digit_budget),
        cp,
        cnps,
        xp,
        xnps,
        bracket: "floor",
    })
}

#[derive(Serialize, Deserialize)]
struct BoundValueWire {
    exact: Option<String>,
    denominator_factored: Vec<[String; 2]>,
    approx: String,
    certified: bool,
}

#[derive(Serialize, Deserialize)]
struct BoundReportWire {
    #[serde(rename = "M")]
    m: String,
    n: u32,
    d: u32,
    c1: BoundValueWire,
    jp: BoundValueWire,
    cp: String,
    cnps: String,
    factored_xp: Vec<[String; 2]>,
    factored_xnps: Vec<[String; 2]>,
    bracket: String,
}

fn factored_wire(f: &FactoredInt) -> Vec<[String; 2]> {
    f.factors().iter().map(|(b, e)| [b.to_string(), e.to_string()]).collect()
}

fn factored_unwire(pairs: &[[String; 2]]) -> Result<FactoredInt, String> {
    let mut out = Vec::new();
    for [b, e] in pairs {
        let base = BigUint::from_str(b).map_err(|_| format!("invalid base `{b}`"))?;
        let exp = BigUint::from_str(e).map_err(|_| format!("invalid exponent `{e}`"))?;
        out.push((base, exp));
    }
    Ok(FactoredInt::from_pairs(out))
}

fn value_wire(v: &BoundValue) -> BoundValueWire {
    BoundValueWire {
        exact: v.exact.as_ref().map(ratio_to_string),
        denominator_factored: factored_wire(&v.denominator_factored),
        approx: v.approx.clone(),
        certified: v.certified,
    }
}

fn value_unwire(w: &BoundValueWire) -> Result<BoundValue, String> {
    Ok(BoundValue {
        exact: w.exact.as_ref().map(|s| crate::util::ratio_from_string(s)).transpose()?,
        denominator_factored: factored_unwire(&w.denominator_factored)?,
        approx: w.approx.clone(),
        certified: w.certified,
    })
}

impl Serialize for BoundReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BoundReportWire {
            m: self.coefficient_bound.to_string(),
            n: self.n,
            d: self.d,
            c1: value_wire(&self.c1),
            jp: value_wire(&self.jp),
            cp: self.cp.to_string(),
            cnps: self.cnps.to_string(),
            factored_xp: factored_wire(&self.xp),
            factored_xnps: factored_wire(&self.xnps),
            bracket: self.bracket.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundReport {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<BoundReport, D::Error> {
        use serde::de::Error as _;
        let w = BoundReportWire::deserialize(d)?;
        Ok(BoundReport {
            coefficient_bound: BigUint::from_str(&w.m)
                .map_err(|_| D::Error::custom("invalid M"))?,
            n: w.n,
            d: w.d,
            c1: value_unwire(&w.c1).map_err(D::Error::custom)?,
            jp: value_unwire(&w.jp).map_err(D::Error::custom)?,
            cp: u64::from_str(&w.cp).map_err(|_| D::Error::custom("invalid cp"))?,
            cnps: u64::from_str(&w.cnps).map_err(|_| D::Error::custom("invalid cnps"))?,
            xp: factored_unwire(&w.factored_xp).map_err(D::Error::custom)?,
            xnps: factored_unwire(&w.factored_xnps).map_err(D::Error::custom)?,
            bracket: match w.bracket.as_str() {
                "floor" => "floor",
                _ => return Err(D::Error::custom("unknown bracket mode")),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn m(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn rat_int(v: u64) -> BigRational {
        BigRational::from(BigInt::from(v))
    }

    fn pow2_inverse(e: u64) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(BigUint::one() << e))
    }

    #[test]
    fn c1_examples() {
        assert_eq!(c1_lower_bound(&m(1), 2, 2).unwrap(), pow2_inverse(22));
        assert_eq!(c1_lower_bound(&m(1), 2, 1).unwrap(), pow2_inverse(3));
        assert_eq!(c1_lower_bound(&m(1), 1, 1).unwrap(), pow2_inverse(1));
        assert!(matches!(
            c1_lower_bound(&m(0), 2, 2),
            Err(BoundsError::InvalidCoefficientBound)
        ));
    }

    #[test]
    fn jp_examples() {
        assert_eq!(jp_simplex_bound(&m(1), 2, 2).unwrap(), pow2_inverse(32));
        assert_eq!(jp_simplex_bound(&m(1), 1, 1).unwrap(), pow2_inverse(1));
        let expected = BigRational::new(
            BigInt::one(),
            BigInt::from(biguint_pow(&m(6), 4) * biguint_pow(&m(2), 8)),
        );
        assert_eq!(jp_simplex_bound(&m(3), 1, 2).unwrap(), expected);
    }

    #[test]
    fn floor_log_ratio_examples() {
        // Boundary case: 2^1 <= 2 < 2^2, the quotient is exactly 1.
        assert_eq!(floor_log_ratio(&rat_int(2), 2).unwrap(), 1);
        assert_eq!(floor_log_ratio(&rat_int(3), 3).unwrap(), 2);
        let x = BigRational::from(BigInt::from((BigUint::one() << 28) * 81u32));
        assert_eq!(floor_log_ratio(&x, 2).unwrap(), 34);
        // Cross-check the last one exactly: 2^34 <= X < 2^35.
        assert!(BigUint::one() << 34 <= (BigUint::one() << 28) * 81u32);
        assert!((BigUint::one() << 28) * 81u32 < BigUint::one() << 35);

        assert!(matches!(
            floor_log_ratio(&BigRational::new(BigInt::one(), BigInt::from(2)), 2),
            Err(BoundsError::XBelowOne)
        ));
        assert!(matches!(
            floor_log_ratio(&rat_int(2), 1),
            Err(BoundsError::InvalidDimension { n: 1 })
        ));
        assert_eq!(floor_log_ratio(&rat_int(1), 2).unwrap(), 0);
    }

    #[test]
    fn adaptive_route_matches_exact_route() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..40 {
            let num = 1 + rng.below(1_000_000);
            let den = 1 + rng.below(num);
            let x = BigRational::new(BigInt::from(num), BigInt::from(den));
            let n = 2 + rng.below(5) as u32;
            let e = floor_log_ratio_exact(&x, n).unwrap();
            let a = floor_log_ratio_adaptive(&x, n).unwrap();
            assert_eq!(e, a, "routes disagree at X = {x}, n = {n}");
            // Definition check by cross-multiplication.
            assert!(exact_power_le(e, n, &x, DEFAULT_DIGIT_BUDGET).unwrap());
            assert!(!exact_power_le(e + 1, n, &x, DEFAULT_DIGIT_BUDGET).unwrap());
        }
        // Exact powers of the ratio are the adversarial tie cases.
        for e in [1u32, 5, 17] {
            let x = BigRational::from(BigInt::from(1u64 << e));
            assert_eq!(floor_log_ratio_adaptive(&x, 2).unwrap(), e as u64);
        }
    }

    #[test]
    fn cp_cnps_headline_values() {
        assert_eq!(cp_steps(&m(1), 2, 2).unwrap(), 36);
        assert_eq!(cnps_steps(&m(1), 2, 2).unwrap(), 37);
        // X for (1,2,2) is 2^28 * 3^4.
        let xp = xp_factored(&m(1), 2, 2).unwrap();
        assert_eq!(xp.to_biguint(100).unwrap(), (BigUint::one() << 28) * 81u32);
        assert_eq!(xp.to_string(), "2^28 * 3^4");
    }

    #[test]
    fn cp_cnps_degree_one() {
        // For d = 1 the product collapses to 2^1 * 2^2 * 2^4 = 128, and the
        // quotient by ln 2 is exactly 7, a tie resolved by the exact route.
        let xp = xp_factored(&m(1), 2, 1).unwrap();
        assert_eq!(xp.to_biguint(100).unwrap(), BigUint::from(128u32));
        assert_eq!(cp_steps(&m(1), 2, 1).unwrap(), 9);
        assert_eq!(cnps_steps(&m(1), 2, 1).unwrap(), 10);
    }

    #[test]
    fn cp_monotone_in_coefficient_bound() {
        assert!(cp_steps(&m(2), 2, 2).unwrap() > cp_steps(&m(1), 2, 2).unwrap());
    }

    #[test]
    fn cnps_dominates_cp_with_bounded_gap() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..12 {
            let mm = m(1 + rng.below(10));
            let n = 2 + rng.below(3) as u32;
            let d = 1 + rng.below(4) as u32;
            let cp = cp_steps(&mm, n, d).unwrap();
            let cnps = cnps_steps(&mm, n, d).unwrap();
            assert!(cnps >= cp);
            // X doubles, so the gap is at most ceil(ln 2 / (ln n - ln(n-1))).
            let gap_cap = (2f64.ln() / ((n as f64).ln() - ((n - 1) as f64).ln())).ceil() as u64;
            assert!(cnps - cp <= gap_cap, "gap {} over cap {}", cnps - cp, gap_cap);
        }
    }

    #[test]
    fn digit_budget_refusal_reports_requirement() {
        match c1_lower_bound_with_budget(&m(2), 6, 6, 10) {
            Err(BoundsError::DigitBudgetExceeded { required_digits, budget: 10 }) => {
                assert!(required_digits > 10.0);
            }
            other => panic!("expected budget refusal, got {other:?}"),
        }
        // The same inputs succeed with an adequate budget.
        assert!(c1_lower_bound_with_budget(&m(2), 6, 6, 1_000_000).is_ok());
    }

    #[test]
    fn step_counts_reject_single_variable() {
        assert!(matches!(cp_steps(&m(1), 1, 3), Err(BoundsError::InvalidDimension { n: 1 })));
        assert!(matches!(
            bound_report(&m(1), 1, 3, 1000),
            Err(BoundsError::InvalidDimension { n: 1 })
        ));
        // The lower bounds themselves are fine at n = 1.
        assert!(c1_lower_bound(&m(1), 1, 3).is_ok());
    }

    #[test]
    fn report_round_trips_through_json() {
        let report = bound_report(&m(1), 2, 2, DEFAULT_DIGIT_BUDGET).unwrap();
        assert_eq!(report.cp, 36);
        assert_eq!(report.cnps, 37);
        assert_eq!(report.c1.exact, Some(pow2_inverse(22)));
        assert!(report.c1.certified);
        let json = serde_json::to_string(&report).unwrap();
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        // Decimal-string convention for the step counts.
        assert!(json.contains("\"cp\":\"36\""));
    }

    #[test]
    fn huge_inputs_stay_symbolic() {
        // M with 400 digits: c1 needs about d^n * 400 digits, over a small budget.
        let big_m = biguint_pow(&m(10), 400);
        let report = bound_report(&big_m, 2, 2, 500).unwrap();
        assert!(report.c1.exact.is_none());
        assert!(!report.c1.certified);
        assert!(report.c1.approx.starts_with("10^-"));
        // Step counts still come out exactly via the adaptive route.
        assert!(report.cp > 0 && report.cnps >= report.cp);
    }

    #[test]
    fn ln_intervals_bracket_known_values() {
        let two = ln_uint(&m(2), 128);
        let v = std::f64::consts::LN_2;
        assert!(two.lo.to_f64().unwrap() <= v && v <= two.hi.to_f64().unwrap());
        let three = ln_uint(&m(3), 128);
        let v3 = 3f64.ln();
        assert!(three.lo.to_f64().unwrap() <= v3 && v3 <= three.hi.to_f64().unwrap());
        // A large operand goes through mantissa truncation.
        let big = biguint_pow(&m(7), 100);
        let i = ln_uint(&big, 96);
        let vbig = 100.0 * 7f64.ln();
        assert!(i.lo.to_f64().unwrap() <= vbig && vbig <= i.hi.to_f64().unwrap());
        let width = &i.hi - &i.lo;
        assert!(width < BigRational::new(BigInt::one(), BigInt::from(1u64 << 40)));
    }
}
