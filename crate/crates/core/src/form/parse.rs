//! Recursive-descent parser for the polynomial text grammar:
//!
//! ```text
//! expr := ['+'|'-'] term (('+'|'-') term)*
//! term := [integer] ('*'? var)*
//! var  := 'x' index ('^' exponent)?
//! ```
//!
//! Whitespace is ignored everywhere; integers are signed decimals of
//! unbounded length; variable indices are 1-based.

use super::{ExponentVec, Form, FormError};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::BTreeMap;
use std::str::FromStr;

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner { bytes: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn err(&self, message: impl Into<String>) -> FormError {
        FormError::Syntax { position: self.pos, message: message.into() }
    }

    /// Unsigned decimal integer of unbounded length.
    fn digits(&mut self) -> Result<String, FormError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii").to_string())
    }
}

/// One parsed term: coefficient and per-variable exponents (1-based keys).
struct RawTerm {
    coef: BigInt,
    powers: BTreeMap<usize, u32>,
}

pub(super) fn parse_with_vars(text: &str, n_override: Option<usize>) -> Result<Form, FormError> {
    if let Some(n) = n_override {
        if n == 0 {
            return Err(FormError::Syntax { position: 0, message: "variable count must be at least 1".into() });
        }
    }
    let mut sc = Scanner::new(text);
    let mut terms: Vec<RawTerm> = Vec::new();

    if sc.peek().is_none() {
        return Err(sc.err("empty input"));
    }
    loop {
        // Sign of the term.
        let mut negative = false;
        match sc.peek() {
            Some(b'+') => {
                sc.bump();
            }
            Some(b'-') => {
                sc.bump();
                negative = true;
            }
            Some(_) => {
                if !terms.is_empty() {
                    return Err(sc.err("expected `+` or `-` between terms"));
                }
            }
            None => return Err(sc.err("expected a term")),
        }

        let term = parse_term(&mut sc, negative)?;
        terms.push(term);

        match sc.peek() {
            None => break,
            Some(b'+') | Some(b'-') => continue,
            Some(c) => return Err(sc.err(format!("unexpected character `{}`", c as char))),
        }
    }

    let max_index = terms.iter().flat_map(|t| t.powers.keys().copied()).max().unwrap_or(0);
    let n = match n_override {
        Some(n) => {
            if max_index > n {
                return Err(FormError::VariableOutOfRange { index: max_index, n });
            }
            n
        }
        None => max_index.max(1),
    };

    let raw = terms.into_iter().map(|t| {
        let mut exps = vec![0u32; n];
        for (i, e) in t.powers {
            exps[i - 1] += e;
        }
        (ExponentVec::new(exps), t.coef)
    });
    Form::from_terms(n, raw)
}

fn parse_term(sc: &mut Scanner<'_>, negative: bool) -> Result<RawTerm, FormError> {
    let mut coef: Option<BigInt> = None;
    if matches!(sc.peek(), Some(c) if c.is_ascii_digit()) {
        let digits = sc.digits()?;
        if sc.peek() == Some(b'.') {
            return Err(FormError::NonIntegerCoefficient { position: sc.pos });
        }
        coef = Some(BigInt::from_str(&digits).expect("decimal digits"));
    }

    let mut powers: BTreeMap<usize, u32> = BTreeMap::new();
    let mut saw_var = false;
    loop {
        // Optional `*` between factors.
        let mut consumed_star = false;
        if sc.peek() == Some(b'*') {
            sc.bump();
            consumed_star = true;
        }
        match sc.peek() {
            Some(b'x') => {
                sc.bump();
                let index_digits = sc.digits().map_err(|_| sc.err("expected variable index after `x`"))?;
                let index: usize = index_digits
                    .parse()
                    .map_err(|_| sc.err("variable index too large"))?;
                if index == 0 {
                    return Err(sc.err("variable indices start at 1"));
                }
                let mut exp: u32 = 1;
                if sc.peek() == Some(b'^') {
                    sc.bump();
                    let exp_digits = sc.digits().map_err(|_| sc.err("expected exponent after `^`"))?;
                    exp = exp_digits.parse().map_err(|_| sc.err("exponent too large"))?;
                }
                *powers.entry(index).or_insert(0) += exp;
                saw_var = true;
            }
            _ if consumed_star => return Err(sc.err("expected a variable after `*`")),
            _ => break,
        }
    }

    if coef.is_none() && !saw_var {
        return Err(sc.err("expected a coefficient or a variable"));
    }
    let mut coef = coef.unwrap_or_else(BigInt::one);
    if negative {
        coef = -coef;
    }
    Ok(RawTerm { coef, powers })
}
