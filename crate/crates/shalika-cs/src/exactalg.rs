//! Exact arithmetic kernel: multivariate Laurent polynomials over the
//! rationals, rational functions built from them, and truncated power series
//! with rational-function coefficients.
//!
//! Exponents are stored in half-units: the integer `e` in a slot stands for
//! the exponent `e/2`. Every constructor that takes exponents says which unit
//! it expects (`from_half_units` versus `monomial`).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Default variable names used when rendering.
pub const DEFAULT_VARS: [&str; 4] = ["u", "v", "q", "t"];

/// Errors raised by the arithmetic kernel.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgError {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("division is not exact; remainder {remainder}")]
    NotDivisible { remainder: Box<LaurentPoly> },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("variable {var} carries a half-integral exponent and cannot be specialized numerically")]
    HalfIntegralExponent { var: usize },
    #[error("denominator vanishes at the requested point")]
    ZeroDenominator,
    #[error("series orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("series with zero constant term is not invertible")]
    NotInvertible,
    #[error("point has {got} coordinates but the polynomial has arity {arity}")]
    PointArity { got: usize, arity: usize },
}

/// Builds the rational `n/d` from machine integers.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer rational `n`.
pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Renders a rational as `p/q` (or `p` when integral).
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Raises a rational to an integer power; negative powers of zero fail.
pub fn rat_pow(base: &Rational, exp: i64) -> Result<Rational, AlgError> {
    if exp < 0 && base.is_zero() {
        return Err(AlgError::ZeroDenominator);
    }
    let mut acc = Rational::one();
    let b = if exp < 0 { base.recip() } else { base.clone() };
    for _ in 0..exp.unsigned_abs() {
        acc *= &b;
    }
    Ok(acc)
}

/// Exact multivariate Laurent polynomial with rational coefficients.
///
/// Terms are keyed by exponent vectors in half-units. No zero coefficient is
/// ever stored, so structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    arity: usize,
    terms: BTreeMap<Vec<i64>, Rational>,
}

impl LaurentPoly {
    /// The zero polynomial in `arity` variables.
    pub fn zero(arity: usize) -> Self {
        LaurentPoly { arity, terms: BTreeMap::new() }
    }

    /// The constant `c`.
    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    /// The constant one.
    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Rational::one())
    }

    /// `c * x^e` with `e` given in half-units.
    pub fn from_half_units(exps: &[i64], c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps.to_vec(), c);
        p
    }

    /// `c * x^e` with `e` given in whole units.
    pub fn monomial(exps: &[i64], c: Rational) -> Self {
        let doubled: Vec<i64> = exps.iter().map(|e| 2 * e).collect();
        Self::from_half_units(&doubled, c)
    }

    /// The variable `x_i` in `arity` variables.
    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        Self::monomial(&e, Rational::one())
    }

    /// Builds a polynomial from `(half-unit exponents, coefficient)` pairs.
    pub fn from_terms<I>(arity: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, Rational)>,
    {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent vector length must equal arity");
            p.add_term(e, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Terms in lexicographic exponent order (half-unit exponents).
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// True when the polynomial has exactly one term.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&vec![0; self.arity]).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of the given half-unit exponent.
    pub fn coeff(&self, exps: &[i64]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Sum of all coefficients.
    pub fn coefficient_sum(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, c| a + c)
    }

    fn add_term(&mut self, e: Vec<i64>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<(), AlgError> {
        if self.arity != other.arity {
            Err(AlgError::ArityMismatch { left: self.arity, right: other.arity })
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgError> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        LaurentPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Multiplies by the monomial with the given half-unit exponents.
    pub fn shift(&self, exps: &[i64]) -> Self {
        assert_eq!(exps.len(), self.arity);
        LaurentPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(exps).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Non-negative integer power.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.arity);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a monomial; `None` for anything else.
    pub fn monomial_inverse(&self) -> Option<Self> {
        if !self.is_monomial() {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        let neg: Vec<i64> = e.iter().map(|x| -x).collect();
        Some(Self::from_half_units(&neg, c.recip()))
    }

    /// Rewrites every exponent vector through `f` (used for Weyl actions and
    /// variable relabelings).
    pub fn map_exponents<F>(&self, new_arity: usize, f: F) -> Self
    where
        F: Fn(&[i64]) -> Vec<i64>,
    {
        let mut out = Self::zero(new_arity);
        for (e, c) in &self.terms {
            let img = f(e);
            assert_eq!(img.len(), new_arity);
            out.add_term(img, c.clone());
        }
        out
    }

    /// Leading term in lexicographic order.
    fn leading(&self) -> Option<(&Vec<i64>, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Per-variable minimum and maximum half-unit exponents.
    fn exponent_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for e in it {
            for i in 0..self.arity {
                lo[i] = lo[i].min(e[i]);
                hi[i] = hi[i].max(e[i]);
            }
        }
        Some((lo, hi))
    }

    /// Exact division in the Laurent ring.
    ///
    /// Runs lexicographic leading-term division. When `b` divides `self` the
    /// quotient's exponents lie in the box `box(self) - box(b)`; a candidate
    /// term outside that box proves non-divisibility, and the current
    /// remainder is returned as the witness.
    pub fn exact_divide(&self, b: &Self) -> Result<Self, AlgError> {
        self.check_arity(b)?;
        if b.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.arity));
        }
        if let Some(inv) = b.monomial_inverse() {
            return Ok(self * &inv);
        }
        let (alo, ahi) = self.exponent_box().expect("nonzero");
        let (blo, bhi) = b.exponent_box().expect("nonzero");
        let (lb_e, lb_c) = b.leading().map(|(e, c)| (e.clone(), c.clone())).expect("nonzero");
        let mut rem = self.clone();
        let mut quot = Self::zero(self.arity);
        while let Some((re, rc)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            let qe: Vec<i64> = re.iter().zip(&lb_e).map(|(x, y)| x - y).collect();
            let in_box = (0..self.arity).all(|i| qe[i] >= alo[i] - blo[i] && qe[i] <= ahi[i] - bhi[i]);
            if !in_box {
                return Err(AlgError::NotDivisible { remainder: Box::new(rem) });
            }
            let qc = rc / &lb_c;
            let step = b.shift(&qe).scale(&qc);
            rem = &rem - &step;
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }

    /// True when `b` divides `self` exactly.
    pub fn divisible_by(&self, b: &Self) -> bool {
        self.exact_divide(b).is_ok()
    }

    /// Evaluates at a rational point. Half-integral exponents are refused.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, AlgError> {
        if point.len() != self.arity {
            return Err(AlgError::PointArity { got: point.len(), arity: self.arity });
        }
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &h) in e.iter().enumerate() {
                if h % 2 != 0 {
                    return Err(AlgError::HalfIntegralExponent { var: i });
                }
                term *= rat_pow(&point[i], h / 2)?;
            }
            total += term;
        }
        Ok(total)
    }

    /// Substitutes a rational function for each variable.
    pub fn substitute(&self, images: &[RationalFn]) -> Result<RationalFn, AlgError> {
        if images.len() != self.arity {
            return Err(AlgError::PointArity { got: images.len(), arity: self.arity });
        }
        let target = images.first().map(|r| r.arity()).unwrap_or(0);
        let mut total = RationalFn::zero(target);
        for (e, c) in &self.terms {
            let mut term = RationalFn::constant(target, c.clone());
            for (i, &h) in e.iter().enumerate() {
                if h % 2 != 0 {
                    return Err(AlgError::HalfIntegralExponent { var: i });
                }
                term = term.checked_mul(&images[i].pow(h / 2)?)?;
            }
            total = total.checked_add(&term)?;
        }
        Ok(total)
    }

    /// Renders with the given variable names, terms in graded-lex order
    /// (highest total degree first).
    pub fn render(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&Vec<i64>> = self.terms.keys().collect();
        keys.sort_by(|a, b| graded_lex(b, a));
        let mut out = String::new();
        for (idx, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = render_monomial(e, names);
            if mono.is_empty() {
                out.push_str(&fmt_rational(&mag));
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&fmt_rational(&mag));
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

fn graded_lex(a: &[i64], b: &[i64]) -> Ordering {
    let da: i64 = a.iter().sum();
    let db: i64 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

fn render_monomial(e: &[i64], names: &[&str]) -> String {
    let mut parts = Vec::new();
    for (i, &h) in e.iter().enumerate() {
        if h == 0 {
            continue;
        }
        let name = names.get(i).copied().unwrap_or("x");
        let exp = if h % 2 == 0 { (h / 2).to_string() } else { format!("({}/2)", h) };
        if h == 2 {
            parts.push(name.to_string());
        } else {
            parts.push(format!("{}^{}", name, exp));
        }
    }
    parts.join("*")
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&DEFAULT_VARS))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("LaurentPoly arity mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("LaurentPoly arity mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("LaurentPoly arity mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-Rational::one())
    }
}

/// Multiplies two Laurent polynomials, failing on arity mismatch.
pub fn laurent_mul(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly, AlgError> {
    a.checked_mul(b)
}

/// Exact quotient `a / b`, failing with the remainder when `b` does not divide `a`.
pub fn exact_divide(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly, AlgError> {
    a.exact_divide(b)
}

/// Quotient of two Laurent polynomials. Equality is decided by
/// cross-multiplication, so no gcd is ever needed.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFn {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, AlgError> {
        num.check_arity(&den)?;
        if den.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        Ok(RationalFn { num, den }.reduce())
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let arity = p.arity();
        RationalFn { num: p, den: LaurentPoly::one(arity) }
    }

    pub fn zero(arity: usize) -> Self {
        Self::from_poly(LaurentPoly::zero(arity))
    }

    pub fn one(arity: usize) -> Self {
        Self::from_poly(LaurentPoly::one(arity))
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        Self::from_poly(LaurentPoly::constant(arity, c))
    }

    /// The variable `x_i`.
    pub fn var(arity: usize, i: usize) -> Self {
        Self::from_poly(LaurentPoly::var(arity, i))
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn arity(&self) -> usize {
        self.num.arity()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels the denominator when it divides the numerator (or is a monomial).
    pub fn reduce(self) -> Self {
        let arity = self.arity();
        if self.num.is_zero() {
            return Self::zero(arity);
        }
        if self.den == LaurentPoly::one(arity) {
            return self;
        }
        if let Ok(q) = self.num.exact_divide(&self.den) {
            return Self::from_poly(q);
        }
        if let Ok(q) = self.den.exact_divide(&self.num) {
            return RationalFn { num: LaurentPoly::one(arity), den: q };
        }
        self
    }

    /// Returns the polynomial when the denominator is one after reduction.
    pub fn as_poly(&self) -> Option<LaurentPoly> {
        let r = self.clone().reduce();
        if r.den == LaurentPoly::one(r.arity()) {
            Some(r.num)
        } else {
            None
        }
    }

    /// Returns the value when this is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        let p = self.as_poly()?;
        if p.is_constant() {
            Some(p.constant_term())
        } else {
            None
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgError> {
        self.num.check_arity(&other.num)?;
        if self.den == other.den {
            return Ok(RationalFn { num: self.num.checked_add(&other.num)?, den: self.den.clone() }.reduce());
        }
        if let Ok(k) = other.den.exact_divide(&self.den) {
            let num = (&self.num * &k).checked_add(&other.num)?;
            return Ok(RationalFn { num, den: other.den.clone() }.reduce());
        }
        if let Ok(k) = self.den.exact_divide(&other.den) {
            let num = self.num.checked_add(&(&other.num * &k))?;
            return Ok(RationalFn { num, den: self.den.clone() }.reduce());
        }
        let num = (&self.num * &other.den).checked_add(&(&other.num * &self.den))?;
        Ok(RationalFn { num, den: &self.den * &other.den }.reduce())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgError> {
        let num = self.num.checked_mul(&other.num)?;
        let den = self.den.checked_mul(&other.den)?;
        Ok(RationalFn { num, den }.reduce())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgError> {
        if other.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        let num = self.num.checked_mul(&other.den)?;
        let den = self.den.checked_mul(&other.num)?;
        Ok(RationalFn { num, den }.reduce())
    }

    pub fn recip(&self) -> Result<Self, AlgError> {
        RationalFn::one(self.arity()).checked_div(self)
    }

    /// Integer power; negative powers of zero fail.
    pub fn pow(&self, k: i64) -> Result<Self, AlgError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let m = k.unsigned_abs() as u32;
        Ok(RationalFn { num: base.num.pow(m), den: base.den.pow(m) })
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, c: &Rational) -> Self {
        RationalFn { num: self.num.scale(c), den: self.den.clone() }.reduce()
    }

    /// Evaluates at a rational point; a vanishing denominator is an error.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, AlgError> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(AlgError::ZeroDenominator);
        }
        Ok(self.num.eval(point)? / d)
    }

    /// Substitutes a rational function for each variable.
    pub fn substitute(&self, images: &[RationalFn]) -> Result<RationalFn, AlgError> {
        let n = self.num.substitute(images)?;
        let d = self.den.substitute(images)?;
        n.checked_div(&d)
    }

    /// Applies an exponent map to numerator and denominator.
    pub fn map_exponents<F>(&self, new_arity: usize, f: F) -> Self
    where
        F: Fn(&[i64]) -> Vec<i64>,
    {
        RationalFn { num: self.num.map_exponents(new_arity, &f), den: self.den.map_exponents(new_arity, &f) }
    }

    pub fn render(&self, names: &[&str]) -> String {
        let r = self.clone().reduce();
        if r.den == LaurentPoly::one(r.arity()) {
            r.num.render(names)
        } else {
            format!("({})/({})", r.num.render(names), r.den.render(names))
        }
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        if self.arity() != other.arity() {
            return false;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&DEFAULT_VARS))
    }
}

impl From<LaurentPoly> for RationalFn {
    fn from(p: LaurentPoly) -> Self {
        RationalFn::from_poly(p)
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        self.checked_add(rhs).expect("RationalFn arity mismatch")
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self.checked_sub(rhs).expect("RationalFn arity mismatch")
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        self.checked_mul(rhs).expect("RationalFn arity mismatch")
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }
}

/// Power series truncated after the coefficient of `t^order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<RationalFn>,
}

impl TruncatedSeries {
    /// Builds a series from coefficients `0..=order`, padding with zeros.
    pub fn new(arity: usize, order: usize, coeffs: Vec<RationalFn>) -> Self {
        let mut c = coeffs;
        c.truncate(order + 1);
        while c.len() < order + 1 {
            c.push(RationalFn::zero(arity));
        }
        TruncatedSeries { coeffs: c }
    }

    pub fn one(arity: usize, order: usize) -> Self {
        Self::new(arity, order, vec![RationalFn::one(arity)])
    }

    /// `1 + c t^k`, a common building block for Euler factors.
    pub fn binomial(arity: usize, order: usize, c: RationalFn, k: usize) -> Self {
        let mut coeffs = vec![RationalFn::zero(arity); order + 1];
        coeffs[0] = RationalFn::one(arity);
        if k <= order {
            coeffs[k] = &coeffs[k] + &c;
        }
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn arity(&self) -> usize {
        self.coeffs[0].arity()
    }

    pub fn coeffs(&self) -> &[RationalFn] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &RationalFn {
        &self.coeffs[k]
    }

    fn check_order(&self, other: &Self) -> Result<(), AlgError> {
        if self.order() != other.order() {
            Err(AlgError::OrderMismatch { left: self.order(), right: other.order() })
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TruncatedSeries { coeffs })
    }

    /// Cauchy product truncated at the common order.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgError> {
        self.check_order(other)?;
        let n = self.order();
        let mut coeffs = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = RationalFn::zero(self.arity());
            for i in 0..=k {
                if self.coeffs[i].is_zero() || other.coeffs[k - i].is_zero() {
                    continue;
                }
                acc = acc.checked_add(&self.coeffs[i].checked_mul(&other.coeffs[k - i])?)?;
            }
            coeffs.push(acc);
        }
        Ok(TruncatedSeries { coeffs })
    }

    /// Multiplicative inverse by long division; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, AlgError> {
        if self.coeffs[0].is_zero() {
            return Err(AlgError::NotInvertible);
        }
        let n = self.order();
        let inv0 = self.coeffs[0].recip()?;
        let mut out: Vec<RationalFn> = vec![inv0.clone()];
        for k in 1..=n {
            let mut acc = RationalFn::zero(self.arity());
            for i in 1..=k {
                if self.coeffs[i].is_zero() {
                    continue;
                }
                acc = acc.checked_add(&self.coeffs[i].checked_mul(&out[k - i])?)?;
            }
            out.push(-&acc.checked_mul(&inv0)?);
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// Maps every coefficient through `f`.
    pub fn map<F>(&self, f: F) -> Result<Self, AlgError>
    where
        F: Fn(&RationalFn) -> Result<RationalFn, AlgError>,
    {
        Ok(TruncatedSeries { coeffs: self.coeffs.iter().map(f).collect::<Result<Vec<_>, _>>()? })
    }

    /// Index of the first coefficient where the two series differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<usize> {
        let n = self.order().min(other.order());
        (0..=n).find(|&k| self.coeffs[k] != other.coeffs[k])
    }
}

/// Cauchy product of two series of equal order.
pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, AlgError> {
    a.checked_mul(b)
}
