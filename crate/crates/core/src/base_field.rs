//! The valued field F of fractions of finitely supported monomial sums
//! `Σ c·t^γ` with rational coefficients and exponents in ℚ(√2), together
//! with the valuation ring R = {x : v(x) ≥ 0}.
//!
//! Fractions are not fully normalised: monomial denominators are cleared
//! and addition cancels polynomial factors shared by integer-exponent
//! denominators, so equality is decided by cross-multiplication.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::value_group::{ExtScalar, GroupScalar, ValueGroup};

/// A finite sum `Σ c·t^γ` with nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MonomialSum {
    terms: BTreeMap<GroupScalar, BigRational>,
}

impl MonomialSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), GroupScalar::zero())
    }

    pub fn monomial(coeff: BigRational, exp: GroupScalar) -> Self {
        Self::from_terms([(exp, coeff)])
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (GroupScalar, BigRational)>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.accumulate(e, c);
        }
        out
    }

    fn accumulate(&mut self, exp: GroupScalar, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&GroupScalar, &BigRational)> {
        self.terms.iter()
    }

    /// Term of least exponent.
    pub fn leading(&self) -> Option<(&GroupScalar, &BigRational)> {
        self.terms.iter().next()
    }

    pub fn min_exponent(&self) -> Option<&GroupScalar> {
        self.leading().map(|(e, _)| e)
    }

    pub fn as_monomial(&self) -> Option<(&GroupScalar, &BigRational)> {
        if self.terms.len() == 1 {
            self.leading()
        } else {
            None
        }
    }

    pub fn in_group(&self, group: ValueGroup) -> bool {
        self.terms.keys().all(|e| group.contains(e))
    }

    /// Multiply by `coeff·t^exp`.
    pub fn mul_monomial(&self, coeff: &BigRational, exp: &GroupScalar) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + exp, c * coeff))
                .collect(),
        }
    }

    /// `self / d` when the quotient is again a finite monomial sum.
    ///
    /// Long division from the least exponent upwards; every quotient
    /// exponent must stay below `max(self) − max(d)`.
    pub fn div_exact(&self, d: &MonomialSum) -> Option<MonomialSum> {
        let (d_lo, d_lc) = d.leading()?;
        if let Some((e, c)) = d.as_monomial() {
            return Some(self.mul_monomial(&c.recip(), &-e));
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let d_hi = d.terms.keys().next_back().expect("nonzero");
        let q_hi = self.terms.keys().next_back().expect("nonzero") - d_hi;
        let mut rem = self.clone();
        let mut q = Self::zero();
        for _ in 0..DIVISION_STEPS {
            let Some((e, c)) = rem.leading() else {
                return Some(q);
            };
            let qe = e - d_lo;
            if qe > q_hi {
                return None;
            }
            let qc = c / d_lc;
            rem = &rem - &d.mul_monomial(&qc, &qe);
            q.accumulate(qe, qc);
        }
        None
    }
}

/// Give up on exact division after this many quotient terms.
const DIVISION_STEPS: usize = 64;

impl Add for &MonomialSum {
    type Output = MonomialSum;
    fn add(self, rhs: &MonomialSum) -> MonomialSum {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.accumulate(e.clone(), c.clone());
        }
        out
    }
}

impl Neg for &MonomialSum {
    type Output = MonomialSum;
    fn neg(self) -> MonomialSum {
        MonomialSum {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Sub for &MonomialSum {
    type Output = MonomialSum;
    fn sub(self, rhs: &MonomialSum) -> MonomialSum {
        self + &-rhs
    }
}

impl Mul for &MonomialSum {
    type Output = MonomialSum;
    fn mul(self, rhs: &MonomialSum) -> MonomialSum {
        let mut out = MonomialSum::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.accumulate(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

fn fmt_coeff_term(f: &mut fmt::Formatter<'_>, c: &BigRational, e: &GroupScalar) -> fmt::Result {
    write!(f, "{c}*t^({e})")
}

/// `c1*t^(e1) + c2*t^(e2) + …` in increasing exponent order, `0` if empty.
impl fmt::Display for MonomialSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i == 0 {
                fmt_coeff_term(f, c, e)?;
            } else if c.is_negative() {
                f.write_str(" - ")?;
                fmt_coeff_term(f, &-c, e)?;
            } else {
                f.write_str(" + ")?;
                fmt_coeff_term(f, c, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MonomialSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonomialSum({self})")
    }
}

/// Split at `+`/`-` signs that sit at parenthesis depth zero.
fn split_signed_terms(s: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced `)` in `{s}`")));
                }
            }
            // a sign directly after `^` belongs to an unparenthesised exponent
            b'+' | b'-' if depth == 0 && i > 0 && bytes[i - 1] != b'^' => {
                out.push(&s[start..i]);
                start = i;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced `(` in `{s}`")));
    }
    out.push(&s[start..]);
    Ok(out)
}

fn parse_rational(s: &str) -> Result<BigRational> {
    s.parse::<BigRational>()
        .map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))
}

impl FromStr for MonomialSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty monomial sum".into()));
        }
        let mut out = MonomialSum::zero();
        for term in split_signed_terms(&compact)? {
            let (negative, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in `{s}`")));
            }
            let (coeff, exp) = match body.find('t') {
                None => (parse_rational(body)?, GroupScalar::zero()),
                Some(pos) => {
                    let coeff_text = body[..pos].strip_suffix('*').unwrap_or(&body[..pos]);
                    let coeff = if coeff_text.is_empty() {
                        BigRational::one()
                    } else {
                        parse_rational(coeff_text)?
                    };
                    let rest = &body[pos + 1..];
                    let exp = if rest.is_empty() {
                        GroupScalar::one()
                    } else {
                        let e = rest
                            .strip_prefix('^')
                            .ok_or_else(|| Error::Parse(format!("expected `^` in `{body}`")))?;
                        let e = e
                            .strip_prefix('(')
                            .and_then(|e| e.strip_suffix(')'))
                            .unwrap_or(e);
                        e.parse()?
                    };
                    (coeff, exp)
                }
            };
            out.accumulate(exp, if negative { -coeff } else { coeff });
        }
        Ok(out)
    }
}

/// An element `num / den` of F.
#[derive(Clone)]
pub struct FieldElem {
    num: MonomialSum,
    den: MonomialSum,
}

impl FieldElem {
    pub fn new(num: MonomialSum, den: MonomialSum) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    /// Clears monomial denominators so that polynomial values stay
    /// polynomial.
    fn normalized(num: MonomialSum, den: MonomialSum) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some((e, c)) = den.as_monomial() {
            let num = num.mul_monomial(&c.recip(), &-e);
            return Self {
                num,
                den: MonomialSum::one(),
            };
        }
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self {
            num: MonomialSum::zero(),
            den: MonomialSum::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_sum(MonomialSum::one())
    }

    pub fn from_sum(num: MonomialSum) -> Self {
        Self {
            num,
            den: MonomialSum::one(),
        }
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_sum(MonomialSum::monomial(c, GroupScalar::zero()))
    }

    /// `t^exp`.
    pub fn monomial(exp: GroupScalar) -> Self {
        Self::from_sum(MonomialSum::monomial(BigRational::one(), exp))
    }

    pub fn scaled_monomial(coeff: BigRational, exp: GroupScalar) -> Self {
        Self::from_sum(MonomialSum::monomial(coeff, exp))
    }

    pub fn num(&self) -> &MonomialSum {
        &self.num
    }

    pub fn den(&self) -> &MonomialSum {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Least exponent of the numerator minus least exponent of the
    /// denominator.
    pub fn val(&self) -> ExtScalar {
        match (self.num.min_exponent(), self.den.min_exponent()) {
            (Some(n), Some(d)) => ExtScalar::Finite(n - d),
            _ => ExtScalar::Infinity,
        }
    }

    /// Ratio of the coefficients at the least exponents; this is the
    /// image of `x` in the one-dimensional graded piece of degree `val(x)`.
    pub fn leading_coeff(&self) -> Option<BigRational> {
        let (_, n) = self.num.leading()?;
        let (_, d) = self.den.leading()?;
        Some(n / d)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn in_r(&self) -> bool {
        match self.val() {
            ExtScalar::Finite(v) => !v.is_negative(),
            ExtScalar::Infinity => true,
        }
    }

    pub fn in_group(&self, group: ValueGroup) -> bool {
        self.num.in_group(group) && self.den.in_group(group)
    }

    pub fn is_positive_leading(&self) -> bool {
        self.leading_coeff().map_or(true, |c| c.is_positive())
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        if self.val() != other.val() || self.leading_coeff() != other.leading_coeff() {
            return false;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for FieldElem {}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        if self.den == rhs.den {
            return FieldElem::normalized(&self.num + &rhs.num, self.den.clone());
        }
        if let Some(q) = rhs.den.div_exact(&self.den) {
            return FieldElem::normalized(&(&self.num * &q) + &rhs.num, rhs.den.clone());
        }
        if let Some(q) = self.den.div_exact(&rhs.den) {
            return FieldElem::normalized(&self.num + &(&rhs.num * &q), self.den.clone());
        }
        if let Some(g) = common_factor(&self.den, &rhs.den) {
            if let (Some(b), Some(d)) = (self.den.div_exact(&g), rhs.den.div_exact(&g)) {
                return FieldElem::normalized(&(&self.num * &d) + &(&rhs.num * &b), &b * &rhs.den);
            }
        }
        FieldElem::normalized(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

/// Largest span of integer exponents handed to the dense gcd.
const GCD_SPAN: i64 = 256;

/// Coefficients of `t^{-min}·x` from degree 0 up, when every exponent is an
/// integer and the span is small.
fn dense(x: &MonomialSum) -> Option<Vec<BigRational>> {
    let lo = x.min_exponent()?;
    let mut out: Vec<BigRational> = Vec::new();
    for (e, c) in &x.terms {
        let d = e - lo;
        if !d.sqrt2_part().is_zero() || !d.rational_part().is_integer() {
            return None;
        }
        let d: i64 = d.rational_part().to_integer().try_into().ok()?;
        if d > GCD_SPAN {
            return None;
        }
        out.resize(d as usize + 1, BigRational::zero());
        out[d as usize] = c.clone();
    }
    Some(out)
}

fn dense_rem(mut a: Vec<BigRational>, b: &[BigRational]) -> Vec<BigRational> {
    let lead = b.last().expect("nonzero divisor");
    while a.len() >= b.len() {
        let q = a.last().expect("nonempty") / lead;
        let shift = a.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            a[shift + i] -= &q * c;
        }
        a.pop();
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
    }
    a
}

/// A nonconstant polynomial factor shared by `x` and `y`, or `None` when
/// they are coprime up to monomials or have non-integer exponents.
fn common_factor(x: &MonomialSum, y: &MonomialSum) -> Option<MonomialSum> {
    let (mut a, mut b) = (dense(x)?, dense(y)?);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = dense_rem(a, &b);
        a = b;
        b = r;
    }
    if a.len() < 2 {
        return None;
    }
    let lead = a.last().expect("nonempty").clone();
    Some(MonomialSum::from_terms(
        a.into_iter().enumerate().map(|(i, c)| (GroupScalar::integer(i as i64), c / &lead)),
    ))
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self + &-rhs
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        if self.den.as_monomial().is_none() && self.den == rhs.num {
            return FieldElem::normalized(self.num.clone(), rhs.den.clone());
        }
        if rhs.den.as_monomial().is_none() && rhs.den == self.num {
            return FieldElem::normalized(rhs.num.clone(), self.den.clone());
        }
        FieldElem::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

pub fn val(x: &FieldElem) -> ExtScalar {
    x.val()
}

pub fn in_r(x: &FieldElem) -> bool {
    x.in_r()
}

/// The quotient `b / a` when it lies in R.
pub fn divide_in_r(a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
    let (va, vb) = (a.val(), b.val());
    let va_finite = match &va {
        ExtScalar::Finite(v) => v,
        ExtScalar::Infinity => return Err(Error::DivisionByZero),
    };
    if va_finite.is_negative() {
        return Err(Error::NotInRing(a.to_string()));
    }
    if vb < va {
        return Err(Error::NotDivisible {
            numerator: vb.to_string(),
            denominator: va.to_string(),
        });
    }
    Ok(b * &a.inv()?)
}

/// `(num)/(den)`; elements with unit denominator print as the bare sum.
impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == MonomialSum::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElem({self})")
    }
}

fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

impl FromStr for FieldElem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('(') {
            let close = matching_paren(s).ok_or_else(|| Error::Parse(format!("unbalanced `{s}`")))?;
            let rest = s[close + 1..].trim();
            if let Some(den) = rest.strip_prefix('/') {
                let den = den.trim();
                let den = den
                    .strip_prefix('(')
                    .and_then(|d| d.strip_suffix(')'))
                    .unwrap_or(den);
                return FieldElem::new(s[1..close].parse()?, den.parse()?);
            }
            if rest.is_empty() {
                return Ok(FieldElem::from_sum(s[1..close].parse()?));
            }
        }
        Ok(FieldElem::from_sum(s.parse()?))
    }
}
