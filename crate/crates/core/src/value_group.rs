//! Exact arithmetic in the ordered field ℚ(√2) and the two dense value
//! groups used throughout the crate.
//!
//! Every valuation, slope and threshold is a [`GroupScalar`] `a + b·√2` with
//! rational `a`, `b`. The order is decided exactly: since `√2` is irrational
//! the sign of `a + b√2` only needs the signs of `a`, `b` and a comparison of
//! `a²` with `2b²`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element `a + b·√2` of ℚ(√2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupScalar {
    a: BigRational,
    b: BigRational,
}

impl GroupScalar {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    /// `n / d` with `d != 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(n.into(), d.into()))
    }

    pub fn rational(a: BigRational) -> Self {
        Self {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn sqrt2() -> Self {
        Self {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    /// `a + b√2` from small integer ratios, handy in tests and defaults.
    pub fn from_parts(a: (i64, i64), b: (i64, i64)) -> Self {
        Self {
            a: BigRational::new(a.0.into(), a.1.into()),
            b: BigRational::new(b.0.into(), b.1.into()),
        }
    }

    /// `2^{-k}`.
    pub fn pow2_neg(k: u32) -> Self {
        Self::rational(BigRational::new(
            BigInt::one(),
            BigInt::one() << (k as usize),
        ))
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Sign as an ordering against zero.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            // opposite signs: |a| vs |b|√2, never equal
            (Ordering::Greater, Ordering::Less) => {
                (&self.a * &self.a).cmp(&(&self.b * &self.b * BigInt::from(2)))
            }
            (Ordering::Less, Ordering::Greater) => {
                (&self.b * &self.b * BigInt::from(2)).cmp(&(&self.a * &self.a))
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        let den = self.a.denom().lcm(self.b.denom());
        let a = self.a.numer() * (&den / self.a.denom());
        let b = self.b.numer() * (&den / self.b.denom());
        // floor(b√2); 2b² is never a square for b != 0
        let root = (&b * &b * BigInt::from(2)).sqrt();
        let s = if b.is_negative() { -root - 1 } else { root };
        (a + s).div_floor(&den)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.a * &self.a - &self.b * &self.b * BigInt::from(2);
        Some(Self {
            a: &self.a / &norm,
            b: -&self.b / &norm,
        })
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self {
            a: &self.a * k,
            b: &self.b * k,
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        let k = BigRational::from_integer(n.clone());
        self.scale(&k)
    }

    pub fn mul_usize(&self, n: usize) -> Self {
        self.mul_int(&BigInt::from(n))
    }

    /// Sum of absolute numerators and denominators of both coordinates.
    pub fn height(&self) -> BigInt {
        self.a.numer().abs() + self.a.denom() + self.b.numer().abs() + self.b.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN)
            + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

impl Ord for GroupScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.b == other.b {
            return self.a.cmp(&other.a);
        }
        if self.a == other.a {
            return self.b.cmp(&other.b);
        }
        // a1 - a2 against (b2 - b1)√2, over the positive common
        // denominators, in integers
        let x = self.a.numer() * other.a.denom() - other.a.numer() * self.a.denom();
        let y = other.b.numer() * self.b.denom() - self.b.numer() * other.b.denom();
        let x = x * self.b.denom() * other.b.denom();
        let y = y * self.a.denom() * other.a.denom();
        match (x.is_positive(), y.is_positive()) {
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (true, true) => (&x * &x).cmp(&(&y * &y * 2u8)),
            (false, false) => (&y * &y * 2u8).cmp(&(&x * &x)),
        }
    }
}

impl PartialOrd for GroupScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b GroupScalar> for &'a GroupScalar {
            type Output = GroupScalar;
            fn $method(self, rhs: &'b GroupScalar) -> GroupScalar {
                let f: fn(&GroupScalar, &GroupScalar) -> GroupScalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<GroupScalar> for GroupScalar {
            type Output = GroupScalar;
            fn $method(self, rhs: GroupScalar) -> GroupScalar {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $tr<&'b GroupScalar> for GroupScalar {
            type Output = GroupScalar;
            fn $method(self, rhs: &'b GroupScalar) -> GroupScalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<GroupScalar> for &'a GroupScalar {
            type Output = GroupScalar;
            fn $method(self, rhs: GroupScalar) -> GroupScalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| GroupScalar {
    a: &x.a + &y.a,
    b: &x.b + &y.b,
});
forward_binop!(Sub, sub, |x, y| GroupScalar {
    a: &x.a - &y.a,
    b: &x.b - &y.b,
});
forward_binop!(Mul, mul, |x, y| GroupScalar {
    a: &x.a * &y.a + &x.b * &y.b * BigInt::from(2),
    b: &x.a * &y.b + &x.b * &y.a,
});
forward_binop!(Div, div, |x, y| x * &y.recip().expect("division by zero scalar"));

impl Neg for GroupScalar {
    type Output = GroupScalar;
    fn neg(self) -> GroupScalar {
        GroupScalar {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Neg for &GroupScalar {
    type Output = GroupScalar;
    fn neg(self) -> GroupScalar {
        GroupScalar {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl From<i64> for GroupScalar {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

impl From<BigInt> for GroupScalar {
    fn from(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }
}

fn write_ratio(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    write!(f, "{}/{}", r.numer(), r.denom())
}

/// Canonical form `a/b + c/d*sqrt2`, or `a/b - c/d*sqrt2` when the
/// irrational part is negative.
impl fmt::Display for GroupScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ratio(f, &self.a)?;
        if self.b.is_negative() {
            f.write_str(" - ")?;
            write_ratio(f, &-&self.b)?;
        } else {
            f.write_str(" + ")?;
            write_ratio(f, &self.b)?;
        }
        f.write_str("*sqrt2")
    }
}

impl fmt::Debug for GroupScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupScalar({self})")
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Accepts the canonical form plus looser spellings such as `1/2`,
/// `sqrt2`, `-1 + sqrt2` or `3 - 2*sqrt2`.
impl FromStr for GroupScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, c) in compact.char_indices() {
            if (c == '+' || c == '-') && i > 0 {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);

        let mut out = GroupScalar::zero();
        for term in terms {
            let (negative, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in `{s}`")));
            }
            let mut value = if let Some(coef) = body.strip_suffix("sqrt2") {
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let r = if coef.is_empty() {
                    BigRational::one()
                } else {
                    parse_rational(coef)?
                };
                GroupScalar::new(BigRational::zero(), r)
            } else {
                GroupScalar::rational(parse_rational(body)?)
            };
            if negative {
                value = -value;
            }
            out = out + value;
        }
        Ok(out)
    }
}

/// Extended scalar: a finite [`GroupScalar`] or `+∞`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum ExtScalar {
    Finite(GroupScalar),
    Infinity,
}

impl ExtScalar {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtScalar::Infinity)
    }

    pub fn finite(&self) -> Option<&GroupScalar> {
        match self {
            ExtScalar::Finite(x) => Some(x),
            ExtScalar::Infinity => None,
        }
    }

    pub fn add(&self, other: &ExtScalar) -> ExtScalar {
        match (self, other) {
            (ExtScalar::Finite(x), ExtScalar::Finite(y)) => ExtScalar::Finite(x + y),
            _ => ExtScalar::Infinity,
        }
    }

    pub fn add_finite(&self, other: &GroupScalar) -> ExtScalar {
        match self {
            ExtScalar::Finite(x) => ExtScalar::Finite(x + other),
            ExtScalar::Infinity => ExtScalar::Infinity,
        }
    }
}

impl From<GroupScalar> for ExtScalar {
    fn from(x: GroupScalar) -> Self {
        ExtScalar::Finite(x)
    }
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtScalar::Finite(x) => x.fmt(f),
            ExtScalar::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" => Ok(ExtScalar::Infinity),
            other => Ok(ExtScalar::Finite(other.parse()?)),
        }
    }
}

/// The configurable dense proper subgroups Γ of the reals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueGroup {
    /// Γ = ℚ.
    Rationals,
    /// Γ = ℤ + ℤ√2.
    IntegerSqrt2,
}

impl ValueGroup {
    pub const ALL: [ValueGroup; 2] = [ValueGroup::Rationals, ValueGroup::IntegerSqrt2];

    pub fn tag(self) -> &'static str {
        match self {
            ValueGroup::Rationals => "RATIONALS",
            ValueGroup::IntegerSqrt2 => "Z_PLUS_Z_SQRT2",
        }
    }

    pub fn contains(self, x: &GroupScalar) -> bool {
        match self {
            ValueGroup::Rationals => x.is_rational(),
            ValueGroup::IntegerSqrt2 => x.a.is_integer() && x.b.is_integer(),
        }
    }

    /// A designated scalar outside the group, witnessing properness.
    pub fn excluded(self) -> GroupScalar {
        match self {
            ValueGroup::Rationals => GroupScalar::from_parts((-1, 1), (1, 1)),
            ValueGroup::IntegerSqrt2 => GroupScalar::ratio(1, 2),
        }
    }
}

impl fmt::Display for ValueGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ValueGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "RATIONALS" | "Q" | "rationals" => Ok(ValueGroup::Rationals),
            "Z_PLUS_Z_SQRT2" | "Z+Zsqrt2" | "zsqrt2" => Ok(ValueGroup::IntegerSqrt2),
            other => Err(Error::Parse(format!("unknown value group `{other}`"))),
        }
    }
}

pub fn compare(x: &GroupScalar, y: &GroupScalar) -> Ordering {
    x.cmp(y)
}

pub fn in_group(x: &GroupScalar, group: ValueGroup) -> bool {
    group.contains(x)
}

/// The least-height element of `group` strictly inside `(lo, hi)`, ties
/// broken lexicographically on the coordinates.
pub fn find_in_interval(lo: &GroupScalar, hi: &GroupScalar, group: ValueGroup) -> Result<GroupScalar> {
    if lo >= hi {
        return Err(Error::EmptyInterval {
            lo: lo.clone(),
            hi: hi.clone(),
        });
    }
    Ok(match group {
        ValueGroup::Rationals => GroupScalar::rational(simplest_rational(lo, Some(hi))),
        ValueGroup::IntegerSqrt2 => least_integral(lo, hi),
    })
}

/// Stern–Brocot simplest rational in the open interval `(lo, hi)`; it has
/// both the least numerator and the least denominator there.
fn simplest_rational(lo: &GroupScalar, hi: Option<&GroupScalar>) -> BigRational {
    if lo.is_negative() {
        match hi {
            Some(h) if !h.is_positive() => {
                return -simplest_rational(&-h, Some(&-lo));
            }
            _ => return BigRational::zero(),
        }
    }
    let n = lo.floor();
    let next = BigRational::from_integer(&n + 1);
    if hi.map_or(true, |h| GroupScalar::rational(next.clone()) < *h) {
        return next;
    }
    // (lo, hi) sits inside [n, n+1]: recurse on the reciprocal of the
    // fractional part
    let base = GroupScalar::from(n.clone());
    let hi = hi.expect("bounded above here");
    let z_lo = (hi - &base).recip().expect("hi > n");
    let z_hi = (lo - &base).recip();
    let z = simplest_rational(&z_lo, z_hi.as_ref());
    BigRational::from_integer(n) + z.recip()
}

/// Least `x >= 0` such that some integer `y` has `lo < θx − y < hi`, for
/// irrational `θ ∈ (0, 1)`. Euclid-style descent through `frac(1/θ)`.
fn first_hit(theta: &GroupScalar, lo: &GroupScalar, hi: &GroupScalar) -> BigInt {
    let shift = GroupScalar::from(lo.floor());
    let lo = lo - &shift;
    let hi = hi - &shift;
    if hi > GroupScalar::one() {
        return BigInt::zero();
    }
    // now (lo, hi) ⊂ [0, 1]; for a given y the least candidate x is
    // floor((lo + y)/θ) + 1, and y is feasible iff
    // frac(y·frac(1/θ)) lands in (−hi/θ, −lo/θ) mod 1
    let inv = theta.recip().expect("theta is nonzero");
    let theta_next = &inv - GroupScalar::from(inv.floor());
    let y = first_hit(&theta_next, &(-(&hi * &inv)), &(-(&lo * &inv)));
    ((&lo + GroupScalar::from(y)) * &inv).floor() + 1
}

fn least_integral(lo: &GroupScalar, hi: &GroupScalar) -> GroupScalar {
    let sqrt2 = GroupScalar::sqrt2();
    // the integer of least absolute value in (lo − b√2, hi − b√2)
    let candidate = |b: &BigInt| -> Option<BigInt> {
        let shift = sqrt2.mul_int(b);
        let (lo, hi) = (lo - &shift, hi - &shift);
        let a: BigInt = if lo.is_negative() && hi.is_positive() {
            BigInt::zero()
        } else if !lo.is_negative() {
            lo.floor() + 1
        } else {
            -(-&hi).floor() - 1
        };
        let x = GroupScalar::from(a.clone());
        (lo < x && x < hi).then_some(a)
    };
    let mut best: Option<(BigInt, BigInt, BigInt)> = None;
    let consider = |b: BigInt, best: &mut Option<(BigInt, BigInt, BigInt)>| {
        if let Some(a) = candidate(&b) {
            let key = (a.abs() + b.abs(), a, b);
            if best.as_ref().map_or(true, |cur| key < *cur) {
                *best = Some(key);
            }
        }
    };

    // beyond `bound` the sign of a is fixed on each side, and the height
    // grows strictly with |b| when the interval is shorter than 1
    let reach = lo.abs().max(hi.abs()) * GroupScalar::ratio(1, 2) * &sqrt2;
    let bound: BigInt = reach.floor() + 2;
    let mut b = -bound.clone();
    while b <= bound {
        consider(b.clone(), &mut best);
        b += 1;
    }

    if hi - lo < GroupScalar::one() {
        let start: BigInt = &bound + 1;
        let c = sqrt2.mul_int(&start);
        let up = first_hit(&(&sqrt2 - GroupScalar::one()), &(lo - &c), &(hi - &c));
        consider(&start + up, &mut best);
        let down = first_hit(&(GroupScalar::integer(2) - &sqrt2), &(lo + &c), &(hi + &c));
        consider(-(&start + down), &mut best);
    } else {
        // a solution with |b| <= 1 was already found; anything better has
        // |b| <= its height
        let limit = best.as_ref().map(|k| k.0.clone()).expect("wide interval has a point");
        let mut b: BigInt = &bound + 1;
        while b <= limit {
            consider(b.clone(), &mut best);
            consider(-b.clone(), &mut best);
            b += 1;
        }
    }
    let (_, a, b) = best.expect("value group is dense");
    GroupScalar::new(BigRational::from_integer(a), BigRational::from_integer(b))
}

/// Strictly decreasing elements of Γ converging to a target outside Γ,
/// with the `k`-th term (1-based) within `2^{-k}` of the target.
///
/// For Γ = ℚ the terms are upper continued-fraction convergents of the
/// target; for Γ = ℤ + ℤ√2 each term is the least-height group element
/// between the target and `min(previous, target + 2^{-k})`.
#[derive(Clone, Debug)]
pub struct Approach {
    target: GroupScalar,
    group: ValueGroup,
    k: u32,
    prev: Option<GroupScalar>,
    cf: Option<Convergents>,
}

#[derive(Clone, Debug)]
struct Convergents {
    rest: GroupScalar,
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
    index: usize,
}

impl Iterator for Convergents {
    type Item = (usize, BigRational);

    fn next(&mut self) -> Option<Self::Item> {
        let a = self.rest.floor();
        let p = &a * &self.p.0 + &self.p.1;
        let q = &a * &self.q.0 + &self.q.1;
        self.p = (p.clone(), std::mem::take(&mut self.p.0));
        self.q = (q.clone(), std::mem::take(&mut self.q.0));
        let frac = &self.rest - GroupScalar::from(a);
        // the target is irrational, so the expansion never terminates
        self.rest = frac.recip().expect("irrational continued fraction");
        let index = self.index;
        self.index += 1;
        Some((index, BigRational::new(p, q)))
    }
}

impl Approach {
    pub fn new(target: &GroupScalar, group: ValueGroup) -> Result<Self> {
        if group.contains(target) {
            return Err(Error::InGroup {
                value: target.clone(),
                group: group.tag(),
            });
        }
        if target.is_negative() {
            return Err(Error::NegativeTarget(target.clone()));
        }
        let cf = (group == ValueGroup::Rationals).then(|| Convergents {
            rest: target.clone(),
            p: (BigInt::one(), BigInt::zero()),
            q: (BigInt::zero(), BigInt::one()),
            index: 0,
        });
        Ok(Self {
            target: target.clone(),
            group,
            k: 0,
            prev: None,
            cf,
        })
    }

    pub fn target(&self) -> &GroupScalar {
        &self.target
    }
}

impl Iterator for Approach {
    type Item = GroupScalar;

    fn next(&mut self) -> Option<GroupScalar> {
        self.k += 1;
        let bound = GroupScalar::pow2_neg(self.k);
        let term = match &mut self.cf {
            Some(cf) => loop {
                let (index, c) = cf.next().expect("infinite expansion");
                if index % 2 == 0 {
                    continue;
                }
                let c = GroupScalar::rational(c);
                if &c - &self.target < bound {
                    break c;
                }
            },
            None => {
                let mut hi = &self.target + &bound;
                if let Some(prev) = &self.prev {
                    hi = hi.min(prev.clone());
                }
                find_in_interval(&self.target, &hi, self.group).expect("nonempty interval")
            }
        };
        self.prev = Some(term.clone());
        Some(term)
    }
}

pub fn decreasing_sequence(target: &GroupScalar, group: ValueGroup, count: usize) -> Result<Vec<GroupScalar>> {
    if count == 0 {
        return Err(Error::EmptySequence);
    }
    Ok(Approach::new(target, group)?.take(count).collect())
}
