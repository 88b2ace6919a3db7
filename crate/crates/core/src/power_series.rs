//! Elements of R[[X]] at finite scale and the filtrations `v_λ`.
//!
//! A [`SeriesPoly`] is a truncation: it stands for every series agreeing
//! with it below its order, so anything computed from it carries an
//! `exact` flag saying whether the answer is the same for the whole coset.
//! A [`CertifiedSeries`] adds a tail rule for every coefficient past the
//! prefix together with a lower bound on the tail valuations; when that
//! bound is also the infimum (the series is *certified*), `v_0` is exact.
//!
//! For `λ > 0` the infimum defining `v_λ` is attained inside a finite
//! window `[m, k)` where `m` is the first nonzero index and `k > m` is least
//! with `v(r_m) < (k − m)λ`; every later index costs strictly more than
//! index `m`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::base_field::FieldElem;
use crate::error::{Error, Result};
use crate::value_group::{Approach, ExtScalar, GroupScalar, ValueGroup};

/// Coefficients `r_0 … r_{N−1}` of a series in R[[X]]; the tail is unknown.
#[derive(Clone, PartialEq, Eq)]
pub struct SeriesPoly {
    coeffs: Vec<FieldElem>,
}

impl SeriesPoly {
    pub fn new(coeffs: Vec<FieldElem>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.in_r()) {
            return Err(Error::NotInRing(bad.to_string()));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![FieldElem::zero(); order.max(1)],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(FieldElem::one(), 0, order).expect("1 is in R")
    }

    /// `r·X^j` truncated at `order`.
    pub fn monomial(r: FieldElem, j: usize, order: usize) -> Result<Self> {
        let mut coeffs = vec![FieldElem::zero(); order.max(1)];
        if j < coeffs.len() {
            coeffs[j] = r;
        }
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&FieldElem> {
        self.coeffs.get(n)
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.first_nonzero().is_none()
    }

    pub fn truncate(&self, order: usize) -> SeriesPoly {
        Self {
            coeffs: self.coeffs[..order.clamp(1, self.order())].to_vec(),
        }
    }

    /// Multiply every coefficient by `r`; fails if the result leaves R.
    pub fn scale(&self, r: &FieldElem) -> Result<SeriesPoly> {
        Self::new(self.coeffs.iter().map(|c| c * r).collect())
    }

    /// Positive leading rational on every nonzero coefficient.
    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(FieldElem::is_positive_leading)
    }

    /// Minimum coefficient valuation over the known part.
    pub fn min_val(&self) -> ExtScalar {
        self.coeffs.iter().map(FieldElem::val).min().expect("order >= 1")
    }
}

impl Add for &SeriesPoly {
    type Output = SeriesPoly;
    fn add(self, rhs: &SeriesPoly) -> SeriesPoly {
        SeriesPoly {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Neg for &SeriesPoly {
    type Output = SeriesPoly;
    fn neg(self) -> SeriesPoly {
        SeriesPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &SeriesPoly {
    type Output = SeriesPoly;
    fn sub(self, rhs: &SeriesPoly) -> SeriesPoly {
        self + &-rhs
    }
}

/// Cauchy product, exact below the smaller order.
impl Mul for &SeriesPoly {
    type Output = SeriesPoly;
    fn mul(self, rhs: &SeriesPoly) -> SeriesPoly {
        let order = self.order().min(rhs.order());
        let coeffs = (0..order)
            .map(|n| cauchy_term(n, |i| self.coeffs[i].clone(), |j| rhs.coeffs[j].clone()))
            .collect();
        SeriesPoly { coeffs }
    }
}

fn cauchy_term(n: usize, f: impl Fn(usize) -> FieldElem, g: impl Fn(usize) -> FieldElem) -> FieldElem {
    let mut acc = FieldElem::zero();
    for i in 0..=n {
        let a = f(i);
        if a.is_zero() {
            continue;
        }
        let b = g(n - i);
        if b.is_zero() {
            continue;
        }
        acc = &acc + &(&a * &b);
    }
    acc
}

impl fmt::Display for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeriesPoly[{self}]")
    }
}

impl std::str::FromStr for SeriesPoly {
    type Err = Error;

    /// Coefficients separated by `;`, lowest degree first.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(';')
            .map(|c| c.trim().parse::<FieldElem>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

/// `α_{n+1}` of a decreasing sequence. Terms are produced on demand and
/// memoized; the memo is shared between clones and only ever extended with
/// the same deterministic values, so concurrent readers agree.
#[derive(Clone)]
pub struct ApproachRule {
    target: GroupScalar,
    group: ValueGroup,
    memo: Arc<Mutex<(Approach, Vec<GroupScalar>)>>,
}

impl ApproachRule {
    pub fn new(target: &GroupScalar, group: ValueGroup) -> Result<Self> {
        let iter = Approach::new(target, group)?;
        Ok(Self {
            target: target.clone(),
            group,
            memo: Arc::new(Mutex::new((iter, Vec::new()))),
        })
    }

    pub fn target(&self) -> &GroupScalar {
        &self.target
    }

    pub fn group(&self) -> ValueGroup {
        self.group
    }

    /// 0-based term, i.e. `α_{n+1}`.
    pub fn term(&self, n: usize) -> GroupScalar {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        let (iter, terms) = &mut *memo;
        while terms.len() <= n {
            terms.push(iter.next().expect("the sequence is infinite"));
        }
        terms[n].clone()
    }
}

impl fmt::Debug for ApproachRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ApproachRule({} in {})", self.target, self.group)
    }
}

#[derive(Clone, Debug)]
pub enum ExponentRule {
    /// Every tail coefficient has this valuation.
    Constant(GroupScalar),
    /// Valuations decrease strictly to the rule's target.
    Approach(ApproachRule),
}

/// Tail coefficients `t^{offset + rule(n)}` at absolute index `n`.
#[derive(Clone, Debug)]
pub struct MonomialTail {
    pub rule: ExponentRule,
    pub offset: GroupScalar,
}

impl MonomialTail {
    pub fn approach(target: &GroupScalar, group: ValueGroup) -> Result<Self> {
        Ok(Self {
            rule: ExponentRule::Approach(ApproachRule::new(target, group)?),
            offset: GroupScalar::zero(),
        })
    }

    pub fn constant(exp: GroupScalar) -> Self {
        Self {
            rule: ExponentRule::Constant(exp),
            offset: GroupScalar::zero(),
        }
    }

    pub fn with_offset(mut self, offset: GroupScalar) -> Self {
        self.offset = offset;
        self
    }

    pub fn exponent(&self, n: usize) -> GroupScalar {
        match &self.rule {
            ExponentRule::Constant(e) => &self.offset + e,
            ExponentRule::Approach(rule) => &self.offset + &rule.term(n),
        }
    }

    pub fn infimum(&self) -> GroupScalar {
        match &self.rule {
            ExponentRule::Constant(e) => &self.offset + e,
            ExponentRule::Approach(rule) => &self.offset + rule.target(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Tail {
    Zero,
    Monomial(MonomialTail),
    /// `factor · X^shift · base`.
    Scaled {
        base: Arc<CertifiedSeries>,
        factor: FieldElem,
        shift: usize,
    },
    /// Cauchy product of two series.
    Product(Arc<CertifiedSeries>, Arc<CertifiedSeries>),
}

/// A prefix plus a rule for every later coefficient, with a lower bound on
/// the valuations of the tail coefficients.
#[derive(Clone, Debug)]
pub struct CertifiedSeries {
    prefix: SeriesPoly,
    tail: Tail,
    tail_bound: ExtScalar,
    certified: bool,
    positive: bool,
}

impl CertifiedSeries {
    /// A polynomial: all coefficients past the prefix are zero.
    pub fn polynomial(prefix: SeriesPoly) -> Self {
        let positive = prefix.is_positive();
        Self {
            prefix,
            tail: Tail::Zero,
            tail_bound: ExtScalar::Infinity,
            certified: true,
            positive,
        }
    }

    pub fn with_monomial_tail(prefix: SeriesPoly, tail: MonomialTail) -> Result<Self> {
        let inf = tail.infimum();
        if inf.is_negative() {
            return Err(Error::NotInRing(format!("tail valuations approach {inf}")));
        }
        let positive = prefix.is_positive();
        Ok(Self {
            prefix,
            tail: Tail::Monomial(tail),
            tail_bound: ExtScalar::Finite(inf),
            certified: true,
            positive,
        })
    }

    /// `factor · X^shift · base`; fails if a coefficient would leave R.
    pub fn scaled(base: &CertifiedSeries, factor: &FieldElem, shift: usize) -> Result<Self> {
        if factor.is_zero() {
            return Err(Error::Certificate("zero scaling factor".into()));
        }
        let fval = factor.val();
        if lower_v_zero(base).add(&fval) < ExtScalar::Finite(GroupScalar::zero()) {
            return Err(Error::NotInRing(format!("{factor} times series")));
        }
        let n0 = base.tail_start() + shift;
        let coeffs = (0..n0)
            .map(|n| if n < shift { FieldElem::zero() } else { factor * &base.coeff(n - shift) })
            .collect();
        Ok(Self {
            prefix: SeriesPoly::new(coeffs)?,
            tail_bound: base.tail_bound.add(&fval),
            certified: base.certified,
            positive: base.positive && factor.is_positive_leading(),
            tail: Tail::Scaled {
                base: Arc::new(base.clone()),
                factor: factor.clone(),
                shift,
            },
        })
    }

    /// Cauchy product `f·g`. The tail bound is always valid; it is the
    /// exact tail infimum (so `v_0` is available) only when both factors
    /// are certified and have positive leading rationals throughout, which
    /// rules out cancellation of lowest-order terms.
    pub fn product(f: &CertifiedSeries, g: &CertifiedSeries) -> Self {
        let n0 = f.tail_start() + g.tail_start() - 1;
        let coeffs: Vec<_> = (0..n0).map(|n| cauchy_term(n, |i| f.coeff(i), |j| g.coeff(j))).collect();
        let (lf, lg) = (lower_v_zero(f), lower_v_zero(g));
        let tail_bound = lf.add(&g.tail_bound).min(f.tail_bound.add(&lg));
        let positive = f.positive && g.positive;
        Self {
            prefix: SeriesPoly { coeffs },
            tail: Tail::Product(Arc::new(f.clone()), Arc::new(g.clone())),
            tail_bound,
            certified: f.certified && g.certified && positive,
            positive,
        }
    }

    pub fn prefix(&self) -> &SeriesPoly {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// First index governed by the tail rule.
    pub fn tail_start(&self) -> usize {
        self.prefix.order()
    }

    /// Lower bound on `v(r_n)` for `n >= tail_start`; the infimum when
    /// [`is_certified`](Self::is_certified).
    pub fn tail_bound(&self) -> &ExtScalar {
        &self.tail_bound
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn coeff(&self, n: usize) -> FieldElem {
        if let Some(c) = self.prefix.coeff(n) {
            return c.clone();
        }
        match &self.tail {
            Tail::Zero => FieldElem::zero(),
            Tail::Monomial(t) => FieldElem::monomial(t.exponent(n)),
            Tail::Scaled { base, factor, shift } => {
                if n < *shift {
                    FieldElem::zero()
                } else {
                    factor * &base.coeff(n - shift)
                }
            }
            Tail::Product(f, g) => cauchy_term(n, |i| f.coeff(i), |j| g.coeff(j)),
        }
    }

    pub fn truncate(&self, order: usize) -> SeriesPoly {
        SeriesPoly {
            coeffs: (0..order.max(1)).map(|n| self.coeff(n)).collect(),
        }
    }

    /// Whether the tail is identically zero.
    pub fn has_zero_tail(&self) -> bool {
        self.tail_bound.is_infinite()
    }
}

/// `min(prefix valuations, tail bound)`: a lower bound for `v_0`, and its
/// exact value for certified series.
fn lower_v_zero(f: &CertifiedSeries) -> ExtScalar {
    f.prefix.min_val().min(f.tail_bound.clone())
}

/// Either kind of series, for operations that accept both.
#[derive(Clone, Copy, Debug)]
pub enum SeriesRef<'a> {
    Truncated(&'a SeriesPoly),
    Certified(&'a CertifiedSeries),
}

impl<'a> From<&'a SeriesPoly> for SeriesRef<'a> {
    fn from(p: &'a SeriesPoly) -> Self {
        SeriesRef::Truncated(p)
    }
}

impl<'a> From<&'a CertifiedSeries> for SeriesRef<'a> {
    fn from(c: &'a CertifiedSeries) -> Self {
        SeriesRef::Certified(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VLambdaResult {
    /// `v_λ` when `exact`, otherwise a lower bound.
    pub value: ExtScalar,
    /// Indices attaining the minimum inside the window.
    pub argmin: BTreeSet<usize>,
    pub exact: bool,
    /// End `k` of the window `[m, k)`.
    pub window_end: usize,
}

/// Least `k > m` with `v(r_m) < (k − m)λ`.
fn window_end(m: usize, first_val: &GroupScalar, lambda: &GroupScalar) -> usize {
    let steps: BigInt = (first_val / lambda).floor() + 1;
    m + steps.to_usize().expect("window fits in memory")
}

struct WindowMin {
    value: Option<GroupScalar>,
    argmin: BTreeSet<usize>,
}

impl WindowMin {
    fn new() -> Self {
        Self {
            value: None,
            argmin: BTreeSet::new(),
        }
    }

    fn offer(&mut self, n: usize, cost: GroupScalar) {
        match &self.value {
            Some(v) if cost > *v => {}
            Some(v) if cost == *v => {
                self.argmin.insert(n);
            }
            _ => {
                self.value = Some(cost);
                self.argmin = BTreeSet::from([n]);
            }
        }
    }
}

pub fn v_lambda<'a>(f: impl Into<SeriesRef<'a>>, lambda: &GroupScalar) -> Result<VLambdaResult> {
    if !lambda.is_positive() {
        return Err(Error::NonPositiveLambda(lambda.clone()));
    }
    match f.into() {
        SeriesRef::Truncated(p) => Ok(v_lambda_truncated(p, lambda)),
        SeriesRef::Certified(c) => Ok(v_lambda_certified(c, lambda)),
    }
}

fn v_lambda_truncated(p: &SeriesPoly, lambda: &GroupScalar) -> VLambdaResult {
    let order = p.order();
    let tail_cost = lambda.mul_usize(order);
    let Some(m) = p.first_nonzero() else {
        // nothing known: only the cost of the unknown tail bounds v_λ
        return VLambdaResult {
            value: ExtScalar::Finite(tail_cost),
            argmin: BTreeSet::new(),
            exact: false,
            window_end: order,
        };
    };
    let first_val = p.coeffs[m].val();
    let k = window_end(m, first_val.finite().expect("nonzero"), lambda);
    let mut best = WindowMin::new();
    for n in m..k.min(order) {
        if let ExtScalar::Finite(v) = p.coeffs[n].val() {
            best.offer(n, v + lambda.mul_usize(n));
        }
    }
    let min = best.value.expect("index m is in the window");
    // unknown coefficients cost at least λN; strictness keeps argmin complete
    let exact = k <= order || min < tail_cost;
    VLambdaResult {
        value: ExtScalar::Finite(if exact { min } else { min.min(tail_cost) }),
        argmin: best.argmin,
        exact,
        window_end: k,
    }
}

fn v_lambda_certified(c: &CertifiedSeries, lambda: &GroupScalar) -> VLambdaResult {
    let n0 = c.tail_start();
    let m = match c.prefix.first_nonzero() {
        Some(m) => m,
        None if c.has_zero_tail() => {
            return VLambdaResult {
                value: ExtScalar::Infinity,
                argmin: BTreeSet::new(),
                exact: true,
                window_end: n0,
            }
        }
        // a finite tail bound means infinitely many nonzero tail terms
        None => (n0..).find(|&n| !c.coeff(n).is_zero()).expect("nonzero tail"),
    };
    let first_val = c.coeff(m).val();
    let k = window_end(m, first_val.finite().expect("nonzero"), lambda);
    let mut best = WindowMin::new();
    for n in m..k {
        if n >= n0 {
            match (&c.tail_bound, &best.value) {
                (ExtScalar::Infinity, _) => break,
                (ExtScalar::Finite(bound), Some(min)) if *min < bound + &lambda.mul_usize(n) => break,
                _ => {}
            }
        }
        if let ExtScalar::Finite(v) = c.coeff(n).val() {
            best.offer(n, v + lambda.mul_usize(n));
        }
    }
    VLambdaResult {
        value: ExtScalar::Finite(best.value.expect("index m is in the window")),
        argmin: best.argmin,
        exact: true,
        window_end: k,
    }
}

/// `v_0 = inf v(r_n)`; needs a certified tail infimum.
pub fn v_zero<'a>(f: impl Into<SeriesRef<'a>>) -> Result<ExtScalar> {
    match f.into() {
        SeriesRef::Certified(c) if c.is_certified() => Ok(lower_v_zero(c)),
        _ => Err(Error::Uncertified),
    }
}

/// The function `λ ↦ v_λ(f)` as the lower envelope of the lines
/// `v(r_n) + λn` over the sampled coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(usize, GroupScalar)>,
    breakpoints: Vec<(GroupScalar, GroupScalar)>,
    exact_above: GroupScalar,
}

impl NewtonPolygon {
    /// Lower convex hull of `(n, v(r_n))` between the first nonzero index
    /// and the first index of least valuation: exactly the lines that are
    /// minimal for some `λ > 0`.
    fn from_points(points: &[(usize, GroupScalar)], exact_above: GroupScalar) -> Self {
        let min_val = points.iter().map(|(_, v)| v).min().expect("nonempty").clone();
        let last = points.iter().position(|(_, v)| *v == min_val).expect("present");
        let mut hull: Vec<(usize, GroupScalar)> = Vec::new();
        for p in &points[..=last] {
            while hull.len() >= 2 {
                let (n1, v1) = &hull[hull.len() - 2];
                let (n2, v2) = &hull[hull.len() - 1];
                // drop the middle point unless it lies strictly below the chord
                let lhs = (v2 - v1).mul_usize(p.0 - n1);
                let rhs = (&p.1 - v1).mul_usize(n2 - n1);
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p.clone());
        }
        let mut breakpoints: Vec<_> = hull
            .windows(2)
            .map(|w| {
                let lambda = (&w[0].1 - &w[1].1) / GroupScalar::from((w[1].0 - w[0].0) as i64);
                let chi = &w[0].1 + &lambda.mul_usize(w[0].0);
                (lambda, chi)
            })
            .collect();
        breakpoints.reverse();
        Self {
            vertices: hull,
            breakpoints,
            exact_above,
        }
    }

    pub fn vertices(&self) -> &[(usize, GroupScalar)] {
        &self.vertices
    }

    /// `(λ, χ(λ))` at each change of slope, increasing in `λ`.
    pub fn breakpoints(&self) -> &[(GroupScalar, GroupScalar)] {
        &self.breakpoints
    }

    /// The polygon equals `χ_f(λ)` for every `λ` strictly above this.
    pub fn exact_above(&self) -> &GroupScalar {
        &self.exact_above
    }

    pub fn is_exact_at(&self, lambda: &GroupScalar) -> bool {
        lambda > &self.exact_above
    }

    pub fn eval(&self, lambda: &GroupScalar) -> GroupScalar {
        self.vertices
            .iter()
            .map(|(n, v)| v + &lambda.mul_usize(*n))
            .min()
            .expect("nonempty")
    }
}

fn nonzero_points(coeffs: impl Iterator<Item = (usize, FieldElem)>) -> Vec<(usize, GroupScalar)> {
    coeffs
        .filter_map(|(n, c)| c.val().finite().cloned().map(|v| (n, v)))
        .collect()
}

/// Polygon of the known coefficients; for a certified series the prefix is
/// used and the tail bound limits the exact range.
pub fn newton_polygon<'a>(f: impl Into<SeriesRef<'a>>) -> Result<NewtonPolygon> {
    match f.into() {
        SeriesRef::Truncated(p) => {
            let points = nonzero_points(p.coeffs.iter().cloned().enumerate());
            if points.is_empty() {
                return Err(Error::ZeroSeries);
            }
            let order = p.order();
            let exact_above = points
                .iter()
                .map(|(n, v)| v / &GroupScalar::from((order - n) as i64))
                .min()
                .expect("nonempty");
            Ok(NewtonPolygon::from_points(&points, exact_above))
        }
        SeriesRef::Certified(c) => newton_polygon_sampled(c, c.tail_start()),
    }
}

/// Polygon of the first `terms` coefficients of a certified series (at
/// least the prefix).
pub fn newton_polygon_sampled(c: &CertifiedSeries, terms: usize) -> Result<NewtonPolygon> {
    let terms = terms.max(c.tail_start());
    let points = nonzero_points((0..terms).map(|n| (n, c.coeff(n))));
    if points.is_empty() {
        return Err(Error::ZeroSeries);
    }
    let exact_above = match &c.tail_bound {
        ExtScalar::Infinity => GroupScalar::zero(),
        ExtScalar::Finite(bound) => points
            .iter()
            .map(|(n, v)| (v - bound) / GroupScalar::from((terms - n) as i64))
            .min()
            .expect("nonempty")
            .max(GroupScalar::zero()),
    };
    Ok(NewtonPolygon::from_points(&points, exact_above))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiltrationVerdict {
    Holds,
    Violated(String),
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct FiltrationReport {
    pub lambda: GroupScalar,
    pub v_f: VLambdaResult,
    pub v_g: VLambdaResult,
    pub v_sum: VLambdaResult,
    pub v_product: VLambdaResult,
    pub verdict: FiltrationVerdict,
}

/// Checks `v_λ(f+g) ≥ min` and `v_λ(fg) = v_λ(f) + v_λ(g)`.
pub fn check_filtration_axioms(f: &SeriesPoly, g: &SeriesPoly, lambda: &GroupScalar) -> Result<FiltrationReport> {
    let v_f = v_lambda(f, lambda)?;
    let v_g = v_lambda(g, lambda)?;
    let v_sum = v_lambda(&(f + g), lambda)?;
    let v_product = v_lambda(&(f * g), lambda)?;
    let verdict = if !(v_f.exact && v_g.exact && v_sum.exact && v_product.exact) {
        FiltrationVerdict::Inconclusive
    } else if v_sum.value < v_f.value.clone().min(v_g.value.clone()) {
        FiltrationVerdict::Violated(format!(
            "v(f+g) = {} below min({}, {})",
            v_sum.value, v_f.value, v_g.value
        ))
    } else if v_product.value != v_f.value.add(&v_g.value) {
        FiltrationVerdict::Violated(format!(
            "v(fg) = {} differs from {} + {}",
            v_product.value, v_f.value, v_g.value
        ))
    } else {
        FiltrationVerdict::Holds
    };
    Ok(FiltrationReport {
        lambda: lambda.clone(),
        v_f,
        v_g,
        v_sum,
        v_product,
        verdict,
    })
}

/// A `λ' > 0` with `χ_f(λ') − v_0(f) < ε`: take the first `n` with
/// `v(r_n) < v_0(f) + ε` and halve the slack `(v_0 + ε − v(r_n)) / n`.
pub fn continuity_lambda(f: &CertifiedSeries, epsilon: &GroupScalar) -> Result<GroupScalar> {
    if !epsilon.is_positive() {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    let base = match v_zero(f)? {
        ExtScalar::Finite(v) => v,
        ExtScalar::Infinity => return Err(Error::ZeroSeries),
    };
    let ceiling = &base + epsilon;
    let (n, v) = (0..)
        .find_map(|n| match f.coeff(n).val() {
            ExtScalar::Finite(v) if v < ceiling => Some((n, v)),
            _ => None,
        })
        .expect("the infimum is approached");
    if n == 0 {
        return Ok(epsilon.clone());
    }
    Ok((ceiling - v) / GroupScalar::from(2 * n as i64))
}

/// `λ_k = λ_0 · 2^{−k}` for `k = 1..=steps`.
pub fn geometric_grid(lambda0: &GroupScalar, steps: u32) -> Vec<GroupScalar> {
    (1..=steps).map(|k| lambda0 * &GroupScalar::pow2_neg(k)).collect()
}
