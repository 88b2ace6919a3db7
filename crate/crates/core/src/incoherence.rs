//! An executable non-coherence argument for R[[X]].
//!
//! Fix `α ≥ 0` outside Γ and `r ∈ R` with `v(r) > α`, and let
//! `f = Σ t^{α_{n+1}} X^n` with exponents decreasing to `α`. Then
//! `R[[X]]f ∩ R[[X]]r = I·f` where `I = {g : v_0(g) ≥ v(r) − α}`. The ideal
//! `I` is not finitely generated: for candidates `g_1 … g_m` in `I`, every
//! combination has constant term of valuation at least
//! `β = min v(g_i(0))`, while `I` contains a constant `t` with
//! `v(r) − α < v(t) < β`. A [`WitnessReport`] records that argument in a
//! form that can be replayed without redoing the search.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::base_field::{divide_in_r, FieldElem};
use crate::error::{Error, Result};
use crate::power_series::{v_zero, CertifiedSeries, ExponentRule, MonomialTail, SeriesPoly, Tail};
use crate::value_group::{find_in_interval, ExtScalar, GroupScalar, ValueGroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncoherenceConfig {
    pub group: ValueGroup,
    pub alpha: GroupScalar,
    pub r: FieldElem,
    /// Coefficients of the witness stored explicitly.
    pub seq_len: usize,
    /// Truncation order for membership checks.
    pub order: usize,
}

impl IncoherenceConfig {
    pub fn new(group: ValueGroup, alpha: GroupScalar, r: FieldElem, seq_len: usize, order: usize) -> Result<Self> {
        let cfg = Self {
            group,
            alpha,
            r,
            seq_len,
            order,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_negative() {
            return Err(Error::NegativeTarget(self.alpha.clone()));
        }
        if self.group.contains(&self.alpha) {
            return Err(Error::InGroup {
                value: self.alpha.clone(),
                group: self.group.tag(),
            });
        }
        if self.r.is_zero() || !self.r.in_group(self.group) {
            return Err(Error::Precondition(format!("r = {} must be a nonzero element over {}", self.r, self.group)));
        }
        if self.r.val() <= ExtScalar::Finite(self.alpha.clone()) {
            return Err(Error::Precondition(format!("val(r) = {} must exceed alpha = {}", self.r.val(), self.alpha)));
        }
        if self.seq_len == 0 {
            return Err(Error::EmptySequence);
        }
        if self.order == 0 {
            return Err(Error::EmptySeries);
        }
        Ok(())
    }

    pub fn val_r(&self) -> GroupScalar {
        self.r.val().finite().expect("r is nonzero").clone()
    }

    pub fn ideal(&self) -> CriticalIdeal {
        CriticalIdeal {
            threshold: self.val_r() - &self.alpha,
        }
    }
}

/// `I = {g : v_0(g) ≥ threshold}` with `threshold = v(r) − α ∉ Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalIdeal {
    pub threshold: GroupScalar,
}

/// `f = Σ t^{α_{n+1}} X^n`: `seq_len` explicit coefficients, then the same
/// rule as a certified tail with infimum `α`.
pub fn build_witness_series(cfg: &IncoherenceConfig) -> Result<CertifiedSeries> {
    cfg.validate()?;
    let tail = MonomialTail::approach(&cfg.alpha, cfg.group)?;
    let coeffs = (0..cfg.seq_len).map(|n| FieldElem::monomial(tail.exponent(n))).collect();
    CertifiedSeries::with_monomial_tail(SeriesPoly::new(coeffs)?, tail)
}

pub fn in_critical_ideal(g: &CertifiedSeries, ideal: &CriticalIdeal) -> Result<bool> {
    Ok(v_zero(g)? >= ExtScalar::Finite(ideal.threshold.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `g·f = r·y` below the truncation order.
    Member { y: SeriesPoly },
    /// A coefficient of `g·f` with valuation below `v(r)`.
    NonMember { index: usize, coeff: FieldElem },
}

/// Decide whether `g·f ∈ r·R[[X]]`, producing the cofactor or a coefficient
/// that rules it out. Non-membership is searched for up to `4·order`
/// coefficients before giving up as inconclusive.
pub fn intersection_membership(g: &CertifiedSeries, cfg: &IncoherenceConfig, f: &CertifiedSeries) -> Result<Membership> {
    let ideal = cfg.ideal();
    let gf = CertifiedSeries::product(g, f);
    let val_r = ExtScalar::Finite(cfg.val_r());
    if in_critical_ideal(g, &ideal)? {
        let prod = gf.truncate(cfg.order);
        let y = prod
            .coeffs()
            .iter()
            .map(|c| if c.is_zero() { Ok(FieldElem::zero()) } else { divide_in_r(&cfg.r, c) })
            .collect::<Result<Vec<_>>>()?;
        let y = SeriesPoly::new(y)?;
        if let Some(index) = (0..cfg.order).find(|&n| &y.coeffs()[n] * &cfg.r != prod.coeffs()[n]) {
            return Err(Error::WitnessMismatch { index });
        }
        return Ok(Membership::Member { y });
    }
    let limit = 4 * cfg.order;
    for index in 0..limit {
        let coeff = gf.coeff(index);
        if coeff.val() < val_r {
            return Ok(Membership::NonMember { index, coeff });
        }
    }
    Err(Error::Inconclusive {
        order: limit,
        reason: "no coefficient of g*f below val(r) yet; increase the order".into(),
    })
}

/// The refutation of one candidate generating set, with every claim it
/// depends on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub group: ValueGroup,
    pub alpha: GroupScalar,
    pub r: FieldElem,
    pub threshold: GroupScalar,
    pub candidates: Vec<CandidateRecord>,
    pub beta: ExtScalar,
    pub t: FieldElem,
    pub gamma: GroupScalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRecord {
    pub series: SerialSeries,
    /// Claimed `v_0` of the candidate.
    pub v0: ExtScalar,
    /// Claimed valuation of its constant term.
    pub x0_val: ExtScalar,
}

/// A certified series restricted to tails that have a text form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerialSeries {
    pub prefix: SeriesPoly,
    pub tail: SerialTail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SerialTail {
    Zero,
    Constant { exponent: GroupScalar, offset: GroupScalar },
    Approach { target: GroupScalar, offset: GroupScalar },
}

impl SerialSeries {
    pub fn from_certified(c: &CertifiedSeries) -> Result<Self> {
        let tail = match c.tail() {
            Tail::Zero => SerialTail::Zero,
            Tail::Monomial(MonomialTail { rule, offset }) => match rule {
                ExponentRule::Constant(e) => SerialTail::Constant {
                    exponent: e.clone(),
                    offset: offset.clone(),
                },
                ExponentRule::Approach(a) => SerialTail::Approach {
                    target: a.target().clone(),
                    offset: offset.clone(),
                },
            },
            Tail::Scaled { .. } | Tail::Product(..) => {
                return Err(Error::Certificate("only zero, constant and approach tails have a text form".into()))
            }
        };
        Ok(Self {
            prefix: c.prefix().clone(),
            tail,
        })
    }

    pub fn to_certified(&self, group: ValueGroup) -> Result<CertifiedSeries> {
        match &self.tail {
            SerialTail::Zero => Ok(CertifiedSeries::polynomial(self.prefix.clone())),
            SerialTail::Constant { exponent, offset } => CertifiedSeries::with_monomial_tail(
                self.prefix.clone(),
                MonomialTail::constant(exponent.clone()).with_offset(offset.clone()),
            ),
            SerialTail::Approach { target, offset } => CertifiedSeries::with_monomial_tail(
                self.prefix.clone(),
                MonomialTail::approach(target, group)?.with_offset(offset.clone()),
            ),
        }
    }
}

impl fmt::Display for SerialTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SerialTail::Zero => f.write_str("zero"),
            SerialTail::Constant { exponent, offset } => write!(f, "constant {exponent} | offset {offset}"),
            SerialTail::Approach { target, offset } => write!(f, "approach {target} | offset {offset}"),
        }
    }
}

impl FromStr for SerialTail {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" {
            return Ok(SerialTail::Zero);
        }
        let (head, offset) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("tail without offset: {s}")))?;
        let offset = offset
            .trim()
            .strip_prefix("offset")
            .ok_or_else(|| Error::Parse(format!("expected offset in {s}")))?
            .trim()
            .parse()?;
        let head = head.trim();
        if let Some(e) = head.strip_prefix("constant") {
            Ok(SerialTail::Constant {
                exponent: e.trim().parse()?,
                offset,
            })
        } else if let Some(t) = head.strip_prefix("approach") {
            Ok(SerialTail::Approach {
                target: t.trim().parse()?,
                offset,
            })
        } else {
            Err(Error::Parse(format!("unknown tail rule: {head}")))
        }
    }
}

/// Find `t ∈ I` not generated by `candidates`.
pub fn refute_generators(candidates: &[CertifiedSeries], cfg: &IncoherenceConfig) -> Result<WitnessReport> {
    cfg.validate()?;
    let ideal = cfg.ideal();
    let mut records = Vec::with_capacity(candidates.len());
    for (i, g) in candidates.iter().enumerate() {
        if !in_critical_ideal(g, &ideal)? {
            return Err(Error::Precondition(format!(
                "candidate {i} has v_0 = {} below the threshold {}",
                v_zero(g)?,
                ideal.threshold
            )));
        }
        records.push(CandidateRecord {
            series: SerialSeries::from_certified(g)?,
            v0: v_zero(g)?,
            x0_val: g.coeff(0).val(),
        });
    }
    let beta = records
        .iter()
        .map(|c| c.x0_val.clone())
        .min()
        .unwrap_or(ExtScalar::Infinity);
    let cap = &ideal.threshold + &GroupScalar::one();
    let hi = match &beta {
        ExtScalar::Finite(b) if *b < cap => b.clone(),
        _ => cap,
    };
    let gamma = find_in_interval(&ideal.threshold, &hi, cfg.group)?;
    Ok(WitnessReport {
        group: cfg.group,
        alpha: cfg.alpha.clone(),
        r: cfg.r.clone(),
        threshold: ideal.threshold,
        candidates: records,
        beta,
        t: FieldElem::monomial(gamma.clone()),
        gamma,
    })
}

/// Steps of [`verify_report`] that failed to replay; empty means verified.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verification {
    pub failures: Vec<String>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, cond: bool, step: impl FnOnce() -> String) {
        if !cond {
            self.failures.push(step());
        }
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return f.write_str("verified");
        }
        for step in &self.failures {
            writeln!(f, "FAILED {step}")?;
        }
        Ok(())
    }
}

/// Replay every claim of `rep` against `cfg` from the stored data alone.
pub fn verify_report(rep: &WitnessReport, cfg: &IncoherenceConfig) -> Verification {
    let mut v = Verification::default();
    v.check(cfg.validate().is_ok(), || "config: preconditions".into());
    v.check(rep.group == cfg.group, || format!("config: group {} != {}", rep.group, cfg.group));
    v.check(rep.alpha == cfg.alpha, || format!("config: alpha {} != {}", rep.alpha, cfg.alpha));
    v.check(rep.r == cfg.r, || format!("config: r {} != {}", rep.r, cfg.r));
    let threshold = match rep.r.val() {
        ExtScalar::Finite(vr) => Some(vr - &rep.alpha),
        ExtScalar::Infinity => None,
    };
    v.check(threshold.as_ref() == Some(&rep.threshold), || {
        format!("threshold: {} != val(r) - alpha", rep.threshold)
    });
    v.check(!rep.group.contains(&rep.threshold), || {
        format!("threshold: {} lies in {}", rep.threshold, rep.group)
    });

    let mut x0_min = ExtScalar::Infinity;
    for (i, c) in rep.candidates.iter().enumerate() {
        let series = match c.series.to_certified(rep.group) {
            Ok(s) => s,
            Err(e) => {
                v.failures.push(format!("candidate {i}: cannot rebuild ({e})"));
                continue;
            }
        };
        let v0 = v_zero(&series).expect("rebuilt series are certified");
        v.check(v0 == c.v0, || format!("candidate {i}: v_0 is {v0}, report says {}", c.v0));
        v.check(v0 >= ExtScalar::Finite(rep.threshold.clone()), || {
            format!("membership: candidate {i} has v_0 = {v0} < threshold {}", rep.threshold)
        });
        let x0 = series.coeff(0).val();
        v.check(x0 == c.x0_val, || format!("candidate {i}: constant term valuation is {x0}, report says {}", c.x0_val));
        x0_min = x0_min.min(x0);
    }
    v.check(x0_min == rep.beta, || format!("beta: recomputed {x0_min}, report says {}", rep.beta));
    if let ExtScalar::Finite(b) = &rep.beta {
        v.check(b > &rep.threshold, || format!("beta: {b} not above threshold"));
    }
    v.check(rep.t.val() == ExtScalar::Finite(rep.gamma.clone()), || {
        format!("t: val(t) = {} but gamma = {}", rep.t.val(), rep.gamma)
    });
    v.check(rep.group.contains(&rep.gamma), || format!("gamma: {} not in {}", rep.gamma, rep.group));
    v.check(rep.gamma > rep.threshold, || {
        format!("t in I: gamma = {} not above threshold {}", rep.gamma, rep.threshold)
    });
    v.check(ExtScalar::Finite(rep.gamma.clone()) < rep.beta, || {
        format!("t not generated: gamma = {} not below beta = {}", rep.gamma, rep.beta)
    });
    v
}

const CERT_HEADER: &str = "# witness certificate v1";

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{CERT_HEADER}")?;
        writeln!(f, "group: {}", self.group)?;
        writeln!(f, "alpha: {}", self.alpha)?;
        writeln!(f, "r: {}", self.r)?;
        writeln!(f, "threshold: {}", self.threshold)?;
        writeln!(f, "candidates: {}", self.candidates.len())?;
        for (i, c) in self.candidates.iter().enumerate() {
            writeln!(f, "candidate.{i}.prefix: {}", c.series.prefix)?;
            writeln!(f, "candidate.{i}.tail: {}", c.series.tail)?;
            writeln!(f, "candidate.{i}.v0: {}", c.v0)?;
            writeln!(f, "candidate.{i}.x0_val: {}", c.x0_val)?;
        }
        writeln!(f, "beta: {}", self.beta)?;
        writeln!(f, "t: {}", self.t)?;
        writeln!(f, "gamma: {}", self.gamma)?;
        writeln!(f, "claim.t_in_ideal: gamma > threshold")?;
        writeln!(f, "claim.not_generated: gamma < beta")
    }
}

impl FromStr for WitnessReport {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for line in s.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected key: value, got {line}")))?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::Parse(format!("missing key {k}")))
        };
        let count: usize = get("candidates")?
            .parse()
            .map_err(|_| Error::Parse("candidates must be a count".into()))?;
        let candidates = (0..count)
            .map(|i| {
                Ok(CandidateRecord {
                    series: SerialSeries {
                        prefix: get(&format!("candidate.{i}.prefix"))?.parse()?,
                        tail: get(&format!("candidate.{i}.tail"))?.parse()?,
                    },
                    v0: get(&format!("candidate.{i}.v0"))?.parse()?,
                    x0_val: get(&format!("candidate.{i}.x0_val"))?.parse()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            group: get("group")?.parse()?,
            alpha: get("alpha")?.parse()?,
            r: get("r")?.parse()?,
            threshold: get("threshold")?.parse()?,
            candidates,
            beta: get("beta")?.parse()?,
            t: get("t")?.parse()?,
            gamma: get("gamma")?.parse()?,
        })
    }
}

/// Single-field corruptions of a valid report, each of which makes some
/// recorded claim false.
pub fn tamper_variants(rep: &WitnessReport) -> Vec<(&'static str, WitnessReport)> {
    let mut out = Vec::new();
    let mut push = |name, f: &dyn Fn(&mut WitnessReport)| {
        let mut r = rep.clone();
        f(&mut r);
        out.push((name, r));
    };
    push("alpha", &|r| r.alpha = &r.alpha + &GroupScalar::ratio(1, 7));
    push("r", &|r| r.r = &r.r * &FieldElem::monomial(GroupScalar::one()));
    push("threshold", &|r| r.threshold = &r.threshold + &GroupScalar::ratio(1, 3));
    push("beta", &|r| {
        r.beta = match &r.beta {
            ExtScalar::Finite(b) => ExtScalar::Finite(b + &GroupScalar::one()),
            ExtScalar::Infinity => ExtScalar::Finite(r.gamma.clone()),
        }
    });
    push("t", &|r| r.t = &r.t * &FieldElem::monomial(GroupScalar::ratio(1, 2).max(GroupScalar::one())));
    push("gamma_at_beta", &|r| {
        let g = match &r.beta {
            ExtScalar::Finite(b) => b.clone(),
            ExtScalar::Infinity => r.threshold.floor().into(),
        };
        r.t = FieldElem::monomial(g.clone());
        r.gamma = g;
    });
    if !rep.candidates.is_empty() {
        push("candidate_outside_ideal", &|r| {
            r.candidates[0].series = SerialSeries {
                prefix: SeriesPoly::one(1),
                tail: SerialTail::Zero,
            };
        });
        push("candidate_v0", &|r| {
            r.candidates[0].v0 = match &r.candidates[0].v0 {
                ExtScalar::Finite(v) => ExtScalar::Finite(v + &GroupScalar::one()),
                ExtScalar::Infinity => ExtScalar::Finite(&r.threshold + &GroupScalar::one()),
            };
        });
        push("candidate_x0_val", &|r| {
            r.candidates[0].x0_val = match &r.candidates[0].x0_val {
                ExtScalar::Finite(v) => ExtScalar::Finite(v + &GroupScalar::one()),
                ExtScalar::Infinity => ExtScalar::Finite(r.threshold.clone()),
            };
        });
    }
    out
}

/// Outcome of the bounded search for a combination `Σ h_i g_i` equal to
/// `t` below `X^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForceOutcome {
    pub trials: usize,
    /// Least valuation of a combination's constant term over all trials.
    pub least_x0_val: ExtScalar,
    /// Trial index of a combination matching `t`, if one was found.
    pub hit: Option<usize>,
}

/// Random cofactors `h_i ∈ R[[X]]` of order `order`, including the
/// constant ones that come closest to `t` in each coordinate.
pub fn brute_force_generation(
    candidates: &[CertifiedSeries],
    t: &FieldElem,
    order: usize,
    trials: usize,
    rng: &mut impl Rng,
    group: ValueGroup,
) -> BruteForceOutcome {
    let gs: Vec<SeriesPoly> = candidates.iter().map(|g| g.truncate(order)).collect();
    let mut least = ExtScalar::Infinity;
    let mut hit = None;
    for trial in 0..trials {
        let hs: Vec<SeriesPoly> = gs.iter().map(|_| random_cofactor(rng, order, group, trial)).collect();
        // coefficients of Σ h_j g_j, compared with t·X⁰ one at a time
        let coeff = |n: usize| {
            let mut c = FieldElem::zero();
            for (h, g) in hs.iter().zip(&gs) {
                for i in 0..=n {
                    let (a, b) = (&h.coeffs()[i], &g.coeffs()[n - i]);
                    if !a.is_zero() && !b.is_zero() {
                        c = &c + &(a * b);
                    }
                }
            }
            c
        };
        let c0 = coeff(0);
        least = least.min(c0.val());
        if hit.is_none() && c0 == *t && (1..order).all(|n| coeff(n).is_zero()) {
            hit = Some(trial);
        }
    }
    BruteForceOutcome {
        trials,
        least_x0_val: least,
        hit,
    }
}

fn random_cofactor(rng: &mut impl Rng, order: usize, group: ValueGroup, trial: usize) -> SeriesPoly {
    let coeffs = (0..order)
        .map(|n| {
            // early trials use units in the constant slot, the cheapest way
            // to reach a small constant term
            if n == 0 && trial % 2 == 0 {
                return FieldElem::from_rational(num_rational::BigRational::new(
                    rng.gen_range(-5..=5i64).into(),
                    rng.gen_range(1..=3i64).into(),
                ));
            }
            if rng.gen_bool(0.5) {
                return FieldElem::zero();
            }
            let e = match group {
                ValueGroup::Rationals => GroupScalar::ratio(rng.gen_range(0..=8), rng.gen_range(1..=4)),
                ValueGroup::IntegerSqrt2 => {
                    let b = rng.gen_range(0..=1i64);
                    GroupScalar::from_parts((rng.gen_range(0..=2), 1), (b, 1))
                }
            };
            FieldElem::scaled_monomial(num_rational::BigRational::from_integer(rng.gen_range(-3..=3i64).into()), e)
        })
        .collect();
    SeriesPoly::new(coeffs).expect("exponents are nonnegative")
}
