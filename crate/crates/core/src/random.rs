//! Seeded generators for elements of R, series and certified series.
//!
//! Everything is driven by a ChaCha8 stream so that a seed reproduces a
//! sweep bit for bit.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::base_field::{FieldElem, MonomialSum};
use crate::power_series::{CertifiedSeries, MonomialTail, SeriesPoly};
use crate::value_group::{find_in_interval, GroupScalar, ValueGroup};

pub struct Sampler {
    rng: ChaCha8Rng,
    group: ValueGroup,
}

impl Sampler {
    pub fn new(seed: u64, group: ValueGroup) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            group,
        }
    }

    pub fn group(&self) -> ValueGroup {
        self.group
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A value-group element in `[lo, hi]`.
    pub fn exponent(&mut self, lo: i64, hi: i64) -> GroupScalar {
        match self.group {
            ValueGroup::Rationals => {
                let q = self.rng.gen_range(1..=6i64);
                let p = self.rng.gen_range(lo * q..=hi * q);
                GroupScalar::ratio(p, q)
            }
            ValueGroup::IntegerSqrt2 => loop {
                let b = self.rng.gen_range(-2..=2i64);
                let shift = GroupScalar::from_parts((0, 1), (b, 1));
                let a_lo: BigInt = (GroupScalar::integer(lo) - &shift).floor() + 1;
                let a_hi: BigInt = (GroupScalar::integer(hi) - &shift).floor();
                if a_lo > a_hi {
                    continue;
                }
                let (a_lo, a_hi) = (to_i64(&a_lo), to_i64(&a_hi));
                let a = self.rng.gen_range(a_lo..=a_hi);
                break GroupScalar::from_parts((a, 1), (b, 1));
            },
        }
    }

    /// Nonzero rational with small numerator and denominator.
    pub fn coefficient(&mut self) -> BigRational {
        let n = self.rng.gen_range(1..=9i64) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
        BigRational::new(n.into(), self.rng.gen_range(1..=4i64).into())
    }

    pub fn positive_coefficient(&mut self) -> BigRational {
        BigRational::new(self.rng.gen_range(1..=9i64).into(), self.rng.gen_range(1..=4i64).into())
    }

    /// A nonzero element of R with up to `max_terms` monomials on top and
    /// sometimes a unit denominator `1 + c t^e`.
    pub fn ring_elem(&mut self, max_terms: usize) -> FieldElem {
        self.ring_elem_signed(max_terms, false)
    }

    /// Like [`ring_elem`](Self::ring_elem) with a positive leading rational.
    pub fn positive_ring_elem(&mut self, max_terms: usize) -> FieldElem {
        self.ring_elem_signed(max_terms, true)
    }

    fn ring_elem_signed(&mut self, max_terms: usize, positive: bool) -> FieldElem {
        let terms = self.rng.gen_range(1..=max_terms.max(1));
        let num = MonomialSum::from_terms((0..terms).map(|_| {
            let c = if positive { self.positive_coefficient() } else { self.coefficient() };
            (self.exponent(0, 2), c)
        }));
        if num.is_zero() {
            return FieldElem::one();
        }
        // denominators from a fixed family keep Cauchy sums small
        let den = if self.rng.gen_bool(0.3) {
            let c = self.rng.gen_range(1..=2i64);
            MonomialSum::from_terms([
                (GroupScalar::zero(), BigRational::from_integer(1.into())),
                (GroupScalar::one(), BigRational::from_integer(c.into())),
            ])
        } else {
            MonomialSum::one()
        };
        FieldElem::new(num, den).expect("nonzero denominator")
    }

    /// A unit of R: nonzero rational plus terms of valuation at least 1.
    pub fn unit(&mut self) -> FieldElem {
        let rest = self.ring_elem(2);
        let lead = FieldElem::from_rational(self.coefficient());
        &lead + &(&rest * &FieldElem::monomial(GroupScalar::one()))
    }

    fn maybe_zero(&mut self, zero_prob: f64, positive: bool) -> FieldElem {
        if self.rng.gen_bool(zero_prob) {
            FieldElem::zero()
        } else if positive {
            self.positive_ring_elem(2)
        } else {
            self.ring_elem(2)
        }
    }

    /// Series of the given order with independent coefficients, each zero
    /// with probability `zero_prob`.
    pub fn series(&mut self, order: usize, zero_prob: f64) -> SeriesPoly {
        let coeffs = (0..order.max(1)).map(|_| self.maybe_zero(zero_prob, false)).collect();
        SeriesPoly::new(coeffs).expect("coefficients in R")
    }

    /// Series with at least one nonzero coefficient.
    pub fn nonzero_series(&mut self, order: usize, zero_prob: f64) -> SeriesPoly {
        let mut s = self.series(order, zero_prob);
        if s.is_zero() {
            let i = self.rng.gen_range(0..s.order());
            let mut coeffs = s.coeffs().to_vec();
            coeffs[i] = self.ring_elem(2);
            s = SeriesPoly::new(coeffs).expect("in R");
        }
        s
    }

    /// A positive target outside the value group, at most `hi`.
    pub fn non_group_target(&mut self, hi: i64) -> GroupScalar {
        loop {
            let x = match self.group {
                ValueGroup::Rationals => {
                    let b = GroupScalar::from_parts((0, 1), (self.rng.gen_range(1..=3i64), self.rng.gen_range(1..=4i64)));
                    let a = GroupScalar::ratio(self.rng.gen_range(-8..=8i64), self.rng.gen_range(1..=4i64));
                    a + b
                }
                ValueGroup::IntegerSqrt2 => {
                    let a = GroupScalar::ratio(self.rng.gen_range(-12..=12i64), self.rng.gen_range(2..=5i64));
                    a + GroupScalar::from_parts((0, 1), (self.rng.gen_range(-2..=2i64), 1))
                }
            };
            if x.is_positive() && x <= GroupScalar::integer(hi) && !self.group.contains(&x) {
                return x;
            }
        }
    }

    /// A certified series: random prefix, then either a constant-valuation
    /// tail or monomials whose exponents decrease to a target outside the
    /// group. With `positive` every leading rational is positive.
    pub fn certified(&mut self, prefix: usize, positive: bool) -> CertifiedSeries {
        let coeffs = (0..prefix.max(1)).map(|_| self.maybe_zero(0.3, positive)).collect();
        self.with_random_tail(SeriesPoly::new(coeffs).expect("in R"))
    }

    /// A certified series whose constant term is a unit of R, so `v_0 = 0`.
    pub fn unit_series(&mut self, prefix: usize, positive: bool) -> CertifiedSeries {
        let mut coeffs = vec![self.unit()];
        if positive && !coeffs[0].is_positive_leading() {
            coeffs[0] = -&coeffs[0];
        }
        coeffs.extend((1..prefix.max(1)).map(|_| self.maybe_zero(0.3, positive)));
        self.with_random_tail(SeriesPoly::new(coeffs).expect("in R"))
    }

    fn with_random_tail(&mut self, prefix: SeriesPoly) -> CertifiedSeries {
        match self.rng.gen_range(0..3) {
            0 => CertifiedSeries::polynomial(prefix),
            1 => {
                let tail = MonomialTail::constant(self.exponent(0, 2));
                CertifiedSeries::with_monomial_tail(prefix, tail).expect("nonnegative tail")
            }
            _ => {
                let target = self.non_group_target(2);
                let tail = MonomialTail::approach(&target, self.group).expect("target outside group");
                CertifiedSeries::with_monomial_tail(prefix, tail).expect("nonnegative tail")
            }
        }
    }

    /// A certified series with `v_0 ≥ threshold`, for `threshold` outside
    /// the group: monomials drawn from seeded subintervals above the
    /// threshold, then a zero, constant or approach tail that stays above it.
    pub fn ideal_element(&mut self, threshold: &GroupScalar, prefix: usize) -> CertifiedSeries {
        let coeffs = (0..prefix.max(1))
            .map(|_| {
                if self.rng.gen_bool(0.3) {
                    return FieldElem::zero();
                }
                let e = self.above(threshold);
                FieldElem::scaled_monomial(self.coefficient(), e)
            })
            .collect();
        let prefix = SeriesPoly::new(coeffs).expect("exponents above a positive threshold");
        let tail = match self.rng.gen_range(0..3) {
            0 => return CertifiedSeries::polynomial(prefix),
            1 => MonomialTail::constant(self.above(threshold)),
            _ => {
                let shift = self.exponent(0, 1);
                let shift = if shift.is_negative() { -shift } else { shift };
                MonomialTail::approach(&(threshold + &shift), self.group).expect("target outside the group")
            }
        };
        CertifiedSeries::with_monomial_tail(prefix, tail).expect("nonnegative tail")
    }

    /// Least-height group element in a random subinterval of
    /// `(x, x + 2]`.
    fn above(&mut self, x: &GroupScalar) -> GroupScalar {
        let a = GroupScalar::ratio(self.rng.gen_range(0..=7), 4);
        let w = GroupScalar::ratio(1, self.rng.gen_range(1..=8));
        let lo = x + &a;
        find_in_interval(&lo, &(&lo + &w), self.group).expect("nonempty interval")
    }

    /// `λ = p/q` with `p/q` in `(0, 2]`, or `2^{-k}`.
    pub fn lambda(&mut self) -> GroupScalar {
        if self.rng.gen_bool(0.5) {
            let q = self.rng.gen_range(1..=12i64);
            GroupScalar::ratio(self.rng.gen_range(1..=2 * q), q)
        } else {
            GroupScalar::pow2_neg(self.rng.gen_range(1..=8))
        }
    }
}

fn to_i64(x: &BigInt) -> i64 {
    i64::try_from(x).expect("small bound")
}
