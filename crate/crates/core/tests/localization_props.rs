use proptest::prelude::*;
use valseries::localization::{
    factor_unit, fractions_equal, invert, pure_divide, to_t, unitizer, val_fraction, chi_evidence, FractionValue,
    LocalFraction, Numerator,
};
use valseries::power_series::{geometric_grid, v_zero, CertifiedSeries, SeriesPoly};
use valseries::random::Sampler;
use valseries::{Error, ExtScalar, FieldElem, GroupScalar, ValueGroup};

fn group_of(sqrt2: bool) -> ValueGroup {
    if sqrt2 {
        ValueGroup::IntegerSqrt2
    } else {
        ValueGroup::Rationals
    }
}

fn positive_fraction(s: &mut Sampler) -> LocalFraction {
    let f = s.certified(4, true);
    let r = s.positive_ring_elem(2);
    let u = s.unit_series(3, true);
    LocalFraction::new(Numerator::Certified(f), r, u).unwrap()
}

fn exact(x: &LocalFraction) -> ExtScalar {
    val_fraction(x).exact().expect("certified").clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factor_unit_round_trip(seed in any::<u64>(), sqrt2 in any::<bool>()) {
        let group = group_of(sqrt2);
        let mut s = Sampler::new(seed, group);
        let f = s.certified(5, false);
        match v_zero(&f).unwrap() {
            ExtScalar::Finite(v0) if group.contains(&v0) => {
                let (r, u) = factor_unit(&f, group).unwrap();
                prop_assert_eq!(r.val(), ExtScalar::Finite(v0));
                prop_assert_eq!(v_zero(&u).unwrap(), ExtScalar::Finite(GroupScalar::zero()));
                prop_assert_eq!(u.truncate(12).scale(&r).unwrap(), f.truncate(12));
            }
            ExtScalar::Finite(_) => {
                let is_not_in_group = matches!(factor_unit(&f, group), Err(Error::NotInGroup { .. }));
                prop_assert!(is_not_in_group);
            }
            ExtScalar::Infinity => prop_assert!(factor_unit(&f, group).is_err()),
        }
    }

    #[test]
    fn unitizer_reaches_beta(seed in any::<u64>(), sqrt2 in any::<bool>()) {
        let group = group_of(sqrt2);
        let mut s = Sampler::new(seed, group);
        let target = s.non_group_target(2);
        let tail = valseries::power_series::MonomialTail::approach(&target, group).unwrap();
        let f = CertifiedSeries::with_monomial_tail(SeriesPoly::new(vec![FieldElem::monomial(s.exponent(3, 4))]).unwrap(), tail).unwrap();
        let g = unitizer(&f, group, None).unwrap();
        let beta = v_zero(&CertifiedSeries::product(&f, &g)).unwrap();
        let beta = beta.finite().unwrap().clone();
        prop_assert!(group.contains(&beta));
        prop_assert_eq!(v_zero(&g).unwrap(), ExtScalar::Finite(&beta - &target));
        let evidence = chi_evidence(&f, &g, &geometric_grid(&GroupScalar::one(), 8)).unwrap();
        let mut prev = ExtScalar::Infinity;
        for (_, v) in evidence {
            prop_assert!(v > ExtScalar::Finite(beta.clone()) && v <= prev);
            prev = v;
        }
    }

    #[test]
    fn valuation_is_multiplicative(seed in any::<u64>(), sqrt2 in any::<bool>()) {
        let mut s = Sampler::new(seed, group_of(sqrt2));
        let x = positive_fraction(&mut s);
        let y = positive_fraction(&mut s);
        let xy = x.mul(&y).unwrap();
        prop_assert_eq!(exact(&xy), exact(&x).add(&exact(&y)));
    }

    #[test]
    fn one_of_x_and_its_inverse_lies_in_t(seed in any::<u64>(), sqrt2 in any::<bool>()) {
        let group = group_of(sqrt2);
        let mut s = Sampler::new(seed, group);
        let x = positive_fraction(&mut s);
        let v = exact(&x);
        prop_assume!(!v.is_infinite());
        let zero = ExtScalar::Finite(GroupScalar::zero());
        let y = invert(&x, group).unwrap();
        let vy = exact(&y);
        prop_assert_eq!(vy.add(&v), zero.clone());
        prop_assert!(fractions_equal(&x.mul(&y).unwrap(), &LocalFraction::from_series(CertifiedSeries::polynomial(SeriesPoly::one(1))), 10));
        let in_t = if v >= zero { &x } else { &y };
        let z = to_t(in_t).unwrap();
        prop_assert!(z.is_in_t());
        prop_assert!(fractions_equal(in_t, &z, 10));
        prop_assert_eq!(val_fraction(&z), FractionValue::Exact(exact(in_t)));
    }

    #[test]
    fn purity_round_trip_and_fabrication(seed in any::<u64>(), sqrt2 in any::<bool>(), order in 1usize..8) {
        let mut s = Sampler::new(seed, group_of(sqrt2));
        let a = s.ring_elem(2);
        let h = s.series(order, 0.3);
        let u = s.unit_series(3, false);
        let f = h.scale(&a).unwrap();
        let g = &h * &u.truncate(order);
        let got = pure_divide(&a, &f, &g, &u).unwrap();
        prop_assert_eq!(got.scale(&a).unwrap(), f.clone());
        prop_assert_eq!(&got, &h);

        // any change to f breaks the identity at that coefficient
        let i = (seed as usize) % order;
        let mut coeffs = f.coeffs().to_vec();
        coeffs[i] = &coeffs[i] + &s.ring_elem(2);
        let forged = SeriesPoly::new(coeffs).unwrap();
        prop_assume!(forged != f);
        let rejected = matches!(pure_divide(&a, &forged, &g, &u), Err(Error::WitnessMismatch { .. }));
        prop_assert!(rejected);
    }
}
