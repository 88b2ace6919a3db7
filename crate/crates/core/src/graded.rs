//! Leading forms in the associated graded ring of `v_λ`.
//!
//! The homogeneous piece of gr R in degree `γ` is one-dimensional over ℚ,
//! spanned by the class of `t^γ`, so a homogeneous element is a pair
//! `(γ, c)`. The leading form of `f` at `λ` keeps exactly the indices
//! attaining `v_λ(f)` and is a polynomial in `Y` over gr R.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::base_field::FieldElem;
use crate::error::{Error, Result};
use crate::power_series::{v_lambda, SeriesPoly, SeriesRef};
use crate::value_group::{ExtScalar, GroupScalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedTerm {
    pub gamma: GroupScalar,
    pub coeff: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPoly {
    degree: GroupScalar,
    lambda: GroupScalar,
    terms: BTreeMap<usize, GradedTerm>,
}

impl GradedPoly {
    /// Fails unless every term satisfies `gamma + λn = degree`.
    pub fn new(degree: GroupScalar, lambda: GroupScalar, terms: BTreeMap<usize, GradedTerm>) -> Result<Self> {
        for (n, term) in &terms {
            if term.coeff.is_zero() {
                return Err(Error::Precondition(format!("zero coefficient at Y^{n}")));
            }
            if &term.gamma + &lambda.mul_usize(*n) != degree {
                return Err(Error::Precondition(format!("term at Y^{n} is not of degree {degree}")));
            }
        }
        Ok(Self { degree, lambda, terms })
    }

    pub fn degree(&self) -> &GroupScalar {
        &self.degree
    }

    pub fn lambda(&self) -> &GroupScalar {
        &self.lambda
    }

    pub fn terms(&self) -> &BTreeMap<usize, GradedTerm> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// A series whose leading form is `self`: `c·t^γ·X^n` for each term.
    pub fn realize(&self) -> SeriesPoly {
        let order = self.terms.keys().next_back().map_or(1, |n| n + 1);
        let mut coeffs = vec![FieldElem::zero(); order];
        for (n, term) in &self.terms {
            coeffs[*n] = FieldElem::scaled_monomial(term.coeff.clone(), term.gamma.clone());
        }
        SeriesPoly::new(coeffs).expect("degrees are nonnegative")
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (n, term)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*t^({})*Y^{}", term.coeff, term.gamma, n)?;
        }
        write!(f, " [deg={}, λ={}]", self.degree, self.lambda)
    }
}

/// `Θ_λ(f)`: the terms `(v(r_n), lc(r_n))` at the indices attaining
/// `v_λ(f)`.
pub fn leading_form<'a>(f: impl Into<SeriesRef<'a>>, lambda: &GroupScalar) -> Result<GradedPoly> {
    let f = f.into();
    let r = v_lambda(f, lambda)?;
    if !r.exact {
        return Err(Error::Inexact(format!("v_λ at λ = {lambda} depends on unknown coefficients")));
    }
    let degree = match r.value {
        ExtScalar::Finite(d) => d,
        ExtScalar::Infinity => return Err(Error::ZeroSeries),
    };
    let terms = r
        .argmin
        .iter()
        .map(|&n| {
            let c = match f {
                SeriesRef::Truncated(p) => p.coeffs()[n].clone(),
                SeriesRef::Certified(c) => c.coeff(n),
            };
            let gamma = c.val().finite().expect("attaining coefficient is nonzero").clone();
            let coeff = c.leading_coeff().expect("nonzero");
            (n, GradedTerm { gamma, coeff })
        })
        .collect();
    Ok(GradedPoly {
        degree,
        lambda: lambda.clone(),
        terms,
    })
}

/// Product in `(gr R)[Y]`; both factors must share `λ`.
pub fn graded_mul(a: &GradedPoly, b: &GradedPoly) -> GradedPoly {
    debug_assert_eq!(a.lambda, b.lambda);
    let mut terms: BTreeMap<usize, GradedTerm> = BTreeMap::new();
    for (i, x) in &a.terms {
        for (j, y) in &b.terms {
            let gamma = &x.gamma + &y.gamma;
            let coeff = &x.coeff * &y.coeff;
            terms
                .entry(i + j)
                .and_modify(|t| t.coeff += &coeff)
                .or_insert(GradedTerm { gamma, coeff });
        }
    }
    terms.retain(|_, t| !t.coeff.is_zero());
    GradedPoly {
        degree: &a.degree + &b.degree,
        lambda: a.lambda.clone(),
        terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupScalar {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        let f: SeriesPoly = "t ; t^(1/2) ; 1".parse().unwrap();
        let lf = leading_form(&f, &g("1/4")).unwrap();
        assert_eq!(lf.degree(), &g("1/2"));
        assert_eq!(lf.terms().len(), 1);
        assert_eq!(lf.terms()[&2].gamma, g("0"));

        let one = SeriesPoly::one(3);
        let l1 = leading_form(&one, &g("1/4")).unwrap();
        assert_eq!(l1.degree(), &g("0"));
        assert!(l1.terms().contains_key(&0));
        assert_eq!(graded_mul(&l1, &lf).terms(), lf.terms());

        let tie: SeriesPoly = "t^(1/2) ; 1 ; 0".parse().unwrap();
        let lt = leading_form(&tie, &g("1/2")).unwrap();
        assert_eq!(lt.terms().keys().copied().collect::<Vec<_>>(), vec![0, 1]);
        let text = lt.to_string();
        assert!(text.contains("*Y^0 + ") && text.contains("*Y^1 [deg="), "{text}");
    }

    #[test]
    fn cancellation_free_product() {
        let a: SeriesPoly = "1 ; 1 ; 0 ; 0".parse().unwrap();
        let b: SeriesPoly = "1 ; -1 ; 0 ; 0".parse().unwrap();
        let lambda = g("1/2");
        let la = leading_form(&a, &lambda).unwrap();
        let lb = leading_form(&b, &lambda).unwrap();
        let lab = leading_form(&(&a * &b), &lambda).unwrap();
        assert_eq!(graded_mul(&la, &lb), lab);
    }

    #[test]
    fn errors() {
        assert!(matches!(leading_form(&SeriesPoly::zero(2), &g("1")), Err(Error::Inexact(_))));
        let f: SeriesPoly = "t ; t".parse().unwrap();
        assert!(matches!(leading_form(&f, &g("1/8")), Err(Error::Inexact(_))));
    }

    #[test]
    fn realize_round_trip() {
        let lambda = g("1/3");
        let mut terms = BTreeMap::new();
        terms.insert(0, GradedTerm { gamma: g("1"), coeff: BigRational::from_integer(2.into()) });
        terms.insert(3, GradedTerm { gamma: g("0"), coeff: BigRational::new((-1).into(), 2.into()) });
        let p = GradedPoly::new(g("1"), lambda.clone(), terms).unwrap();
        let f = p.realize();
        let mut coeffs = f.coeffs().to_vec();
        coeffs.push(FieldElem::one());
        let f = SeriesPoly::new(coeffs).unwrap();
        assert_eq!(leading_form(&f, &lambda).unwrap(), p);
    }
}
