//! Fractions `f / (r·u)` with `r ∈ R∖{0}` and `v_0(u) = 0`.
//!
//! These model the localization T of R[[X]] at `U = {v_0 = 0}` (when `r`
//! is a unit of R) and the larger ring K obtained by also inverting
//! nonzero constants. Fractions are never normalized; equality is checked
//! by cross-multiplication at a truncation order.

use std::fmt;

use crate::base_field::{divide_in_r, FieldElem};
use crate::error::{Error, Result};
use crate::power_series::{v_lambda, v_zero, CertifiedSeries, MonomialTail, SeriesPoly};
use crate::value_group::{find_in_interval, ExtScalar, GroupScalar, ValueGroup};

#[derive(Clone, Debug)]
pub enum Numerator {
    Truncated(SeriesPoly),
    Certified(CertifiedSeries),
}

impl Numerator {
    pub fn truncate(&self, order: usize) -> SeriesPoly {
        match self {
            Numerator::Truncated(p) => p.truncate(order),
            Numerator::Certified(c) => c.truncate(order),
        }
    }

    fn order_hint(&self) -> Option<usize> {
        match self {
            Numerator::Truncated(p) => Some(p.order()),
            Numerator::Certified(_) => None,
        }
    }
}

/// `num · (den_r · den_u)^{-1}`.
#[derive(Clone, Debug)]
pub struct LocalFraction {
    num: Numerator,
    den_r: FieldElem,
    den_u: CertifiedSeries,
}

impl LocalFraction {
    pub fn new(num: Numerator, den_r: FieldElem, den_u: CertifiedSeries) -> Result<Self> {
        if den_r.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !den_r.in_r() {
            return Err(Error::NotInRing(den_r.to_string()));
        }
        if !is_unit_denominator(&den_u)? {
            return Err(Error::Precondition(format!(
                "denominator series has v_0 = {}, not 0",
                v_zero(&den_u)?
            )));
        }
        Ok(Self { num, den_r, den_u })
    }

    /// `f / 1`.
    pub fn from_series(f: CertifiedSeries) -> Self {
        Self {
            num: Numerator::Certified(f),
            den_r: FieldElem::one(),
            den_u: CertifiedSeries::polynomial(SeriesPoly::one(1)),
        }
    }

    pub fn num(&self) -> &Numerator {
        &self.num
    }

    pub fn den_r(&self) -> &FieldElem {
        &self.den_r
    }

    pub fn den_u(&self) -> &CertifiedSeries {
        &self.den_u
    }

    /// In T rather than only K: the constant part of the denominator is a
    /// unit of R.
    pub fn is_in_t(&self) -> bool {
        self.den_r.val() == ExtScalar::Finite(GroupScalar::zero())
    }

    /// Product; numerators must both be certified.
    pub fn mul(&self, other: &LocalFraction) -> Result<LocalFraction> {
        let (Numerator::Certified(a), Numerator::Certified(b)) = (&self.num, &other.num) else {
            return Err(Error::Uncertified);
        };
        LocalFraction::new(
            Numerator::Certified(CertifiedSeries::product(a, b)),
            &self.den_r * &other.den_r,
            CertifiedSeries::product(&self.den_u, &other.den_u),
        )
    }
}

impl fmt::Display for LocalFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = match &self.num {
            Numerator::Truncated(p) => format!("[{p}] + O(X^{})", p.order()),
            Numerator::Certified(c) => format!("[{}] + tail", c.prefix()),
        };
        write!(f, "{num} / (({}) · [{}] + tail)", self.den_r, self.den_u.prefix())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FractionValue {
    Exact(ExtScalar),
    /// Only truncated data: the value lies in `[lower, upper]`.
    Bounds { lower: ExtScalar, upper: ExtScalar },
}

impl FractionValue {
    pub fn exact(&self) -> Option<&ExtScalar> {
        match self {
            FractionValue::Exact(v) => Some(v),
            FractionValue::Bounds { .. } => None,
        }
    }
}

/// `v_0(num) − val(den_r)`.
pub fn val_fraction(x: &LocalFraction) -> FractionValue {
    let shift = x.den_r.val().finite().expect("nonzero").clone();
    let sub = |v: ExtScalar| match v {
        ExtScalar::Finite(v) => ExtScalar::Finite(v - &shift),
        ExtScalar::Infinity => ExtScalar::Infinity,
    };
    match &x.num {
        Numerator::Certified(c) if c.is_certified() => FractionValue::Exact(sub(v_zero(c).expect("certified"))),
        Numerator::Certified(c) => FractionValue::Bounds {
            lower: sub(c.prefix().min_val().min(c.tail_bound().clone())),
            upper: sub(c.prefix().min_val()),
        },
        // unknown coefficients lie in R, so v_0 >= 0
        Numerator::Truncated(p) => FractionValue::Bounds {
            lower: sub(ExtScalar::Finite(GroupScalar::zero()).min(p.min_val())),
            upper: sub(p.min_val()),
        },
    }
}

pub fn is_unit_denominator(u: &CertifiedSeries) -> Result<bool> {
    Ok(v_zero(u)? == ExtScalar::Finite(GroupScalar::zero()))
}

/// `x == y` at truncation order: `num_x · den_y = num_y · den_x` below
/// `X^order`.
pub fn fractions_equal(x: &LocalFraction, y: &LocalFraction, order: usize) -> bool {
    let order = [Some(order), x.num.order_hint(), y.num.order_hint()]
        .into_iter()
        .flatten()
        .min()
        .expect("order given");
    let side = |num: &Numerator, u: &CertifiedSeries, r: &FieldElem| {
        (&num.truncate(order) * &u.truncate(order))
            .scale(r)
            .expect("product of ring elements")
    };
    side(&x.num, &y.den_u, &y.den_r) == side(&y.num, &x.den_u, &x.den_r)
}

/// `f = r·u` with `val(r) = v_0(f)` and `v_0(u) = 0`. Needs `v_0(f) ∈ Γ`;
/// the infimum need not be attained.
pub fn factor_unit(f: &CertifiedSeries, group: ValueGroup) -> Result<(FieldElem, CertifiedSeries)> {
    let v0 = match v_zero(f)? {
        ExtScalar::Finite(v) => v,
        ExtScalar::Infinity => return Err(Error::ZeroSeries),
    };
    if !group.contains(&v0) {
        return Err(Error::NotInGroup { value: v0, group: group.tag() });
    }
    let r = FieldElem::monomial(v0.clone());
    let u = CertifiedSeries::scaled(f, &FieldElem::monomial(-v0), 0)?;
    Ok((r, u))
}

/// Least-height element of Γ in `(α, α+1)`.
pub fn default_beta(alpha: &GroupScalar, group: ValueGroup) -> Result<GroupScalar> {
    find_in_interval(alpha, &(alpha + &GroupScalar::one()), group)
}

/// A certified `g` with `v_0(g) = β − α` where `α = v_0(f) ∉ Γ`, so that
/// `v_0(fg) = β ∈ Γ`. Coefficients are `t^{γ_n}` with `γ_n` decreasing to
/// `β − α`.
pub fn unitizer(f: &CertifiedSeries, group: ValueGroup, beta: Option<&GroupScalar>) -> Result<CertifiedSeries> {
    let alpha = match v_zero(f)? {
        ExtScalar::Finite(v) => v,
        ExtScalar::Infinity => return Err(Error::ZeroSeries),
    };
    if group.contains(&alpha) {
        return Err(Error::InGroup { value: alpha, group: group.tag() });
    }
    let beta = match beta {
        Some(b) => b.clone(),
        None => default_beta(&alpha, group)?,
    };
    if !group.contains(&beta) {
        return Err(Error::NotInGroup { value: beta, group: group.tag() });
    }
    if beta <= alpha {
        return Err(Error::Precondition(format!("beta = {beta} must exceed v_0(f) = {alpha}")));
    }
    let tail = MonomialTail::approach(&(beta - alpha), group)?;
    let prefix = SeriesPoly::new(vec![FieldElem::monomial(tail.exponent(0))])?;
    CertifiedSeries::with_monomial_tail(prefix, tail)
}

/// `v_λ(fg)` along a λ-grid: each value bounds `v_0(fg)` from above and
/// they decrease towards it.
pub fn chi_evidence(f: &CertifiedSeries, g: &CertifiedSeries, grid: &[GroupScalar]) -> Result<Vec<(GroupScalar, ExtScalar)>> {
    let fg = CertifiedSeries::product(f, g);
    grid.iter()
        .map(|lambda| Ok((lambda.clone(), v_lambda(&fg, lambda)?.value)))
        .collect()
}

/// `x^{-1}`, via [`factor_unit`] when `v_0(num) ∈ Γ` and through a
/// [`unitizer`] otherwise.
pub fn invert(x: &LocalFraction, group: ValueGroup) -> Result<LocalFraction> {
    let Numerator::Certified(f) = &x.num else {
        return Err(Error::Uncertified);
    };
    let ru = CertifiedSeries::scaled(&x.den_u, &x.den_r, 0)?;
    let alpha = v_zero(f)?.finite().cloned().ok_or(Error::ZeroSeries)?;
    if group.contains(&alpha) {
        let (r, u) = factor_unit(f, group)?;
        return LocalFraction::new(Numerator::Certified(ru), r, u);
    }
    let g = unitizer(f, group, None)?;
    let fg = CertifiedSeries::product(f, &g);
    if !fg.is_certified() {
        return Err(Error::Certificate("f·g may cancel; v_0(f·g) is not certified".into()));
    }
    let (r, u) = factor_unit(&fg, group)?;
    LocalFraction::new(Numerator::Certified(CertifiedSeries::product(&ru, &g)), r, u)
}

/// `x` rewritten with `den_r = 1`, which requires `val(x) >= 0`.
pub fn to_t(x: &LocalFraction) -> Result<LocalFraction> {
    let inv_r = x.den_r.inv()?;
    let num = match &x.num {
        Numerator::Certified(c) => {
            match val_fraction(x) {
                FractionValue::Exact(v) if v >= ExtScalar::Finite(GroupScalar::zero()) => {}
                FractionValue::Exact(v) => {
                    return Err(Error::Precondition(format!("val = {v} is negative; invert first")))
                }
                FractionValue::Bounds { .. } => return Err(Error::Uncertified),
            }
            Numerator::Certified(CertifiedSeries::scaled(c, &inv_r, 0)?)
        }
        Numerator::Truncated(p) => {
            let coeffs = p
                .coeffs()
                .iter()
                .map(|c| if c.is_zero() { Ok(FieldElem::zero()) } else { divide_in_r(&x.den_r, c) })
                .collect::<Result<Vec<_>>>()?;
            Numerator::Truncated(SeriesPoly::new(coeffs)?)
        }
    };
    LocalFraction::new(num, FieldElem::one(), x.den_u.clone())
}

/// `h` with `f = a·h`, given the witness `a·g = f·u` for `f ∈ aT ∩ R[[X]]`.
/// The identity is checked below the smaller of the two orders.
pub fn pure_divide(a: &FieldElem, f: &SeriesPoly, g: &SeriesPoly, u: &CertifiedSeries) -> Result<SeriesPoly> {
    if a.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if !a.in_r() {
        return Err(Error::NotInRing(a.to_string()));
    }
    if !is_unit_denominator(u)? {
        return Err(Error::Precondition("u must satisfy v_0(u) = 0".into()));
    }
    let order = f.order().min(g.order());
    let ag = g.truncate(order).scale(a)?;
    let fu = &f.truncate(order) * &u.truncate(order);
    if let Some(index) = (0..order).find(|&n| ag.coeffs()[n] != fu.coeffs()[n]) {
        return Err(Error::WitnessMismatch { index });
    }
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| if c.is_zero() { Ok(FieldElem::zero()) } else { divide_in_r(a, c) })
        .collect::<Result<Vec<_>>>()?;
    SeriesPoly::new(coeffs)
}

/// [`pure_divide`] on each component of a finite family.
pub fn pure_divide_family(a: &FieldElem, family: &[(SeriesPoly, SeriesPoly, CertifiedSeries)]) -> Result<Vec<SeriesPoly>> {
    family.iter().map(|(f, g, u)| pure_divide(a, f, g, u)).collect()
}

/// Inputs, claimed identity and outcome of one purity division.
#[derive(Clone, Debug)]
pub struct PurityReport {
    pub a: FieldElem,
    pub f: SeriesPoly,
    pub g: SeriesPoly,
    pub u_prefix: SeriesPoly,
    pub outcome: std::result::Result<SeriesPoly, Error>,
}

impl PurityReport {
    pub fn run(a: &FieldElem, f: &SeriesPoly, g: &SeriesPoly, u: &CertifiedSeries) -> Self {
        Self {
            a: a.clone(),
            f: f.clone(),
            g: g.clone(),
            u_prefix: u.prefix().clone(),
            outcome: pure_divide(a, f, g, u),
        }
    }

    /// Round trip `a·h = f` holds.
    pub fn holds(&self) -> bool {
        match &self.outcome {
            Ok(h) => h.scale(&self.a).is_ok_and(|ah| ah == self.f),
            Err(_) => false,
        }
    }
}

impl fmt::Display for PurityReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "[purity]")?;
        writeln!(out, "a = {}", self.a)?;
        writeln!(out, "f = {}", self.f)?;
        writeln!(out, "g = {}", self.g)?;
        writeln!(out, "u = {} + tail", self.u_prefix)?;
        writeln!(out, "identity = a*g == f*u below X^{}", self.f.order().min(self.g.order()))?;
        match &self.outcome {
            Ok(h) => {
                writeln!(out, "h = {h}")?;
                writeln!(out, "check = {}", if self.holds() { "ok" } else { "FAILED" })
            }
            Err(e) => writeln!(out, "check = rejected: {e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power_series::geometric_grid;

    fn g(s: &str) -> GroupScalar {
        s.parse().unwrap()
    }

    fn fe(s: &str) -> FieldElem {
        s.parse().unwrap()
    }

    fn poly(s: &str) -> SeriesPoly {
        s.parse().unwrap()
    }

    fn one() -> CertifiedSeries {
        CertifiedSeries::polynomial(SeriesPoly::one(1))
    }

    fn approaching(target: &str, group: ValueGroup, lead: &str) -> CertifiedSeries {
        let tail = MonomialTail::approach(&g(target), group).unwrap();
        CertifiedSeries::with_monomial_tail(poly(lead), tail).unwrap()
    }

    #[test]
    fn val_fraction_examples() {
        let f = CertifiedSeries::polynomial(poly("t^(1/3) ; 1"));
        let x = LocalFraction::from_series(f.clone());
        assert_eq!(val_fraction(&x), FractionValue::Exact(ExtScalar::Finite(g("0"))));
        let u = approaching("sqrt2 - 1", ValueGroup::Rationals, "1");
        let y = LocalFraction::new(
            Numerator::Certified(CertifiedSeries::polynomial(poly("t"))),
            fe("t^(1/2)"),
            u.clone(),
        )
        .unwrap();
        assert_eq!(val_fraction(&y).exact(), Some(&ExtScalar::Finite(g("1/2"))));
        assert!(!y.is_in_t());
        // f/(r u) and fw/(r u w) agree
        let w = approaching("sqrt2 - 1", ValueGroup::Rationals, "1 ; t");
        let y2 = LocalFraction::new(
            Numerator::Certified(CertifiedSeries::product(&CertifiedSeries::polynomial(poly("t")), &w)),
            fe("t^(1/2)"),
            CertifiedSeries::product(&u, &w),
        )
        .unwrap();
        assert_eq!(val_fraction(&y2), val_fraction(&y));
        assert!(fractions_equal(&y, &y2, 12));
        let trunc = LocalFraction::new(Numerator::Truncated(poly("t ; t^2")), FieldElem::one(), one()).unwrap();
        assert_eq!(
            val_fraction(&trunc),
            FractionValue::Bounds { lower: ExtScalar::Finite(g("0")), upper: ExtScalar::Finite(g("1")) }
        );
    }

    #[test]
    fn unit_denominators() {
        assert!(is_unit_denominator(&one()).unwrap());
        assert!(!is_unit_denominator(&CertifiedSeries::polynomial(poly("t^(1/2)"))).unwrap());
        assert!(is_unit_denominator(&approaching("sqrt2 - 1", ValueGroup::Rationals, "1")).unwrap());
        assert!(LocalFraction::new(Numerator::Truncated(poly("1")), fe("1"), CertifiedSeries::polynomial(poly("t"))).is_err());
    }

    #[test]
    fn factor_unit_examples() {
        let f = CertifiedSeries::polynomial(poly("t^(1/2) ; t^(1/2)"));
        let (r, u) = factor_unit(&f, ValueGroup::Rationals).unwrap();
        assert_eq!(r, fe("t^(1/2)"));
        assert_eq!(u.prefix(), &poly("1 ; 1"));

        let f = CertifiedSeries::polynomial(poly("t^2 ; t ; t^3 ; t^(1/3) ; t"));
        let (r, u) = factor_unit(&f, ValueGroup::Rationals).unwrap();
        assert_eq!(r, fe("t^(1/3)"));
        assert_eq!(u.coeff(3), FieldElem::one());
        assert_eq!(v_zero(&u).unwrap(), ExtScalar::Finite(g("0")));

        let c = CertifiedSeries::polynomial(poly("t^(3/2)"));
        let (r, u) = factor_unit(&c, ValueGroup::Rationals).unwrap();
        assert_eq!((r, u.prefix().clone()), (fe("t^(3/2)"), poly("1")));

        let w = approaching("sqrt2 - 1", ValueGroup::Rationals, "t");
        assert!(matches!(factor_unit(&w, ValueGroup::Rationals), Err(Error::NotInGroup { .. })));
    }

    #[test]
    fn unitizer_examples() {
        let f = approaching("sqrt2 - 1", ValueGroup::Rationals, "t");
        let gs = unitizer(&f, ValueGroup::Rationals, Some(&g("1"))).unwrap();
        assert_eq!(v_zero(&gs).unwrap(), ExtScalar::Finite(g("2 - sqrt2")));
        let fg = CertifiedSeries::product(&f, &gs);
        assert_eq!(v_zero(&fg).unwrap(), ExtScalar::Finite(g("1")));
        let evidence = chi_evidence(&f, &gs, &geometric_grid(&g("1"), 8)).unwrap();
        let mut prev = ExtScalar::Infinity;
        for (_, v) in &evidence {
            assert!(*v > ExtScalar::Finite(g("1")) && *v <= prev);
            prev = v.clone();
        }
        assert!(prev < ExtScalar::Finite(g("1") + GroupScalar::pow2_neg(4)));

        // default beta is the least-height element above alpha
        let d = unitizer(&f, ValueGroup::Rationals, None).unwrap();
        assert_eq!(v_zero(&d).unwrap(), ExtScalar::Finite(g("2 - sqrt2")));

        assert!(unitizer(&f, ValueGroup::Rationals, Some(&g("1/4"))).is_err());
        assert!(unitizer(&f, ValueGroup::Rationals, Some(&g("sqrt2"))).is_err());
        let in_group = CertifiedSeries::polynomial(poly("t^(1/2)"));
        assert!(matches!(unitizer(&in_group, ValueGroup::Rationals, None), Err(Error::InGroup { .. })));

        let h = approaching("1/2", ValueGroup::IntegerSqrt2, "t");
        let gh = unitizer(&h, ValueGroup::IntegerSqrt2, Some(&g("2 - sqrt2"))).unwrap();
        assert_eq!(v_zero(&gh).unwrap(), ExtScalar::Finite(g("3/2 - sqrt2")));
    }

    #[test]
    fn invert_and_to_t() {
        let f = approaching("sqrt2 - 1", ValueGroup::Rationals, "t");
        let x = LocalFraction::new(Numerator::Certified(f), fe("t"), one()).unwrap();
        let v = val_fraction(&x).exact().unwrap().clone();
        assert!(v < ExtScalar::Finite(g("0")));
        assert!(to_t(&x).is_err());
        let y = invert(&x, ValueGroup::Rationals).unwrap();
        let vy = val_fraction(&y).exact().unwrap().clone();
        assert_eq!(vy, ExtScalar::Finite(g("2 - sqrt2")));
        let yt = to_t(&y).unwrap();
        assert!(yt.is_in_t() && yt.den_r().is_one());
        assert!(fractions_equal(&y, &yt, 10));
        let prod = x.mul(&y).unwrap();
        assert!(fractions_equal(&prod, &LocalFraction::from_series(one()), 10));
    }

    #[test]
    fn pure_divide_examples() {
        let a = fe("t^(1/2)");
        let f = poly("t^(1/2) ; t");
        let h = pure_divide(&a, &f, &poly("1 ; t^(1/2)"), &one()).unwrap();
        assert_eq!(h, poly("1 ; t^(1/2)"));
        assert_eq!(pure_divide(&FieldElem::one(), &f, &f, &one()).unwrap(), f);

        let big = fe("t^2");
        assert!(matches!(pure_divide(&big, &f, &poly("1 ; 1"), &one()), Err(Error::WitnessMismatch { .. })));
        // identity holds only at order 1, coefficient 1 is not divisible
        let f2 = poly("t^2 ; t");
        assert!(matches!(pure_divide(&big, &f2, &poly("1"), &one()), Err(Error::NotDivisible { .. })));

        let rep = PurityReport::run(&a, &f, &poly("1 ; t^(1/2)"), &one());
        assert!(rep.holds());
        assert!(rep.to_string().contains("check = ok"));
    }
}
