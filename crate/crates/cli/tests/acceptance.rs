//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use valseries::graded::{graded_mul, leading_form};
use valseries::incoherence::{
    brute_force_generation, build_witness_series, refute_generators, tamper_variants, verify_report, IncoherenceConfig,
};
use valseries::localization::{fractions_equal, invert, pure_divide, val_fraction, LocalFraction, Numerator};
use valseries::power_series::{continuity_lambda, v_lambda, v_zero, CertifiedSeries, SeriesPoly};
use valseries::random::Sampler;
use valseries::{Error, ExtScalar, FieldElem, GroupScalar, ValueGroup};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Option<Duration>) -> Result<String, String> {
    let took = start.elapsed();
    match limit {
        Some(l) if took >= l => Err(format!("took {:.2} s, limit {} s", took.as_secs_f64(), l.as_secs())),
        Some(l) => Ok(format!("{:.2} s < {} s", took.as_secs_f64(), l.as_secs())),
        None => Ok(format!("{:.2} s", took.as_secs_f64())),
    }
}

fn group_of(i: usize) -> ValueGroup {
    ValueGroup::ALL[i % 2]
}

/// Minimum of `v(r_n) + λn` over every known index, and where it is attained.
fn scan(f: &SeriesPoly, lambda: &GroupScalar) -> (ExtScalar, BTreeSet<usize>) {
    let vals: Vec<ExtScalar> = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c.val().add_finite(&lambda.mul_usize(n)))
        .collect();
    let best = vals.iter().min().cloned().unwrap_or(ExtScalar::Infinity);
    let argmin = match best {
        ExtScalar::Infinity => BTreeSet::new(),
        _ => (0..vals.len()).filter(|&n| vals[n] == best).collect(),
    };
    (best, argmin)
}

fn c1_field_axioms() -> Outcome {
    let start = Instant::now();
    let mut zeros = 0;
    let mut cancellations = 0;
    for i in 0..10_000 {
        let mut s = Sampler::new(1_000 + i as u64, group_of(i));
        let x = &s.ring_elem(3) * &FieldElem::monomial(s.exponent(-2, 0));
        let y = match s.rng().gen_range(0..10) {
            0 => -&x,
            1 | 2 => &(-&x) + &(&s.ring_elem(2) * &FieldElem::monomial(s.exponent(0, 2))),
            _ => &s.ring_elem(3) * &FieldElem::monomial(s.exponent(-2, 1)),
        };
        let (vx, vy) = (x.val(), y.val());
        let prod = &x * &y;
        check(prod.val() == vx.add(&vy), || format!("val(xy) != val(x)+val(y) for x = {x}, y = {y}"))?;
        let sum = &x + &y;
        let lo = vx.clone().min(vy.clone());
        check(sum.val() >= lo, || format!("val(x+y) < min for x = {x}, y = {y}"))?;
        if vx != vy {
            check(sum.val() == lo, || format!("val(x+y) != min with distinct valuations: x = {x}, y = {y}"))?;
        } else if sum.val() > lo {
            cancellations += 1;
        }
        for z in [&x, &y, &sum, &prod] {
            let is_zero = z.num().is_zero();
            check(z.val().is_infinite() == is_zero, || format!("val({z}) = {} but zero = {is_zero}", z.val()))?;
            zeros += usize::from(is_zero);
        }
    }
    check(zeros > 0 && cancellations > 0, || "population never exercised x+y = 0 or cancellation".into())?;
    let t = within(start, Some(Duration::from_secs(5)))?;
    Ok(format!("10000 pairs, {zeros} zero values, {cancellations} strict cancellations ({t})"))
}

/// Population shared by criteria 2 and 3.
fn series_population() -> Vec<(SeriesPoly, Vec<GroupScalar>)> {
    (0..1_000)
        .map(|i| {
            let mut s = Sampler::new(20_000 + i as u64, group_of(i));
            let order = s.rng().gen_range(1..=64);
            let zero_prob = [0.0, 0.3, 0.7][i % 3];
            let f = s.nonzero_series(order, zero_prob);
            let lambdas = (0..10).map(|_| s.lambda()).collect();
            (f, lambdas)
        })
        .collect()
}

fn c2_window(pop: &[(SeriesPoly, Vec<GroupScalar>)]) -> Outcome {
    let start = Instant::now();
    let mut exact = 0;
    let mut ties = 0;
    for (f, lambdas) in pop {
        for lambda in lambdas {
            let r = v_lambda(f, lambda).map_err(|e| e.to_string())?;
            let (best, argmin) = scan(f, lambda);
            if r.exact {
                exact += 1;
                ties += usize::from(argmin.len() > 1);
                check(r.value == best && r.argmin == argmin, || {
                    format!("f = {f}, lambda = {lambda}: window {} {:?}, scan {best} {argmin:?}", r.value, r.argmin)
                })?;
            } else {
                check(r.value <= best, || format!("inexact lower bound above the scan for f = {f}"))?;
            }
        }
    }
    let t = within(start, Some(Duration::from_secs(5)))?;
    Ok(format!("10000 evaluations, {exact} exact, {ties} with ties, all match the full scan ({t})"))
}

fn c3_multiplicative(pop: &[(SeriesPoly, Vec<GroupScalar>)]) -> Outcome {
    let start = Instant::now();
    let mut exact = 0;
    for pair in pop.chunks(2) {
        let [(f, lambdas), (g, _)] = pair else { continue };
        // keep the product order moderate; the identity is order-independent
        let n = f.order().min(g.order()).min(32);
        let (f, g) = (f.truncate(n), g.truncate(n));
        let fg = &f * &g;
        for lambda in lambdas {
            let (a, b, ab) = (
                v_lambda(&f, lambda).map_err(|e| e.to_string())?,
                v_lambda(&g, lambda).map_err(|e| e.to_string())?,
                v_lambda(&fg, lambda).map_err(|e| e.to_string())?,
            );
            if a.exact && b.exact && ab.exact {
                exact += 1;
                check(ab.value == a.value.add(&b.value), || format!("f = {f}, g = {g}, lambda = {lambda}"))?;
            }
        }
    }
    check(exact >= 500, || format!("only {exact} exact triples"))?;
    let t = within(start, None)?;
    Ok(format!("{exact} exact triples, v(fg) = v(f) + v(g) on all ({t})"))
}

/// A series whose leading form at `λ = p/q` has terms at `0` and `k`.
fn engineered_tie(s: &mut Sampler, lambda: &GroupScalar, k: usize, order: usize) -> SeriesPoly {
    let gamma = s.exponent(0, 1);
    let mut coeffs = vec![FieldElem::zero(); order];
    coeffs[0] = FieldElem::scaled_monomial(s.coefficient(), &gamma + &lambda.mul_usize(k));
    coeffs[k] = FieldElem::scaled_monomial(s.coefficient(), gamma.clone());
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        if n != k && s.rng().gen_bool(0.5) {
            // strictly above the line through the two tied points
            let lift = &(&gamma + &lambda.mul_usize(k)) + &GroupScalar::ratio(1, 3);
            let e = if lambda.mul_usize(n) > lift { GroupScalar::zero() } else { &lift - &lambda.mul_usize(n) };
            *c = FieldElem::scaled_monomial(s.coefficient(), e);
        }
    }
    SeriesPoly::new(coeffs).expect("nonnegative exponents")
}

fn c4_leading_forms() -> Outcome {
    let start = Instant::now();
    let (mut pairs, mut engineered, mut multi) = (0, 0, 0);
    let mut i = 0u64;
    while pairs < 1_000 {
        i += 1;
        let mut s = Sampler::new(40_000 + i, if i % 3 == 0 { ValueGroup::IntegerSqrt2 } else { ValueGroup::Rationals });
        let tie = i % 5 == 0;
        let lambda = if tie { GroupScalar::ratio(s.rng().gen_range(1..=6), s.rng().gen_range(1..=4)) } else { s.lambda() };
        let (f, g) = if tie {
            // long enough that the product's window, up to 2k + 2 + 2/λ, is known
            let k = s.rng().gen_range(1..=4usize);
            let order = 2 * k + 3 + (2.0 / lambda.to_f64()).ceil() as usize;
            (engineered_tie(&mut s, &lambda, k, order), engineered_tie(&mut s, &lambda, k, order))
        } else {
            let order = s.rng().gen_range(1..=12);
            (s.nonzero_series(order, 0.3), s.nonzero_series(order, 0.3))
        };
        let n = f.order().min(g.order());
        let (f, g) = (f.truncate(n), g.truncate(n));
        let (Ok(a), Ok(b), Ok(ab)) = (leading_form(&f, &lambda), leading_form(&g, &lambda), leading_form(&(&f * &g), &lambda))
        else {
            check(!tie, || format!("engineered tie has no exact leading form: f = {f}, lambda = {lambda}"))?;
            continue;
        };
        pairs += 1;
        if tie {
            check(a.terms().len() >= 2, || format!("engineered tie lost: f = {f}, lambda = {lambda}"))?;
            engineered += 1;
        }
        multi += usize::from(a.terms().len() > 1 || b.terms().len() > 1);
        check(graded_mul(&a, &b) == ab, || format!("f = {f}, g = {g}, lambda = {lambda}"))?;
    }
    check(engineered >= 50, || format!("only {engineered} engineered ties"))?;
    let t = within(start, None)?;
    Ok(format!("{pairs} exact pairs, {engineered} engineered ties, {multi} multi-term forms ({t})"))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_valseries"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check(o.status.success(), || format!("valseries {args:?}: {}", String::from_utf8_lossy(&o.stderr)))?;
    Ok(o.stdout)
}

fn c5_chi() -> Outcome {
    let start = Instant::now();
    let csv = run_cli(&["chi", "--seed", "42"])?;
    let mut reader = csv::Reader::from_reader(csv.as_slice());
    let alpha: GroupScalar = "sqrt2 - 1".parse().unwrap();
    let mut prev: Option<GroupScalar> = None;
    let mut rows = 0;
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let lambda: GroupScalar = rec[0].parse().map_err(|e: Error| e.to_string())?;
        let chi: GroupScalar = rec[1].parse().map_err(|e: Error| e.to_string())?;
        check(lambda == GroupScalar::pow2_neg(k as u32 + 1), || format!("row {k} has lambda {lambda}"))?;
        check(&rec[2] == "true", || format!("row {k} inexact"))?;
        check(chi > alpha, || format!("chi({lambda}) = {chi} not above alpha"))?;
        if let Some(p) = &prev {
            check(&chi <= p, || format!("chi increases at lambda = {lambda}"))?;
        }
        prev = Some(chi);
        rows += 1;
    }
    check(rows == 12, || format!("{rows} rows"))?;

    let cfg = IncoherenceConfig::new(ValueGroup::Rationals, alpha.clone(), FieldElem::monomial(GroupScalar::one()), 8, 16)
        .map_err(|e| e.to_string())?;
    let f = build_witness_series(&cfg).map_err(|e| e.to_string())?;
    let mut gaps = Vec::new();
    for k in [2u32, 4, 6] {
        let eps = GroupScalar::pow2_neg(k);
        let l = continuity_lambda(&f, &eps).map_err(|e| e.to_string())?;
        let r = v_lambda(&f, &l).map_err(|e| e.to_string())?;
        let gap = r.value.finite().ok_or("infinite chi")? - &alpha;
        check(r.exact && gap < eps, || format!("eps = {eps}: chi({l}) - alpha = {gap}"))?;
        gaps.push(format!("{:.2e}", gap.to_f64()));
    }
    let t = within(start, Some(Duration::from_secs(2)))?;
    Ok(format!("12 monotone rows above alpha, chi(lambda') - alpha = [{}] for eps = 1/4, 1/16, 1/64 ({t})", gaps.join(", ")))
}

fn c6_v0_products() -> Outcome {
    let start = Instant::now();
    let mut certified = 0;
    let mut seed = 60_000u64;
    while certified < 20 {
        seed += 1;
        let mut s = Sampler::new(seed, group_of(seed as usize));
        let (f, g) = (s.certified(4, true), s.certified(4, true));
        let fg = CertifiedSeries::product(&f, &g);
        check(fg.is_certified(), || "positive product lost its certificate".into())?;
        let (vf, vg, vfg) = (v_zero(&f).unwrap(), v_zero(&g).unwrap(), v_zero(&fg).map_err(|e| e.to_string())?);
        if vf.is_infinite() || vg.is_infinite() {
            continue;
        }
        check(vfg == vf.add(&vg), || format!("v_0(fg) = {vfg}, v_0(f) + v_0(g) = {}", vf.add(&vg)))?;
        certified += 1;
    }

    let grid: Vec<GroupScalar> = (1..=12).map(GroupScalar::pow2_neg).collect();
    let mut uncertified = 0;
    let mut last_gap = f64::INFINITY;
    while uncertified < 20 {
        seed += 1;
        let mut s = Sampler::new(seed, group_of(seed as usize));
        let (f, g) = (s.certified(4, false), s.certified(4, false));
        let fg = CertifiedSeries::product(&f, &g);
        if fg.is_certified() {
            continue;
        }
        let (Some(a), Some(b)) = (v_zero(&f).unwrap().finite().cloned(), v_zero(&g).unwrap().finite().cloned()) else {
            continue;
        };
        check(matches!(v_zero(&fg), Err(Error::Uncertified)), || "v_0 claimed without a certificate".into())?;
        let lower = &a + &b;
        let mut prev_gap: Option<GroupScalar> = None;
        for lambda in &grid {
            let chi = |h: &CertifiedSeries| -> Result<GroupScalar, String> {
                let r = v_lambda(h, lambda).map_err(|e| e.to_string())?;
                check(r.exact, || format!("inexact chi at {lambda}"))?;
                r.value.finite().cloned().ok_or_else(|| "infinite chi".into())
            };
            let upper = chi(&fg)?;
            let gap = &(&chi(&f)? - &a) + &(&chi(&g)? - &b);
            check(lower <= upper && upper <= &lower + &gap, || {
                format!("lambda = {lambda}: {upper} outside [{lower}, {lower} + {gap}]")
            })?;
            if let Some(p) = &prev_gap {
                check(&gap <= p, || "gap grows as lambda shrinks".into())?;
            }
            prev_gap = Some(gap);
        }
        last_gap = last_gap.min(prev_gap.expect("nonempty grid").to_f64());
        uncertified += 1;
    }
    let t = within(start, None)?;
    Ok(format!("20 certified pairs exact, 20 uncertified pairs bracketed (tightest final gap {last_gap:.2e}) ({t})"))
}

fn c7_refuter() -> Outcome {
    let start = Instant::now();
    let (mut tampers, mut trials) = (0, 0);
    for i in 0..100usize {
        let mut s = Sampler::new(70_000 + i as u64, group_of(i));
        let alpha = s.non_group_target(2);
        let r = FieldElem::monomial(GroupScalar::from(alpha.floor() + 1));
        let cfg = IncoherenceConfig::new(s.group(), alpha, r, 8, 32).map_err(|e| e.to_string())?;
        let threshold = cfg.ideal().threshold;
        let m = 1 + i % 8;
        let cands: Vec<_> = (0..m).map(|_| s.ideal_element(&threshold, 3)).collect();
        let rep = refute_generators(&cands, &cfg).map_err(|e| format!("set {i}: {e}"))?;
        let v = verify_report(&rep, &cfg);
        check(v.ok(), || format!("set {i} does not replay: {v}"))?;
        let back = rep.to_string().parse().map_err(|e: Error| e.to_string())?;
        check(rep == back, || format!("set {i}: certificate text does not round-trip"))?;
        for (name, bad) in tamper_variants(&rep) {
            tampers += 1;
            check(!verify_report(&bad, &cfg).ok(), || format!("set {i}: tampered {name} accepted"))?;
        }
        let out = brute_force_generation(&cands, &rep.t, 32, 2, s.rng(), cfg.group);
        trials += out.trials;
        check(out.hit.is_none(), || format!("set {i}: brute force reproduced t"))?;
        check(out.least_x0_val >= rep.beta, || format!("set {i}: combination below beta"))?;
    }
    let t = within(start, Some(Duration::from_secs(10)))?;
    Ok(format!("100 sets verified, {tampers} tampered reports rejected, {trials} order-32 combinations miss t ({t})"))
}

fn c8_purity() -> Outcome {
    let start = Instant::now();
    let mut forged = 0;
    for i in 0..1_000usize {
        let mut s = Sampler::new(80_000 + i as u64, group_of(i));
        let a = s.ring_elem(2);
        let h = s.series(32, 0.5);
        let u = s.unit_series(3, false);
        let f = h.scale(&a).map_err(|e| e.to_string())?;
        let g = &h * &u.truncate(32);
        let got = pure_divide(&a, &f, &g, &u).map_err(|e| format!("triple {i}: {e}"))?;
        check(got.scale(&a).map_err(|e| e.to_string())? == f, || format!("triple {i}: a*h != f"))?;
        let mut coeffs = f.coeffs().to_vec();
        let j = s.rng().gen_range(0..32);
        coeffs[j] = &coeffs[j] + &s.ring_elem(2);
        let bad = SeriesPoly::new(coeffs).map_err(|e| e.to_string())?;
        if bad != f {
            forged += 1;
            check(pure_divide(&a, &bad, &g, &u).is_err(), || format!("triple {i}: forged witness accepted"))?;
        }
    }
    check(forged >= 900, || format!("only {forged} forgeries"))?;
    let t = within(start, None)?;
    Ok(format!("1000 round trips at order 32, {forged}/{forged} forgeries rejected ({t})"))
}

fn c9_localization() -> Outcome {
    let start = Instant::now();
    for i in 0..1_000usize {
        let mut s = Sampler::new(90_000 + i as u64, group_of(i));
        let num = s.certified(3, true);
        let (den_r, den_u) = (s.positive_ring_elem(2), s.unit_series(2, true));
        let x = LocalFraction::new(Numerator::Certified(num.clone()), den_r.clone(), den_u.clone())
            .map_err(|e| e.to_string())?;
        // the same fraction with numerator and denominator scaled by c·v
        let (c, v) = (s.positive_ring_elem(2), s.unit_series(2, true));
        let num_y = CertifiedSeries::product(&CertifiedSeries::scaled(&num, &c, 0).map_err(|e| e.to_string())?, &v);
        let y = LocalFraction::new(Numerator::Certified(num_y), &den_r * &c, CertifiedSeries::product(&den_u, &v))
            .map_err(|e| e.to_string())?;
        check(fractions_equal(&x, &y, 8), || format!("pair {i}: cross-multiplication fails"))?;
        check(val_fraction(&x) == val_fraction(&y), || format!("pair {i}: {:?} != {:?}", val_fraction(&x), val_fraction(&y)))?;
    }
    let mut in_t = 0;
    for i in 0..1_000usize {
        let mut s = Sampler::new(100_000 + i as u64, group_of(i));
        let num = s.certified(3, true);
        let x = LocalFraction::new(Numerator::Certified(num), s.positive_ring_elem(2), s.unit_series(2, true))
            .map_err(|e| e.to_string())?;
        let v = val_fraction(&x).exact().cloned().ok_or("inexact")?;
        if v.is_infinite() {
            continue;
        }
        let y = invert(&x, s.group()).map_err(|e| format!("element {i}: {e}"))?;
        let w = val_fraction(&y).exact().cloned().ok_or("inexact inverse")?;
        let zero = ExtScalar::Finite(GroupScalar::zero());
        check(v >= zero || w >= zero, || format!("element {i}: neither x nor 1/x in T"))?;
        check(v.add(&w) == zero, || format!("element {i}: val(x) + val(1/x) = {}", v.add(&w)))?;
        in_t += usize::from(v >= zero);
    }
    let t = within(start, None)?;
    Ok(format!("1000 equal pairs agree, trichotomy on 1000 elements ({in_t} already in T) ({t})"))
}

fn c10_determinism() -> Outcome {
    let start = Instant::now();
    for args in [
        ["incoherence", "--seed", "42"],
        ["chi", "--seed", "42"],
        ["incoherence", "--seed", "7"],
    ] {
        let (a, b) = (run_cli(&args)?, run_cli(&args)?);
        check(!a.is_empty() && a == b, || format!("{args:?} differs between runs"))?;
    }
    let t = within(start, None)?;
    Ok(format!("incoherence and chi byte-identical across runs ({t})"))
}

fn main() {
    let pop = series_population();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("C1 valuation axioms on F", Box::new(c1_field_axioms)),
        ("C2 window equals full scan", Box::new(|| c2_window(&pop))),
        ("C3 v_lambda multiplicative", Box::new(|| c3_multiplicative(&pop))),
        ("C4 leading-form homomorphism", Box::new(c4_leading_forms)),
        ("C5 chi monotone, continuous at 0", Box::new(c5_chi)),
        ("C6 v_0 multiplicativity", Box::new(c6_v0_products)),
        ("C7 refuter soundness", Box::new(c7_refuter)),
        ("C8 purity round trip", Box::new(c8_purity)),
        ("C9 localization well-defined", Box::new(c9_localization)),
        ("C10 determinism", Box::new(c10_determinism)),
    ];
    // `cargo test --test acceptance -- C4` runs one criterion
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (name, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.split(' ').next() == Some(o.as_str())) {
            continue;
        }
        ran += 1;
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
