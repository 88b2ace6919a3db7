use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use valseries::incoherence::{
    build_witness_series, refute_generators, verify_report, IncoherenceConfig, WitnessReport,
};
use valseries::localization::{pure_divide, PurityReport};
use valseries::power_series::{geometric_grid, v_lambda, CertifiedSeries, SeriesRef, VLambdaResult};
use valseries::random::Sampler;
use valseries::selftest::{run_all, Fault};
use valseries::{ExtScalar, GroupScalar};

use crate::config::{parse, parse_group, parse_poly, ConfigFile, SeriesSpec};
use crate::Common;

const DEFAULT_SEED: u64 = 42;
const DEFAULT_ORDER: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
}

fn seed(cfg: &ConfigFile, common: &Common) -> u64 {
    common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED)
}

/// The configured series, or the witness series when none is given.
fn series(spec: Option<&SeriesSpec>, witness: Result<IncoherenceConfig>) -> Result<CertifiedSeries> {
    let cfg = witness?;
    match spec {
        Some(s) => s.resolve(cfg.group),
        None => Ok(build_witness_series(&cfg)?),
    }
}

/// `v_λ` of the series, or of its truncation when `--order` is given.
fn evaluate(f: &CertifiedSeries, order: Option<usize>, lambda: &GroupScalar) -> Result<VLambdaResult> {
    let truncated;
    let r: SeriesRef = match order {
        Some(n) => {
            truncated = f.truncate(n);
            (&truncated).into()
        }
        None => f.into(),
    };
    Ok(v_lambda(r, lambda)?)
}

fn join_argmin(r: &VLambdaResult) -> String {
    r.argmin.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

pub fn chi(cfg: &ConfigFile, common: &Common) -> Result<(String, Outcome)> {
    let sec = &cfg.chi;
    let f = series(sec.series.as_ref(), sec.witness(DEFAULT_ORDER))?;
    let lambda0: GroupScalar = match &sec.lambda0 {
        Some(l) => parse(l, "lambda0")?,
        None => GroupScalar::one(),
    };
    ensure!(lambda0.is_positive(), "lambda0 must be positive");
    let steps = sec.steps.unwrap_or(12);
    ensure!(steps >= 1, "steps must be at least 1");

    let mut rows = Vec::new();
    for lambda in geometric_grid(&lambda0, steps) {
        let r = evaluate(&f, common.order, &lambda)?;
        rows.push((lambda, r));
    }
    // χ is nondecreasing in λ, so exact values must not grow down the grid
    let exact: Vec<&ExtScalar> = rows.iter().filter(|(_, r)| r.exact).map(|(_, r)| &r.value).collect();
    if let Some(w) = exact.windows(2).find(|w| w[1] > w[0]) {
        bail!("chi is not monotone: {} follows {}", w[1], w[0]);
    }

    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["lambda", "chi_value", "exact_flag", "argmin_indices"])?;
    for (lambda, r) in &rows {
        out.write_record([lambda.to_string(), r.value.to_string(), r.exact.to_string(), join_argmin(r)])?;
    }
    let text = String::from_utf8(out.into_inner()?)?;
    Ok((text, Outcome::Passed))
}

pub fn vlambda(cfg: &ConfigFile, common: &Common) -> Result<(String, Outcome)> {
    let sec = &cfg.vlambda;
    let f = series(sec.series.as_ref(), sec.witness(DEFAULT_ORDER))?;
    let lambda: GroupScalar = match &sec.lambda {
        Some(l) => parse(l, "lambda")?,
        None => GroupScalar::ratio(1, 2),
    };
    let r = evaluate(&f, common.order, &lambda)?;
    let mut text = String::new();
    writeln!(text, "lambda = {lambda}")?;
    writeln!(text, "value = {}", r.value)?;
    writeln!(text, "argmin = {}", join_argmin(&r))?;
    writeln!(text, "exact = {}", r.exact)?;
    writeln!(text, "window_end = {}", r.window_end)?;
    Ok((text, Outcome::Passed))
}

pub fn incoherence(cfg: &ConfigFile, common: &Common) -> Result<(String, Outcome)> {
    let sec = &cfg.incoherence;
    let icfg = sec.witness(common.order.unwrap_or(DEFAULT_ORDER))?;
    let candidates = match &sec.candidate {
        Some(list) => list
            .iter()
            .enumerate()
            .map(|(i, c)| c.resolve(icfg.group).with_context(|| format!("candidate {i}")))
            .collect::<Result<Vec<_>>>()?,
        None => {
            let threshold = icfg.ideal().threshold;
            let mut s = Sampler::new(seed(cfg, common), icfg.group);
            (0..sec.candidates.unwrap_or(4)).map(|_| s.ideal_element(&threshold, 3)).collect()
        }
    };
    let rep = refute_generators(&candidates, &icfg)?;
    let v = verify_report(&rep, &icfg);
    if !v.ok() {
        eprint!("{v}");
        return Ok((rep.to_string(), Outcome::Failed));
    }
    Ok((rep.to_string(), Outcome::Passed))
}

pub fn verify(cfg: &ConfigFile, common: &Common, path: &Path) -> Result<(String, Outcome)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rep: WitnessReport = match text.parse() {
        Ok(r) => r,
        Err(e) => return Ok((format!("FAILED parse: {e}\n"), Outcome::Failed)),
    };
    let order = common.order.unwrap_or(DEFAULT_ORDER);
    let sec = &cfg.incoherence;
    // without a config the certificate is checked against its own setup
    let icfg = if sec.group.is_some() || sec.alpha.is_some() || sec.r.is_some() {
        sec.witness(order)?
    } else {
        IncoherenceConfig {
            group: rep.group,
            alpha: rep.alpha.clone(),
            r: rep.r.clone(),
            seq_len: 1,
            order,
        }
    };
    let v = verify_report(&rep, &icfg);
    let outcome = if v.ok() { Outcome::Passed } else { Outcome::Failed };
    Ok((format!("{v}\n"), outcome))
}

pub fn purity(cfg: &ConfigFile, common: &Common) -> Result<(String, Outcome)> {
    let sec = &cfg.purity;
    let group = parse_group(sec.group.as_deref())?;
    let order = common.order.unwrap_or(8);
    let mut text = String::new();
    let mut outcome = Outcome::Passed;
    if let (Some(a), Some(f), Some(g), Some(u)) = (&sec.a, &sec.f, &sec.g, &sec.u) {
        let a = parse(a, "a")?;
        let (f, g, u) = (parse_poly(f)?, parse_poly(g)?, u.resolve(group)?);
        let rep = PurityReport::run(&a, &f, &g, &u);
        if !rep.holds() {
            outcome = Outcome::Failed;
        }
        write!(text, "{rep}")?;
        return Ok((text, outcome));
    }
    ensure!(
        sec.a.is_none() && sec.f.is_none() && sec.g.is_none() && sec.u.is_none(),
        "an explicit purity witness needs all of a, f, g and u"
    );
    let mut s = Sampler::new(seed(cfg, common), group);
    for i in 0..sec.count.unwrap_or(10) {
        let a = s.ring_elem(2);
        let h = s.series(order, 0.3);
        let u = s.unit_series(3, false);
        let f = h.scale(&a)?;
        let g = &h * &u.truncate(order);
        let rep = PurityReport::run(&a, &f, &g, &u);
        let mut forged = f.coeffs().to_vec();
        forged[i % order] = &forged[i % order] + &s.ring_elem(2);
        let forged = valseries::power_series::SeriesPoly::new(forged)?;
        let rejected = forged == f || pure_divide(&a, &forged, &g, &u).is_err();
        if !rep.holds() || !rejected {
            outcome = Outcome::Failed;
        }
        writeln!(text, "# witness {i}")?;
        write!(text, "{rep}")?;
        writeln!(text, "forged = {}", if rejected { "rejected" } else { "ACCEPTED" })?;
    }
    Ok((text, outcome))
}

pub fn selftest(cfg: &ConfigFile, common: &Common, inject: Option<&str>) -> Result<(String, Outcome)> {
    let fault: Option<Fault> = match inject.or(cfg.selftest.fault.as_deref()) {
        Some(name) => Some(parse(name, "fault")?),
        None => None,
    };
    let seed = seed(cfg, common);
    let reports = run_all(seed, fault);
    let mut text = String::new();
    writeln!(text, "selftest seed = {seed}")?;
    for r in &reports {
        writeln!(text, "{r}")?;
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    writeln!(text, "suites passed {passed}/{}", reports.len())?;
    let outcome = if passed == reports.len() { Outcome::Passed } else { Outcome::Failed };
    Ok((text, outcome))
}
