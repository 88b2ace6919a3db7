//! Browser bindings: χ curves, Newton polygons and refutation
//! certificates, each taking and returning plain text.
//!
//! The `*_text` functions hold the logic so they can be tested natively;
//! the exported wrappers only translate errors.

use std::fmt::Write as _;

use valseries::incoherence::{refute_generators, verify_report, IncoherenceConfig, SerialSeries, SerialTail};
use valseries::power_series::{geometric_grid, newton_polygon_sampled, v_lambda, CertifiedSeries};
use valseries::random::Sampler;
use valseries::{FieldElem, GroupScalar, ValueGroup};
use wasm_bindgen::prelude::*;

fn series(group: &str, prefix: &str, tail: &str) -> Result<(ValueGroup, CertifiedSeries), String> {
    let group: ValueGroup = group.parse().map_err(|e| format!("{e}"))?;
    let prefix = prefix.parse().map_err(|e| format!("prefix: {e}"))?;
    let tail = if tail.trim().is_empty() {
        SerialTail::Zero
    } else {
        tail.parse().map_err(|e| format!("tail: {e}"))?
    };
    let f = SerialSeries { prefix, tail }.to_certified(group).map_err(|e| format!("{e}"))?;
    Ok((group, f))
}

/// One row per `λ = 2^{-k}`: `λ`, `χ(λ)` as floats, the exact flag, the
/// exact values and the argmin set, tab-separated.
pub fn chi_curve_text(group: &str, prefix: &str, tail: &str, steps: u32) -> Result<String, String> {
    let (_, f) = series(group, prefix, tail)?;
    let mut out = String::new();
    for lambda in geometric_grid(&GroupScalar::one(), steps.clamp(1, 24)) {
        let r = v_lambda(&f, &lambda).map_err(|e| format!("{e}"))?;
        let chi = r.value.finite().map_or(f64::INFINITY, GroupScalar::to_f64);
        let argmin: Vec<String> = r.argmin.iter().map(usize::to_string).collect();
        writeln!(out, "{}\t{chi}\t{}\t{lambda}\t{}\t{}", lambda.to_f64(), r.exact, r.value, argmin.join(";")).unwrap();
    }
    Ok(out)
}

/// Hull vertices (`vertex n v`), breakpoints (`break λ χ`) and the
/// exactness bound of the polygon of the first `terms` coefficients.
pub fn newton_polygon_text(group: &str, prefix: &str, tail: &str, terms: usize) -> Result<String, String> {
    let (_, f) = series(group, prefix, tail)?;
    let p = newton_polygon_sampled(&f, terms.min(64)).map_err(|e| format!("{e}"))?;
    let mut out = String::new();
    for (n, v) in p.vertices() {
        writeln!(out, "vertex\t{n}\t{}\t{v}", v.to_f64()).unwrap();
    }
    for (lambda, chi) in p.breakpoints() {
        writeln!(out, "break\t{}\t{}\t{lambda}\t{chi}", lambda.to_f64(), chi.to_f64()).unwrap();
    }
    writeln!(out, "exact_above\t{}\t{}", p.exact_above().to_f64(), p.exact_above()).unwrap();
    Ok(out)
}

/// Certificate refuting `count` seeded candidates, followed by the
/// verifier's verdict.
pub fn refute_text(group: &str, alpha: &str, r: &str, count: usize, seed: u64) -> Result<String, String> {
    let group: ValueGroup = group.parse().map_err(|e| format!("{e}"))?;
    let alpha: GroupScalar = alpha.parse().map_err(|e| format!("alpha: {e}"))?;
    let r: FieldElem = r.parse().map_err(|e| format!("r: {e}"))?;
    let cfg = IncoherenceConfig::new(group, alpha, r, 8, 16).map_err(|e| format!("{e}"))?;
    let threshold = cfg.ideal().threshold;
    let mut s = Sampler::new(seed, group);
    let cands: Vec<_> = (0..count.clamp(1, 8)).map(|_| s.ideal_element(&threshold, 3)).collect();
    let rep = refute_generators(&cands, &cfg).map_err(|e| format!("{e}"))?;
    Ok(format!("{rep}# {}\n", verify_report(&rep, &cfg)))
}

#[wasm_bindgen]
pub fn chi_curve(group: &str, prefix: &str, tail: &str, steps: u32) -> Result<String, JsError> {
    chi_curve_text(group, prefix, tail, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn newton_polygon(group: &str, prefix: &str, tail: &str, terms: usize) -> Result<String, JsError> {
    newton_polygon_text(group, prefix, tail, terms).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn refute(group: &str, alpha: &str, r: &str, count: usize, seed: u64) -> Result<String, JsError> {
    refute_text(group, alpha, r, count, seed).map_err(|e| JsError::new(&e))
}
