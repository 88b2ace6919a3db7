//! TOML run configuration: optional top-level `seed`, then one flat
//! section per subcommand. Every scalar is a string in the library's
//! textual syntax and is parsed before any output is opened.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use valseries::incoherence::{IncoherenceConfig, SerialSeries, SerialTail};
use valseries::power_series::{CertifiedSeries, SeriesPoly};
use valseries::{FieldElem, GroupScalar, ValueGroup};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    #[serde(default)]
    pub chi: ChiSection,
    #[serde(default)]
    pub vlambda: VLambdaSection,
    #[serde(default)]
    pub incoherence: IncoherenceSection,
    #[serde(default)]
    pub purity: PuritySection,
    #[serde(default)]
    pub selftest: SelftestSection,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Parameters of the standard witness series, shared by several sections.
macro_rules! witness_section {
    ($name:ident { $($field:ident: $ty:ty),* $(,)? }) => {
        #[derive(Debug, Default, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            pub group: Option<String>,
            pub alpha: Option<String>,
            pub r: Option<String>,
            pub seq_len: Option<usize>,
            $(pub $field: $ty,)*
        }

        impl $name {
            pub fn witness(&self, order: usize) -> Result<IncoherenceConfig> {
                resolve_witness(self.group.as_deref(), self.alpha.as_deref(), self.r.as_deref(), self.seq_len, order)
            }
        }
    };
}

fn resolve_witness(
    group: Option<&str>,
    alpha: Option<&str>,
    r: Option<&str>,
    seq_len: Option<usize>,
    order: usize,
) -> Result<IncoherenceConfig> {
    let group = parse_group(group)?;
    let alpha: GroupScalar = match alpha {
        Some(a) => parse(a, "alpha")?,
        None => group.excluded(),
    };
    let r: FieldElem = match r {
        Some(r) => parse(r, "r")?,
        None => FieldElem::monomial(GroupScalar::from(alpha.floor() + 1)),
    };
    Ok(IncoherenceConfig::new(group, alpha, r, seq_len.unwrap_or(8), order)?)
}

/// An explicit series: coefficient strings, then an optional tail rule in
/// certificate syntax (`zero`, `constant E | offset O`,
/// `approach A | offset O`) starting right after the listed coefficients.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub prefix: Vec<String>,
    pub tail: Option<String>,
}

impl SeriesSpec {
    pub fn resolve(&self, group: ValueGroup) -> Result<CertifiedSeries> {
        let prefix = parse_poly(&self.prefix)?;
        let tail: SerialTail = match &self.tail {
            Some(t) => parse(t, "tail")?,
            None => SerialTail::Zero,
        };
        Ok(SerialSeries { prefix, tail }.to_certified(group)?)
    }
}

witness_section!(ChiSection {
    series: Option<SeriesSpec>,
    lambda0: Option<String>,
    steps: Option<u32>,
});

witness_section!(VLambdaSection {
    series: Option<SeriesSpec>,
    lambda: Option<String>,
});

witness_section!(IncoherenceSection {
    candidates: Option<usize>,
    candidate: Option<Vec<SeriesSpec>>,
});

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuritySection {
    pub group: Option<String>,
    pub count: Option<usize>,
    pub a: Option<String>,
    pub f: Option<Vec<String>>,
    pub g: Option<Vec<String>>,
    pub u: Option<SeriesSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestSection {
    pub fault: Option<String>,
}

pub fn parse_group(s: Option<&str>) -> Result<ValueGroup> {
    s.map_or(Ok(ValueGroup::Rationals), |g| parse(g, "group"))
}

pub fn parse<T>(s: &str, what: &str) -> Result<T>
where
    T: std::str::FromStr<Err = valseries::Error>,
{
    s.parse().with_context(|| format!("bad {what} `{s}`"))
}

pub fn parse_poly(coeffs: &[String]) -> Result<SeriesPoly> {
    if coeffs.is_empty() {
        bail!("series needs at least one coefficient");
    }
    let coeffs = coeffs
        .iter()
        .map(|c| parse::<FieldElem>(c, "coefficient"))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesPoly::new(coeffs)?)
}
