//! Experiment configuration files: TOML, one table per experiment, with every
//! table rejecting keys it does not know.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::poly::IntPoly;
use crate::sieve::{MultiplicativeSpec, PrimePowerRule};
use crate::{Error, Result};

/// Which integers `n` a distribution run keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Filter {
    None,
    /// `P_k(n) > q`
    LargePrime(u32),
    /// `P_{D+2}(n) > q`, with `D` taken from the polynomial.
    LargePrimeDegreePlusTwo,
    ConvenientOnly,
}

impl Filter {
    /// The `k` of a `P_k(n) > q` filter once `D` is known.
    pub fn k(self, degree: u32) -> Option<u32> {
        match self {
            Filter::LargePrime(k) => Some(k),
            Filter::LargePrimeDegreePlusTwo => Some(degree + 2),
            _ => None,
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::None => f.write_str("none"),
            Filter::LargePrime(k) => write!(f, "p{k}>q"),
            Filter::LargePrimeDegreePlusTwo => f.write_str("pD+2>q"),
            Filter::ConvenientOnly => f.write_str("convenient"),
        }
    }
}

impl FromStr for Filter {
    type Err = Error;

    /// `none`, `convenient`, `pD+2>q`, or `p<k>>q` with `k ≥ 1`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        match t.as_str() {
            "none" => return Ok(Filter::None),
            "convenient" | "convenient-only" => return Ok(Filter::ConvenientOnly),
            "pd+2>q" => return Ok(Filter::LargePrimeDegreePlusTwo),
            _ => {}
        }
        let k = t
            .strip_prefix('p')
            .and_then(|r| r.strip_suffix(">q"))
            .and_then(|k| k.parse::<u32>().ok())
            .ok_or_else(|| Error::Config(format!("unknown filter `{s}` (none|convenient|pD+2>q|p<k>>q)")))?;
        if k == 0 {
            return Err(Error::Config("P_k filters need k ≥ 1".into()));
        }
        Ok(Filter::LargePrime(k))
    }
}

impl Serialize for Filter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Filter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}` (csv|json)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    Distribution,
    CounterexampleI,
    CounterexampleIi,
    RestrictedA,
    RestrictedB,
    Additive,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 6] = [
        ScenarioName::Distribution,
        ScenarioName::CounterexampleI,
        ScenarioName::CounterexampleIi,
        ScenarioName::RestrictedA,
        ScenarioName::RestrictedB,
        ScenarioName::Additive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Distribution => "distribution",
            ScenarioName::CounterexampleI => "counterexample-i",
            ScenarioName::CounterexampleIi => "counterexample-ii",
            ScenarioName::RestrictedA => "restricted-a",
            ScenarioName::RestrictedB => "restricted-b",
            ScenarioName::Additive => "additive",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scenario `{s}`")))
    }
}

/// One experiment. Missing keys fall back to the scenario's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub scenario: Option<ScenarioName>,
    /// Coefficient list or preset name, as accepted by `IntPoly::from_str`.
    pub polynomial: Option<String>,
    /// Prime-power rule; the default depends on the polynomial.
    pub rule: Option<String>,
    #[serde(default)]
    pub x: Vec<u64>,
    #[serde(default)]
    pub q: Vec<u64>,
    pub delta: Option<f64>,
    #[serde(default)]
    pub filters: Vec<Filter>,
    /// `D` for the counterexample constructions.
    pub degree: Option<u32>,
    /// Overrides `⌊log log log x⌋`.
    pub j: Option<u32>,
    /// Overrides `exp((log x)^{δ/2})`.
    pub y: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(1.0)
    }

    pub fn poly(&self) -> Result<IntPoly> {
        let text = self.polynomial.as_deref().unwrap_or("phi");
        let f: IntPoly = text.parse().map_err(|e| Error::Config(format!("polynomial `{text}`: {e}")))?;
        f.check_defining().map_err(|e| Error::Config(format!("polynomial `{text}`: {e}")))?;
        Ok(f)
    }

    /// The multiplicative function for `f`, honouring an explicit rule.
    pub fn spec_for(&self, f: IntPoly) -> Result<MultiplicativeSpec> {
        Ok(match &self.rule {
            Some(r) => MultiplicativeSpec::new(f, r.parse::<PrimePowerRule>().map_err(|e| Error::Config(e.to_string()))?),
            None => MultiplicativeSpec::with_default_rule(f),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.delta {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::Config(format!("delta = {d} outside (0, 1]")));
            }
        }
        if self.q.contains(&0) {
            return Err(Error::Config("q = 0 in q list".into()));
        }
        if self.x.contains(&0) {
            return Err(Error::Config("x = 0 in x list".into()));
        }
        if self.j == Some(0) {
            return Err(Error::Config("j must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if let Some(r) = &self.rule {
            r.parse::<PrimePowerRule>().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}

/// Every table of a config file, keyed by table name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub experiments: BTreeMap<String, ExperimentConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let experiments: BTreeMap<String, ExperimentConfig> =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (name, exp) in &experiments {
            exp.validate().map_err(|e| Error::Config(format!("[{name}]: {e}")))?;
        }
        Ok(ConfigFile { experiments })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The scenario a table runs: its `scenario` key, else its name when that
    /// names a scenario, else a plain distribution run.
    pub fn scenario_of(name: &str, exp: &ExperimentConfig) -> ScenarioName {
        exp.scenario.or_else(|| name.parse().ok()).unwrap_or(ScenarioName::Distribution)
    }
}
