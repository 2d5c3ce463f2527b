//! Plain-text `key = value` pipeline configuration.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `laplacian` | `normalized` | `combinatorial` or `normalized` |
//! | `order` | `5` | Chebyshev order `K` of the learned filter |
//! | `bands` | `1` | band count `B`; 1 disables gating |
//! | `gate_width` | `8` | width of the gate query / band signatures |
//! | `rules` | unset | rule file path |
//! | `threshold` | `hard` | `hard` or `logistic` projection at inference |
//! | `tau` | `0.5` | initial threshold |
//! | `alpha` | `10` | initial logistic steepness |
//! | `crossover` | `512` | largest graph eigendecomposed densely |
//! | `rule_order` | `20` | Chebyshev order for rule templates above the crossover |
//! | `filter_path` | `chebyshev` | `chebyshev` or `exact` |
//! | `seed` | `0` | RNG seed; `SPECTRAL_NSR_SEED` overrides it |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laplacian::LaplacianKind;
use crate::symbolic::ThresholdMode;

pub const SEED_ENV: &str = "SPECTRAL_NSR_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterPath {
    Chebyshev,
    Exact,
}

impl FromStr for FilterPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev" => Ok(FilterPath::Chebyshev),
            "exact" => Ok(FilterPath::Exact),
            other => Err(Error::BadParams(format!("unknown filter path `{other}`"))),
        }
    }
}

impl FilterPath {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterPath::Chebyshev => "chebyshev",
            FilterPath::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub laplacian: LaplacianKind,
    pub order: usize,
    pub bands: usize,
    pub gate_width: usize,
    pub rules: Option<String>,
    pub threshold: ThresholdMode,
    pub tau: f64,
    pub alpha: f64,
    pub crossover: usize,
    pub rule_order: usize,
    pub filter_path: FilterPath,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            laplacian: LaplacianKind::Normalized,
            order: 5,
            bands: 1,
            gate_width: 8,
            rules: None,
            threshold: ThresholdMode::Hard,
            tau: 0.5,
            alpha: 10.0,
            crossover: 512,
            rule_order: 20,
            filter_path: FilterPath::Chebyshev,
            seed: 0,
        }
    }
}

/// Parsed `key = value` pairs with line numbers, consumed by typed configs.
#[derive(Debug, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(idx + 1, "expected `key = value`"))?;
            let key = key.trim().to_string();
            if entries
                .insert(key.clone(), (idx + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::parse(idx + 1, format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { entries })
    }

    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(line, format!("bad value `{value}` for `{key}`"))),
        }
    }

    /// Fail on any key nobody consumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(Error::parse(line, format!("unknown key `{key}`"))),
        }
    }
}

fn parse_mode(s: &str) -> Result<ThresholdMode> {
    match s {
        "hard" => Ok(ThresholdMode::Hard),
        "logistic" => Ok(ThresholdMode::Logistic),
        other => Err(Error::BadParams(format!("unknown threshold mode `{other}`"))),
    }
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = ConfigMap::parse(text)?;
        let cfg = Self::from_map(&mut map)?;
        map.finish()?;
        Ok(cfg)
    }

    pub fn from_map(map: &mut ConfigMap) -> Result<Self> {
        let d = Self::default();
        let threshold = match map.take::<String>("threshold")? {
            Some(s) => parse_mode(&s)?,
            None => d.threshold,
        };
        let cfg = Self {
            laplacian: map.take("laplacian")?.unwrap_or(d.laplacian),
            order: map.take("order")?.unwrap_or(d.order),
            bands: map.take("bands")?.unwrap_or(d.bands),
            gate_width: map.take("gate_width")?.unwrap_or(d.gate_width),
            rules: map.take("rules")?,
            threshold,
            tau: map.take("tau")?.unwrap_or(d.tau),
            alpha: map.take("alpha")?.unwrap_or(d.alpha),
            crossover: map.take("crossover")?.unwrap_or(d.crossover),
            rule_order: map.take("rule_order")?.unwrap_or(d.rule_order),
            filter_path: map.take("filter_path")?.unwrap_or(d.filter_path),
            seed: map.take("seed")?.unwrap_or(d.seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bands == 0 {
            return Err(Error::BadParams("bands must be >= 1".into()));
        }
        if self.crossover == 0 {
            return Err(Error::BadParams("crossover must be >= 1".into()));
        }
        if self.gate_width == 0 {
            return Err(Error::BadParams("gate_width must be >= 1".into()));
        }
        if !(self.alpha > 0.0) || !self.tau.is_finite() {
            return Err(Error::BadParams("alpha must be positive and tau finite".into()));
        }
        Ok(())
    }

    /// Apply the seed override from the environment, if set.
    pub fn with_env_seed(mut self) -> Result<Self> {
        if let Ok(value) = std::env::var(SEED_ENV) {
            self.seed = value
                .trim()
                .parse()
                .map_err(|_| Error::BadParams(format!("{SEED_ENV}=`{value}` is not an integer")))?;
        }
        Ok(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "laplacian = {}", self.laplacian);
        let _ = writeln!(out, "order = {}", self.order);
        let _ = writeln!(out, "bands = {}", self.bands);
        let _ = writeln!(out, "gate_width = {}", self.gate_width);
        if let Some(rules) = &self.rules {
            let _ = writeln!(out, "rules = {rules}");
        }
        let mode = match self.threshold {
            ThresholdMode::Hard => "hard",
            ThresholdMode::Logistic => "logistic",
        };
        let _ = writeln!(out, "threshold = {mode}");
        let _ = writeln!(out, "tau = {}", self.tau);
        let _ = writeln!(out, "alpha = {}", self.alpha);
        let _ = writeln!(out, "crossover = {}", self.crossover);
        let _ = writeln!(out, "rule_order = {}", self.rule_order);
        let _ = writeln!(out, "filter_path = {}", self.filter_path.as_str());
        let _ = writeln!(out, "seed = {}", self.seed);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = PipelineConfig::default();
        let text = cfg.to_text();
        assert_eq!(PipelineConfig::parse(&text).unwrap().to_text(), text);
    }

    #[test]
    fn parses_overrides() {
        let cfg = PipelineConfig::parse("order = 7\nlaplacian = combinatorial # comment\ntau=0.125\nrules = r.txt\n").unwrap();
        assert_eq!(cfg.order, 7);
        assert_eq!(cfg.laplacian, LaplacianKind::Combinatorial);
        assert_eq!(cfg.tau, 0.125);
        assert_eq!(cfg.rules.as_deref(), Some("r.txt"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PipelineConfig::parse("bands = 0").is_err());
        assert!(PipelineConfig::parse("colour = blue").is_err());
        assert!(PipelineConfig::parse("order = five").is_err());
        assert!(PipelineConfig::parse("order = 1\norder = 2").is_err());
        assert!(PipelineConfig::parse("just words").is_err());
    }
}
