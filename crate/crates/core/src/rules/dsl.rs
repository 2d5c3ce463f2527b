//! Line-oriented rule files:
//!
//! ```text
//! # comment
//! rule transitive kind=low-pass w=1 beta=1
//! rule conflict kind=high-pass w=0.5 scope=0,3,4
//! rule shaped kind=custom w=1 file=shape.csv
//! ```
//!
//! Custom templates reference a CSV of `lambda,value` rows, resolved
//! relative to the rule file's directory.

use std::fmt::Write as _;
use std::path::Path;

use super::operator::SpectralRule;
use super::template::{TemplateKind, TemplateParams, TemplateSpec};
use crate::error::{Error, Result};

pub fn parse_rules(text: &str, base_dir: Option<&Path>) -> Result<Vec<SpectralRule>> {
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("rule") {
            return Err(Error::parse(line_no, "expected `rule <id> kind=... w=...`"));
        }
        let id = tokens
            .next()
            .ok_or_else(|| Error::parse(line_no, "missing rule id"))?;
        let mut kind = None;
        let mut weight = None;
        let mut params = TemplateParams::default();
        let mut scope = None;
        let mut file = None;
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected key=value, got `{tok}`")))?;
            let num = || -> Result<f64> {
                value
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad number `{value}` for {key}")))
            };
            match key {
                "kind" => kind = Some(value.parse::<TemplateKind>().map_err(|e| Error::parse(line_no, e.to_string()))?),
                "w" => weight = Some(num()?),
                "beta" => params.beta = Some(num()?),
                "t" => params.t = Some(num()?),
                "center" => params.center = Some(num()?),
                "sigma" => params.sigma = Some(num()?),
                "scale" => params.scale = Some(num()?),
                "file" => file = Some(value.to_string()),
                "scope" => {
                    let ids = value
                        .split(',')
                        .map(|s| s.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| Error::parse(line_no, format!("bad scope `{value}`")))?;
                    scope = Some(ids);
                }
                other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
            }
        }
        let kind = kind.ok_or_else(|| Error::parse(line_no, "missing kind="))?;
        let weight = weight.ok_or_else(|| Error::parse(line_no, "missing w="))?;
        let template = if kind == TemplateKind::Custom {
            let file = file.ok_or_else(|| Error::parse(line_no, "custom rule needs file="))?;
            let path = match base_dir {
                Some(dir) => dir.join(&file),
                None => file.clone().into(),
            };
            let samples = read_samples(&crate::io::read_text(&path)?)?;
            let mut spec = TemplateSpec::custom(samples);
            spec.source = Some(file);
            spec
        } else {
            TemplateSpec::builtin(kind, params)
        };
        let mut rule = SpectralRule::new(id, template, weight).map_err(|e| Error::parse(line_no, e.to_string()))?;
        rule.scope = scope;
        rules.push(rule);
    }
    Ok(rules)
}

/// `lambda,value` rows, no header.
pub fn read_samples(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(idx + 1, "expected `lambda,value`"))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(idx + 1, format!("bad number `{s}`")))
        };
        out.push((parse(a)?, parse(b)?));
    }
    Ok(out)
}

pub fn load_rules(path: &Path) -> Result<Vec<SpectralRule>> {
    let text = crate::io::read_text(path)?;
    parse_rules(&text, path.parent())
}

pub fn format_rules(rules: &[SpectralRule]) -> String {
    let mut out = String::new();
    for r in rules {
        let _ = write!(out, "rule {} kind={} w={}", r.id, r.template.kind, r.weight);
        let p = &r.template.params;
        for (key, value) in [
            ("beta", p.beta),
            ("t", p.t),
            ("center", p.center),
            ("sigma", p.sigma),
            ("scale", p.scale),
        ] {
            if let Some(v) = value {
                let _ = write!(out, " {key}={v}");
            }
        }
        if let Some(src) = &r.template.source {
            let _ = write!(out, " file={src}");
        }
        if let Some(scope) = &r.scope {
            let ids: Vec<String> = scope.iter().map(usize::to_string).collect();
            let _ = write!(out, " scope={}", ids.join(","));
        }
        out.push('\n');
    }
    out
}
