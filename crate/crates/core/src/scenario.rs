//! Scenario files: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! zeta1 = 1, 0, 1, 0                # four expressions in rho; all four or none
//! zeta2 = -1, 0, 0, -1
//! zeta3 = 1/2*rho^-10, 1/2*rho^-10, 0, 0
//! zeta4 = rho^10, -rho^10, 0, 0
//! oracle_rho = 2, 3                 # decimal sample values for the numeric oracle
//! backtrace_rho = 2                 # rational sample value for the causal check
//! format = text                     # text | machine
//! ```
//!
//! Custom covectors must form a valid null configuration under the Minkowski metric.

use crate::algebra::{int, parse::parse_rho, Rational};
use crate::null_geometry::{standard_config, GeometryError, NullConfig};
use crate::tensor::{CoVec4, Metric4};
use std::collections::BTreeMap;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "machine" => Ok(Format::Machine),
            other => Err(format!("unknown format {other:?}, expected text or machine")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("covectors {0} given; give all four of zeta1..zeta4 or none")]
    PartialCovectors(String),
    #[error("invalid configuration: {0}")]
    Configuration(#[from] GeometryError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub config: NullConfig,
    pub custom_covectors: bool,
    pub oracle_rho: Vec<f64>,
    pub backtrace_rho: Rational,
    pub format: Format,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            config: standard_config(),
            custom_covectors: false,
            oracle_rho: vec![2.0, 3.0],
            backtrace_rho: int(2),
            format: Format::Text,
        }
    }
}

impl Scenario {
    pub fn parse(input: &str) -> Result<Self, ScenarioError> {
        let mut s = Scenario::default();
        let mut zetas: BTreeMap<usize, CoVec4> = BTreeMap::new();
        let mut seen = BTreeMap::new();
        for (n, raw) in input.lines().enumerate() {
            let line = n + 1;
            let syntax = |reason: String| ScenarioError::Syntax { line, reason };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| syntax("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(prev) = seen.insert(key.to_string(), line) {
                return Err(syntax(format!("{key} already set on line {prev}")));
            }
            match key {
                "zeta1" | "zeta2" | "zeta3" | "zeta4" => {
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if parts.len() != 4 {
                        return Err(syntax(format!("{key} needs four components, got {}", parts.len())));
                    }
                    let mut c = Vec::with_capacity(4);
                    for p in parts {
                        c.push(parse_rho(p).map_err(|e| syntax(e.to_string()))?);
                    }
                    let i = key[4..].parse::<usize>().expect("matched label");
                    zetas.insert(i, CoVec4::new(c.try_into().expect("four components")));
                }
                "oracle_rho" => {
                    let mut v = Vec::new();
                    for p in value.split(',').map(str::trim) {
                        let x: f64 = p.parse().map_err(|_| syntax(format!("not a decimal: {p:?}")))?;
                        if !x.is_finite() || x <= 0.0 {
                            return Err(syntax(format!("sample value must be positive and finite, got {p}")));
                        }
                        v.push(x);
                    }
                    s.oracle_rho = v;
                }
                "backtrace_rho" => {
                    let r = parse_rho(value).map_err(|e| syntax(e.to_string()))?;
                    let r = r
                        .as_constant()
                        .ok_or_else(|| syntax("backtrace_rho must be a constant".into()))?;
                    if r <= int(0) {
                        return Err(syntax("backtrace_rho must be positive".into()));
                    }
                    s.backtrace_rho = r;
                }
                "format" => s.format = value.parse().map_err(syntax)?,
                other => return Err(syntax(format!("unknown key {other:?}"))),
            }
        }
        match zetas.len() {
            0 => {}
            4 => {
                let z: Vec<CoVec4> = zetas.into_values().collect();
                s.config = NullConfig::new(Metric4::minkowski(), z.try_into().expect("four covectors"))?;
                s.custom_covectors = true;
            }
            _ => {
                let given: Vec<String> = zetas.keys().map(|k| format!("zeta{k}")).collect();
                return Err(ScenarioError::PartialCovectors(given.join(", ")));
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_comments() {
        let s = Scenario::parse("# nothing\n\n").unwrap();
        assert_eq!(s, Scenario::default());
        let s = Scenario::parse("oracle_rho = 2.5 # one sample\nformat=machine").unwrap();
        assert_eq!(s.oracle_rho, vec![2.5]);
        assert_eq!(s.format, Format::Machine);
    }

    #[test]
    fn standard_covectors_written_out() {
        let text = "zeta1 = 1, 0, 1, 0\nzeta2 = -1, 0, 0, -1\nzeta3 = 1/2*rho^-10, 1/2*rho^-10, 0, 0\nzeta4 = rho^10, -rho^10, 0, 0\n";
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.config, standard_config());
        assert!(s.custom_covectors);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            Scenario::parse("bogus = 1"),
            Err(ScenarioError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            Scenario::parse("format = xml"),
            Err(ScenarioError::Syntax { .. })
        ));
        assert!(matches!(
            Scenario::parse("oracle_rho = -1"),
            Err(ScenarioError::Syntax { .. })
        ));
        assert!(matches!(
            Scenario::parse("zeta1 = 1, 0, 1, 0"),
            Err(ScenarioError::PartialCovectors(_))
        ));
        assert!(matches!(
            Scenario::parse("format = text\nformat = text"),
            Err(ScenarioError::Syntax { line: 2, .. })
        ));
        let not_null = "zeta1 = 1, 1, 1, 0\nzeta2 = -1, 0, 0, -1\nzeta3 = 1, 1, 0, 0\nzeta4 = 1, -1, 0, 0";
        assert!(matches!(
            Scenario::parse(not_null),
            Err(ScenarioError::Configuration(GeometryError::NotNull(1, _)))
        ));
    }
}
