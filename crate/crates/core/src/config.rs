//! Plain `key=value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! precision=8
//! caps=12,12
//! window=-96..96
//! fgl_cap=100
//! ```
//!
//! Only syntax and hard domain limits are checked here. Thresholds such as
//! `N >= 4` or `J, V >= 6` are enforced by the gates that need them, so a
//! config with small caps parses and then fails downstream.

use crate::d1::CaseTag;
use crate::e1::FiltrationCaps;
use crate::error::{Error, Result};
use crate::padic::{OmegaRoot, Precision, MAX_PRECISION};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "K2_OUT_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub precision: u32,
    pub caps: (u32, u32),
    pub window: (i64, i64),
    pub fgl_cap: usize,
    pub out_dir: PathBuf,
    pub omega: OmegaRoot,
    /// `|index|` bound for the `d_1^2` sweep.
    pub d1_bound: i64,
    /// `|index|` bound for the case classification sweep.
    pub classification_range: i64,
    /// Test hook: flip the sign of one case of the `d_1` table.
    pub sabotage_sign: Option<CaseTag>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: Precision::DEFAULT.get(),
            caps: (12, 12),
            window: (-96, 96),
            fgl_cap: 100,
            out_dir: PathBuf::from("reports"),
            omega: OmegaRoot::Primary,
            d1_bound: 200,
            classification_range: 100_000,
            sabotage_sign: None,
        }
    }
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| config_err(line, format!("{key}: cannot parse '{v}'")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| config_err(line, format!("expected key=value, got '{body}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(config_err(line, format!("duplicate key '{key}'")));
            }
            match key {
                "precision" => c.precision = parse_num(line, key, value)?,
                "caps" => {
                    let (j, v) = value.split_once(',').ok_or_else(|| config_err(line, "caps: expected J,V"))?;
                    c.caps = (parse_num(line, key, j)?, parse_num(line, key, v)?);
                }
                "window" => {
                    let (a, b) = value.split_once("..").ok_or_else(|| config_err(line, "window: expected a..b"))?;
                    c.window = (parse_num(line, key, a)?, parse_num(line, key, b)?);
                }
                "fgl_cap" => c.fgl_cap = parse_num(line, key, value)?,
                "out_dir" => c.out_dir = PathBuf::from(value),
                "omega" => c.omega = value.parse().map_err(|e: Error| config_err(line, e.to_string()))?,
                "d1_bound" => c.d1_bound = parse_num(line, key, value)?,
                "classification_range" => c.classification_range = parse_num(line, key, value)?,
                "sabotage_sign" => c.sabotage_sign = Some(value.parse().map_err(|e: Error| config_err(line, e.to_string()))?),
                _ => return Err(config_err(line, format!("unknown key '{key}'"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Hard limits, reported by field name.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(Error::Invariant(format!("{field}: {why}")));
        if self.precision == 0 || self.precision > MAX_PRECISION {
            return bad("precision", format!("{} outside 1..={MAX_PRECISION}", self.precision));
        }
        if self.caps.0 == 0 || self.caps.1 == 0 {
            return bad("caps", "must be positive".into());
        }
        if self.window.0 > self.window.1 {
            return bad("window", format!("{}..{} is empty", self.window.0, self.window.1));
        }
        if self.d1_bound < 0 || self.classification_range < 0 {
            return bad("d1_bound", "bounds must be non-negative".into());
        }
        Ok(())
    }

    pub fn precision(&self) -> Result<Precision> {
        Precision::new(self.precision)
    }

    pub fn filtration_caps(&self) -> Result<FiltrationCaps> {
        FiltrationCaps::new(self.caps.0, self.caps.1, self.window.0, self.window.1)
    }

    /// The output directory, after the environment override.
    pub fn resolved_out_dir(&self) -> PathBuf {
        std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| self.out_dir.clone())
    }

    /// Canonical text form; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "precision={}\ncaps={},{}\nwindow={}..{}\nfgl_cap={}\nout_dir={}\nomega={}\nd1_bound={}\nclassification_range={}\n",
            self.precision,
            self.caps.0,
            self.caps.1,
            self.window.0,
            self.window.1,
            self.fgl_cap,
            self.out_dir.display(),
            match self.omega {
                OmegaRoot::Primary => "primary",
                OmegaRoot::Conjugate => "conjugate",
            },
            self.d1_bound,
            self.classification_range,
        );
        if let Some(t) = self.sabotage_sign {
            s.push_str(&format!("sabotage_sign={}\n", t.name()));
        }
        s
    }

    /// First 16 hex digits of `sha256(version, canonical config)`.  The output
    /// directory does not affect results and is left out.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(crate::VERSION.as_bytes());
        h.update(b"\n");
        let text: String = self.to_text().lines().filter(|l| !l.starts_with("out_dir=")).map(|l| format!("{l}\n")).collect();
        h.update(text.as_bytes());
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let c = RunConfig::parse("precision=6\nsabotage_sign=b-first\n").unwrap();
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }
}
