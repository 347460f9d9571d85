//! Flat `key = value` settings shared by every subcommand.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

pub const KEYS: [&str; 8] = ["omega", "delta", "eta", "gamma", "cutoff", "tmax", "samples", "kmax"];

/// Partially specified settings. Layers are merged with [`Settings::over`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Settings {
    pub omega: Option<f64>,
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub gamma: Option<Vec<f64>>,
    pub cutoff: Option<usize>,
    pub tmax: Option<f64>,
    pub samples: Option<usize>,
    pub kmax: Option<usize>,
}

impl Settings {
    /// Parses one setting per line. `#` starts a comment; blank lines are
    /// skipped; `gamma` takes a comma-separated list.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value, got '{line}'", i + 1))?;
            out.set(key.trim(), value.trim()).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().ok().with_context(|| format!("bad value '{value}' for '{key}'"))
        }
        let dup = match key {
            "omega" => self.omega.replace(num(key, value)?).is_some(),
            "delta" => self.delta.replace(num(key, value)?).is_some(),
            "eta" => self.eta.replace(num(key, value)?).is_some(),
            "gamma" => self.gamma.replace(gamma_list(value)?).is_some(),
            "cutoff" => self.cutoff.replace(num(key, value)?).is_some(),
            "tmax" => self.tmax.replace(num(key, value)?).is_some(),
            "samples" => self.samples.replace(num(key, value)?).is_some(),
            "kmax" => self.kmax.replace(num(key, value)?).is_some(),
            other => bail!("unknown key '{other}' (expected one of {})", KEYS.join(", ")),
        };
        if dup {
            bail!("'{key}' given twice");
        }
        Ok(())
    }

    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        Settings {
            omega: self.omega.or(lower.omega),
            delta: self.delta.or(lower.delta),
            eta: self.eta.or(lower.eta),
            gamma: self.gamma.or(lower.gamma),
            cutoff: self.cutoff.or(lower.cutoff),
            tmax: self.tmax.or(lower.tmax),
            samples: self.samples.or(lower.samples),
            kmax: self.kmax.or(lower.kmax),
        }
    }
}

pub fn gamma_list(value: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = value
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad dephasing rate '{}'", s.trim())))
        .collect::<Result<_>>()?;
    if out.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
        bail!("dephasing rates must be finite and non-negative");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let s = Settings::parse(
            "# fig4\nomega = 0.95\ndelta=0.3\neta = 0.05\ngamma = 0.0004, 0.01\ncutoff = 40\ntmax = 100 # short\nsamples = 500\nkmax = 30\n",
        )
        .unwrap();
        assert_eq!(s.omega, Some(0.95));
        assert_eq!(s.gamma, Some(vec![0.0004, 0.01]));
        assert_eq!(s.cutoff, Some(40));
        assert_eq!(s.tmax, Some(100.0));
        assert_eq!(s.kmax, Some(30));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Settings::parse("omega 1").is_err());
        assert!(Settings::parse("speed = 1").is_err());
        assert!(Settings::parse("cutoff = -3").is_err());
        assert!(Settings::parse("gamma = 0.1,-1").is_err());
        assert!(Settings::parse("eta = 0.1\neta = 0.2").is_err());
    }

    #[test]
    fn upper_layer_wins() {
        let flags = Settings { omega: Some(2.0), ..Default::default() };
        let file = Settings { omega: Some(1.0), delta: Some(0.3), ..Default::default() };
        let merged = flags.over(file);
        assert_eq!(merged.omega, Some(2.0));
        assert_eq!(merged.delta, Some(0.3));
        assert_eq!(merged.eta, None);
    }
}
