use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use landau_core::asymptotics::DEFAULT_FIT_WINDOW;
use landau_core::operators::{default_k_max, default_n_max};
use landau_core::potentials::{Potential, Profile};
use landau_core::spectra::Truncation;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_potential")]
    pub potential: Profile,
    #[serde(default = "default_b")]
    pub b: f64,
    /// Inclusive `[first, last]` cluster indices.
    #[serde(default = "default_n_range")]
    pub n_range: [usize; 2],
    /// `None` derives `N_max = 2·last + 40`, `K_max = ⌈B R²/2⌉ + 24`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    #[serde(default = "default_fit_window")]
    pub fit_window: [usize; 2],
    #[serde(default = "default_t_list")]
    pub t_list: Vec<f64>,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

fn default_potential() -> Profile {
    Profile::Bump {
        amplitude: 0.2,
        radius: 1.0,
    }
}
fn default_b() -> f64 {
    1.0
}
fn default_n_range() -> [usize; 2] {
    [0, 40]
}
fn default_fit_window() -> [usize; 2] {
    [DEFAULT_FIT_WINDOW.0, DEFAULT_FIT_WINDOW.1]
}
fn default_t_list() -> Vec<f64> {
    vec![0.4, 0.2, 0.1]
}
fn default_format() -> Format {
    Format::Csv
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            potential: default_potential(),
            b: default_b(),
            n_range: default_n_range(),
            truncation: None,
            fit_window: default_fit_window(),
            t_list: default_t_list(),
            format: default_format(),
            out: None,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.potential.validate()?;
        if !(self.b > 0.0) || !self.b.is_finite() {
            bail!("b must be positive and finite, got {}", self.b);
        }
        if self.n_range[0] > self.n_range[1] {
            bail!("n_range [{}, {}] is empty", self.n_range[0], self.n_range[1]);
        }
        if self.fit_window[0] > self.fit_window[1] {
            bail!("fit_window [{}, {}] is empty", self.fit_window[0], self.fit_window[1]);
        }
        if let Some(t) = self.t_list.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            bail!("t_list entries must be positive, got {t}");
        }
        if self.jobs == Some(0) {
            bail!("jobs must be at least 1");
        }
        Ok(())
    }

    /// Canonical TOML: every field explicit, fixed order.
    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn potential(&self) -> anyhow::Result<Potential> {
        Ok(Potential::new(self.potential.clone())?)
    }

    pub fn truncation(&self, v: &Potential) -> Truncation {
        self.truncation.unwrap_or(Truncation {
            n_max: default_n_max(self.n_range[1]),
            k_max: default_k_max(v, self.b),
        })
    }

    pub fn n_range(&self) -> std::ops::RangeInclusive<usize> {
        self.n_range[0]..=self.n_range[1]
    }

    pub fn fit_window(&self) -> std::ops::RangeInclusive<usize> {
        self.fit_window[0]..=self.fit_window[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let text = cfg.to_toml().unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_toml().unwrap(), text);
    }

    #[test]
    fn parses_scaled_sum() {
        let cfg: RunConfig = toml::from_str(
            r#"
            b = 2.0
            n_range = [5, 20]
            truncation = { n_max = 90, k_max = 30 }

            [potential]
            type = "scaled_sum"
            scale = -1.0
            bumps = [{ amplitude = 0.1, radius = 1.0 }, { amplitude = 0.05, radius = 0.5 }]
            "#,
        )
        .unwrap();
        cfg.validate().unwrap();
        let v = cfg.potential().unwrap();
        assert!(v.v(0.0) < 0.0);
        assert_eq!(cfg.truncation(&v).n_max, 90);
    }

    #[test]
    fn rejects_bad_values() {
        for text in ["b = -1.0", "n_range = [4, 2]", "t_list = [0.1, 0.0]", "jobs = 0", "bogus = 1"] {
            let parsed: Result<RunConfig, _> = toml::from_str(text);
            assert!(parsed.map(|c| c.validate().is_err()).unwrap_or(true), "{text}");
        }
    }
}
