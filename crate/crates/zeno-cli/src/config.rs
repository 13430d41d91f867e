//! Experiment configuration: a TOML file with one section per experiment
//! plus a `[run]` section, every key mirrored by a CLI flag that overrides
//! the file value. A config file plus the seed determines all outputs
//! byte-exactly.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub fig2: Fig2Section,
    #[serde(default)]
    pub cnot: CnotSection,
    #[serde(default)]
    pub scaling: ScalingSection,
    #[serde(default)]
    pub vsystem: VsystemSection,
    #[serde(default)]
    pub dfs: DfsSection,
}

impl FileConfig {
    /// Parse a config file; syntax or schema problems surface with the
    /// parser's line/field diagnostics.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: FileConfig = toml::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks shared by file loading and flag overrides.
    pub fn validate(&self) -> Result<()> {
        if self.run.n_max < 1 {
            bail!("run.n_max must be at least 1");
        }
        if self.fig2.omega_points < 2 || self.scaling.points < 2 || self.vsystem.points < 2 {
            bail!("parameter grids need at least 2 points");
        }
        for section in ["fig2", "scaling"] {
            let (min, max) = match section {
                "fig2" => (self.fig2.omega_min, self.fig2.omega_max),
                _ => (self.scaling.omega_min, self.scaling.omega_max),
            };
            if !(min > 0.0 && max > min) {
                bail!("{section}: omega grid requires 0 < omega_min < omega_max");
            }
        }
        if !(self.vsystem.omega_w_min > 0.0 && self.vsystem.omega_w_max > self.vsystem.omega_w_min)
        {
            bail!("vsystem: grid requires 0 < omega_w_min < omega_w_max (omega_w = 0 would give an infinite dark period)");
        }
        Ok(())
    }
}

fn default_n_max() -> usize {
    2
}

fn default_seed() -> u64 {
    20260810
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Fock truncation; every deterministic experiment reruns at n_max + 1
    /// and checks the observable drift.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads; 0 means one per core.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            n_max: default_n_max(),
            seed: default_seed(),
            jobs: 0,
            out: default_out(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Section {
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    /// One curve per value; 0 is the idealized no-spontaneous-emission case.
    pub gamma_cav: Vec<f64>,
    pub kappa: f64,
    pub g: f64,
}

impl Default for Fig2Section {
    fn default() -> Self {
        Fig2Section {
            omega_min: 0.002,
            omega_max: 0.2,
            omega_points: 16,
            gamma_cav: vec![0.0, 1e-4, 1e-3, 1e-2],
            kappa: 1.0,
            g: 1.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnotSection {
    pub omega: f64,
    pub kappa: f64,
    pub g: f64,
    pub gamma_cav: f64,
    /// Initial state: `000`, `001`, `010`, `011`, `0a0`… or a two-term
    /// superposition like `010+011` / `010-011`.
    pub initial: String,
}

impl Default for CnotSection {
    fn default() -> Self {
        CnotSection {
            omega: 0.01,
            kappa: 1.0,
            g: 1.0,
            gamma_cav: 0.0,
            initial: "010".into(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub kappa: f64,
    pub g: f64,
}

impl Default for ScalingSection {
    fn default() -> Self {
        ScalingSection {
            omega_min: 0.005,
            omega_max: 0.05,
            points: 8,
            kappa: 1.0,
            g: 1.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VsystemSection {
    pub omega_w_min: f64,
    pub omega_w_max: f64,
    pub points: usize,
    pub omega_s: f64,
    pub gamma_s: f64,
    pub trajectories: u64,
}

impl Default for VsystemSection {
    fn default() -> Self {
        VsystemSection {
            omega_w_min: 2e-4,
            omega_w_max: 2e-3,
            points: 8,
            omega_s: 0.2,
            gamma_s: 1.0,
            trajectories: 400,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfsSection {
    pub kappa: f64,
    pub g: f64,
}

impl Default for DfsSection {
    fn default() -> Self {
        DfsSection { kappa: 1.0, g: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        FileConfig::default().validate().unwrap();
    }

    #[test]
    fn parse_partial_file() {
        let cfg: FileConfig = toml::from_str(
            r#"
            [run]
            n_max = 3
            [fig2]
            omega_min = 0.01
            omega_max = 0.1
            omega_points = 4
            gamma_cav = [0.0]
            kappa = 1.0
            g = 1.0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.run.n_max, 3);
        assert_eq!(cfg.fig2.omega_points, 4);
        assert_eq!(cfg.cnot.initial, "010");
    }

    #[test]
    fn unknown_keys_are_rejected_with_diagnostics() {
        let err = toml::from_str::<FileConfig>("[fig2]\nomega_mn = 0.1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("omega_mn"), "diagnostic was: {msg}");
    }

    #[test]
    fn zero_omega_w_rejected() {
        let mut cfg = FileConfig::default();
        cfg.vsystem.omega_w_min = 0.0;
        assert!(cfg.validate().is_err());
    }
}
