//! The TOML config file. Every key is optional; command-line flags win over
//! the file, and the file wins over the built-in study presets.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ewi_core::harness::data::InitialData;
use ewi_core::harness::spec::StudySpec;
use ewi_core::Regime;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub study: StudySection,
    #[serde(default)]
    pub reference: ReferenceSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub beta: Option<f64>,
    pub p: Option<u32>,
    pub regime: Option<Regime>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub alpha: Option<Vec<f64>>,
    pub eps: Option<Vec<f64>>,
    pub tau: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
    pub t_final: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub sample_every: Option<usize>,
    pub max_steps: Option<usize>,
    pub data: Option<InitialData>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    pub tau: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub full_precision: Option<bool>,
    pub plot: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    /// Applies the file's study keys on top of a preset.
    pub fn apply(&self, spec: &mut StudySpec) {
        let m = &self.model;
        if let Some(beta) = m.beta {
            spec.params.beta = beta;
        }
        if let Some(p) = m.p {
            spec.params.p = p;
        }
        if let Some(regime) = m.regime {
            spec.params.regime = regime;
        }
        let s = &self.study;
        set(&mut spec.alphas, &s.alpha);
        set(&mut spec.eps, &s.eps);
        set(&mut spec.steps, &s.tau);
        set(&mut spec.sizes, &s.n);
        set(&mut spec.dump_times, &s.times);
        set(&mut spec.sample_every, &s.sample_every);
        set(&mut spec.max_steps, &s.max_steps);
        set(&mut spec.data, &s.data);
        if s.t_final.is_some() {
            spec.t_final = s.t_final;
        }
        set(&mut spec.reference.tau, &self.reference.tau);
        set(&mut spec.reference.n, &self.reference.n);
    }
}

pub fn set<T: Clone>(target: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *target = v.clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_override_the_preset() {
        let file: ConfigFile = toml::from_str(
            r#"
            [model]
            beta = 2.0
            [study]
            alpha = [1.5]
            tau = [0.1, 0.05]
            data = "smooth-1d"
            [reference]
            n = 256
            "#,
        )
        .unwrap();
        let mut spec = StudySpec::temporal(2.0, 0.5).unwrap();
        file.apply(&mut spec);
        assert_eq!(spec.params.beta, 2.0);
        assert_eq!(spec.alphas, vec![1.5]);
        assert_eq!(spec.steps, vec![0.1, 0.05]);
        assert_eq!(spec.reference.n, 256);
        assert_eq!(spec.eps, vec![0.5]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<ConfigFile>("[model]\ngamma = 1.0\n").is_err());
    }
}
