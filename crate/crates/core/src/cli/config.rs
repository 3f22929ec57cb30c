use serde::{Deserialize, Serialize};

use crate::energy::{EnergyParams, RobustLossParams};
use crate::graph::PruneOptions;
use crate::transfer::DEFAULT_ANCHOR_COUNT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Cyclic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Verbosity {
    Quiet,
    #[default]
    Normal,
    Verbose,
    Debug,
}

impl Verbosity {
    pub fn level(self) -> log::LevelFilter {
        match self {
            Verbosity::Quiet => log::LevelFilter::Error,
            Verbosity::Normal => log::LevelFilter::Warn,
            Verbosity::Verbose => log::LevelFilter::Info,
            Verbosity::Debug => log::LevelFilter::Debug,
        }
    }
}

/// Run configuration, read from a TOML file. Missing keys take their
/// defaults; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub psi1: RobustLossParams,
    pub psi2: RobustLossParams,
    pub prune: PruneOptions,
    pub mode: Mode,
    pub normalize: bool,
    pub warm_start: bool,
    pub anchor_count: usize,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    pub seed: u64,
    pub verbosity: Verbosity,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            psi1: RobustLossParams::psi1_default(),
            psi2: RobustLossParams::psi2_default(),
            prune: PruneOptions::default(),
            mode: Mode::Cyclic,
            normalize: true,
            warm_start: false,
            anchor_count: DEFAULT_ANCHOR_COUNT,
            threads: None,
            seed: 0,
            verbosity: Verbosity::Normal,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("config value: {0}")]
    Invalid(String),
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.psi1.validate().map_err(|e| ConfigError::Invalid(format!("psi1: {e}")))?;
        self.psi2.validate().map_err(|e| ConfigError::Invalid(format!("psi2: {e}")))?;
        if self.anchor_count == 0 {
            return Err(ConfigError::Invalid("anchor_count must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(ConfigError::Invalid("threads must be positive".into()));
        }
        Ok(())
    }

    pub fn energy(&self) -> EnergyParams {
        EnergyParams { psi1: self.psi1, psi2: self.psi2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::Bowl;
    use crate::graph::RefTagPolicy;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn sections_and_overrides() {
        let cfg = Config::from_toml(
            r#"
mode = "open"
threads = 2
[psi1]
alpha = 1.0
c = 0.3
bowl = "cubic"
[prune]
ref_tags = "all_incoming"
"#,
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::Open);
        assert_eq!(cfg.threads, Some(2));
        assert_eq!(cfg.psi1.bowl, Bowl::Cubic);
        assert_eq!(cfg.psi2, RobustLossParams::psi2_default());
        assert_eq!(cfg.prune.ref_tags, RefTagPolicy::AllIncoming);
        assert!(cfg.prune.turning_points);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(Config::from_toml("colour = 1"), Err(ConfigError::Syntax(_))));
        assert!(matches!(
            Config::from_toml("[psi1]\nalpha = -2.0\nc = 0.0\nbowl = \"quadratic\""),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(Config::from_toml("anchor_count = 0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(Config::from_toml("threads = 0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(Config::from_toml("mode = \"spiral\""), Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = Config { seed: 7, threads: Some(3), ..Config::default() };
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(Config::from_toml(&text).unwrap(), cfg);
    }
}
