//! Tunables, read from `config.json` in the store and overridden by
//! `ONTOREC_*` environment variables.

use ontorec::index::Expansion;
use ontorec::profile::{SignalTable, DEFAULT_ALPHA};
use ontorec::recommend::{DEFAULT_K, DEFAULT_TAU, DEFAULT_THETA};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct Config {
    /// Hierarchy decay γ.
    pub gamma: f64,
    pub expansion: bool,
    /// Learning rate α.
    pub alpha: f64,
    pub signals: SignalTable,
    pub k: usize,
    pub theta: f64,
    pub tau: f64,
    pub bind: String,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            gamma: Expansion::default().decay,
            expansion: true,
            alpha: DEFAULT_ALPHA,
            signals: SignalTable::default(),
            k: DEFAULT_K,
            theta: DEFAULT_THETA,
            tau: DEFAULT_TAU,
            bind: "127.0.0.1:8080".to_owned(),
        }
    }
}

fn parse_var<T: std::str::FromStr>(name: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| ServiceError::Config(format!("{name}={value:?} does not parse")))
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn expansion(&self) -> Expansion {
        Expansion {
            decay: self.gamma,
            enabled: self.expansion,
        }
    }

    /// Apply `ONTOREC_GAMMA`, `ONTOREC_ALPHA`, `ONTOREC_K`, ... from the
    /// given variables. Unrelated names are ignored.
    pub fn apply_overrides<I, K, V>(mut self, vars: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        for (name, value) in vars {
            let (name, value) = (name.as_ref(), value.as_ref());
            match name {
                "ONTOREC_GAMMA" => self.gamma = parse_var(name, value)?,
                "ONTOREC_EXPANSION" => self.expansion = parse_var(name, value)?,
                "ONTOREC_ALPHA" => self.alpha = parse_var(name, value)?,
                "ONTOREC_K" => self.k = parse_var(name, value)?,
                "ONTOREC_THETA" => self.theta = parse_var(name, value)?,
                "ONTOREC_TAU" => self.tau = parse_var(name, value)?,
                "ONTOREC_BIND" => self.bind = value.to_owned(),
                "ONTOREC_SIGNAL_OPENED" => self.signals.opened = parse_var(name, value)?,
                "ONTOREC_SIGNAL_READ_LONG" => self.signals.read_long = parse_var(name, value)?,
                "ONTOREC_SIGNAL_SKIPPED" => self.signals.skipped = parse_var(name, value)?,
                _ => {}
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn with_env(self) -> Result<Self> {
        self.apply_overrides(std::env::vars())
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let signal = |x: f64| (-1.0..=1.0).contains(&x);
        let problem = if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            Some(format!("gamma must lie in (0, 1], got {}", self.gamma))
        } else if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            Some(format!("alpha must lie in (0, 1], got {}", self.alpha))
        } else if !unit(self.theta) {
            Some(format!("theta must lie in [0, 1], got {}", self.theta))
        } else if !unit(self.tau) {
            Some(format!("tau must lie in [0, 1], got {}", self.tau))
        } else if ![self.signals.opened, self.signals.read_long, self.signals.skipped]
            .into_iter()
            .all(signal)
        {
            Some("signal strengths must lie in [-1, 1]".to_owned())
        } else {
            None
        };
        match problem {
            Some(p) => Err(ServiceError::Config(p)),
            None => Ok(()),
        }
    }
}
