use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{seeds, Error, Result};

/// Training hyperparameters. The text form is flat `key=value` lines with
/// the field names as keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub embedding_dim: usize,
    pub learning_rate: f64,
    pub outer_epochs: usize,
    pub d_epochs: usize,
    pub g_epochs: usize,
    /// True (and matching fake) samples drawn per center node in every pass.
    pub samples_per_center: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub max_tree_depth: Option<usize>,
    pub reward_clamp: (f64, f64),
    /// Worker threads for the sampling phase. Results do not depend on it.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            embedding_dim: 50,
            learning_rate: 0.001,
            outer_epochs: 10,
            d_epochs: 10,
            g_epochs: 10,
            samples_per_center: 20,
            batch_size: 32,
            seed: 0,
            max_tree_depth: None,
            reward_clamp: crate::generator::REWARD_CLAMP,
            threads: 1,
        }
    }
}

pub const KEYS: [&str; 11] = [
    "embedding_dim",
    "learning_rate",
    "outer_epochs",
    "d_epochs",
    "g_epochs",
    "samples_per_center",
    "batch_size",
    "seed",
    "max_tree_depth",
    "reward_clamp",
    "threads",
];

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("embedding_dim", self.embedding_dim),
            ("d_epochs", self.d_epochs),
            ("g_epochs", self.g_epochs),
            ("samples_per_center", self.samples_per_center),
            ("batch_size", self.batch_size),
            ("threads", self.threads),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument("learning_rate must be positive".into()));
        }
        let (lo, hi) = self.reward_clamp;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidArgument("reward_clamp must be a finite low,high pair".into()));
        }
        if self.max_tree_depth == Some(0) {
            return Err(Error::InvalidArgument("max_tree_depth must be positive".into()));
        }
        Ok(())
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::InvalidArgument(format!("bad value `{value}` for `{key}`"));
        let int = || value.parse::<usize>().map_err(|_| bad());
        match key {
            "embedding_dim" => self.embedding_dim = int()?,
            "learning_rate" => self.learning_rate = value.parse().map_err(|_| bad())?,
            "outer_epochs" => self.outer_epochs = int()?,
            "d_epochs" => self.d_epochs = int()?,
            "g_epochs" => self.g_epochs = int()?,
            "samples_per_center" => self.samples_per_center = int()?,
            "batch_size" => self.batch_size = int()?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "max_tree_depth" => {
                self.max_tree_depth = match value {
                    "none" | "" => None,
                    v => Some(v.parse().map_err(|_| bad())?),
                }
            }
            "reward_clamp" => {
                let (lo, hi) = value.split_once(',').ok_or_else(bad)?;
                self.reward_clamp = (
                    lo.trim().parse().map_err(|_| bad())?,
                    hi.trim().parse().map_err(|_| bad())?,
                );
            }
            "threads" => self.threads = int()?,
            _ => return Err(Error::InvalidArgument(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines on top of `self`. Blank lines and `#`
    /// comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: "<config>".into(),
                line: i + 1,
                message: "expected key=value".into(),
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = TrainConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Every key materialised, one per line, in [`KEYS`] order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let depth = self
            .max_tree_depth
            .map_or_else(|| "none".into(), |d| d.to_string());
        let _ = writeln!(s, "embedding_dim={}", self.embedding_dim);
        let _ = writeln!(s, "learning_rate={}", self.learning_rate);
        let _ = writeln!(s, "outer_epochs={}", self.outer_epochs);
        let _ = writeln!(s, "d_epochs={}", self.d_epochs);
        let _ = writeln!(s, "g_epochs={}", self.g_epochs);
        let _ = writeln!(s, "samples_per_center={}", self.samples_per_center);
        let _ = writeln!(s, "batch_size={}", self.batch_size);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "max_tree_depth={depth}");
        let _ = writeln!(s, "reward_clamp={},{}", self.reward_clamp.0, self.reward_clamp.1);
        let _ = writeln!(s, "threads={}", self.threads);
        s
    }

    /// Hash of the effective configuration, excluding `threads`, which
    /// does not affect results.
    pub fn hash(&self) -> u64 {
        let text: String = self
            .to_text()
            .lines()
            .filter(|l| !l.starts_with("threads="))
            .collect::<Vec<_>>()
            .join("\n");
        seeds::checksum(text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = TrainConfig::default();
        assert_eq!(c.embedding_dim, 50);
        assert_eq!(c.learning_rate, 0.001);
        assert_eq!((c.outer_epochs, c.d_epochs, c.g_epochs), (10, 10, 10));
        assert_eq!(c.samples_per_center, 20);
        assert_eq!(c.batch_size, 32);
        assert_eq!(c.reward_clamp, (-20.0, 0.0));
        c.validate().unwrap();
    }

    #[test]
    fn text_round_trip() {
        let mut c = TrainConfig::default();
        c.max_tree_depth = Some(4);
        c.learning_rate = 0.0123456789;
        c.reward_clamp = (-5.5, -0.25);
        c.seed = u64::MAX;
        let text = c.to_text();
        assert_eq!(TrainConfig::from_text(&text).unwrap(), c);
        for key in KEYS {
            assert!(text.contains(&format!("{key}=")));
        }
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(TrainConfig::from_text("bogus=1").is_err());
        assert!(TrainConfig::from_text("batch_size=abc").is_err());
        assert!(TrainConfig::from_text("missing equals").is_err());
        let c = TrainConfig::from_text("batch_size=0").unwrap();
        assert!(c.validate().is_err());
        let c = TrainConfig::from_text("learning_rate=0").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn thread_count_does_not_change_hash() {
        let mut c = TrainConfig::default();
        let h = c.hash();
        c.threads = 4;
        assert_eq!(c.hash(), h);
        c.seed = 1;
        assert_ne!(c.hash(), h);
    }
}
