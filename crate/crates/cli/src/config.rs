//! Suite configuration: a plain `key = value` file plus flag overrides.

use std::fmt;
use std::path::Path;

use serde::Serialize;

pub const DEFAULT_SEED: u64 = 0x5eed_f0c5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Car,
    Clifford,
    EvenClifford,
    Free,
    Trivial,
}

impl ModelKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "car" => Self::Car,
            "clifford" => Self::Clifford,
            "even-clifford" => Self::EvenClifford,
            "free" => Self::Free,
            "trivial" => Self::Trivial,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub seed: u64,
    /// Restricts the model-sweeping suites to one kind.
    pub kind: Option<ModelKind>,
    /// Internal dimension `n`; `None` sweeps the default set.
    pub rank: Option<usize>,
    /// Number of cells `m`; `None` sweeps the default set.
    pub cells: Option<usize>,
    pub width: f64,
    /// Refinement depth of the addit computations.
    pub depth: u32,
    /// Alphabet size and word length of the free-basis checks.
    pub letters: usize,
    pub max_len: usize,
    pub max_dim: usize,
    pub max_ops: usize,
    pub relation_tol: f64,
    pub residual_tol: f64,
    pub angle_tol: f64,
    /// Number of random process pairs in the Ito checks.
    pub samples: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            kind: None,
            rank: None,
            cells: None,
            width: 0.5,
            depth: 2,
            letters: 3,
            max_len: 6,
            max_dim: 1 << 16,
            max_ops: 1024,
            relation_tol: 1e-12,
            residual_tol: 1e-10,
            angle_tol: 1e-8,
            samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(key: &str, value: &str) -> ConfigError {
    ConfigError(format!("invalid value {value:?} for {key}"))
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let mut c = Self::default();
        c.apply_text(&text)?;
        Ok(c)
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError(format!("line {}: expected key = value", no + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let int = |v: &str| v.parse::<usize>().map_err(|_| bad(key, v));
        let real = |v: &str| v.parse::<f64>().map_err(|_| bad(key, v));
        match key {
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value))?,
            "kind" => self.kind = Some(ModelKind::parse(value).ok_or_else(|| bad(key, value))?),
            "rank" | "n" => self.rank = Some(int(value)?),
            "cells" | "m" => self.cells = Some(int(value)?),
            "width" | "delta" => self.width = real(value)?,
            "depth" => self.depth = value.parse().map_err(|_| bad(key, value))?,
            "letters" | "d" => self.letters = int(value)?,
            "max_len" | "L" => self.max_len = int(value)?,
            "max_dim" => self.max_dim = int(value)?,
            "max_ops" => self.max_ops = int(value)?,
            "relation_tol" => self.relation_tol = real(value)?,
            "residual_tol" => self.residual_tol = real(value)?,
            "angle_tol" => self.angle_tol = real(value)?,
            "samples" => self.samples = int(value)?,
            _ => return Err(ConfigError(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, t) in [("relation_tol", self.relation_tol), ("residual_tol", self.residual_tol), ("angle_tol", self.angle_tol)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(ConfigError(format!("{name} must lie in (0, 1)")));
            }
        }
        if self.max_dim == 0 || self.max_ops == 0 {
            return Err(ConfigError("caps must be positive".into()));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(ConfigError("width must be positive".into()));
        }
        if self.depth == 0 || self.letters == 0 || self.rank == Some(0) || self.cells == Some(0) {
            return Err(ConfigError("depth, letters, rank and cells must be positive".into()));
        }
        Ok(())
    }

    /// `(n, m)` pairs to sweep, or the configured single pair.
    pub fn pairs(&self, defaults: &[(usize, usize)]) -> Vec<(usize, usize)> {
        match (self.rank, self.cells) {
            (None, None) => defaults.to_vec(),
            (Some(n), None) => {
                let mut v: Vec<_> = defaults.iter().filter(|p| p.0 == n).copied().collect();
                if v.is_empty() {
                    v.push((n, 2));
                }
                v
            }
            (None, Some(m)) => {
                let mut v: Vec<_> = defaults.iter().filter(|p| p.1 == m).copied().collect();
                if v.is_empty() {
                    v.push((1, m));
                }
                v
            }
            (Some(n), Some(m)) => vec![(n, m)],
        }
    }

    pub fn wants(&self, kind: ModelKind) -> bool {
        self.kind.is_none_or(|k| k == kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let mut c = Config::default();
        c.apply_text("# sizes\nn = 2\nm=3 # cells\nkind = clifford\nangle_tol = 1e-9\n").unwrap();
        assert_eq!((c.rank, c.cells, c.kind), (Some(2), Some(3), Some(ModelKind::Clifford)));
        assert_eq!(c.angle_tol, 1e-9);
        assert_eq!(c.pairs(&[(1, 3)]), vec![(2, 3)]);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = Config::default();
        assert!(c.apply_text("nonsense").is_err());
        assert!(Config::default().apply_text("color = red").is_err());
        assert!(Config::default().apply_text("residual_tol = 2").is_err());
        assert!(Config::default().apply_text("max_dim = 0").is_err());
    }
}
