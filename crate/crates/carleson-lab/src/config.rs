//! Flat key=value experiment configuration with command-line overrides.

use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};
use crate::signal::Axis;

/// Everything a run needs: operator parameters, grid sizes, sweep ranges,
/// tolerances and the seed. Flags win over file values; file values win over
/// defaults.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub m: u32,
    pub d: u32,
    pub axis: Axis,
    /// Points per line for grid-based experiments.
    pub grid: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub plot: bool,
    /// Band index sweep (inclusive).
    pub ell_range: (i32, i32),
    /// Coefficient scale sweep as dyadic exponents (inclusive).
    pub r_exponents: (u32, u32),
    /// Appendix scale range (inclusive).
    pub k_range: (i32, i32),
    /// Kernel-decay family: "product" or "ttstar".
    pub kind: String,
    /// Sample counts: randomized draws for lemma suites and test signals.
    pub trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: 2,
            d: 3,
            axis: Axis::Y,
            grid: 128,
            seed: 7,
            out_dir: PathBuf::from("lab-out"),
            plot: false,
            ell_range: (2, 8),
            r_exponents: (4, 9),
            k_range: (-2, 1),
            kind: "ttstar".into(),
            trials: 200,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.d < 1 {
            return Err(LabError::Config("m and d must be >= 1".into()));
        }
        if !self.grid.is_power_of_two() || self.grid < 8 {
            return Err(LabError::Config(format!(
                "grid must be a power of two >= 8, got {}",
                self.grid
            )));
        }
        if self.ell_range.0 > self.ell_range.1 || self.r_exponents.0 > self.r_exponents.1 {
            return Err(LabError::Config("sweep ranges must be nonempty".into()));
        }
        if self.trials == 0 {
            return Err(LabError::Config("trials must be positive".into()));
        }
        if self.kind != "product" && self.kind != "ttstar" {
            return Err(LabError::Config(format!(
                "kernel-decay kind must be 'product' or 'ttstar', got '{}'",
                self.kind
            )));
        }
        Ok(())
    }

    /// Parse a flat `key = value` file; '#' starts a comment.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(LabError::Config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                )));
            };
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Apply one key=value setting (used for both files and flag overrides).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| LabError::Config(format!("bad value for {what}: '{value}'"));
        match key {
            "m" => self.m = value.parse().map_err(|_| bad("m"))?,
            "d" => self.d = value.parse().map_err(|_| bad("d"))?,
            "axis" => {
                self.axis = match value {
                    "x" => Axis::X,
                    "y" => Axis::Y,
                    _ => return Err(bad("axis (use x or y)")),
                }
            }
            "grid" => self.grid = value.parse().map_err(|_| bad("grid"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "out" | "out_dir" => self.out_dir = PathBuf::from(value),
            "plot" => self.plot = value.parse().map_err(|_| bad("plot"))?,
            "ell" | "ell_range" => self.ell_range = parse_range(value).ok_or_else(|| bad("ell"))?,
            "r" | "r_exponents" => {
                let (a, b) = parse_range(value).ok_or_else(|| bad("r"))?;
                if a < 0 || b < 0 {
                    return Err(bad("r (exponents must be nonnegative)"));
                }
                self.r_exponents = (a as u32, b as u32);
            }
            "k" | "k_range" => self.k_range = parse_range(value).ok_or_else(|| bad("k"))?,
            "kind" => self.kind = value.to_string(),
            "trials" => self.trials = value.parse().map_err(|_| bad("trials"))?,
            _ => return Err(LabError::Config(format!("unknown configuration key '{key}'"))),
        }
        Ok(())
    }

    /// Header lines recorded in every output file.
    pub fn header(&self, experiment: &str) -> Vec<(String, String)> {
        vec![
            ("experiment".into(), experiment.into()),
            ("seed".into(), self.seed.to_string()),
            ("m".into(), self.m.to_string()),
            ("d".into(), self.d.to_string()),
            (
                "axis".into(),
                match self.axis {
                    Axis::X => "x".into(),
                    Axis::Y => "y".into(),
                },
            ),
            ("grid".into(), self.grid.to_string()),
        ]
    }
}

fn parse_range(value: &str) -> Option<(i32, i32)> {
    let (a, b) = value.split_once(':')?;
    let lo = a.trim().parse().ok()?;
    let hi = b.trim().parse().ok()?;
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let dir = std::env::temp_dir().join("carleson-lab-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.txt");
        std::fs::write(
            &path,
            "m = 3\n# comment\nd=2\naxis = x\nell = 1:6\nseed=99\n",
        )
        .unwrap();
        let cfg = ExperimentConfig::load(&path).unwrap();
        assert_eq!(cfg.m, 3);
        assert_eq!(cfg.d, 2);
        assert_eq!(cfg.axis, Axis::X);
        assert_eq!(cfg.ell_range, (1, 6));
        assert_eq!(cfg.seed, 99);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.set("nonsense", "1").is_err());
        assert!(cfg.set("m", "zero").is_err());
        assert!(cfg.set("axis", "z").is_err());
        assert!(cfg.set("ell", "5:1").is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("grid", "64").unwrap();
        assert_eq!(cfg.grid, 64);
        cfg.validate().unwrap();
        cfg.set("grid", "100").unwrap();
        assert!(cfg.validate().is_err());
    }
}
