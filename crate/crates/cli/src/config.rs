//! Run parameters: defaults, optional `key=value` config file, command-line
//! flags. Later sources override earlier ones, flags last.

use std::path::{Path, PathBuf};
use vacsim_core::cavity::{CavityConfig, Partition};
use vacsim_core::error::{Error, Result};

/// Fully resolved parameters shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub length: f64,
    pub mass: f64,
    pub partition: Partition,
    pub n_modes: usize,
    /// Cavity-mode truncation; defaults to 20 × n_modes.
    pub n_global: Option<usize>,
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

impl Scenario {
    pub fn cavity(&self) -> Result<CavityConfig> {
        match self.n_global {
            Some(m) => CavityConfig::new(self.length, self.mass, self.n_modes, m),
            None => CavityConfig::with_default_truncation(self.length, self.mass, self.n_modes),
        }
    }
}

/// One source of settings; every field optional so sources can be stacked.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub length: Option<f64>,
    pub mass: Option<f64>,
    pub split: Option<f64>,
    pub three: Option<(f64, f64, f64)>,
    pub modes: Option<usize>,
    pub global_modes: Option<usize>,
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

impl Settings {
    /// Apply `over` on top of `self`. A partition choice in `over` replaces
    /// any partition choice below it, whichever shape either has.
    pub fn overlay(mut self, over: Settings) -> Settings {
        if over.split.is_some() || over.three.is_some() {
            self.split = None;
            self.three = None;
        }
        Settings {
            length: over.length.or(self.length),
            mass: over.mass.or(self.mass),
            split: over.split.or(self.split),
            three: over.three.or(self.three),
            modes: over.modes.or(self.modes),
            global_modes: over.global_modes.or(self.global_modes),
            jobs: over.jobs.or(self.jobs),
            cache_dir: over.cache_dir.or(self.cache_dir),
        }
    }

    /// Parse a config file of `key = value` lines. `#` starts a comment,
    /// blank lines are skipped, later keys win.
    pub fn from_file(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = format!("{}:{}", path.display(), lineno + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("{at}: expected key=value, got {line:?}"))
            })?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "length" => s.length = Some(parse_num(value, &at)?),
                "mass" => s.mass = Some(parse_num(value, &at)?),
                "split" => {
                    s.split = Some(parse_num(value, &at)?);
                    s.three = None;
                }
                "three" => {
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(Error::InvalidConfig(format!(
                            "{at}: three wants a,b,c lengths, got {value:?}"
                        )));
                    }
                    s.three = Some((
                        parse_num(parts[0], &at)?,
                        parse_num(parts[1], &at)?,
                        parse_num(parts[2], &at)?,
                    ));
                    s.split = None;
                }
                "modes" => s.modes = Some(parse_int(value, &at)?),
                "global_modes" => s.global_modes = Some(parse_int(value, &at)?),
                "jobs" => s.jobs = Some(parse_int(value, &at)?),
                "cache_dir" => s.cache_dir = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::InvalidConfig(format!("{at}: unknown key {other:?}")))
                }
            }
        }
        Ok(s)
    }

    pub fn resolve(self) -> Result<Scenario> {
        let length = self.length.unwrap_or(1.0);
        let partition = match (self.split, self.three) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "split and three are mutually exclusive".into(),
                ))
            }
            (Some(r), None) => Partition::Two { r },
            (None, Some((a, b, c))) => Partition::Three { a, b, c },
            (None, None) => Partition::Two { r: length / 2.0 },
        };
        partition.validate(length)?;
        let scenario = Scenario {
            length,
            mass: self.mass.unwrap_or(0.0),
            partition,
            n_modes: self.modes.unwrap_or(32),
            n_global: self.global_modes,
            jobs: self.jobs,
            cache_dir: self.cache_dir,
        };
        scenario.cavity()?;
        Ok(scenario)
    }
}

fn parse_num(value: &str, at: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{at}: {value:?} is not a number")))
}

fn parse_int(value: &str, at: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{at}: {value:?} is not a positive integer")))
}
