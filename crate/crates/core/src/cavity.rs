//! Cavity geometry, mode frequencies and mode functions.
//!
//! The field lives on `[0, R]` with Dirichlet boundary conditions. Global
//! modes are the stationary modes of the full box,
//! `U_n(x, t) = sin(nπx/R) e^{-iΩ_n t} / sqrt(R Ω_n)` with
//! `Ω_n = sqrt((nπ/R)² + μ²)`. A partition introduces sub-regions, each with
//! its own Dirichlet family `u_m` supported on that region only; after the
//! mirror is slammed in at `t = 0` every local mode evolves with its own
//! phase `e^{-iω_m t}`. Mode indices are 1-based throughout.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Relative threshold on |Ω_n² − ω_m²| below which a (local, global) pair is
/// treated as wavenumber-degenerate and the exact equal-wavenumber overlap
/// integral is used instead of the generic closed form.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Physical cavity plus truncation sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    /// Cavity length R.
    pub length: f64,
    /// Field mass μ.
    pub mass: f64,
    /// Number of local modes kept per region (N).
    pub n_local: usize,
    /// Number of global modes summed over (M).
    pub n_global: usize,
}

impl CavityConfig {
    pub fn new(length: f64, mass: f64, n_local: usize, n_global: usize) -> Result<Self> {
        let cfg = Self { length, mass, n_local, n_global };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Default truncation ratio M = 20·N.
    pub fn with_default_truncation(length: f64, mass: f64, n_local: usize) -> Result<Self> {
        Self::new(length, mass, n_local, 20 * n_local)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "cavity length must be positive and finite, got {}",
                self.length
            )));
        }
        if !(self.mass >= 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "mass must be non-negative and finite, got {}",
                self.mass
            )));
        }
        if self.n_local < 1 || self.n_global < self.n_local {
            return Err(Error::InvalidConfig(format!(
                "mode counts must satisfy M >= N >= 1, got N={} M={}",
                self.n_local, self.n_global
            )));
        }
        Ok(())
    }

    /// Ω_n = sqrt((nπ/R)² + μ²).
    pub fn global_frequency(&self, n: usize) -> f64 {
        assert!(n >= 1, "mode indices are 1-based");
        let k = n as f64 * PI / self.length;
        (k * k + self.mass * self.mass).sqrt()
    }

    pub fn global_frequencies(&self) -> Vec<f64> {
        (1..=self.n_global).map(|n| self.global_frequency(n)).collect()
    }
}

/// ω_m = sqrt((mπ/L)² + μ²) for a region of length L.
pub fn local_frequency(region_len: f64, mass: f64, m: usize) -> f64 {
    assert!(m >= 1, "mode indices are 1-based");
    assert!(region_len > 0.0);
    let k = m as f64 * PI / region_len;
    (k * k + mass * mass).sqrt()
}

/// Wavenumber degeneracy test on squared frequencies: |Ω² − ω²| < ε·Ω².
/// The μ² contributions cancel in the difference, so this is a pure
/// wavenumber comparison regardless of mass.
pub fn is_degenerate(omega_global: f64, omega_local: f64) -> bool {
    let g2 = omega_global * omega_global;
    let l2 = omega_local * omega_local;
    (g2 - l2).abs() < DEGENERACY_EPS * g2
}

/// Mode family tag: the global box or one of the sub-regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    Global,
    Left,
    Right,
    A,
    B,
    C,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::Global => "global",
            Region::Left => "left",
            Region::Right => "right",
            Region::A => "a",
            Region::B => "b",
            Region::C => "c",
        };
        write!(f, "{s}")
    }
}

/// One mode of one family; `index` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeId {
    pub region: Region,
    pub index: usize,
}

impl ModeId {
    pub fn new(region: Region, index: usize) -> Self {
        assert!(index >= 1, "mode indices are 1-based");
        Self { region, index }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.region, self.index)
    }
}

/// Sub-interval of the cavity: `[start, start + len]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub start: f64,
    pub len: f64,
}

impl Span {
    pub fn end(&self) -> f64 {
        self.start + self.len
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.start && x < self.end()
    }
}

/// How the cavity is cut at t = 0: one mirror at `r` (regions Left/Right) or
/// two mirrors giving consecutive regions A, B, C with lengths a + b + c = R.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Partition {
    Two { r: f64 },
    Three { a: f64, b: f64, c: f64 },
}

impl Partition {
    pub fn validate(&self, length: f64) -> Result<()> {
        match *self {
            Partition::Two { r } => {
                if !(r > 0.0 && r < length) {
                    return Err(Error::InvalidConfig(format!(
                        "split must satisfy 0 < r < R, got r={r} R={length}"
                    )));
                }
            }
            Partition::Three { a, b, c } => {
                if !(a > 0.0 && b > 0.0 && c > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "three-region lengths must be positive, got {a}, {b}, {c}"
                    )));
                }
                if (a + b + c - length).abs() > 1e-12 * length {
                    return Err(Error::InvalidConfig(format!(
                        "region lengths must sum to R: {a} + {b} + {c} != {length}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The local regions of this partition, in spatial order.
    pub fn regions(&self) -> &'static [Region] {
        match self {
            Partition::Two { .. } => &[Region::Left, Region::Right],
            Partition::Three { .. } => &[Region::A, Region::B, Region::C],
        }
    }

    /// Spatial extent of `region` within a cavity of length `length`.
    ///
    /// Panics if `region` does not belong to this partition (caller bug).
    pub fn span(&self, region: Region, length: f64) -> Span {
        match (*self, region) {
            (Partition::Two { r }, Region::Left) => Span { start: 0.0, len: r },
            (Partition::Two { r }, Region::Right) => Span { start: r, len: length - r },
            (Partition::Three { a, .. }, Region::A) => Span { start: 0.0, len: a },
            (Partition::Three { a, b, .. }, Region::B) => Span { start: a, len: b },
            (Partition::Three { a, b, c }, Region::C) => Span { start: a + b, len: c },
            (_, other) => panic!("region {other} is not part of partition {self:?}"),
        }
    }
}

/// Global stationary mode `U_n(x, t)`. Exactly zero at and outside the walls.
pub fn eval_global_mode(cfg: &CavityConfig, n: usize, x: f64, t: f64) -> Complex64 {
    assert!(n >= 1, "mode indices are 1-based");
    if x <= 0.0 || x >= cfg.length {
        return Complex64::new(0.0, 0.0);
    }
    let omega = cfg.global_frequency(n);
    let amp = (n as f64 * PI * x / cfg.length).sin() / (cfg.length * omega).sqrt();
    amp * Complex64::from_polar(1.0, -omega * t)
}

/// Local mode `u_m(x, t)` on `span`, with its post-slam phase `e^{-iω_m t}`.
/// Exactly zero at the region edges and outside the region.
pub fn eval_local_mode(span: Span, mass: f64, m: usize, x: f64, t: f64) -> Complex64 {
    assert!(m >= 1, "mode indices are 1-based");
    if !span.contains(x) {
        return Complex64::new(0.0, 0.0);
    }
    let omega = local_frequency(span.len, mass, m);
    let amp = (m as f64 * PI * (x - span.start) / span.len).sin() / (span.len * omega).sqrt();
    amp * Complex64::from_polar(1.0, -omega * t)
}
