//! Global-to-local Bogoliubov transformation tables.
//!
//! Each local mode expands over the global family as
//! `u_m = Σ_n (α_mn U_n + β_mn U_n*)` with
//! `α_mn = (Ω_n + ω_m) V_mn`, `β_mn = (Ω_n − ω_m) V_mn`, where `V_mn` is the
//! spatial overlap of the global mode with the local mode over the region.
//! For a region `[x₀, x₀+L]` the overlap has the closed form
//!
//! ```text
//! V_mn = κ_m [(-1)^m sin(k_n (x₀+L)) − sin(k_n x₀)]
//!        / ( sqrt(R L Ω_n ω_m) (Ω_n² − ω_m²) ),      κ_m = mπ/L, k_n = nπ/R,
//! ```
//!
//! with a removable 0/0 at equal wavenumbers where the exact sine-product
//! integral `(L/2) cos(k_n x₀)` takes over. Sine factors at the cavity walls
//! are dropped exactly (they vanish identically) so wall-adjacent regions
//! match the textbook single-term expressions to the last bit.

use crate::cavity::{
    self, is_degenerate, CavityConfig, ModeId, Partition, Region, Span,
};
use crate::error::Result;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Overlap `V_mn` of global mode `n` with local mode `m` on `span` at t = 0.
pub fn overlap(cfg: &CavityConfig, span: Span, m: usize, n: usize) -> f64 {
    assert!(m >= 1 && n >= 1, "mode indices are 1-based");
    let big_r = cfg.length;
    let len = span.len;
    let omega_g = cfg.global_frequency(n);
    let omega_l = cavity::local_frequency(len, cfg.mass, m);
    let k = n as f64 * PI / big_r;
    let norm = (big_r * len * omega_g * omega_l).sqrt();

    if is_degenerate(omega_g, omega_l) {
        return (len / 2.0) * (k * span.start).cos() / norm;
    }

    let kappa = m as f64 * PI / len;
    let at_wall = |x: f64| x <= 0.0 || (x - big_r).abs() <= 1e-12 * big_r;
    let sin_end = if at_wall(span.end()) { 0.0 } else { (k * span.end()).sin() };
    let sin_start = if at_wall(span.start) { 0.0 } else { (k * span.start).sin() };
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let numerator = kappa * (sign * sin_end - sin_start);
    numerator / (norm * (omega_g * omega_g - omega_l * omega_l))
}

/// Full transformation table for one region.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BogoliubovTable {
    pub region: Region,
    pub span: Span,
    pub cavity: CavityConfig,
    /// N×M overlaps V.
    pub v: DMatrix<f64>,
    /// N×M coefficients α = (Ω_n + ω_m) V.
    pub alpha: DMatrix<f64>,
    /// N×M coefficients β = (Ω_n − ω_m) V.
    pub beta: DMatrix<f64>,
    /// ω_m, m = 1..N.
    pub local_freqs: Vec<f64>,
    /// Ω_n, n = 1..M.
    pub global_freqs: Vec<f64>,
}

impl BogoliubovTable {
    pub fn n_local(&self) -> usize {
        self.cavity.n_local
    }

    pub fn n_global(&self) -> usize {
        self.cavity.n_global
    }

    pub fn mode_ids(&self) -> Vec<ModeId> {
        (1..=self.n_local()).map(|i| ModeId::new(self.region, i)).collect()
    }
}

/// Build the table for `region` of `partition`. Rows are filled in parallel;
/// the result is independent of thread count.
pub fn build_table(
    cfg: &CavityConfig,
    partition: &Partition,
    region: Region,
) -> Result<BogoliubovTable> {
    cfg.validate()?;
    partition.validate(cfg.length)?;
    let span = partition.span(region, cfg.length);
    let n = cfg.n_local;
    let m = cfg.n_global;

    let local_freqs: Vec<f64> =
        (1..=n).map(|i| cavity::local_frequency(span.len, cfg.mass, i)).collect();
    let global_freqs = cfg.global_frequencies();

    let rows: Vec<Vec<f64>> = (1..=n)
        .into_par_iter()
        .map(|mi| (1..=m).map(|ni| overlap(cfg, span, mi, ni)).collect())
        .collect();
    let v = DMatrix::from_fn(n, m, |i, j| rows[i][j]);
    let alpha = DMatrix::from_fn(n, m, |i, j| (global_freqs[j] + local_freqs[i]) * v[(i, j)]);
    let beta = DMatrix::from_fn(n, m, |i, j| (global_freqs[j] - local_freqs[i]) * v[(i, j)]);

    Ok(BogoliubovTable { region, span, cavity: *cfg, v, alpha, beta, local_freqs, global_freqs })
}

/// Build tables for every region of the partition, in spatial order.
pub fn build_tables(cfg: &CavityConfig, partition: &Partition) -> Result<Vec<BogoliubovTable>> {
    partition.regions().iter().map(|&z| build_table(cfg, partition, z)).collect()
}

/// Truncated Wronskian condition residuals.
///
/// For an exact transformation `Σ_k (α_mk α_nk − β_mk β_nk) = δ_mn` and
/// `Σ_k (α_mk β_nk − β_mk α_nk) = 0`; with a second table the same sums taken
/// across two regions must both vanish. At finite M the residuals measure
/// truncation quality.
#[derive(Clone, Debug)]
pub struct WronskianResidual {
    /// `α α'ᵀ − β β'ᵀ` minus identity (same-table case only).
    pub normalization: DMatrix<f64>,
    /// `α β'ᵀ − β α'ᵀ`.
    pub symmetry: DMatrix<f64>,
}

impl WronskianResidual {
    pub fn max_abs(&self) -> f64 {
        let a = self.normalization.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let b = self.symmetry.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        a.max(b)
    }
}

/// Residuals for one table against itself (`partner = None`) or across two
/// region tables of the same cavity.
pub fn wronskian_residual(
    table: &BogoliubovTable,
    partner: Option<&BogoliubovTable>,
) -> WronskianResidual {
    let other = partner.unwrap_or(table);
    assert_eq!(
        table.n_global(),
        other.n_global(),
        "tables must share the global truncation"
    );
    let mut normalization =
        &table.alpha * other.alpha.transpose() - &table.beta * other.beta.transpose();
    if partner.is_none() {
        for i in 0..normalization.nrows() {
            normalization[(i, i)] -= 1.0;
        }
    }
    let symmetry = &table.alpha * other.beta.transpose() - &table.beta * other.alpha.transpose();
    WronskianResidual { normalization, symmetry }
}

/// Expected particle number per local mode in the global vacuum:
/// `⟨n_m⟩ = Σ_n β_mn²`.
pub fn particle_spectrum(table: &BogoliubovTable) -> Vec<f64> {
    (0..table.n_local())
        .map(|i| table.beta.row(i).iter().map(|b| b * b).sum())
        .collect()
}

/// Max Wronskian residual at a sequence of global truncations, for
/// convergence reporting.
pub fn wronskian_sweep(
    length: f64,
    mass: f64,
    n_local: usize,
    partition: &Partition,
    region: Region,
    truncations: &[usize],
) -> Result<Vec<f64>> {
    truncations
        .iter()
        .map(|&m| {
            let cfg = CavityConfig::new(length, mass, n_local, m)?;
            let t = build_table(&cfg, partition, region)?;
            Ok(wronskian_residual(&t, None).max_abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_split() -> (CavityConfig, Partition) {
        (CavityConfig::new(1.0, 0.0, 4, 64).unwrap(), Partition::Two { r: 0.5 })
    }

    #[test]
    fn overlap_closed_form_value() {
        let (cfg, p) = half_split();
        let span = p.span(Region::Left, 1.0);
        let v = overlap(&cfg, span, 1, 1);
        assert!((v - 2.0 / (3.0 * PI * PI)).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn overlap_degenerate_value() {
        let (cfg, p) = half_split();
        let span = p.span(Region::Left, 1.0);
        // m=1, n=2 at r=R/2 is exactly degenerate: ω_1 = Ω_2 = 2π.
        let v = overlap(&cfg, span, 1, 2);
        let expect = 0.25 / (0.5 * 2.0 * PI * 2.0 * PI).sqrt();
        assert!((v - expect).abs() < 1e-15, "got {v} want {expect}");
    }

    #[test]
    fn degenerate_beta_vanishes_exactly() {
        let (cfg, p) = half_split();
        let t = build_table(&cfg, &p, Region::Left).unwrap();
        for m in 1..=cfg.n_local {
            let b = t.beta[(m - 1, 2 * m - 1)];
            assert_eq!(b, 0.0, "beta at degenerate pair (m={m}, n={}) must vanish", 2 * m);
            assert!(t.alpha[(m - 1, 2 * m - 1)].abs() > 1e-3);
        }
    }

    #[test]
    fn right_table_mirrors_left_up_to_sign() {
        let (cfg, p) = half_split();
        let l = build_table(&cfg, &p, Region::Left).unwrap();
        let r = build_table(&cfg, &p, Region::Right).unwrap();
        for i in 0..cfg.n_local {
            for j in 0..cfg.n_global {
                let sign = if (i + 1 + j + 1) % 2 == 0 { 1.0 } else { -1.0 };
                let a = l.v[(i, j)];
                let b = r.v[(i, j)];
                assert!(
                    (b - sign * a).abs() < 1e-12 * a.abs().max(1e-3),
                    "m={} n={}: left={a} right={b}",
                    i + 1,
                    j + 1
                );
            }
        }
    }

    #[test]
    fn overlap_continuous_across_degeneracy_in_split() {
        // Perturb the split around the degenerate point r = R/2 for (m, n) =
        // (1, 2); the closed form and the equal-wavenumber branch must agree.
        let cfg = CavityConfig::new(1.0, 0.0, 2, 8).unwrap();
        let eval = |r: f64| {
            let p = Partition::Two { r };
            overlap(&cfg, p.span(Region::Left, 1.0), 1, 2)
        };
        let delta = 1e-7;
        let center = eval(0.5);
        let lo = eval(0.5 - delta);
        let hi = eval(0.5 + delta);
        assert!((lo - center).abs() / center.abs() < 1e-6, "lo={lo} center={center}");
        assert!((hi - center).abs() / center.abs() < 1e-6, "hi={hi} center={center}");
        // Same for a massive field, where degeneracy still sits at r = R/2.
        let heavy = CavityConfig::new(1.0, 20.0, 2, 8).unwrap();
        let eval_h = |r: f64| {
            let p = Partition::Two { r };
            overlap(&heavy, p.span(Region::Left, 1.0), 2, 4)
        };
        let c = eval_h(0.5);
        assert!((eval_h(0.5 - delta) - c).abs() / c.abs() < 1e-6);
        assert!((eval_h(0.5 + delta) - c).abs() / c.abs() < 1e-6);
    }

    #[test]
    fn wronskian_self_residual_structure() {
        let cfg = CavityConfig::new(1.0, 0.0, 8, 160).unwrap();
        let p = Partition::Two { r: 0.5 };
        let t = build_table(&cfg, &p, Region::Left).unwrap();
        let res = wronskian_residual(&t, None);
        // Diagonal of the second condition is identically zero.
        for i in 0..8 {
            assert_eq!(res.symmetry[(i, i)], 0.0);
        }
        // Antisymmetry of the second condition is exact algebra.
        for i in 0..8 {
            for j in 0..8 {
                assert!((res.symmetry[(i, j)] + res.symmetry[(j, i)]).abs() < 1e-13);
            }
        }
        assert!(res.max_abs() < 1e-2, "truncated residual too large: {}", res.max_abs());
    }

    #[test]
    fn wronskian_residual_decreases_with_truncation() {
        let p = Partition::Two { r: 0.5 };
        let sweep = wronskian_sweep(1.0, 0.0, 8, &p, Region::Left, &[80, 160, 320, 640]).unwrap();
        for w in sweep.windows(2) {
            assert!(w[1] < w[0], "sweep not decreasing: {sweep:?}");
        }
    }

    #[test]
    fn particle_spectrum_value_and_shape() {
        // High truncation pins ⟨n_1⟩ near its converged value 3/π² − 1/4.
        let cfg = CavityConfig::new(1.0, 0.0, 8, 4000).unwrap();
        let p = Partition::Two { r: 0.5 };
        let t = build_table(&cfg, &p, Region::Left).unwrap();
        let n = particle_spectrum(&t);
        let exact = 3.0 / (PI * PI) - 0.25;
        assert!((n[0] - exact).abs() < 1e-5, "n1={} exact={exact}", n[0]);
        assert!(n.iter().all(|&x| x >= 0.0));
        for w in n.windows(2) {
            assert!(w[1] < w[0], "massless spectrum must decrease: {n:?}");
        }
    }

    #[test]
    fn cross_region_wronskian_vanishes_in_the_limit() {
        let p = Partition::Two { r: 0.5 };
        let resid = |m: usize| {
            let cfg = CavityConfig::new(1.0, 0.0, 4, m).unwrap();
            let l = build_table(&cfg, &p, Region::Left).unwrap();
            let r = build_table(&cfg, &p, Region::Right).unwrap();
            wronskian_residual(&l, Some(&r)).max_abs()
        };
        let coarse = resid(80);
        let fine = resid(640);
        assert!(fine < coarse, "cross residual must shrink: {coarse} -> {fine}");
        assert!(fine < 1e-2);
    }

    #[test]
    fn three_region_tables_build() {
        let cfg = CavityConfig::new(1.0, 0.0, 3, 30).unwrap();
        let p = Partition::Three { a: 1.0 / 3.0, b: 1.0 / 3.0, c: 1.0 / 3.0 };
        let tables = build_tables(&cfg, &p).unwrap();
        assert_eq!(tables.len(), 3);
        // Equal thirds: degenerate pairs at n = 3m; β vanishes there.
        for t in &tables {
            for m in 1..=3usize {
                assert_eq!(t.beta[(m - 1, 3 * m - 1)], 0.0);
            }
        }
        // A and C are mirror images: equal-magnitude overlaps. Absolute
        // tolerance, because entries that vanish analytically come out as
        // float noise of unequal size on the two sides.
        for i in 0..3 {
            for j in 0..cfg.n_global {
                let a = tables[0].v[(i, j)].abs();
                let c = tables[2].v[(i, j)].abs();
                assert!((a - c).abs() < 1e-12, "m={} n={}", i + 1, j + 1);
            }
        }
    }
}
