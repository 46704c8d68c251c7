//! The four subcommands: spectrum, negativity-map, profile, check.

use crate::cache::TableCache;
use crate::config::Scenario;
use clap::ValueEnum;
use serde_json::{json, Value};
use std::fmt;
use std::io;
use std::path::PathBuf;
use vacsim_core::bogoliubov::{particle_spectrum, wronskian_residual, BogoliubovTable};
use vacsim_core::cavity::{self, CavityConfig, ModeId, Partition, Region};
use vacsim_core::covariance::{
    assemble_joint, assemble_region, physicality_deficit, symplectic_residual, CovarianceMatrix,
    QuadOrdering,
};
use vacsim_core::entanglement::{entropy_term, negativity_map, symplectic_spectrum};
use vacsim_core::error::Error;
use vacsim_core::export::{fmt_f64, write_csv};
use vacsim_core::quadrature::integrate;
use vacsim_core::williamson::{diagonal_basis_joint, spatial_profile, williamson, DiagResult};

pub enum CliError {
    Core(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    /// 2 for configuration mistakes the caller can fix, 1 for everything
    /// else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::InvalidConfig(_)) => 2,
            _ => 1,
        }
    }
}

type CmdResult<T = ()> = Result<T, CliError>;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum RegionChoice {
    Left,
    Right,
    A,
    B,
    C,
    Joint,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum BasisChoice {
    /// Plain region modes.
    U,
    /// Per-region diagonal modes.
    V,
}

enum Target {
    One(Region),
    Joint,
}

fn resolve_region(choice: Option<RegionChoice>, partition: &Partition) -> CmdResult<Target> {
    let regions = partition.regions();
    let Some(choice) = choice else {
        return Ok(Target::One(regions[0]));
    };
    let wanted = match choice {
        RegionChoice::Left => Region::Left,
        RegionChoice::Right => Region::Right,
        RegionChoice::A => Region::A,
        RegionChoice::B => Region::B,
        RegionChoice::C => Region::C,
        RegionChoice::Joint => return Ok(Target::Joint),
    };
    if regions.contains(&wanted) {
        Ok(Target::One(wanted))
    } else {
        Err(Error::InvalidConfig(format!(
            "region {wanted} does not exist in this partition (have: {})",
            regions
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ))
        .into())
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn scenario_json(scn: &Scenario, cfg: &CavityConfig) -> Value {
    let partition = match scn.partition {
        Partition::Two { r } => json!({"kind": "two", "split": r}),
        Partition::Three { a, b, c } => json!({"kind": "three", "a": a, "b": b, "c": c}),
    };
    json!({
        "length": scn.length,
        "mass": scn.mass,
        "partition": partition,
        "modes": cfg.n_local,
        "global_modes": cfg.n_global,
    })
}

fn render_table(
    format: Format,
    headers: &[&str],
    rows: &[Vec<f64>],
    meta: Value,
) -> CmdResult<String> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, headers, rows)?;
            Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
        }
        Format::Json => {
            let mut doc = meta;
            doc["columns"] = json!(headers);
            doc["rows"] = json!(rows);
            let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
            text.push('\n');
            Ok(text)
        }
    }
}

/// Symplectic spectrum, per-eigenvalue entropy and mean occupation numbers
/// of a region (or of the joint state).
pub fn spectrum(
    scn: &Scenario,
    region: Option<RegionChoice>,
    format: Format,
    out: &Option<PathBuf>,
) -> CmdResult {
    let cfg = scn.cavity()?;
    let cache = TableCache::new(scn.cache_dir.clone());
    let target = resolve_region(region, &scn.partition)?;
    let (cov, occupations, region_name) = match target {
        Target::One(region) => {
            let table = cache.table(&cfg, &scn.partition, region)?;
            let occ = particle_spectrum(&table);
            (assemble_region(&table), occ, region.to_string())
        }
        Target::Joint => {
            let tables: Vec<BogoliubovTable> = scn
                .partition
                .regions()
                .iter()
                .map(|&r| cache.table(&cfg, &scn.partition, r))
                .collect::<Result<_, _>>()?;
            let refs: Vec<&BogoliubovTable> = tables.iter().collect();
            let occ: Vec<f64> = tables.iter().flat_map(particle_spectrum).collect();
            (assemble_joint(&refs), occ, "joint".to_string())
        }
    };
    let d = williamson(&cov)?;
    let total_entropy: f64 = d.nu.iter().map(|&v| entropy_term(v)).sum();
    let clamped = d.nu.iter().filter(|&&v| v < 1.0 - 1e-9).count();
    let deficit = physicality_deficit(&cov);
    let rows: Vec<Vec<f64>> = d
        .nu
        .iter()
        .zip(&occupations)
        .enumerate()
        .map(|(i, (&nu, &occ))| vec![(i + 1) as f64, nu, entropy_term(nu), occ])
        .collect();
    let labels: Vec<String> = cov.modes.iter().map(|m| m.to_string()).collect();
    let meta = json!({
        "scenario": scenario_json(scn, &cfg),
        "region": region_name,
        "modes": labels,
        "log": "natural",
        "total_entropy": total_entropy,
        "eigenvalues_clamped_below_one": clamped,
        "physicality_deficit": deficit,
    });
    let text = render_table(
        format,
        &["index", "symplectic_eigenvalue", "entropy_term", "mean_occupation"],
        &rows,
        meta,
    )?;
    emit(out, &text)
}

/// Pairwise log-negativity between the two outer regions, in the plain or
/// the diagonal basis.
pub fn map(
    scn: &Scenario,
    basis: BasisChoice,
    window: usize,
    format: Format,
    out: &Option<PathBuf>,
) -> CmdResult {
    let cfg = scn.cavity()?;
    let cache = TableCache::new(scn.cache_dir.clone());
    let (row_region, col_region) = match scn.partition {
        Partition::Two { .. } => (Region::Left, Region::Right),
        Partition::Three { .. } => (Region::A, Region::C),
    };
    let t_row = cache.table(&cfg, &scn.partition, row_region)?;
    let t_col = cache.table(&cfg, &scn.partition, col_region)?;
    let joint = assemble_joint(&[&t_row, &t_col]);
    let joint = match basis {
        BasisChoice::U => joint,
        BasisChoice::V => {
            let d_row = williamson(&assemble_region(&t_row))?;
            let d_col = williamson(&assemble_region(&t_col))?;
            diagonal_basis_joint(&joint, &[&d_row, &d_col])
        }
    };
    let w = window.max(1).min(cfg.n_local);
    let rows_ids: Vec<ModeId> = (1..=w).map(|i| ModeId::new(row_region, i)).collect();
    let cols_ids: Vec<ModeId> = (1..=w).map(|i| ModeId::new(col_region, i)).collect();
    let matrix = negativity_map(&joint, &rows_ids, &cols_ids)?;
    let mut rows = Vec::with_capacity(w * w);
    for i in 0..w {
        for j in 0..w {
            rows.push(vec![(i + 1) as f64, (j + 1) as f64, matrix[(i, j)]]);
        }
    }
    let meta = json!({
        "scenario": scenario_json(scn, &cfg),
        "basis": match basis { BasisChoice::U => "u", BasisChoice::V => "v" },
        "row_region": row_region.to_string(),
        "col_region": col_region.to_string(),
        "window": w,
        "log": "natural",
    });
    let text = render_table(format, &["row_mode", "col_mode", "log_negativity"], &rows, meta)?;
    emit(out, &text)
}

/// |v_l(x, t)| of one diagonal mode on a grid spanning the whole cavity.
pub fn profile(
    scn: &Scenario,
    region: Option<RegionChoice>,
    mode_index: usize,
    times: &[f64],
    grid: usize,
    format: Format,
    out: &Option<PathBuf>,
) -> CmdResult {
    let cfg = scn.cavity()?;
    if grid < 2 {
        return Err(Error::InvalidConfig(format!("grid needs at least 2 points, got {grid}")).into());
    }
    if mode_index < 1 || mode_index > cfg.n_local {
        return Err(Error::InvalidConfig(format!(
            "mode index {mode_index} outside 1..={}",
            cfg.n_local
        ))
        .into());
    }
    let target = resolve_region(region, &scn.partition)?;
    let Target::One(region) = target else {
        return Err(Error::InvalidConfig("profile wants a single region, not joint".into()).into());
    };
    let cache = TableCache::new(scn.cache_dir.clone());
    let table = cache.table(&cfg, &scn.partition, region)?;
    let span = scn.partition.span(region, scn.length);
    let d = williamson(&assemble_region(&table))?;
    let times: Vec<f64> = if times.is_empty() { vec![0.0] } else { times.to_vec() };
    let xs: Vec<f64> = (0..grid)
        .map(|i| scn.length * i as f64 / (grid - 1) as f64)
        .collect();
    let mut rows = Vec::with_capacity(times.len() * grid);
    for &t in &times {
        let values = spatial_profile(&d, span, scn.mass, mode_index, t, &xs);
        for (x, v) in xs.iter().zip(values) {
            rows.push(vec![t, *x, v]);
        }
    }
    let meta = json!({
        "scenario": scenario_json(scn, &cfg),
        "region": region.to_string(),
        "mode_index": mode_index,
        "symplectic_eigenvalue": d.nu[mode_index - 1],
        "times": times,
        "grid": grid,
    });
    let text = render_table(format, &["t", "x", "abs_v"], &rows, meta)?;
    emit(out, &text)
}

struct Checker {
    all_pass: bool,
}

impl Checker {
    fn report(&mut self, name: &str, metric: &str, value: f64, limit: f64) {
        let ok = value <= limit;
        self.all_pass &= ok;
        println!(
            "check {name}: {} ({metric} = {}, limit {})",
            if ok { "PASS" } else { "FAIL" },
            fmt_f64(value),
            fmt_f64(limit)
        );
    }

    /// A checked computation that did not even produce a number.
    fn fail(&mut self, name: &str, why: &str) {
        self.all_pass = false;
        println!("check {name}: FAIL ({why})");
    }
}

/// Internal consistency checks on the configured scenario; returns whether
/// everything passed.
pub fn check(scn: &Scenario) -> CmdResult<bool> {
    let cfg = scn.cavity()?;
    let cache = TableCache::new(scn.cache_dir.clone());
    let mut checker = Checker { all_pass: true };

    // Closed-form overlaps against direct integration of the mode products.
    let mut worst_rel = 0.0f64;
    for &region in scn.partition.regions() {
        let span = scn.partition.span(region, scn.length);
        for m in 1..=cfg.n_local.min(4) {
            for n in 1..=cfg.n_global.min(8) {
                let closed = vacsim_core::bogoliubov::overlap(&cfg, span, m, n);
                let q = integrate(
                    |x| {
                        cavity::eval_local_mode(span, scn.mass, m, x, 0.0).re
                            * cavity::eval_global_mode(&cfg, n, x, 0.0).re
                    },
                    span.start,
                    span.end(),
                    1e-13,
                );
                let rel = (closed - q.value).abs() / q.value.abs().max(1e-6);
                worst_rel = worst_rel.max(rel);
            }
        }
    }
    checker.report("overlap-quadrature", "max relative error", worst_rel, 1e-8);

    // Truncated orthonormality of the transformation.
    let tables: Vec<BogoliubovTable> = scn
        .partition
        .regions()
        .iter()
        .map(|&r| cache.table(&cfg, &scn.partition, r))
        .collect::<Result<_, _>>()?;
    let mut worst_w = 0.0f64;
    for t in &tables {
        worst_w = worst_w.max(wronskian_residual(t, None).max_abs());
    }
    if tables.len() > 1 {
        worst_w = worst_w.max(wronskian_residual(&tables[0], Some(&tables[1])).max_abs());
    }
    checker.report("wronskian", "max residual", worst_w, 1e-2);

    // Structure of the assembled joint state.
    let refs: Vec<&BogoliubovTable> = tables.iter().collect();
    let joint = assemble_joint(&refs);
    let n = joint.n_modes();
    let blocked = joint.reorder(QuadOrdering::Blocked);
    let cross = blocked
        .data
        .view((0, n), (n, n))
        .iter()
        .fold(0.0f64, |a, x| a.max(x.abs()));
    checker.report(
        "covariance-structure",
        "max asymmetry and q-p coupling",
        joint.max_asymmetry().max(cross),
        1e-12,
    );

    checker.report(
        "physicality",
        "uncertainty deficit",
        physicality_deficit(&joint),
        1e-6,
    );

    // The normal form of the first region: S_D must be symplectic and must
    // actually diagonalize the state, and both spectrum routes must agree.
    // A state too truncated to diagonalize counts as a failure, not an
    // abort.
    let region_cov = assemble_region(&tables[0]);
    match williamson(&region_cov) {
        Ok(d) => {
            checker.report(
                "normal-form-symplectic",
                "S Ω Sᵀ residual",
                symplectic_residual(&d.s_d, QuadOrdering::Blocked),
                1e-9,
            );
            checker.report(
                "normal-form-diagonal",
                "off-normal residual",
                normal_form_residual(&region_cov, &d),
                1e-8 * d.nu[0],
            );
            match symplectic_spectrum(&region_cov) {
                Ok(nu) => {
                    let disagreement = d
                        .nu
                        .iter()
                        .zip(&nu)
                        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
                    checker.report(
                        "spectrum-consistency",
                        "route disagreement",
                        disagreement,
                        1e-8 * d.nu[0],
                    );
                }
                Err(e) => checker.fail("spectrum-consistency", &e.to_string()),
            }
        }
        Err(e) => {
            checker.fail("normal-form-symplectic", &e.to_string());
            checker.fail("normal-form-diagonal", &e.to_string());
            checker.fail("spectrum-consistency", &e.to_string());
        }
    }

    Ok(checker.all_pass)
}

fn normal_form_residual(cov: &CovarianceMatrix, d: &DiagResult) -> f64 {
    let blocked = cov.reorder(QuadOrdering::Blocked);
    let n = cov.n_modes();
    let diag = &d.s_d * &blocked.data * d.s_d.transpose();
    let mut worst = 0.0f64;
    for i in 0..2 * n {
        for j in 0..2 * n {
            let want = if i == j { d.nu[i % n] } else { 0.0 };
            worst = worst.max((diag[(i, j)] - want).abs());
        }
    }
    worst
}
