//! Content-addressed cache for overlap tables, keyed by the exact bit
//! patterns of the geometry. Corrupt or stale entries are recomputed, never
//! trusted.

use sha2::{Digest, Sha256};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use vacsim_core::bogoliubov::{build_table, BogoliubovTable};
use vacsim_core::cavity::{CavityConfig, Partition, Region, Span};
use vacsim_core::error::Result;

const SCHEMA: &str = "overlap-table-v1";

pub struct TableCache {
    dir: Option<PathBuf>,
}

impl TableCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    fn path_for(&self, cfg: &CavityConfig, span: Span, region: Region) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        let key = format!(
            "{SCHEMA}|length={:016x}|mass={:016x}|start={:016x}|extent={:016x}|n={}|m={}|region={}",
            cfg.length.to_bits(),
            cfg.mass.to_bits(),
            span.start.to_bits(),
            span.len.to_bits(),
            cfg.n_local,
            cfg.n_global,
            region,
        );
        let digest = Sha256::digest(key.as_bytes());
        let name: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        Some(dir.join(format!("{name}.json")))
    }

    /// Load the table for the region from the cache, or build and store it.
    pub fn table(
        &self,
        cfg: &CavityConfig,
        partition: &Partition,
        region: Region,
    ) -> Result<BogoliubovTable> {
        let span = partition.span(region, cfg.length);
        let path = self.path_for(cfg, span, region);
        if let Some(p) = &path {
            if let Ok(bytes) = fs::read(p) {
                match serde_json::from_slice::<BogoliubovTable>(&bytes) {
                    Ok(t) if matches(&t, cfg, span, region) => return Ok(t),
                    _ => eprintln!(
                        "warning: cache entry {} is corrupt or stale, recomputing",
                        p.display()
                    ),
                }
            }
        }
        let t = build_table(cfg, partition, region)?;
        if let Some(p) = &path {
            if let Err(e) = store(p, &t) {
                eprintln!("warning: could not write cache entry {}: {e}", p.display());
            }
        }
        Ok(t)
    }
}

/// A cache hit must describe exactly the requested geometry.
fn matches(t: &BogoliubovTable, cfg: &CavityConfig, span: Span, region: Region) -> bool {
    t.region == region
        && t.span.start.to_bits() == span.start.to_bits()
        && t.span.len.to_bits() == span.len.to_bits()
        && t.cavity.length.to_bits() == cfg.length.to_bits()
        && t.cavity.mass.to_bits() == cfg.mass.to_bits()
        && t.cavity.n_local == cfg.n_local
        && t.cavity.n_global == cfg.n_global
        && t.v.nrows() == cfg.n_local
        && t.v.ncols() == cfg.n_global
}

fn store(path: &Path, t: &BogoliubovTable) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    let bytes = serde_json::to_vec(t).map_err(io::Error::other)?;
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}
