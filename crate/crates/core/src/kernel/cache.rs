//! On-disk eigenvalue cache: a JSON header identifying the table plus one row
//! per `(n, l)`. Files are written to a temporary sibling and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::table::{version_hash, EigenvalueEntry, EigenvalueTable};
use super::{KernelParams, QuadratureSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheHeader {
    pub s: f64,
    pub theta_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub nodes_per_panel: usize,
    pub max_panels: usize,
    pub version: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheRow {
    pub n: usize,
    pub l: usize,
    pub lambda: f64,
    pub err: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacheFile {
    header: CacheHeader,
    rows: Vec<CacheRow>,
}

fn header_for<T: Real>(params: &KernelParams<T>, quad: &QuadratureSpec<T>) -> CacheHeader {
    CacheHeader {
        s: params.s().to_f64_lossy(),
        theta_max: params.theta_max().to_f64_lossy(),
        rel_tol: quad.rel_tol.to_f64_lossy(),
        abs_tol: quad.abs_tol.to_f64_lossy(),
        nodes_per_panel: quad.nodes_per_panel,
        max_panels: quad.max_panels,
        version: version_hash(params, quad),
    }
}

/// Cache file name for a given table identity.
pub fn cache_path<T: Real>(dir: &Path, params: &KernelParams<T>, quad: &QuadratureSpec<T>) -> PathBuf {
    dir.join(format!("eigen-{}.json", &version_hash(params, quad)[..16]))
}

/// Atomically writes `table` into `dir`, returning the file path.
pub fn save_cache<T: Real>(dir: &Path, table: &EigenvalueTable<T>) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let file = CacheFile {
        header: header_for(table.params(), table.quad()),
        rows: table
            .entries()
            .map(|e| CacheRow {
                n: e.n,
                l: e.l,
                lambda: e.lambda.to_f64_lossy(),
                err: e.err_estimate.to_f64_lossy(),
            })
            .collect(),
    };
    let path = cache_path(dir, table.params(), table.quad());
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    serde_json::to_writer(&mut tmp, &file)?;
    tmp.write_all(b"\n")?;
    tmp.as_file().sync_all()?;
    tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
    Ok(path)
}

/// Loads the cached table for `(params, quad)` from `dir`.
///
/// Returns `Ok(None)` when no cache file exists. A file that fails to parse,
/// belongs to different parameters, carries a stale version or holds an
/// invalid row is rejected with [`Error::Cache`]; nothing is read partially.
pub fn load_cache<T: Real>(
    dir: &Path,
    params: &KernelParams<T>,
    quad: &QuadratureSpec<T>,
) -> Result<Option<EigenvalueTable<T>>> {
    let path = cache_path(dir, params, quad);
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let reject = |why: String| Error::Cache(format!("{}: {why}", path.display()));
    let file: CacheFile = serde_json::from_str(&text).map_err(|e| reject(format!("unreadable ({e})")))?;
    let expected = header_for(params, quad);
    if file.header != expected {
        return Err(reject(format!(
            "header mismatch (found version {}, expected {})",
            file.header.version, expected.version
        )));
    }
    let entries = file.rows.iter().map(|r| EigenvalueEntry {
        n: r.n,
        l: r.l,
        lambda: T::lit(r.lambda),
        err_estimate: T::lit(r.err),
    });
    let table = EigenvalueTable::from_entries(*params, *quad, entries).map_err(|e| reject(e.to_string()))?;
    Ok(Some(table))
}

/// CSV with columns `n,l,lambda,err`.
pub fn table_to_csv<T: Real>(table: &EigenvalueTable<T>) -> String {
    let mut out = String::from("n,l,lambda,err\n");
    for e in table.entries() {
        out.push_str(&format!(
            "{},{},{:e},{:e}\n",
            e.n,
            e.l,
            e.lambda.to_f64_lossy(),
            e.err_estimate.to_f64_lossy()
        ));
    }
    out
}
