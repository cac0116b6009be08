//! CSV and JSON reports.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::convergence::{alpha_label, ErrorReport};
use crate::error::Result;

/// One row per refinement of every report.
pub fn write_errors_csv<W: Write>(reports: &[ErrorReport], mut w: W) -> std::io::Result<()> {
    writeln!(w, "case,mesh,p,n,n_cells,steps,l1,linf,eoc_l1,eoc_linf,error")?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.6}"));
    for rep in reports {
        for r in &rep.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{:.17e},{:.17e},{},{},{}",
                rep.case.name(),
                alpha_label(&rep.alpha),
                rep.p,
                r.n,
                r.n_cells,
                r.steps,
                r.l1,
                r.linf,
                opt(r.eoc_l1),
                opt(r.eoc_linf),
                r.error.as_deref().unwrap_or("").replace(',', ";"),
            )?;
        }
    }
    Ok(())
}

/// Commit of the working tree, if it is a git checkout.
pub fn git_hash() -> Option<String> {
    let out = std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()?;
    out.status
        .success()
        .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata<C: Serialize, D: Serialize> {
    pub command: String,
    pub config: C,
    pub git_hash: Option<String>,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
    pub diagnostics: D,
}

impl<C: Serialize, D: Serialize> RunMetadata<C, D> {
    pub fn new(command: &str, config: C, started: SystemTime, elapsed: Duration, diagnostics: D) -> Self {
        Self {
            command: command.to_string(),
            config,
            git_hash: git_hash(),
            started_unix: started.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            elapsed_seconds: elapsed.as_secs_f64(),
            diagnostics,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer_pretty(f, self)?;
        Ok(())
    }
}

/// Create `dir` and return the path of `name` inside it.
pub fn output_path(dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}
