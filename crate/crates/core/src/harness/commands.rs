//! The command-line experiments. Each writes its CSV files and a metadata JSON
//! into the output directory.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime};

use serde::{Deserialize, Serialize};

use super::config::{ConvergenceSpec, ProblemKey, RunConfig};
use super::convergence::{run_convergence_from, ErrorReport};
use super::exact_riemann::{sod_states, ExactRiemann};
use super::experiments::{run_burgers_shock, run_sod, solve, RunOutcome};
use super::output::{output_path, write_errors_csv, RunMetadata};
use super::cfl_violations;
use crate::dod::VolumeVariant;
use crate::equations::{EquationKey, GAMMA};
use crate::error::{Error, Result};
use crate::limiter::LimiterKind;
use crate::spectral::{spectral_abscissa, study_matrix, Spectrum};

/// Command-line settings that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub p: Option<usize>,
    pub nu: Option<f64>,
    pub t_final: Option<f64>,
    pub snapshot_every: Option<usize>,
    pub limiter: Option<LimiterKind>,
    pub positivity: bool,
    pub dump_mesh: bool,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = self.p {
            cfg.p = p;
        }
        if let Some(nu) = self.nu {
            cfg.nu = nu;
        }
        if self.t_final.is_some() {
            cfg.t_final = self.t_final;
        }
        if self.snapshot_every.is_some() {
            cfg.output.snapshot_every = self.snapshot_every;
        }
        if let Some(kind) = self.limiter {
            cfg.limiter.kind = kind;
        }
        cfg.limiter.positivity |= self.positivity;
        cfg.output.dump_mesh |= self.dump_mesh;
        if let Some(dir) = &self.out {
            cfg.output.dir = dir.clone();
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct SolveDiagnostics {
    steps: usize,
    time: f64,
    min_dt: f64,
    l1: Option<f64>,
    linf: Option<f64>,
}

impl SolveDiagnostics {
    fn of(outcome: &RunOutcome) -> Self {
        Self {
            steps: outcome.stats.steps,
            time: outcome.stats.time,
            min_dt: outcome.stats.min_dt,
            l1: outcome.errors.map(|e| e.0),
            linf: outcome.errors.map(|e| e.1),
        }
    }
}

fn cfl_warnings(cfg: &RunConfig) -> Result<Vec<String>> {
    let mesh = cfg.mesh.build()?;
    Ok(cfl_violations(&mesh, cfg.nu)
        .into_iter()
        .map(|(cell, alpha)| {
            format!(
                "cut cell {cell}: alpha = {alpha:e} with nu = {} violates alpha < nu < 1 - alpha",
                cfg.nu
            )
        })
        .collect())
}

/// Run one configuration: `snapshot.csv` of the final state, optional
/// intermediate snapshots and mesh dump, and `metadata.json`.
///
/// The shock tube and the Burgers shock add their diagnostics to the metadata.
pub fn run_single(command: &str, cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    let started = SystemTime::now();
    let clock = Instant::now();
    let dir = cfg.output.dir.clone();
    let mut out = CommandOutput {
        warnings: cfl_warnings(cfg)?,
        ..CommandOutput::default()
    };
    if cfg.output.dump_mesh {
        let path = output_path(&dir, "mesh.csv")?;
        cfg.mesh.build()?.write_csv(BufWriter::new(File::create(&path)?))?;
        out.files.push(path);
    }

    let mut io_error = None;
    let mut snapshots = Vec::new();
    let mut on_snapshot = |step: usize, _t: f64, csv: &[u8]| {
        let written = output_path(&dir, &format!("snapshot_{step:06}.csv"))
            .and_then(|path| std::fs::write(&path, csv).map(|_| path).map_err(Into::into));
        match written {
            Ok(path) => snapshots.push(path),
            Err(e) => {
                io_error.get_or_insert(e);
            }
        }
    };

    let (outcome, diagnostics, summary) = match (cfg.equation, cfg.problem) {
        (EquationKey::Euler, ProblemKey::Sod) => {
            let report = run_sod(cfg, &mut on_snapshot)?;
            let (l, r) = sod_states();
            let p_star = ExactRiemann::new(l, r, GAMMA)?.p_star();
            let d = report.diagnostics;
            let summary = format!(
                "steps {}  min rho {:.6e}  min p {:.6e}  TV(rho) {:.6}  L1(rho) {:.6e}  exact p* {:.6}",
                d.steps, d.min_density, d.min_pressure, d.total_variation, d.l1_density, p_star
            );
            let json = serde_json::json!({ "shock_tube": d, "exact_p_star": p_star });
            (report.outcome, json, summary)
        }
        (EquationKey::Burgers, ProblemKey::SineShock) => {
            let report = run_burgers_shock(cfg, &mut on_snapshot)?;
            let d = report.diagnostics;
            let summary = format!(
                "steps {}  averages in [{:.12}, {:.12}]  overshoot {:.3e}  point overshoot {:.3e}",
                d.steps, d.min_average, d.max_average, d.overshoot, d.point_overshoot
            );
            (report.outcome, serde_json::to_value(d)?, summary)
        }
        _ => {
            let outcome = solve(cfg, &mut on_snapshot)?;
            let d = SolveDiagnostics::of(&outcome);
            let mut summary = format!("steps {}  t {:.6}", d.steps, d.time);
            if let (Some(l1), Some(linf)) = (d.l1, d.linf) {
                summary.push_str(&format!("  L1 {l1:.6e}  Linf {linf:.6e}"));
            }
            (outcome, serde_json::to_value(d)?, summary)
        }
    };
    if let Some(e) = io_error {
        return Err(e);
    }
    out.files.extend(snapshots);

    let path = output_path(&dir, "snapshot.csv")?;
    outcome
        .state
        .write_snapshot(&outcome.space, cfg.equation, BufWriter::new(File::create(&path)?))?;
    out.files.push(path);

    let path = output_path(&dir, "metadata.json")?;
    RunMetadata::new(command, cfg, started, clock.elapsed(), diagnostics).write(&path)?;
    out.files.push(path);
    out.summary = summary;
    Ok(out)
}

#[derive(Serialize)]
struct ConvergenceEcho<'a> {
    bases: &'a [RunConfig],
    sweep: &'a ConvergenceSpec,
}

/// Convergence sweep of every base configuration over `spec`, written to
/// `errors.csv` and `metadata.json` in `dir`.
pub fn run_converge(
    bases: &[RunConfig],
    spec: &ConvergenceSpec,
    dir: &Path,
) -> Result<(Vec<ErrorReport>, CommandOutput)> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let mut reports = Vec::new();
    for base in bases {
        base.validate()?;
        for alpha in &spec.alphas {
            let mut cfg = base.clone();
            cfg.mesh.alpha = alpha.clone();
            reports.extend(run_convergence_from(&cfg, &spec.p_list, &spec.n_list));
        }
    }
    let mut out = CommandOutput::default();
    let path = output_path(dir, "errors.csv")?;
    write_errors_csv(&reports, BufWriter::new(File::create(&path)?))?;
    out.files.push(path);

    let failures = reports.iter().filter(|r| r.failed()).count();
    let echo = ConvergenceEcho { bases, sweep: spec };
    let path = output_path(dir, "metadata.json")?;
    RunMetadata::new("converge", echo, started, clock.elapsed(), &reports).write(&path)?;
    out.files.push(path);
    out.summary = format!("{} sweeps, {failures} with failed runs", reports.len());
    Ok((reports, out))
}

/// Settings of the spectral study, readable from TOML.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub p: usize,
    pub alpha: f64,
    #[serde(default)]
    pub variant: VolumeVariant,
}

impl SpectrumSpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Spectral abscissa of the stabilized advection operator on the study mesh.
/// With `dir`, all eigenvalues go to `spectrum.csv` next to `metadata.json`.
pub fn run_spectrum(
    p: usize,
    alpha: f64,
    variant: VolumeVariant,
    dir: Option<&Path>,
) -> Result<(Spectrum, CommandOutput)> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let spectrum = spectral_abscissa(&study_matrix(p, alpha, variant)?.matrix)?;
    let mut out = CommandOutput {
        summary: format!("mu = {:.6e}", spectrum.abscissa),
        ..CommandOutput::default()
    };
    if let Some(dir) = dir {
        let path = output_path(dir, "spectrum.csv")?;
        spectrum.write_csv(BufWriter::new(File::create(&path)?))?;
        out.files.push(path);
        let path = output_path(dir, "metadata.json")?;
        let diagnostics = serde_json::json!({
            "abscissa": spectrum.abscissa,
            "eigenvalues": spectrum.eigenvalues.len(),
        });
        RunMetadata::new("spectrum", SpectrumSpec { p, alpha, variant }, started, clock.elapsed(), diagnostics)
            .write(&path)?;
        out.files.push(path);
    }
    Ok((spectrum, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::AlphaSpec;

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = RunConfig::smooth(EquationKey::Burgers, 1, 20, AlphaSpec::constant(0.1));
        Overrides {
            p: Some(3),
            nu: Some(0.3),
            limiter: Some(LimiterKind::Tvdm),
            out: Some("elsewhere".into()),
            ..Overrides::default()
        }
        .apply(&mut cfg);
        assert_eq!((cfg.p, cfg.nu), (3, 0.3));
        assert_eq!(cfg.limiter.kind, LimiterKind::Tvdm);
        assert_eq!(cfg.output.dir, PathBuf::from("elsewhere"));
    }

    #[test]
    fn single_run_writes_snapshot_and_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::smooth(EquationKey::Advection, 1, 10, AlphaSpec::constant(0.2));
        cfg.t_final = Some(0.05);
        cfg.output.dir = dir.path().to_path_buf();
        cfg.output.snapshot_every = Some(3);
        cfg.output.dump_mesh = true;
        let out = run_single("solve", &cfg).unwrap();
        for name in ["mesh.csv", "snapshot.csv", "metadata.json", "snapshot_000003.csv"] {
            assert!(dir.path().join(name).exists(), "{name}");
        }
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
        assert_eq!(meta["config"]["p"], 1);
        assert!(meta["diagnostics"]["l1"].as_f64().unwrap() < 0.1);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn cfl_warning_for_large_cut_fraction() {
        let mut cfg = RunConfig::smooth(EquationKey::Advection, 0, 10, AlphaSpec::constant(0.45));
        cfg.t_final = Some(0.0);
        cfg.output.dir = tempfile::tempdir().unwrap().path().to_path_buf();
        assert!(!run_single("solve", &cfg).unwrap().warnings.is_empty());
    }

    #[test]
    fn converge_writes_errors_csv() {
        let dir = tempfile::tempdir().unwrap();
        let base = RunConfig::smooth(EquationKey::Advection, 0, 20, AlphaSpec::constant(0.1));
        let spec = ConvergenceSpec {
            p_list: vec![1],
            n_list: vec![10, 20],
            alphas: vec![AlphaSpec::constant(0.1), AlphaSpec::random(1)],
        };
        let (reports, _) = run_converge(&[base], &spec, dir.path()).unwrap();
        assert_eq!(reports.len(), 2);
        let csv = std::fs::read_to_string(dir.path().join("errors.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 4);
    }
}
