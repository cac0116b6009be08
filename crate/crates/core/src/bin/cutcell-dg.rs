use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cutcell_dg::dod::VolumeVariant;
use cutcell_dg::harness::commands::{run_converge, run_single, run_spectrum, CommandOutput, Overrides, SpectrumSpec};
use cutcell_dg::harness::convergence::ConvergenceCase;
use cutcell_dg::harness::{ConvergenceSpec, RunConfig};
use cutcell_dg::limiter::LimiterKind;
use cutcell_dg::mesh::AlphaSpec;
use cutcell_dg::Result;

/// Stabilized DG on cut-cell meshes: convergence studies, shock tests and spectra.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Shared {
    /// Config file (TOML or JSON)
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Polynomial degree
    #[arg(long)]
    p: Option<usize>,
    /// CFL number
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Write a snapshot every this many steps
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// off | tvdm
    #[arg(long)]
    limiter: Option<LimiterKind>,
    /// Enable the positivity guard
    #[arg(long)]
    positivity: bool,
    /// Write mesh.csv
    #[arg(long)]
    dump_mesh: bool,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Shared {
    fn overrides(&self) -> Overrides {
        Overrides {
            p: self.p,
            nu: self.nu,
            t_final: self.t_final,
            snapshot_every: self.snapshot_every,
            limiter: self.limiter,
            positivity: self.positivity,
            dump_mesh: self.dump_mesh,
            out: self.out.clone(),
        }
    }

    fn config_or(&self, default: impl FnOnce() -> RunConfig) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_path(path)?,
            None => default(),
        };
        self.overrides().apply(&mut cfg);
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Error tables and observed orders over a mesh sequence
    Converge {
        #[command(flatten)]
        shared: Shared,
        /// burgers | linsys | euler | advection (all three main cases when absent)
        #[arg(long, value_delimiter = ',')]
        case: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        p_list: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
    },
    /// Run one config to its final time
    Solve {
        #[command(flatten)]
        shared: Shared,
    },
    /// Sod's shock tube
    Sod {
        #[command(flatten)]
        shared: Shared,
        /// Background cells
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Seed of the random cut fractions
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Burgers with a steepening sine wave
    BurgersShock {
        #[command(flatten)]
        shared: Shared,
    },
    /// Spectral abscissa of the stabilized advection operator
    Spectrum {
        /// TOML file with p, alpha and variant, used instead of the flags
        #[arg(long, short)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// full | legacy
        #[arg(long, default_value = "full")]
        variant: VolumeVariant,
        /// Write spectrum.csv and metadata.json into --out
        #[arg(long)]
        csv: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn parse_case(name: &str) -> Result<ConvergenceCase> {
    [
        ConvergenceCase::Burgers,
        ConvergenceCase::LinearSystem,
        ConvergenceCase::Euler,
        ConvergenceCase::Advection,
    ]
    .into_iter()
    .find(|c| c.name() == name || (name == "linear-system" && *c == ConvergenceCase::LinearSystem))
    .ok_or_else(|| cutcell_dg::Error::Config(format!("unknown case '{name}'")))
}

fn report(out: &CommandOutput) {
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", out.summary);
    for f in &out.files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Converge {
            shared,
            case,
            p_list,
            n_list,
        } => {
            let (bases, mut spec) = match &shared.config {
                Some(path) => {
                    let mut cfg = RunConfig::from_path(path)?;
                    shared.overrides().apply(&mut cfg);
                    let spec = cfg.convergence.clone().unwrap_or_else(ConvergenceSpec::standard);
                    (vec![cfg], spec)
                }
                None => {
                    let cases = if case.is_empty() {
                        ConvergenceCase::ALL.to_vec()
                    } else {
                        case.iter().map(|c| parse_case(c)).collect::<Result<_>>()?
                    };
                    let bases = cases
                        .into_iter()
                        .map(|c| {
                            let mut cfg = RunConfig::smooth(c.equation(), 0, 20, AlphaSpec::constant(0.1));
                            shared.overrides().apply(&mut cfg);
                            cfg
                        })
                        .collect();
                    (bases, ConvergenceSpec::standard())
                }
            };
            if !p_list.is_empty() {
                spec.p_list = p_list;
            } else if let Some(p) = shared.p {
                spec.p_list = vec![p];
            }
            if !n_list.is_empty() {
                spec.n_list = n_list;
            }
            let dir = shared.out.clone().unwrap_or_else(|| bases[0].output.dir.clone());
            let (reports, out) = run_converge(&bases, &spec, &dir)?;
            for r in &reports {
                println!("{r}");
            }
            report(&out);
        }
        Command::Solve { shared } => {
            let Some(_) = &shared.config else {
                return Err(cutcell_dg::Error::Config("solve needs --config".into()));
            };
            let cfg = shared.config_or(|| unreachable!())?;
            report(&run_single("solve", &cfg)?);
        }
        Command::Sod { shared, n, seed } => {
            let p = shared.p.unwrap_or(0);
            let cfg = shared.config_or(|| RunConfig::sod(n, p, seed))?;
            report(&run_single("sod", &cfg)?);
        }
        Command::BurgersShock { shared } => {
            let p = shared.p.unwrap_or(0);
            let cfg = shared.config_or(|| RunConfig::burgers_shock(p, false))?;
            report(&run_single("burgers-shock", &cfg)?);
        }
        Command::Spectrum {
            config,
            p,
            alpha,
            variant,
            csv,
            out,
        } => {
            let spec = match config {
                Some(path) => SpectrumSpec::from_path(&path)?,
                None => SpectrumSpec { p, alpha, variant },
            };
            let (_, output) = run_spectrum(spec.p, spec.alpha, spec.variant, csv.then_some(out.as_path()))?;
            report(&output);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
