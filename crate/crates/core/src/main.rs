use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swe_esdg::cases::{CaseName, Resolution, SolverOptions};
use swe_esdg::config::{parse_grid, SimulationConfig};
use swe_esdg::experiments::{inspect_operators, run_case, run_convergence_study};
use swe_esdg::limiter::LimiterMode;
use swe_esdg::reference::NodeFamily;
use swe_esdg::{Result, SolverError};

#[derive(Parser)]
#[command(
    name = "swe-esdg",
    version,
    about = "Positivity-preserving entropy-stable DG for shallow water"
)]
struct Cli {
    /// Worker threads (1 gives bitwise-reproducible runs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case.
    Run(RunArgs),
    /// Run a case on several resolutions and report observed rates.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
        /// Element counts (1D) or `nx x ny` grids separated by `;` (2D),
        /// e.g. `32,64,128` or `8x4;16x8;32x16`.
        #[arg(long)]
        levels: String,
    },
    /// Check the reference and low-order operators.
    VerifyOps {
        #[arg(long = "N")]
        degree: usize,
        #[arg(long, default_value = "gl")]
        family: NodeFamily,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = swe_esdg::low_order::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = swe_esdg::low_order::DEFAULT_P)]
        p: f64,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<CaseName>,
    #[arg(long = "N")]
    degree: Option<usize>,
    #[arg(long = "K", conflicts_with = "grid")]
    elements: Option<usize>,
    /// `nx,ny`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    limiter: Option<LimiterMode>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    family: Option<NodeFamily>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Momentum is zeroed where h is at or below this height.
    #[arg(long)]
    momentum_cutoff: Option<f64>,
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated snapshot times.
    #[arg(long)]
    snapshots: Option<String>,
    #[arg(long)]
    vtk: bool,
    /// Literal signed sine-wave data (rejected by validation).
    #[arg(long)]
    strict: bool,
}

impl RunArgs {
    fn to_config(&self) -> Result<SimulationConfig> {
        let mut cfg = match (&self.config, self.case) {
            (Some(path), _) => SimulationConfig::from_file(path)?,
            (None, Some(case)) => SimulationConfig::new(case),
            (None, None) => return Err(SolverError::Config("give --case or --config".into())),
        };
        if let Some(case) = self.case {
            if case != cfg.case {
                let mut fresh = SimulationConfig::new(case);
                fresh.out = cfg.out.take();
                cfg = fresh;
            }
        }
        if let Some(n) = self.degree {
            cfg.degree = Some(n);
        }
        if let Some(k) = self.elements {
            cfg.resolution = Some(Resolution::Elements(k));
        }
        if let Some(g) = &self.grid {
            cfg.resolution = Some(parse_grid(g)?);
        }
        if let Some(m) = self.limiter {
            cfg.limiter = m;
        }
        if let Some(v) = self.cfl {
            cfg.cfl = v;
        }
        if let Some(f) = self.family {
            cfg.family = f;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.momentum_cutoff {
            cfg.momentum_cutoff = v;
        }
        if let Some(v) = self.t_end {
            cfg.t_end = Some(v);
        }
        if let Some(v) = self.g {
            cfg.g = Some(v);
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(s) = &self.snapshots {
            cfg.set("snapshots", s)?;
        }
        cfg.vtk |= self.vtk;
        cfg.strict_sine |= self.strict;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_levels(s: &str) -> Result<Vec<Resolution>> {
    if s.contains(['x', 'X']) {
        s.split(';').map(|g| parse_grid(g.trim())).collect()
    } else {
        s.split(',')
            .map(|k| {
                k.trim()
                    .parse()
                    .map(Resolution::Elements)
                    .map_err(|_| SolverError::Config(format!("bad level '{k}'")))
            })
            .collect()
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.to_config()?;
            let run = run_case(&cfg)?;
            let s = &run.summary;
            println!(
                "{} N={} {} limiter={} steps={} t={} min_h={:.3e} mass_change={:.3e}",
                s.case.name,
                s.case.degree,
                s.case.resolution,
                cfg.limiter,
                s.steps,
                s.final_time,
                s.history.min_h.iter().copied().fold(f64::INFINITY, f64::min),
                s.relative_mass_change
            );
            if let Some(e) = s.error {
                println!("L2 error h={:.6e} hu={:.6e} hv={:.6e}", e.h, e.hu, e.hv);
            }
            if let Some(e) = s.steady_state_error {
                println!("steady-state deviation h={:.6e} hu={:.6e}", e.h, e.hu);
            }
        }
        Command::Convergence { run, levels } => {
            let cfg = run.to_config()?;
            let report = run_convergence_study(&cfg, &parse_levels(&levels)?)?;
            println!("{:>12} {:>14} {:>14} {:>8}", "mesh_size", "err_h", "err_hu", "rate_h");
            for (k, l) in report.levels.iter().enumerate() {
                let rate = if k == 0 {
                    String::from("-")
                } else {
                    format!("{:.3}", report.rates_h[k - 1])
                };
                println!(
                    "{:>12.5e} {:>14.6e} {:>14.6e} {:>8}",
                    l.mesh_size, l.error.h, l.error.hu, rate
                );
            }
        }
        Command::VerifyOps {
            degree,
            family,
            dim,
            alpha,
            p,
        } => {
            let opts = SolverOptions {
                family,
                alpha,
                p,
                ..SolverOptions::default()
            };
            let r = inspect_operators(dim, degree, &opts)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            let ok = r.high_order.passed() && r.low_order.passed(1e-12);
            if !ok {
                return Err(SolverError::OperatorResidual {
                    what: "operator suite",
                    residual: r.high_order.worst().1.max(r.low_order.worst()),
                    tolerance: 1e-12,
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
