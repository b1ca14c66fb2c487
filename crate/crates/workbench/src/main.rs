use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pcopo_correlations::{check_below_threshold, threshold, DuanBound};
use pcopo_langevin::SimConfig;
use pcopo_model::{coupling_constants, pump_steady_state, ModelParams};
use pcopo_workbench::error::exit_class_of;
use pcopo_workbench::{
    config_from_results, config_load, matrix_check, reproduce_figure, run_sweep_with, write_output, Engine,
    LoadedConfig, Observable, ResultRecord, WorkbenchError, FIGURE_IDS,
};

#[derive(Parser)]
#[command(name = "pcopo", version, about = "Photonic-crystal OPO quantum-correlation workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long = "E", allow_hyphen_values = true)]
    e: Option<f64>,
    /// Pump as a fraction of the threshold.
    #[arg(long = "E-relative", conflicts_with = "e")]
    e_relative: Option<f64>,
    #[arg(long = "M0", default_value_t = 0.0, allow_hyphen_values = true)]
    m0: f64,
    #[arg(long = "M1", default_value_t = 0.0, allow_hyphen_values = true)]
    m1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta0: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    delta1: f64,
    /// Crystal wavenumber; defaults to twice the critical wavenumber.
    #[arg(long)]
    kp: Option<f64>,
}

impl ParamArgs {
    fn params(&self) -> ModelParams {
        ModelParams {
            e: self.e.unwrap_or(0.0),
            delta0: self.delta0,
            delta1: self.delta1,
            m0: self.m0,
            m1: self.m1,
            kp: self.kp,
        }
    }
}

#[derive(Args, Clone)]
struct OutArg {
    /// Write the result to a CSV or (by extension) JSON file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Pump steady state, coupling constants and threshold.
    Steady {
        #[command(flatten)]
        p: ParamArgs,
    },
    /// Compare the closed-form inverse with LU on random parameter draws.
    MatrixCheck {
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Spectral intensity of the critical modes.
    Spectrum {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
        omega_min: f64,
        #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
        omega_max: f64,
        #[arg(long, default_value_t = 801)]
        points: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Photon number of one critical mode.
    Intensity {
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Oscillation threshold.
    Threshold {
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Minimum quadrature variance of the critical pair.
    Squeeze {
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Duan criterion over the angle grid.
    Duan {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        weight: f64,
        #[arg(long, value_enum, default_value_t = BoundArg::AsPrinted)]
        bound: BoundArg,
        #[arg(long, default_value_t = 91)]
        n_theta: usize,
        #[arg(long, default_value_t = 91)]
        n_phi: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Reid criterion over the angle grid.
    Reid {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, default_value_t = 91)]
        n_theta: usize,
        #[arg(long, default_value_t = 91)]
        n_phi: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Twin-beam intensity-difference noise.
    Twin {
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Stochastic far-field spectra.
    Simulate {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, default_value_t = 256)]
        grid_points: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 50.0)]
        t_transient: f64,
        #[arg(long, default_value_t = 200.0)]
        t_measure: f64,
        #[arg(long, default_value_t = 4)]
        trajectories: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run a TOML sweep, or repeat the run recorded in a result file.
    Sweep {
        /// Configuration file.
        config: Option<PathBuf>,
        /// Result file (CSV or JSON) whose embedded configuration is rerun.
        #[arg(long, conflicts_with = "config")]
        from: Option<PathBuf>,
        /// Output path; overrides `sweep.output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to PCOPO_WORKERS or the core count.
        #[arg(long, env = "PCOPO_WORKERS")]
        workers: Option<usize>,
    },
    /// Regenerate the data and gnuplot script of a figure.
    ReproduceFigure {
        /// One of fig1, fig3a, fig3b, fig3c, fig4, fig5, fig6, fig7.
        id: String,
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
        /// Coarser grids and shorter trajectories.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum BoundArg {
    AsPrinted,
    Standard,
}

impl From<BoundArg> for DuanBound {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::AsPrinted => DuanBound::AsPrinted,
            BoundArg::Standard => DuanBound::Standard,
        }
    }
}

fn single(p: &ParamArgs, observable: Observable, engine: Engine, tweak: impl FnOnce(&mut LoadedConfig)) -> Result<LoadedConfig> {
    let mut c = LoadedConfig {
        params: p.params(),
        ..Default::default()
    };
    c.sweep.observable = observable;
    c.sweep.engine = engine;
    c.sweep.e_relative = p.e_relative;
    tweak(&mut c);
    let c = c.finalize()?;
    if observable.needs_below_threshold() {
        check_below_threshold(&c.params)?;
    }
    Ok(c)
}

fn print_records(records: &[ResultRecord]) {
    for r in records {
        if records.len() > 1 || r.rows.len() > 1 {
            println!("# E={:.6} M0={:.6} M1={:.6} delta0={:.6} status={}", r.params.e, r.params.m0, r.params.m1, r.params.delta0, r.status.name());
        }
        if r.rows.is_empty() {
            println!("{}: {}", r.observable.name(), r.status.name());
            continue;
        }
        if r.rows.len() == 1 {
            for (c, v) in r.columns.iter().zip(&r.rows[0]) {
                println!("{c} = {v:.6}");
            }
            continue;
        }
        println!("{}", r.columns.join(" "));
        for row in &r.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            println!("{}", cells.join(" "));
        }
    }
}

fn run_config(c: &LoadedConfig, out: Option<&PathBuf>, workers: usize) -> Result<()> {
    let records = run_sweep_with(&c.params, &c.sim, &c.sweep, workers)?;
    let target = out.cloned().or_else(|| c.sweep.output_path.as_ref().map(PathBuf::from));
    match target {
        Some(path) => {
            write_output(&path, &records, c)?;
            eprintln!("wrote {} records to {}", records.len(), path.display());
        }
        None => print_records(&records),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let workers = pcopo_workbench::default_workers();
    match cli.command {
        Command::Steady { p } => {
            let c = single(&p, Observable::Threshold, Engine::Analytic, |_| {})?;
            let s = pump_steady_state(&c.params)?;
            let k = coupling_constants(&c.params)?;
            println!("A0(0)   = {:.6} {:+.6}i", s.a0_0.re, s.a0_0.im);
            println!("A0(+kp) = {:.6} {:+.6}i", s.a0_plus.re, s.a0_plus.im);
            println!("A0(-kp) = {:.6} {:+.6}i", s.a0_minus.re, s.a0_minus.im);
            println!("S       = {:.6} {:+.6}i", k.s.re, k.s.im);
            println!("kappa   = {:.6} {:+.6}i", k.kappa.re, k.kappa.im);
            println!("threshold = {:.6}", threshold(&c.params)?);
        }
        Command::MatrixCheck { draws, seed } => {
            let r = matrix_check(draws, seed)?;
            println!("draws = {}", r.draws);
            println!("max |L L^-1 - I| = {:.6e}", r.max_identity_defect);
            println!("max relative difference to LU = {:.6e}", r.max_rel_diff_lu);
            if let Some((p, w)) = r.worst {
                println!("worst = E {:.6} M0 {:.6} M1 {:.6} delta0 {:.6} omega {:.6}", p.e, p.m0, p.m1, p.delta0, w);
            }
        }
        Command::Spectrum { p, omega_min, omega_max, points, out } => {
            let c = single(&p, Observable::Spectrum, Engine::Analytic, |c| {
                c.sweep.options.omega_min = omega_min;
                c.sweep.options.omega_max = omega_max;
                c.sweep.options.omega_points = points;
            })?;
            run_config(&c, out.out.as_ref(), workers)?;
        }
        Command::Intensity { p, out } => {
            run_config(&single(&p, Observable::Intensity, Engine::Analytic, |_| {})?, out.out.as_ref(), workers)?
        }
        Command::Threshold { p, out } => {
            run_config(&single(&p, Observable::Threshold, Engine::Analytic, |_| {})?, out.out.as_ref(), workers)?
        }
        Command::Squeeze { p, out } => {
            run_config(&single(&p, Observable::MinVariance, Engine::Analytic, |_| {})?, out.out.as_ref(), workers)?
        }
        Command::Duan { p, weight, bound, n_theta, n_phi, out } => {
            let c = single(&p, Observable::DuanMap, Engine::Analytic, |c| {
                c.sweep.options.weight = weight;
                c.sweep.options.bound = bound.into();
                c.sweep.options.n_theta = n_theta;
                c.sweep.options.n_phi = n_phi;
            })?;
            run_config(&c, out.out.as_ref(), workers)?;
        }
        Command::Reid { p, n_theta, n_phi, out } => {
            let c = single(&p, Observable::ReidMap, Engine::Analytic, |c| {
                c.sweep.options.n_theta = n_theta;
                c.sweep.options.n_phi = n_phi;
            })?;
            run_config(&c, out.out.as_ref(), workers)?;
        }
        Command::Twin { p, out } => {
            run_config(&single(&p, Observable::TwinBeams, Engine::Analytic, |_| {})?, out.out.as_ref(), workers)?
        }
        Command::Simulate { p, grid_points, dt, t_transient, t_measure, trajectories, seed, out } => {
            let c = single(&p, Observable::Simulate, Engine::Langevin, |c| {
                c.sim = SimConfig {
                    grid_points,
                    dt,
                    t_transient,
                    t_measure,
                    n_trajectories: trajectories,
                    seed,
                    ..Default::default()
                };
            })?;
            run_config(&c, out.out.as_ref(), workers)?;
        }
        Command::Sweep { config, from, out, workers: w } => {
            let c = match (config, from) {
                (Some(path), None) => config_load(&path)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    config_from_results(&text, &path.display().to_string())?
                }
                _ => return Err(WorkbenchError::validation("config", "give a configuration file or --from").into()),
            };
            run_config(&c, out.as_ref(), w.unwrap_or(workers))?;
        }
        Command::ReproduceFigure { id, out_dir, quick } => {
            if !FIGURE_IDS.contains(&id.as_str()) {
                return Err(WorkbenchError::UnknownFigure(id).into());
            }
            let r = reproduce_figure(&id, &out_dir, quick)?;
            for f in r.files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_class_of(e.as_ref()) as u8)
        }
    }
}
