// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! `qstab`: synthesize, simulate and verify stabilizing control pulses.
//!
//! Exit status: 0 on success, 2 when a target or budget is infeasible or a
//! verification fails, 1 for usage, validation and I/O errors.

pub mod config;
pub mod error;
pub mod files;
pub mod json;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use qstab_core::logical::{self, default_logical_dt};
use qstab_core::propagator::{self, default_dt};
use qstab_core::state::bloch_to_state;
use qstab_core::synth::{self, ControlClass, Design};
use qstab_core::verify::{self, Budgets, VerifyOptions};
use qstab_core::{stab, Error as CoreError, StateVector, SystemParams};

use crate::config::{params, point, positive, require, RunConfig};
use crate::error::{CliError, CliResult};
use crate::files::{BudgetBlock, PulseFile};

#[derive(Debug, Parser)]
#[command(name = "qstab", version, about = "Open-loop qubit stabilization: synthesis, simulation, verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Bounded,
    BoundedContinuous,
}

impl From<ClassArg> for ControlClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Bounded => ControlClass::Bounded,
            ClassArg::BoundedContinuous => ControlClass::BoundedContinuous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Integrator {
    /// Exponential midpoint (unitary).
    Exp,
    /// Classical Runge–Kutta reference.
    Rk4,
}

/// Physical parameters and endpoints; angles in radians.
#[derive(Debug, Clone, Args)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    g0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    thetaf: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phif: Option<f64>,
    /// Start time of the transfer.
    #[arg(long, allow_negative_numbers = true)]
    t0: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Resonant transfer to a point followed by a static hold.
    SynthPoint {
        #[command(flatten)]
        common: Common,
    },
    /// Transfer onto the latitude circle of the target.
    SynthCircle {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
        /// Envelope order (continuous class without a budget).
        #[arg(long)]
        n: Option<u32>,
        /// Time budget.
        #[arg(long)]
        ts: Option<f64>,
    },
    /// Resonant transfer under joint time and energy budgets.
    TimeEnergy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ts: Option<f64>,
        #[arg(long)]
        es: Option<f64>,
        /// Flag designs whose amplitude exceeds this value.
        #[arg(long)]
        soft_bound: Option<f64>,
    },
    /// Stabilizable-region grid for a ratio g0/omega0.
    Region {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        ratio: Option<f64>,
        /// Samples along each axis.
        #[arg(long)]
        res: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entangler onto the maximally entangled circle of the logical qubit;
    /// theta0/phi0 are logical angles.
    Entangle {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
        #[arg(long)]
        ts: Option<f64>,
    },
    /// Propagate a pulse file and write the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pulse: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        /// End time; defaults to t_f plus the horizon.
        #[arg(long)]
        t_end: Option<f64>,
        /// Span simulated after t_f, default ten drift periods.
        #[arg(long)]
        t_horizon: Option<f64>,
        #[arg(long, value_enum, default_value = "exp")]
        integrator: Integrator,
    },
    /// Re-propagate a synthesized pulse with the oracle and check its claims.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        pulse: PathBuf,
        #[arg(long)]
        ts: Option<f64>,
        #[arg(long)]
        es: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Core(CoreError::NotStabilizable { .. }) = e {
                eprintln!("hint: a static hold needs omega0*|tan(theta_f)|*max(|sin(phi_f)|, |cos(phi_f)|) <= g0; use synth-circle to target the latitude circle instead");
            }
            e.exit_code()
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> CliResult<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

/// Flags merged over the configuration file.
struct Resolved {
    cfg: RunConfig,
    c: Common,
}

impl Resolved {
    fn new(c: Common) -> CliResult<Self> {
        Ok(Self {
            cfg: load_config(&c.config)?,
            c,
        })
    }

    fn params(&self) -> CliResult<SystemParams> {
        params(self.c.omega0.or(self.cfg.omega0), self.c.g0.or(self.cfg.g0))
    }

    fn initial(&self) -> CliResult<qstab_core::BlochPoint> {
        let a = self.cfg.initial.unwrap_or_default();
        let theta = require(self.c.theta0.or(self.cfg.initial.map(|_| a.theta)), "theta0")?;
        let phi = require(self.c.phi0.or(self.cfg.initial.map(|_| a.phi)), "phi0")?;
        point(theta, phi, "initial")
    }

    fn target(&self) -> CliResult<qstab_core::BlochPoint> {
        let a = self.cfg.target.unwrap_or_default();
        let theta = require(self.c.thetaf.or(self.cfg.target.map(|_| a.theta)), "thetaf")?;
        let phi = require(self.c.phif.or(self.cfg.target.map(|_| a.phi)), "phif")?;
        point(theta, phi, "target")
    }

    fn t0(&self) -> CliResult<f64> {
        let t0 = self.c.t0.or(self.cfg.t0).unwrap_or(0.0);
        if t0.is_finite() {
            Ok(t0)
        } else {
            Err(CliError::Invalid(format!("t0 must be finite, got {t0}")))
        }
    }

    fn class(&self, flag: Option<ClassArg>) -> CliResult<ControlClass> {
        match flag.map(ControlClass::from).or(self.cfg.control_class) {
            None => Ok(ControlClass::BoundedContinuous),
            Some(ControlClass::Unbounded) => Err(CliError::Invalid(
                "control class 'unbounded' is only used by time-energy".into(),
            )),
            Some(c) => Ok(c),
        }
    }

    fn out(&self, from_config: &Option<PathBuf>) -> Option<PathBuf> {
        self.c.out.clone().or_else(|| from_config.clone())
    }
}

fn opt_positive(v: Option<f64>, name: &str) -> CliResult<Option<f64>> {
    v.map(|x| positive(x, name)).transpose()
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn create(path: &Path) -> CliResult<std::fs::File> {
    std::fs::File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn summarize(res: &synth::SynthesisResult) {
    let design = match &res.design {
        Design::Identity => "identity".to_string(),
        Design::ResonantTransfer { k, g, .. } => format!("resonant k_fap = {k}, g = {g:.6e}"),
        Design::Envelope { k_dn, n, g, .. } => format!("envelope k_dn = {k_dn}, n = {n}, g = {g:.6e}"),
    };
    eprintln!("{design}; t_f - t0 = {:.6e}", res.t_f - res.t0);
}

fn execute(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::SynthPoint { common } => {
            let r = Resolved::new(common)?;
            let res = synth::synth_point_hold(r.initial()?, r.target()?, r.params()?, r.t0()?)?;
            summarize(&res);
            let file = PulseFile::from_synthesis(&res, BudgetBlock::default());
            emit(r.out(&r.cfg.output.pulse).as_deref(), &file.to_json()?)
        }
        Command::SynthCircle { common, class, n, ts } => {
            let r = Resolved::new(common)?;
            let (p0, pf, prm, t0) = (r.initial()?, r.target()?, r.params()?, r.t0()?);
            let ts = opt_positive(ts.or(r.cfg.ts), "ts")?;
            let n = n.or(r.cfg.n);
            let res = match (r.class(class)?, ts) {
                (ControlClass::BoundedContinuous, Some(ts)) => synth::synth_circle_within_budget(p0, pf, prm, t0, ts)?,
                (ControlClass::BoundedContinuous, None) => match n {
                    Some(n) => synth::synth_circle_continuous(p0, pf, prm, t0, n)?,
                    None => synth::synth_circle_by_case(p0, pf, prm, t0)?,
                },
                (_, ts) => {
                    if let Some(ts) = ts {
                        let required = synth::transition_time_bound(None, &prm, ControlClass::Bounded);
                        if !(ts >= required) {
                            return Err(CoreError::TimeBudgetInfeasible { budget: ts, required }.into());
                        }
                    }
                    synth::synth_circle_bounded(p0, pf, prm, t0)?
                }
            };
            summarize(&res);
            let file = PulseFile::from_synthesis(&res, BudgetBlock { time: ts, energy: None });
            emit(r.out(&r.cfg.output.pulse).as_deref(), &file.to_json()?)
        }
        Command::TimeEnergy { common, ts, es, soft_bound } => {
            let r = Resolved::new(common)?;
            let (p0, pf, prm) = (r.initial()?, r.target()?, r.params()?);
            let ts = positive(require(ts.or(r.cfg.ts), "ts")?, "ts")?;
            let es = positive(require(es.or(r.cfg.es), "es")?, "es")?;
            let soft = opt_positive(soft_bound.or(r.cfg.soft_bound), "soft-bound")?;
            let ks = synth::feasible_k_time_energy(&p0, &pf, &prm, ts, es)?;
            eprintln!("feasible k: {ks:?}");
            let res = synth::synth_time_energy(p0, pf, prm, r.t0()?, ts, es, soft)?;
            summarize(&res);
            if let Design::ResonantTransfer { exceeds_soft_bound: true, g, .. } = res.design {
                eprintln!("warning: amplitude g = {g:.6e} exceeds the soft bound");
            }
            let file = PulseFile::from_synthesis(&res, BudgetBlock { time: Some(ts), energy: Some(es) });
            emit(r.out(&r.cfg.output.pulse).as_deref(), &file.to_json()?)
        }
        Command::Region { config, ratio, res, out } => {
            let cfg = load_config(&config)?;
            let ratio = positive(require(ratio.or(cfg.ratio), "ratio")?, "ratio")?;
            let res = res.or(cfg.res).unwrap_or(512);
            let grid = stab::region_grid(ratio, res, res)?;
            eprintln!(
                "stabilizable fraction {:.6}; phi = 0 column {:.6}",
                grid.fraction(),
                grid.column_fraction(0)
            );
            match out.or(cfg.output.region) {
                Some(p) => files::write_region(create(&p)?, &grid),
                None => files::write_region(std::io::stdout().lock(), &grid),
            }
        }
        Command::Entangle { common, class, ts } => {
            let r = Resolved::new(common)?;
            let prm = r.params()?;
            let s0 = logical::embed_logical(r.initial()?);
            let ts = opt_positive(ts.or(r.cfg.ts), "ts")?;
            let res = logical::synth_entangler(&s0, prm, r.t0()?, ts, r.class(class)?)?;
            summarize(&res.effective);
            let file = PulseFile::from_entangler(&res, BudgetBlock { time: ts, energy: None });
            emit(r.out(&r.cfg.output.pulse).as_deref(), &file.to_json()?)
        }
        Command::Simulate {
            common,
            pulse,
            dt,
            t_end,
            t_horizon,
            integrator,
        } => {
            let r = Resolved::new(common)?;
            let file = read_pulse(&pulse)?;
            simulate(&r, &file, dt, t_end, t_horizon, integrator)
        }
        Command::Verify { config, pulse, ts, es, out } => {
            let cfg = load_config(&config)?;
            let file = read_pulse(&pulse)?;
            let stored = file.synthesis.as_ref().map(|s| s.budgets).unwrap_or_default();
            let budgets = Budgets {
                time: opt_positive(ts.or(cfg.ts), "ts")?.or(stored.time),
                energy: opt_positive(es.or(cfg.es), "es")?.or(stored.energy),
            };
            let opts = VerifyOptions::default();
            let report = if file.lifting.is_some() {
                verify::verify_entangler(&file.to_entangler()?, budgets, &opts)?
            } else {
                verify::verify_synthesis(&file.to_synthesis()?, budgets, &opts)?
            };
            emit(out.or(cfg.output.report).as_deref(), &json::to_string(&report)?)?;
            for c in &report.checks {
                eprintln!(
                    "{:<18} {}  measured {:.6e}  claimed {:.6e}",
                    c.name,
                    if c.pass { "pass" } else { "FAIL" },
                    c.measured,
                    c.claimed
                );
            }
            if report.overall {
                Ok(())
            } else {
                let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                Err(CliError::VerificationFailed(names.join(", ")))
            }
        }
    }
}

fn read_pulse(path: &Path) -> CliResult<PulseFile> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    PulseFile::from_json(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn simulate(
    r: &Resolved,
    file: &PulseFile,
    dt: Option<f64>,
    t_end: Option<f64>,
    t_horizon: Option<f64>,
    integrator: Integrator,
) -> CliResult<()> {
    let prm = file.params;
    let pulse = file.pulse()?;
    let lifted = file.lifting.is_some();
    let initial = match (r.c.theta0.is_some() || r.cfg.initial.is_some(), &file.synthesis) {
        (true, _) | (false, None) => r.initial()?,
        (false, Some(s)) => s.initial,
    };
    let dt = positive(
        dt.or(r.cfg.dt).unwrap_or(if lifted { default_logical_dt(&prm) } else { default_dt(&prm) }),
        "dt",
    )?;
    let horizon = positive(
        t_horizon.or(r.cfg.t_horizon).unwrap_or(10.0 * prm.drift_period()),
        "t_horizon",
    )?;
    let t_end = match t_end {
        Some(t) => t,
        None => match &file.synthesis {
            Some(s) => s.t_f + horizon,
            None if pulse.t_end().is_finite() => pulse.t_end(),
            None => pulse.t_start() + horizon,
        },
    };
    let traj = if lifted {
        let s0: StateVector = logical::embed_logical(initial);
        let lp = logical::lift_logical_controls(pulse);
        match integrator {
            Integrator::Exp => logical::propagate_two_qubit(&lp, &s0, &prm, dt, t_end)?,
            Integrator::Rk4 => logical::oracle_propagate_two_qubit(&lp, &s0, &prm, dt, t_end)?,
        }
    } else {
        let s0 = bloch_to_state(initial);
        match integrator {
            Integrator::Exp => propagator::propagate(&pulse, &s0, &prm, dt, t_end)?,
            Integrator::Rk4 => propagator::oracle_propagate(&pulse, &s0, &prm, dt, t_end)?,
        }
    };
    eprintln!("{} samples, max norm deviation {:.3e}", traj.samples().len(), traj.max_norm_deviation());
    match r.out(&r.cfg.output.trajectory) {
        Some(p) => files::write_trajectory(create(&p)?, &traj),
        None => files::write_trajectory(std::io::stdout().lock(), &traj),
    }
}
