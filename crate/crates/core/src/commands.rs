//! Subcommands of the `fbdp` binary: `solve`, `sweep`, `simulate` and
//! `policy-dump`.
//!
//! [`run`] parses arguments, writes to the given streams and returns the
//! process exit status:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure |
//! | 2 | calibration infeasible or stalled |
//! | 3 | sweep finished with at least one failed point |
//! | 4 | policy or config file could not be parsed |
//! | 5 | bad arguments |

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::{no_feedback_ber, one_bit_optimize, sk_optimize};
use crate::belief::llr_update;
use crate::calibrate::calibrate_lambda;
use crate::channel::{encoder_amplitudes, mimo_embed, EncoderSpec};
use crate::config::ConfigOverrides;
use crate::dp::SolverConfig;
use crate::error::{Error, Result};
use crate::io::{read_policy_file, write_policy_file, write_sweep_csv, PolicyFile, SweepRow};
use crate::montecarlo::{monte_carlo, monte_carlo_mimo, McReport};

/// Largest horizon a sweep accepts without `--allow-long`.
pub const SWEEP_MAX_N: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "fbdp", version, about = "Energy-optimal one-bit feedback signalling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate and solve one (N, S) instance and write the policy file.
    Solve(SolveArgs),
    /// Calibrate a grid of (N, S) instances and write a CSV.
    Sweep(SweepArgs),
    /// Monte Carlo simulation of a stored policy.
    Simulate(SimulateArgs),
    /// Print one stage of a stored policy as CSV.
    PolicyDump(DumpArgs),
}

/// Solver settings shared by `solve` and `sweep`. Flags override the file.
#[derive(Debug, Clone, Default, Args)]
pub struct SolverFlags {
    /// TOML file with solver settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub l_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub quad_order: Option<usize>,
    #[arg(long)]
    pub v_max: Option<f64>,
    #[arg(long)]
    pub coarse_steps: Option<usize>,
    #[arg(long)]
    pub refine_tol: Option<f64>,
    #[arg(long)]
    pub lambda_tol: Option<f64>,
    #[arg(long)]
    pub density_floor: Option<f64>,
}

impl SolverFlags {
    fn overrides(&self) -> Result<ConfigOverrides> {
        let file = match &self.config {
            Some(p) => ConfigOverrides::load(p)?,
            None => ConfigOverrides::default(),
        };
        let flags = ConfigOverrides {
            l_max: self.l_max,
            points: self.points,
            quad_order: self.quad_order,
            v_max: self.v_max,
            coarse_steps: self.coarse_steps,
            refine_tol: self.refine_tol,
            lambda_tol: self.lambda_tol,
            density_floor: self.density_floor,
            ..Default::default()
        };
        Ok(file.merged(&flags))
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Number of channel uses.
    #[arg(long)]
    pub n: Option<usize>,
    /// Expected energy budget.
    #[arg(long)]
    pub s: Option<f64>,
    /// Where to write the policy file.
    #[arg(short, long, default_value = "policy.fbdp")]
    pub output: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated horizons.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Comma-separated energy budgets.
    #[arg(long, value_delimiter = ',', required_unless_present = "db", conflicts_with = "db")]
    pub s: Vec<f64>,
    /// Comma-separated Eb/N0 values in dB, converted with S = 2 * 10^(dB/10).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub db: Vec<f64>,
    /// Permit horizons above 10.
    #[arg(long)]
    pub allow_long: bool,
    /// Fill the one-bit feedback column (N >= 2 only).
    #[arg(long)]
    pub one_bit: bool,
    /// Fill the Schalkwijk-Kailath column.
    #[arg(long)]
    pub sk: bool,
    /// Monte Carlo trials per point for a spot check on stderr; 0 disables.
    #[arg(long, default_value_t = 0)]
    pub spot_trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Policy file written by `solve`.
    #[arg(long)]
    pub policy: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of parallel channels for the vector embedding.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Coords {
    /// `l,v,u1,u0` at every grid node.
    State,
    /// Stage-2 codewords as functions of the first observation.
    Output,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long)]
    pub policy: PathBuf,
    /// Stage index, 1-based.
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Coords::State)]
    pub coords: Coords,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 5 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::PolicyDump(a) => cmd_policy_dump(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn resolve(flags: &SolverFlags, n: Option<usize>, s: Option<f64>) -> Result<SolverConfig> {
    let o = flags.overrides()?;
    let n = n
        .or(o.n)
        .ok_or_else(|| Error::InvalidConfig("horizon not given (--n or config)".into()))?;
    let s = s
        .or(o.s)
        .ok_or_else(|| Error::InvalidConfig("budget not given (--s or config)".into()))?;
    let o = ConfigOverrides {
        n: Some(n),
        s: Some(s),
        ..o
    };
    o.resolve(n, s)
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let config = resolve(&args.solver, args.n, args.s)?;
    let sol = calibrate_lambda(config.budget, &config)?;
    let file = PolicyFile {
        config: sol.config.clone(),
        lambda: sol.lambda,
        ber: sol.error_probability,
        energy: sol.achieved_energy,
        policy: sol.policy,
    };
    write_policy_file(&args.output, &file)?;
    writeln!(out, "n={}", config.horizon)?;
    writeln!(out, "s={}", config.budget)?;
    writeln!(out, "lambda={:.10e}", file.lambda)?;
    writeln!(out, "ber={:.10e}", file.ber)?;
    writeln!(out, "energy={:.10e}", file.energy)?;
    writeln!(out, "ber_no_feedback={:.10e}", no_feedback_ber(config.budget))?;
    writeln!(out, "v1={:.10e}", file.policy.first_amplitude())?;
    writeln!(out, "policy={}", args.output.display())?;
    Ok(0)
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if let Some(&n) = args.n.iter().find(|&&n| n > SWEEP_MAX_N && !args.allow_long) {
        return Err(Error::InvalidConfig(format!(
            "N={n} exceeds {SWEEP_MAX_N}; pass --allow-long to run long horizons"
        )));
    }
    let budgets: Vec<f64> = if args.s.is_empty() {
        args.db.iter().map(|db| 2.0 * 10f64.powf(db / 10.0)).collect()
    } else {
        args.s.clone()
    };
    let base = args.solver.overrides()?;
    let mut rows = Vec::new();
    let mut failed = 0;
    for &n in &args.n {
        for &s in &budgets {
            let config = ConfigOverrides {
                n: Some(n),
                s: Some(s),
                ..base.clone()
            }
            .resolve(n, s)?;
            let dp = match calibrate_lambda(s, &config) {
                Ok(sol) => {
                    if args.spot_trials > 0 {
                        let spec = EncoderSpec::new(sol.policy.clone());
                        let r = monte_carlo(&spec, args.spot_trials, args.seed)?;
                        writeln!(
                            err,
                            "spot-check N={n} S={s}: mc ber {:.4e} +/- {:.1e} (dp {:.4e}), mc energy {:.5} (dp {:.5})",
                            r.ber_hat, r.ber_se, sol.error_probability, r.mean_energy, sol.achieved_energy
                        )?;
                    }
                    Some((sol.lambda, sol.error_probability, sol.achieved_energy))
                }
                Err(e @ (Error::Infeasible(_) | Error::Stalled { .. } | Error::MassDrift { .. })) => {
                    writeln!(err, "N={n} S={s}: {e}")?;
                    failed += 1;
                    None
                }
                Err(e) => return Err(e),
            };
            let ber_one_bit = if args.one_bit && n >= 2 {
                Some(one_bit_optimize(s)?.1)
            } else {
                None
            };
            let ber_sk = if args.sk { Some(sk_optimize(n, s)?.1) } else { None };
            rows.push(SweepRow {
                budget: s,
                horizon: n,
                dp,
                ber_no_feedback: no_feedback_ber(s),
                ber_one_bit,
                ber_sk,
            });
        }
    }
    match &args.output {
        Some(p) => write_sweep_csv(std::fs::File::create(p)?, &rows)?,
        None => write_sweep_csv(&mut *out, &rows)?,
    }
    Ok(if failed > 0 { 3 } else { 0 })
}

fn print_report(out: &mut dyn Write, r: &McReport) -> Result<()> {
    writeln!(out, "trials={}", r.trials)?;
    writeln!(out, "seed={}", r.seed)?;
    writeln!(out, "channels={}", r.channels)?;
    writeln!(out, "errors={}", r.errors)?;
    writeln!(out, "ber_hat={:.10e}", r.ber_hat)?;
    writeln!(out, "ber_se={:.10e}", r.ber_se)?;
    writeln!(out, "ber_ci95={:.10e},{:.10e}", r.ber_ci95.0, r.ber_ci95.1)?;
    writeln!(out, "mean_energy={:.10e}", r.mean_energy)?;
    writeln!(out, "energy_se={:.10e}", r.energy_se)?;
    writeln!(out, "energy_ci95={:.10e},{:.10e}", r.energy_ci95.0, r.energy_ci95.1)?;
    writeln!(out, "energy_max={:.10e}", r.energy_max)?;
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let file = read_policy_file(&args.policy)?;
    let spec = EncoderSpec::new(file.policy.clone());
    let report = if args.m == 1 {
        monte_carlo(&spec, args.trials, args.seed)?
    } else {
        monte_carlo_mimo(&mimo_embed(&spec, args.m)?, args.trials, args.seed)?
    };
    print_report(out, &report)?;
    writeln!(out, "predicted_ber={:.10e}", file.ber)?;
    writeln!(out, "predicted_energy={:.10e}", file.energy)?;
    Ok(0)
}

pub fn cmd_policy_dump(args: &DumpArgs, out: &mut dyn Write) -> Result<i32> {
    let file = read_policy_file(&args.policy)?;
    let policy = &file.policy;
    let n = policy.horizon();
    if args.k == 0 || args.k > n {
        return Err(Error::InvalidConfig(format!("stage {} outside 1..={n}", args.k)));
    }
    let grid = policy.grid();
    match args.coords {
        Coords::State => {
            writeln!(out, "l,v,u1,u0")?;
            for (i, &v) in policy.stage(args.k).iter().enumerate() {
                let l = grid.node(i);
                let (u1, u0) = encoder_amplitudes(l, v);
                writeln!(out, "{l:.16e},{v:.16e},{u1:.16e},{u0:.16e}")?;
            }
        }
        Coords::Output => {
            if args.k != 2 {
                return Err(Error::InvalidConfig("output coordinates exist for k=2 only".into()));
            }
            let v1 = policy.first_amplitude();
            if v1 <= 0.0 {
                return Err(Error::InvalidConfig(
                    "stage-1 amplitude is zero; y1 carries no information".into(),
                ));
            }
            let (a1, a0) = encoder_amplitudes(0.0, v1);
            writeln!(out, "y1,x_m1,x_m0")?;
            // Sample y1 so that l_2 lands on the grid nodes.
            for (i, &v) in policy.stage(2).iter().enumerate() {
                let l2 = grid.node(i);
                let y1 = l2 / v1;
                debug_assert!((llr_update(0.0, &[a1], &[a0], &[y1])? - l2).abs() < 1e-9 * (1.0 + l2.abs()));
                let (x1, x0) = encoder_amplitudes(l2, v);
                writeln!(out, "{y1:.16e},{x1:.16e},{x0:.16e}")?;
            }
        }
    }
    Ok(0)
}
