//! Choice of the Lagrange multiplier so that the optimal policy spends the
//! energy budget exactly.
//!
//! Achieved energy is non-increasing in `lambda`. The search works on
//! `log lambda` against `log E - log S`, keeps a sign-changing bracket and
//! takes Illinois false-position steps, falling back to bisection whenever
//! a step fails to halve the bracket.

use std::cell::Cell;

use crate::dp::{DpSolution, PolicyTable, Solver, SolverConfig, ValueTable};
use crate::error::{Error, Result};
use crate::propagate::{forward_propagate, Propagation};

pub const LAMBDA_LO: f64 = 1e-6;
pub const LAMBDA_HI: f64 = 1e3;
/// Number of tenfold bracket expansions tried on each side.
pub const MAX_EXPANSIONS: usize = 12;
const MAX_PROBES: usize = 200;

#[derive(Debug, Clone)]
pub struct CalibratedSolution {
    pub lambda: f64,
    pub policy: PolicyTable,
    /// `J_1, ..., J_{N+1}`.
    pub values: Vec<ValueTable>,
    pub achieved_energy: f64,
    pub error_probability: f64,
    pub propagation: Propagation,
    pub config: SolverConfig,
    /// Number of multiplier values evaluated.
    pub probes: usize,
}

/// One point on the energy-versus-multiplier curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub lambda: f64,
    pub energy: f64,
    pub error_probability: f64,
}

/// Solve and propagate at a single multiplier, evaluating stage 1 only at
/// the root.
pub fn probe(solver: &Solver, lambda: f64) -> Result<Probe> {
    let (policy, _) = solver.solve_dp_root(lambda);
    let p = forward_propagate(&policy, solver.config())?;
    Ok(Probe {
        lambda,
        energy: p.expected_energy,
        error_probability: p.error_probability,
    })
}

/// Calibrates the multiplier for budget `budget`; every other setting is
/// taken from `config`.
pub fn calibrate_lambda(budget: f64, config: &SolverConfig) -> Result<CalibratedSolution> {
    let mut config = config.clone();
    config.budget = budget;
    config.validate()?;
    let solver = Solver::new(config.clone())?;
    let (lambda, probes) = search(&solver)?;
    let DpSolution { policy, values, .. } = solver.solve_dp(lambda);
    let propagation = forward_propagate(&policy, &config)?;
    Ok(CalibratedSolution {
        lambda,
        achieved_energy: propagation.expected_energy,
        error_probability: propagation.error_probability,
        policy,
        values,
        propagation,
        config,
        probes,
    })
}

fn search(solver: &Solver) -> Result<(f64, usize)> {
    let cfg = solver.config();
    let (s, tol) = (cfg.budget, cfg.lambda_tol);
    let count = Cell::new(0usize);
    let eval = |lambda: f64| -> Result<Probe> {
        count.set(count.get() + 1);
        probe(solver, lambda)
    };
    let done = |p: &Probe| ((p.energy - s) / s).abs() <= tol;

    let mut lo = eval(LAMBDA_LO)?;
    for _ in 0..MAX_EXPANSIONS {
        if lo.energy > s || done(&lo) {
            break;
        }
        lo = eval(lo.lambda / 10.0)?;
    }
    if done(&lo) {
        return Ok((lo.lambda, count.get()));
    }
    if lo.energy <= s {
        return Err(Error::Infeasible(format!(
            "energy {:.6} at lambda {:.3e} stays below the budget {s}; raise v_max or l_max",
            lo.energy, lo.lambda
        )));
    }
    let mut hi = eval(LAMBDA_HI)?;
    for _ in 0..MAX_EXPANSIONS {
        if hi.energy < s || done(&hi) {
            break;
        }
        hi = eval(hi.lambda * 10.0)?;
    }
    if done(&hi) {
        return Ok((hi.lambda, count.get()));
    }
    if hi.energy >= s {
        return Err(Error::Infeasible(format!(
            "energy {:.6} at lambda {:.3e} stays above the budget {s}",
            hi.energy, hi.lambda
        )));
    }

    let resid = |p: &Probe| p.energy.max(f64::MIN_POSITIVE).ln() - s.ln();
    let (mut x_lo, mut r_lo) = (lo.lambda.ln(), resid(&lo));
    let (mut x_hi, mut r_hi) = (hi.lambda.ln(), resid(&hi));
    let mut last_side = 0i8;
    let mut width = x_hi - x_lo;
    let mut best = if (lo.energy - s).abs() < (hi.energy - s).abs() {
        lo
    } else {
        hi
    };
    while count.get() < MAX_PROBES {
        let bisect = x_hi - x_lo > 0.5 * width;
        width = x_hi - x_lo;
        let mut x = if bisect || !(r_lo - r_hi).is_normal() {
            0.5 * (x_lo + x_hi)
        } else {
            x_lo + r_lo * (x_hi - x_lo) / (r_lo - r_hi)
        };
        if !(x > x_lo && x < x_hi) {
            x = 0.5 * (x_lo + x_hi);
        }
        if x <= x_lo || x >= x_hi {
            return Err(Error::Stalled {
                lambda: best.lambda,
                energy: best.energy,
                budget: s,
            });
        }
        let p = eval(x.exp())?;
        if (p.energy - s).abs() < (best.energy - s).abs() {
            best = p;
        }
        if done(&p) {
            return Ok((p.lambda, count.get()));
        }
        let r = resid(&p);
        if r > 0.0 {
            x_lo = x;
            r_lo = r;
            if last_side == -1 {
                r_hi *= 0.5;
            }
            last_side = -1;
        } else {
            x_hi = x;
            r_hi = r;
            if last_side == 1 {
                r_lo *= 0.5;
            }
            last_side = 1;
        }
    }
    Err(Error::Stalled {
        lambda: best.lambda,
        energy: best.energy,
        budget: s,
    })
}
