//! Backward dynamic programming over the LLR grid.
//!
//! For a fixed multiplier `lambda` the stage-`k` value is
//!
//! ```text
//! J_k(l) = min_{v >= 0}  lambda p0 p1 v^2
//!                        + p1 E J_{k+1}(l + v^2/2 + v Z)
//!                        + p0 E J_{k+1}(l - v^2/2 + v Z)
//! ```
//!
//! with `J_{N+1}(l) = 1/(e^|l| + 1)`. The posterior weights `p0`, `p1`
//! average over the message that the receiver does not know. `v` is the gap
//! between the two candidate transmissions; only `v >= 0` is searched since
//! `v` and `-v` induce the same state distribution.

use rayon::prelude::*;

use crate::belief::{posterior, qfunc, terminal_cost};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quadrature::{gauss_hermite_quadrature, Quadrature};

/// Amplitudes below this are treated as silence.
pub const V_EPS: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Delay constraint `N`: number of channel uses.
    pub horizon: usize,
    /// Expected energy budget `S` (noise variance 1).
    pub budget: f64,
    pub l_max: f64,
    pub points: usize,
    pub quad_order: usize,
    /// Upper end of the amplitude scan.
    pub v_max: f64,
    pub coarse_steps: usize,
    /// Golden-section bracket width at which refinement stops.
    pub refine_tol: f64,
    /// Relative energy tolerance of the multiplier bisection.
    pub lambda_tol: f64,
    /// Source cells lighter than this are not spread during propagation.
    pub density_floor: f64,
}

impl SolverConfig {
    /// Defaults: 2001-node grid on `[-40, 40]`, 64-point Gauss-Hermite,
    /// 400-step scan up to `6 (1 + sqrt(S))`.
    pub fn new(horizon: usize, budget: f64) -> Self {
        Self {
            horizon,
            budget,
            l_max: 40.0,
            points: 2001,
            quad_order: 64,
            v_max: default_v_max(budget),
            coarse_steps: 400,
            refine_tol: 1e-6,
            lambda_tol: 1e-3,
            density_floor: 1e-16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.horizon < 1 {
            return bad("horizon must be at least 1".into());
        }
        if !(self.budget.is_finite() && self.budget > 0.0) {
            return bad(format!("energy budget must be positive, got {}", self.budget));
        }
        if !(self.v_max.is_finite() && self.v_max > 0.0) {
            return bad(format!("v_max must be positive, got {}", self.v_max));
        }
        if self.coarse_steps < 2 {
            return bad("need at least 2 coarse steps".into());
        }
        if !(self.refine_tol > 0.0) || !(self.lambda_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if !(self.density_floor >= 0.0) {
            return bad("density floor must be nonnegative".into());
        }
        make_grid(self)?;
        if self.quad_order < 2 {
            return bad(format!("quadrature order must be at least 2, got {}", self.quad_order));
        }
        Ok(())
    }
}

pub fn default_v_max(budget: f64) -> f64 {
    6.0 * (1.0 + budget.max(0.0).sqrt())
}

pub fn make_grid(config: &SolverConfig) -> Result<Grid> {
    Grid::new(config.l_max, config.points)
}

/// Sampled `J_k` for one stage (`k` in `1..=N+1`).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    pub stage: usize,
    pub values: Vec<f64>,
    /// The table samples the terminal cost, whose expectation after one
    /// more transmission is known in closed form.
    pub terminal: bool,
}

impl ValueTable {
    pub fn terminal(grid: &Grid, horizon: usize) -> Self {
        Self {
            stage: horizon + 1,
            values: grid.nodes().into_iter().map(terminal_cost).collect(),
            terminal: true,
        }
    }

    pub fn sampled(stage: usize, values: Vec<f64>) -> Self {
        Self {
            stage,
            values,
            terminal: false,
        }
    }

    pub fn eval(&self, grid: &Grid, l: f64) -> f64 {
        grid.interpolate(&self.values, l)
    }
}

/// Per-stage gap amplitudes `v_k(l) >= 0` sampled on a grid.
///
/// Only the `l = 0` entry of stage 1 is ever reached, since every run starts
/// from the uniform prior.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    grid: Grid,
    stages: Vec<Vec<f64>>,
}

impl PolicyTable {
    pub fn new(grid: Grid, stages: Vec<Vec<f64>>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidConfig("policy needs at least one stage".into()));
        }
        for (k, s) in stages.iter().enumerate() {
            if s.len() != grid.points() {
                return Err(Error::DimensionMismatch(format!(
                    "stage {} has {} entries, grid has {} nodes",
                    k + 1,
                    s.len(),
                    grid.points()
                )));
            }
            if let Some(v) = s.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidConfig(format!(
                    "stage {} has invalid amplitude {v}",
                    k + 1
                )));
            }
        }
        Ok(Self { grid, stages })
    }

    /// The all-silent policy.
    pub fn zeros(grid: Grid, horizon: usize) -> Self {
        Self {
            grid,
            stages: vec![vec![0.0; grid.points()]; horizon],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn horizon(&self) -> usize {
        self.stages.len()
    }

    /// Node amplitudes of stage `k` (1-based).
    pub fn stage(&self, k: usize) -> &[f64] {
        &self.stages[k - 1]
    }

    pub fn stages(&self) -> &[Vec<f64>] {
        &self.stages
    }

    /// Interpolated amplitude of stage `k` at state `l`.
    #[inline]
    pub fn amplitude(&self, k: usize, l: f64) -> f64 {
        self.grid.interpolate(&self.stages[k - 1], l)
    }

    /// Stage-1 amplitude at the initial state.
    pub fn first_amplitude(&self) -> f64 {
        self.stages[0][self.grid.center()]
    }
}

#[derive(Debug, Clone)]
pub struct DpSolution {
    pub lambda: f64,
    pub policy: PolicyTable,
    /// `J_1 .. J_{N+1}`.
    pub values: Vec<ValueTable>,
}

/// Grid, quadrature and configuration bundled for repeated solves.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    grid: Grid,
    quad: Quadrature,
    /// `quad` without nodes of negligible weight; used for every expectation.
    eval_quad: Quadrature,
    /// Padding (in nodes) that keeps every scanned query inside the padded
    /// table.
    pad: usize,
}

/// Weights below this contribute less than `1e-18` to any expectation of a
/// value table (all values lie in `[0, 1/2]`).
const WEIGHT_FLOOR: f64 = 1e-18;

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let grid = make_grid(&config)?;
        let quad = gauss_hermite_quadrature(config.quad_order)?;
        let eval_quad = quad.pruned(WEIGHT_FLOOR);
        let widest = eval_quad.nodes.iter().fold(0.0f64, |m, n| m.max(n.abs()));
        let reach = 0.5 * config.v_max * config.v_max + config.v_max * widest;
        let pad = (reach / grid.spacing()).ceil() as usize + 2;
        Ok(Self {
            config,
            grid,
            quad,
            eval_quad,
            pad,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    /// Expected cost-to-go of playing `v` at `l` then following `next`.
    ///
    /// Sampled tables are integrated with the Gauss-Hermite rule against
    /// their linear interpolant. The terminal cost is handled exactly: under
    /// the posterior mixture, `E min(p0, p1)(l')` is the probability that the
    /// next LLR lands on the wrong side of zero.
    pub fn q_value(&self, next: &ValueTable, l: f64, v: f64, lambda: f64) -> f64 {
        if v == 0.0 {
            return self.grid.interpolate(&next.values, l);
        }
        let p = posterior(l);
        let energy = lambda * p.product() * v * v;
        let half = 0.5 * v * v;
        if next.terminal {
            return energy + p.p1 * qfunc((l + half) / v) + p.p0 * qfunc((half - l) / v);
        }
        let up = l + half;
        let down = l - half;
        let mut e1 = 0.0;
        let mut e0 = 0.0;
        for (&n, &w) in self.eval_quad.nodes.iter().zip(&self.eval_quad.weights) {
            let spread = v * n;
            e1 += w * self.grid.interpolate(&next.values, up + spread);
            e0 += w * self.grid.interpolate(&next.values, down + spread);
        }
        energy + p.p1 * e1 + p.p0 * e0
    }

    /// Coarse scan of `[0, v_max]` followed by golden-section refinement
    /// around the best scan point.
    ///
    /// Returns `(v*, J)`. `v = 0` is always a candidate, so `J <= next(l)`;
    /// ties go to the smaller amplitude.
    pub fn inner_minimize(&self, next: &ValueTable, l: f64, lambda: f64) -> (f64, f64) {
        let steps = self.config.coarse_steps;
        let step = self.config.v_max / steps as f64;
        let mut best_i = 0;
        let mut best_q = self.q_value(next, l, 0.0, lambda);
        for i in 1..=steps {
            let q = self.q_value(next, l, i as f64 * step, lambda);
            if q < best_q {
                best_q = q;
                best_i = i;
            }
        }
        // A zero scan winner is kept as is: below one scan step the
        // interpolated objective has no resolved interior minimum.
        if best_i == 0 {
            return (0.0, best_q);
        }
        self.refine(next, l, lambda, best_i, step, steps)
    }

    /// One backward stage: `J_k` and `v_k` at every node from `J_{k+1}`.
    ///
    /// Same search as [`Solver::inner_minimize`], with the coarse scan
    /// evaluated for whole blocks of nodes at once.
    pub fn bellman_backup(&self, next: &ValueTable, lambda: f64) -> (ValueTable, Vec<f64>) {
        const BLOCK: usize = 256;
        let points = self.grid.points();
        let padded = self.padded(next);
        let blocks: Vec<Vec<(f64, f64)>> = (0..points.div_ceil(BLOCK))
            .into_par_iter()
            .map(|b| self.minimize_block(next, &padded, lambda, b * BLOCK..((b + 1) * BLOCK).min(points)))
            .collect();
        let (policy, values): (Vec<f64>, Vec<f64>) = blocks.into_iter().flatten().unzip();
        (
            ValueTable {
                stage: next.stage - 1,
                values,
                terminal: false,
            },
            policy,
        )
    }

    /// `next` extended by `pad` copies of its end values on either side, so
    /// that shifted reads reproduce the saturating interpolation.
    fn padded(&self, next: &ValueTable) -> Vec<f64> {
        let vals = &next.values;
        let mut out = Vec::with_capacity(vals.len() + 2 * self.pad);
        out.extend(std::iter::repeat_n(vals[0], self.pad));
        out.extend_from_slice(vals);
        out.extend(std::iter::repeat_n(vals[vals.len() - 1], self.pad));
        out
    }

    fn minimize_block(
        &self,
        next: &ValueTable,
        padded: &[f64],
        lambda: f64,
        nodes: std::ops::Range<usize>,
    ) -> Vec<(f64, f64)> {
        let steps = self.config.coarse_steps;
        let step = self.config.v_max / steps as f64;
        let coarse = self.scan_block(next, padded, lambda, nodes.clone());
        nodes
            .zip(coarse)
            .map(|(j, (best_i, q0))| {
                if best_i == 0 {
                    return (0.0, q0);
                }
                self.refine(next, self.grid.node(j), lambda, best_i, step, steps)
            })
            .collect()
    }

    /// Coarse scan for a block of nodes: index of the best scan point and
    /// its value, first minimum wins.
    fn scan_block(
        &self,
        next: &ValueTable,
        padded: &[f64],
        lambda: f64,
        nodes: std::ops::Range<usize>,
    ) -> Vec<(usize, f64)> {
        let steps = self.config.coarse_steps;
        let step = self.config.v_max / steps as f64;
        let h = self.grid.spacing();
        let ls: Vec<f64> = nodes.clone().map(|j| self.grid.node(j)).collect();
        let post: Vec<_> = ls.iter().map(|&l| posterior(l)).collect();
        let mut best: Vec<(usize, f64)> = nodes.clone().map(|j| (0, next.values[j])).collect();
        let mut e1 = vec![0.0; ls.len()];
        let mut e0 = vec![0.0; ls.len()];
        for i in 1..=steps {
            let v = i as f64 * step;
            let half = 0.5 * v * v;
            if next.terminal {
                for (k, &l) in ls.iter().enumerate() {
                    e1[k] = qfunc((l + half) / v);
                    e0[k] = qfunc((half - l) / v);
                }
            } else {
                e1.fill(0.0);
                e0.fill(0.0);
                for (&n, &w) in self.eval_quad.nodes.iter().zip(&self.eval_quad.weights) {
                    let spread = v * n;
                    self.accumulate(&mut e1, padded, nodes.start, (half + spread) / h, w);
                    self.accumulate(&mut e0, padded, nodes.start, (spread - half) / h, w);
                }
            }
            let energy = lambda * v * v;
            for k in 0..ls.len() {
                let p = post[k];
                let q = energy * p.product() + p.p1 * e1[k] + p.p0 * e0[k];
                if q < best[k].1 {
                    best[k] = (i, q);
                }
            }
        }
        best
    }

    /// `acc[k] += w * J(node(start + k) + shift * h)` for the padded table.
    #[inline]
    fn accumulate(&self, acc: &mut [f64], padded: &[f64], start: usize, shift: f64, w: f64) {
        let s = shift.floor();
        let t = shift - s;
        let base = (start as isize + s as isize + self.pad as isize) as usize;
        let a = w * (1.0 - t);
        let b = w * t;
        let src = &padded[base..base + acc.len() + 1];
        for (k, out) in acc.iter_mut().enumerate() {
            *out += a * src[k] + b * src[k + 1];
        }
    }

    /// Golden-section refinement around scan point `best_i`; keeps the scan
    /// point unless refinement strictly improves on it.
    fn refine(&self, next: &ValueTable, l: f64, lambda: f64, best_i: usize, step: f64, steps: usize) -> (f64, f64) {
        let best_v = best_i as f64 * step;
        let best_q = self.q_value(next, l, best_v, lambda);
        let lo = (best_i - 1) as f64 * step;
        let hi = ((best_i + 1).min(steps)) as f64 * step;
        let (v, q) = golden_section(lo, hi, self.config.refine_tol, |v| self.q_value(next, l, v, lambda));
        if q < best_q {
            (v, q)
        } else {
            (best_v, best_q)
        }
    }

    /// Full backward recursion from the terminal cost down to stage 1.
    pub fn solve_dp(&self, lambda: f64) -> DpSolution {
        let n = self.config.horizon;
        let mut values = Vec::with_capacity(n + 1);
        let mut stages = Vec::with_capacity(n);
        values.push(ValueTable::terminal(&self.grid, n));
        for _ in 0..n {
            let (table, policy) = self.bellman_backup(values.last().unwrap(), lambda);
            values.push(table);
            stages.push(policy);
        }
        values.reverse();
        stages.reverse();
        DpSolution {
            lambda,
            policy: PolicyTable {
                grid: self.grid,
                stages,
            },
            values,
        }
    }

    /// As [`Solver::solve_dp`], but stage 1 is solved at `l = 0` only.
    ///
    /// The returned policy has zeros at every other stage-1 node. Forward
    /// propagation only reads the root, so this is what the multiplier
    /// search uses. Returns the policy and `J_1(0)`.
    pub fn solve_dp_root(&self, lambda: f64) -> (PolicyTable, f64) {
        let n = self.config.horizon;
        let mut next = ValueTable::terminal(&self.grid, n);
        let mut stages = Vec::with_capacity(n);
        for _ in 1..n {
            let (table, policy) = self.bellman_backup(&next, lambda);
            next = table;
            stages.push(policy);
        }
        let c = self.grid.center();
        let padded = if next.terminal { Vec::new() } else { self.padded(&next) };
        let (v, value) = self.minimize_block(&next, &padded, lambda, c..c + 1)[0];
        let mut first = vec![0.0; self.grid.points()];
        first[self.grid.center()] = v;
        stages.push(first);
        stages.reverse();
        (
            PolicyTable {
                grid: self.grid,
                stages,
            },
            value,
        )
    }
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Returns the best evaluated point; equal values keep the smaller `x`.
pub(crate) fn golden_section(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best_x, mut best_f) = if f2 < f1 { (x2, f2) } else { (x1, f1) };
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 < best_f || (f1 == best_f && x1 < best_x) {
                best_x = x1;
                best_f = f1;
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 < best_f {
                best_x = x2;
                best_f = f2;
            }
        }
    }
    (best_x, best_f)
}

/// Free-function form of [`Solver::solve_dp`].
pub fn solve_dp(lambda: f64, config: &SolverConfig) -> Result<DpSolution> {
    Ok(Solver::new(config.clone())?.solve_dp(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{qfunc, stage_cost, std_normal_pdf};

    fn solver(horizon: usize, budget: f64) -> Solver {
        Solver::new(SolverConfig::new(horizon, budget)).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(1, 1.0).validate().is_ok());
        assert!(SolverConfig::new(0, 1.0).validate().is_err());
        assert!(SolverConfig::new(1, 0.0).validate().is_err());
        let mut c = SolverConfig::new(2, 1.0);
        c.points = 2000;
        assert!(matches!(c.validate(), Err(Error::InvalidGrid(_))));
        let mut c = SolverConfig::new(2, 1.0);
        c.v_max = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(0.0, 3.0, 1e-9, |x| (x - 1.3) * (x - 1.3) + 2.0);
        assert!((x - 1.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    #[test]
    fn q_value_silent_is_identity() {
        let s = solver(1, 1.0);
        let t = ValueTable::terminal(s.grid(), 1);
        for &l in &[-3.0, 0.0, 0.37, 12.0] {
            assert_eq!(s.q_value(&t, l, 0.0, 5.0), t.eval(s.grid(), l));
        }
    }

    #[test]
    fn q_value_constant_table() {
        let s = solver(1, 1.0);
        let c = ValueTable::sampled(1, vec![0.3; s.grid().points()]);
        for &(l, v, lambda) in &[(0.0, 1.0, 1.0), (2.5, 3.0, 0.2), (-7.0, 0.5, 10.0)] {
            let want = 0.3 + stage_cost(l, v, lambda);
            assert!((s.q_value(&c, l, v, lambda) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn q_value_linear_table_gives_posterior_drift() {
        // J(x) = x on a grid wide enough that no quadrature node saturates.
        let mut cfg = SolverConfig::new(1, 1.0);
        cfg.l_max = 400.0;
        cfg.points = 4001;
        let s = Solver::new(cfg).unwrap();
        let lin = ValueTable::sampled(1, s.grid().nodes());
        for &(l, v, lambda) in &[(0.0, 2.0, 0.5), (1.5, 3.0, 0.1), (-4.0, 1.2, 2.0)] {
            let p = posterior(l);
            let want = l + (p.p1 - p.p0) * v * v / 2.0 + stage_cost(l, v, lambda);
            assert!((s.q_value(&lin, l, v, lambda) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn terminal_expectation_matches_brute_force() {
        // Simpson in z of the exact terminal cost, independent of qfunc.
        fn brute(l: f64, v: f64) -> f64 {
            let p = posterior(l);
            let f = |z: f64| {
                std_normal_pdf(z)
                    * (p.p1 * terminal_cost(l + v * v / 2.0 + v * z) + p.p0 * terminal_cost(l - v * v / 2.0 + v * z))
            };
            let simpson = |a: f64, b: f64| {
                let n = 20_000;
                let h = (b - a) / n as f64;
                let mut acc = f(a) + f(b);
                for i in 1..n {
                    acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
                }
                acc * h / 3.0
            };
            // split at the two kinks of the integrand
            let mut cuts = vec![-12.0, (-l - v * v / 2.0) / v, (v * v / 2.0 - l) / v, 12.0];
            cuts.sort_by(f64::total_cmp);
            cuts.windows(2)
                .map(|w| simpson(w[0].max(-12.0), w[1].min(12.0).max(w[0].max(-12.0))))
                .sum()
        }
        let s = solver(1, 1.0);
        let t = ValueTable::terminal(s.grid(), 1);
        for &(l, v) in &[(0.0, 2.0), (0.0, 0.3), (1.7, 1.1), (-3.2, 2.5), (6.0, 4.0)] {
            let got = s.q_value(&t, l, v, 0.0);
            assert!((got - brute(l, v)).abs() < 1e-10, "l={l} v={v}");
        }
    }

    #[test]
    fn expensive_energy_means_silence() {
        let s = solver(1, 1.0);
        let t = ValueTable::terminal(s.grid(), 1);
        for &l in &[0.0, 1.0, -2.0] {
            let (v, q) = s.inner_minimize(&t, l, 1e6);
            assert_eq!(v, 0.0);
            assert_eq!(q, t.eval(s.grid(), l));
        }
    }

    #[test]
    fn free_energy_means_full_amplitude() {
        let s = solver(1, 1.0);
        let t = ValueTable::terminal(s.grid(), 1);
        let (v, _) = s.inner_minimize(&t, 0.0, 0.0);
        assert_eq!(v, s.config().v_max);
    }

    #[test]
    fn single_use_stationary_amplitude() {
        // q(v) = lambda v^2/4 + Q(v/2) is stationary at v = 2 sqrt(S) when
        // lambda = phi(sqrt S) / (2 sqrt S).
        for &budget in &[0.25, 1.0, 4.0] {
            let s = solver(1, budget);
            let t = ValueTable::terminal(s.grid(), 1);
            let root = budget.sqrt();
            let lambda = std_normal_pdf(root) / (2.0 * root);
            let (v, q) = s.inner_minimize(&t, 0.0, lambda);
            assert!((v - 2.0 * root).abs() < 1e-4, "S={budget}: v={v}");
            let exact = lambda * budget + qfunc(root);
            assert!((q - exact).abs() < 1e-12, "S={budget}: q={q} vs {exact}");
        }
    }

    #[test]
    fn backup_with_huge_lambda_is_identity() {
        let s = solver(1, 1.0);
        let t = ValueTable::terminal(s.grid(), 1);
        let (j, pol) = s.bellman_backup(&t, 1e7);
        assert_eq!(j.values, t.values);
        assert!(pol.iter().all(|&v| v == 0.0));
        assert_eq!(j.stage, 1);
    }

    #[test]
    fn block_scan_agrees_with_single_node_search() {
        let s = solver(3, 2.42);
        let lambda = 0.04;
        let sol = s.solve_dp(lambda);
        let g = s.grid();
        for next in &sol.values[1..] {
            let (table, policy) = s.bellman_backup(next, lambda);
            for j in (0..g.points()).step_by(23) {
                let (v, q) = s.inner_minimize(next, g.node(j), lambda);
                assert!((q - table.values[j]).abs() < 1e-12, "stage {} node {j}", table.stage);
                assert!(
                    (v - policy[j]).abs() < 1e-5,
                    "stage {} node {j}: {v} vs {}",
                    table.stage,
                    policy[j]
                );
            }
        }
    }

    #[test]
    fn root_solve_matches_full_solve() {
        let s = solver(2, 2.42);
        let full = s.solve_dp(0.05);
        let (root, value) = s.solve_dp_root(0.05);
        assert_eq!(root.stage(2), full.policy.stage(2));
        assert_eq!(root.first_amplitude(), full.policy.first_amplitude());
        assert_eq!(value, full.values[0].values[s.grid().center()]);
    }

    #[test]
    fn value_chain_and_bounds() {
        let s = solver(3, 2.0);
        let lambda = 0.05;
        let sol = s.solve_dp(lambda);
        assert_eq!(sol.values.len(), 4);
        let c = s.grid().center();
        assert_eq!(sol.values[3].values[c], 0.5);
        for k in 0..3 {
            let (cur, next) = (&sol.values[k].values, &sol.values[k + 1].values);
            for j in 0..cur.len() {
                assert!(cur[j] <= next[j]);
                assert!(cur[j] >= 0.0);
            }
        }
        let v_max = s.config().v_max;
        for k in 1..=3 {
            assert!(sol.policy.stage(k).iter().all(|&v| (0.0..=v_max).contains(&v)));
        }
    }

    #[test]
    fn values_are_symmetric() {
        let s = solver(2, 2.42);
        let sol = s.solve_dp(0.04);
        let g = s.grid();
        let tol = 2.0 * g.spacing() * g.spacing() / 8.0;
        for table in &sol.values {
            for j in 0..g.points() {
                let d = (table.values[j] - table.values[g.mirror(j)]).abs();
                assert!(d <= tol, "stage {} node {j}: {d}", table.stage);
            }
        }
    }
}
