//! Forward propagation of the conditional densities of `l_k` given each
//! message, for evaluating a policy's error probability and energy.
//!
//! Densities live on the solver grid as node masses. One transmission with
//! gap `v` moves a node's mass to `N(l +- v^2/2, v^2)`, which is projected
//! back onto the grid with the piecewise-linear hat functions. The
//! projection conserves mass and the mean, and its adjoint is the linear
//! interpolation used by the value tables.

use rayon::prelude::*;

use crate::belief::{posterior, qfunc, std_normal_pdf, MessageBit};
use crate::dp::{make_grid, PolicyTable, SolverConfig, V_EPS};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Largest tolerated deviation of a density's total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-6;

/// Largest half-width of the projection window in standard deviations.
const WINDOW: f64 = 9.0;
/// Light sources use a narrower window; the Gaussian mass they move to
/// the window's end nodes is below this.
const TAIL_MASS: f64 = 1e-20;

const CHUNK: usize = 128;

#[derive(Debug, Clone)]
pub struct Propagation {
    /// `Pr(m_hat != m)` under the uniform prior.
    pub error_probability: f64,
    /// `sum_k E p0 p1 v_k^2`, i.e. the expected transmitted energy.
    pub expected_energy: f64,
    pub stage_energy: Vec<f64>,
    /// Node masses of `l_{N+1}` given `m = 1`.
    pub final_one: Vec<f64>,
    /// Node masses of `l_{N+1}` given `m = 0`.
    pub final_zero: Vec<f64>,
    /// Largest `|mass - 1|` seen over all stages and both messages.
    pub max_mass_drift: f64,
}

pub fn forward_propagate(policy: &PolicyTable, config: &SolverConfig) -> Result<Propagation> {
    let grid = make_grid(config)?;
    if *policy.grid() != grid {
        return Err(Error::DimensionMismatch(
            "policy grid differs from the solver grid".into(),
        ));
    }
    if policy.horizon() != config.horizon {
        return Err(Error::DimensionMismatch(format!(
            "policy has {} stages, horizon is {}",
            policy.horizon(),
            config.horizon
        )));
    }
    propagate_on(policy, config.density_floor)
}

/// Propagation on the policy's own grid.
pub fn propagate_on(policy: &PolicyTable, density_floor: f64) -> Result<Propagation> {
    let grid = *policy.grid();
    let nodes = grid.nodes();
    let weights: Vec<f64> = nodes.iter().map(|&l| posterior(l).product()).collect();
    let mut one = vec![0.0; grid.points()];
    let mut zero = vec![0.0; grid.points()];
    one[grid.center()] = 1.0;
    zero[grid.center()] = 1.0;

    let n = policy.horizon();
    let mut stage_energy = Vec::with_capacity(n);
    let mut error_probability = 0.0;
    let mut max_mass_drift = 0.0f64;
    for k in 1..=n {
        let v = policy.stage(k);
        let energy: f64 = (0..grid.points())
            .map(|j| weights[j] * v[j] * v[j] * 0.5 * (one[j] + zero[j]))
            .sum();
        stage_energy.push(energy);
        if k == n {
            error_probability = final_error(&nodes, v, &one, &zero);
        }
        one = spread(&grid, &one, v, MessageBit::One, density_floor);
        zero = spread(&grid, &zero, v, MessageBit::Zero, density_floor);
        for dens in [&one, &zero] {
            let mass: f64 = dens.iter().sum();
            let drift = (mass - 1.0).abs();
            max_mass_drift = max_mass_drift.max(drift);
            if !(drift <= MASS_TOLERANCE) {
                return Err(Error::MassDrift { stage: k, mass });
            }
        }
    }
    Ok(Propagation {
        error_probability,
        expected_energy: stage_energy.iter().sum(),
        stage_energy,
        final_one: one,
        final_zero: zero,
        max_mass_drift,
    })
}

/// Error probability after the last transmission, computed from the
/// stage-`N` densities with the exact Gaussian tail of each node's move.
/// A silent node with `l = 0` decodes to zero.
fn final_error(nodes: &[f64], v: &[f64], one: &[f64], zero: &[f64]) -> f64 {
    let mut err1 = 0.0;
    let mut err0 = 0.0;
    for j in 0..nodes.len() {
        let (l, vj) = (nodes[j], v[j]);
        if vj < V_EPS {
            if l <= 0.0 {
                err1 += one[j];
            } else {
                err0 += zero[j];
            }
        } else {
            let half = 0.5 * vj * vj;
            err1 += one[j] * qfunc((l + half) / vj);
            err0 += zero[j] * qfunc((half - l) / vj);
        }
    }
    0.5 * (err1 + err0)
}

/// One transmission applied to a density under message `m`.
fn spread(grid: &Grid, density: &[f64], v: &[f64], m: MessageBit, floor: f64) -> Vec<f64> {
    let points = grid.points();
    let partials: Vec<Vec<f64>> = (0..points.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut out = vec![0.0; points];
            let mut scratch = Vec::new();
            for j in c * CHUNK..((c + 1) * CHUNK).min(points) {
                let mass = density[j];
                if mass == 0.0 {
                    continue;
                }
                if mass.abs() < floor || v[j] < V_EPS {
                    out[j] += mass;
                    continue;
                }
                let mean = grid.node(j) + m.drift_sign() * 0.5 * v[j] * v[j];
                project_gaussian(grid, mean, v[j], mass, &mut out, &mut scratch);
            }
            out
        })
        .collect();
    let mut total = vec![0.0; points];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// `t Phi(t) + phi(t)`, the antiderivative of the normal CDF.
fn cdf_integral(t: f64) -> f64 {
    if t <= 0.0 {
        std_normal_pdf(t) + t * qfunc(-t)
    } else {
        t + cdf_integral(-t)
    }
}

/// Half-width `t` with `mass * phi(t) <= TAIL_MASS`, at most [`WINDOW`].
fn window_for(mass: f64) -> f64 {
    let ratio = mass.abs() / TAIL_MASS;
    if ratio <= 1.0 {
        return 1.0;
    }
    (2.0 * ratio.ln()).sqrt().clamp(1.0, WINDOW)
}

/// Adds `mass * int hat_i(x) N(x; mean, sigma^2) dx` to every node `i`.
///
/// The end hats of the window extend to infinity, so the added masses sum
/// to `mass`. Kernels spanning at least five cells use [`project_series`],
/// narrow ones the exact antiderivative form.
pub(crate) fn project_gaussian(grid: &Grid, mean: f64, sigma: f64, mass: f64, out: &mut [f64], scratch: &mut Vec<f64>) {
    let h = grid.spacing();
    let last = grid.points() - 1;
    let center = grid.center() as f64;
    let half = window_for(mass) * sigma;
    let lo = (mean - half) / h + center;
    let hi = (mean + half) / h + center;
    let a = lo.clamp(0.0, last as f64).floor() as usize;
    let b = hi.clamp(0.0, last as f64).ceil() as usize;
    if h <= SERIES_MAX_RATIO * sigma && b - a >= 4 {
        let window = Window {
            a,
            b,
            open_lo: lo < 0.0,
            open_hi: hi > last as f64,
        };
        project_series(grid, mean, sigma, mass, window, out);
    } else {
        project_exact(grid, mean, sigma, mass, a, b, out, scratch);
    }
}

#[allow(clippy::too_many_arguments)]
fn project_exact(
    grid: &Grid,
    mean: f64,
    sigma: f64,
    mass: f64,
    a: usize,
    b: usize,
    out: &mut [f64],
    scratch: &mut Vec<f64>,
) {
    if a == b {
        out[a] += mass;
        return;
    }
    let h = grid.spacing();
    scratch.clear();
    scratch.extend((a..=b).map(|i| sigma * cdf_integral((grid.node(i) - mean) / sigma)));
    let f = scratch.as_slice();
    let scale = mass / h;
    out[a] += scale * (f[1] - f[0]);
    for i in a + 1..b {
        let r = i - a;
        out[i] += scale * ((f[r + 1] - f[r]) - (f[r] - f[r - 1]));
    }
    let r = b - a;
    out[b] += mass - scale * (f[r] - f[r - 1]);
}

/// Kernels with `h / sigma` at most this use the series projection.
const SERIES_MAX_RATIO: f64 = 0.2;

/// Node range of one projection. An open end lies on the grid boundary
/// and also collects the Gaussian tail beyond it.
#[derive(Debug, Clone, Copy)]
struct Window {
    a: usize,
    b: usize,
    open_lo: bool,
    open_hi: bool,
}

/// Hat masses from the moment expansion of a triangle-smoothed Gaussian:
/// with `d = h / sigma` and `t` the standardised node,
/// `d phi(t) (1 + d^2 He2/12 + d^4 He4/360 + d^6 He6/20160 + d^8 He8/1814400)`.
/// The neglected term is below `1e-11` relative for `d <= 0.2` in the bulk
/// of the kernel. Densities at successive nodes come from the recurrence
/// `phi(t + d) = phi(t) exp(-t d - d^2/2)`.
///
/// Open ends get their exact mass. The remaining ends take whatever keeps
/// the total mass exact, and the mean too when both ends are free.
fn project_series(grid: &Grid, mean: f64, sigma: f64, mass: f64, w: Window, out: &mut [f64]) {
    let Window { a, b, open_lo, open_hi } = w;
    let h = grid.spacing();
    let d = h / sigma;
    let d2 = d * d;
    let (c2, c4, c6, c8) = (
        d2 / 12.0,
        d2 * d2 / 360.0,
        d2 * d2 * d2 / 20160.0,
        d2 * d2 * d2 * d2 / 1_814_400.0,
    );
    let weight = |t: f64, pdf: f64| {
        let s = t * t;
        let he2 = s - 1.0;
        let he4 = (s - 6.0) * s + 3.0;
        let he6 = ((s - 15.0) * s + 45.0) * s - 15.0;
        let he8 = (((s - 28.0) * s + 210.0) * s - 420.0) * s + 105.0;
        d * pdf * (1.0 + c2 * he2 + c4 * he4 + c6 * he6 + c8 * he8)
    };
    let t_of = |i: usize| (grid.node(i) - mean) / sigma;
    let pos = mean / h + grid.center() as f64;
    let pivot = (pos.round().max(0.0) as usize).clamp(a + 1, b - 1);
    let q = (-d2).exp();
    let (mut total, mut first) = (0.0, 0.0);
    let mut add = |i: usize, w: f64, out: &mut [f64]| {
        out[i] += mass * w;
        total += w;
        first += w * (i as f64 - pivot as f64);
    };
    let t0 = t_of(pivot);
    let pdf0 = std_normal_pdf(t0);
    add(pivot, weight(t0, pdf0), out);
    let mut pdf = pdf0;
    let mut ratio = (-t0 * d - 0.5 * d2).exp();
    for i in pivot + 1..b {
        pdf *= ratio;
        ratio *= q;
        add(i, weight(t_of(i), pdf), out);
    }
    // Downward: phi(t - d) = phi(t) exp(t d - d^2/2).
    let mut pdf = pdf0;
    let mut ratio = (t0 * d - 0.5 * d2).exp();
    for i in (a + 1..pivot).rev() {
        pdf *= ratio;
        ratio *= q;
        add(i, weight(t_of(i), pdf), out);
    }
    let f2 = |i: usize| sigma * cdf_integral(t_of(i));
    let wa = open_lo.then(|| (f2(a + 1) - f2(a)) / h);
    let wb = open_hi.then(|| 1.0 - (f2(b) - f2(b - 1)) / h);
    let rest = 1.0 - total;
    let (wa, wb, spill) = match (wa, wb) {
        (Some(x), Some(y)) => (x, y, rest - x - y),
        (Some(x), None) => (x, rest - x, 0.0),
        (None, Some(y)) => (rest - y, y, 0.0),
        (None, None) => {
            // Masses at a and b fixing both the total and the mean, in node
            // units relative to the pivot.
            let rest_first = (pos - pivot as f64) - first;
            let (xa, xb) = (a as f64 - pivot as f64, b as f64 - pivot as f64);
            let y = (rest_first - xa * rest) / (xb - xa);
            (rest - y, y, 0.0)
        }
    };
    out[a] += mass * wa;
    out[b] += mass * wb;
    out[pivot] += mass * spill;
}
