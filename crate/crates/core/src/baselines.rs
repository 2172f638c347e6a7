//! Reference schemes: no feedback, Schalkwijk-Kailath linear feedback,
//! two-stage signalling with a one-bit feedback channel, and the
//! low-rate energy limit.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::belief::{normal_cdf, qfunc, std_normal_pdf};
use crate::dp::golden_section;
use crate::error::{Error, Result};
use crate::montecarlo::{monte_carlo_with, McReport};
use crate::quadrature::integrate;

/// Absolute tolerance of the one-bit integrals.
pub const INTEGRATION_TOL: f64 = 1e-10;

/// `Q(sqrt(S))`, the best error probability without feedback for any
/// number of channel uses.
pub fn no_feedback_ber(budget: f64) -> f64 {
    qfunc(budget.max(0.0).sqrt())
}

/// Minimum energy per bit for reliable signalling with unit-variance
/// noise, `2 ln 2`.
pub fn shannon_energy_marker() -> f64 {
    2.0 * std::f64::consts::LN_2
}

/// [`shannon_energy_marker`] as `Eb/N0` in dB with `N0 = 2`.
pub fn shannon_marker_db() -> f64 {
    10.0 * std::f64::consts::LN_2.log10()
}

/// `Eb/N0` in dB of budget `S` with `N0 = 2`.
pub fn eb_n0_db(budget: f64) -> f64 {
    10.0 * (budget / 2.0).log10()
}

/// Linear feedback scheme: a fraction `rho` of the energy goes to the
/// first antipodal use, the rest is split evenly over `N - 1` rounds that
/// each send the receiver's scaled estimation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkScheme {
    pub uses: usize,
    pub budget: f64,
    pub rho: f64,
}

impl SkScheme {
    pub fn new(uses: usize, budget: f64, rho: f64) -> Result<Self> {
        if uses < 1 {
            return Err(Error::InvalidConfig("need at least one channel use".into()));
        }
        if !(budget > 0.0) {
            return Err(Error::InvalidConfig(format!("budget must be positive, got {budget}")));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::InvalidConfig(format!("rho must lie in (0, 1], got {rho}")));
        }
        let rho = if uses == 1 { 1.0 } else { rho };
        Ok(Self { uses, budget, rho })
    }

    /// Power of each correction round.
    pub fn correction_power(&self) -> f64 {
        if self.uses == 1 {
            0.0
        } else {
            (1.0 - self.rho) * self.budget / (self.uses - 1) as f64
        }
    }
}

/// `Q(sqrt(rho S) (1 + P)^((N-1)/2))`.
pub fn sk_ber(scheme: &SkScheme) -> f64 {
    let rounds = (scheme.uses - 1) as f64;
    let gain = (0.5 * rounds * scheme.correction_power().ln_1p()).exp();
    qfunc((scheme.rho * scheme.budget).sqrt() * gain)
}

/// Best energy split for the linear scheme, by golden section over
/// `rho` in `[0.01, 1]`.
pub fn sk_optimize(uses: usize, budget: f64) -> Result<(SkScheme, f64)> {
    let at = |rho: f64| SkScheme::new(uses, budget, rho).map(|s| (s, sk_ber(&s)));
    if uses == 1 {
        return at(1.0);
    }
    // The log of the Q argument is concave in rho, so one golden-section
    // pass finds the optimum.
    let objective = |rho: f64| {
        let s = SkScheme { uses, budget, rho };
        -(0.5 * (rho * budget).ln() + 0.5 * (uses - 1) as f64 * s.correction_power().ln_1p())
    };
    let (rho, _) = golden_section(0.01, 1.0, 1e-9, objective);
    let mut best = at(rho)?;
    for edge in [0.01, 1.0] {
        let cand = at(edge)?;
        if cand.1 < best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// Two-stage scheme: send `±b`; if `|y1| <= a` the transmitter learns it
/// over the one-bit feedback link and sends `±c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneBitScheme {
    pub b: f64,
    pub a: f64,
    pub c: f64,
}

impl OneBitScheme {
    pub fn new(b: f64, a: f64, c: f64) -> Result<Self> {
        for (name, x) in [("b", b), ("a", a), ("c", c)] {
            if !(x >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be nonnegative, got {x}")));
            }
        }
        Ok(Self { b, a, c })
    }

    /// `P(|y1| <= a)`; the same under either message.
    pub fn second_use_probability(&self) -> f64 {
        if self.a.is_infinite() {
            return 1.0;
        }
        normal_cdf(self.a - self.b) - normal_cdf(-self.a - self.b)
    }

    pub fn energy(&self) -> f64 {
        self.b * self.b + self.second_use_probability() * self.c * self.c
    }
}

/// Exact error probability and average energy of the one-bit scheme with
/// the ML decoder: `b y1 + c y2` inside the region, `sign(y1)` outside.
///
/// Conditioned on `m = 1`, the error probability is
/// `Q(a + b) + int_{-a}^{a} phi(y - b) Q((b y + c^2) / c) dy`; the case
/// `m = 0` is its mirror image.
pub fn one_bit_ber(scheme: &OneBitScheme) -> (f64, f64) {
    let OneBitScheme { b, a, c } = *scheme;
    let lo = (-a).max(b - 10.0 - b.abs());
    let hi = a.min(b + 10.0);
    let outside = if a.is_infinite() { 0.0 } else { qfunc(a + b) };
    let inside = if hi <= lo {
        0.0
    } else if c <= 0.0 {
        // The decision stays sign(y1) inside the region as well.
        normal_cdf(-b) - normal_cdf(-a - b)
    } else {
        integrate(
            |y| std_normal_pdf(y - b) * qfunc((b * y + c * c) / c),
            lo,
            hi,
            INTEGRATION_TOL,
        )
    };
    (outside + inside, scheme.energy())
}

/// The scheme with first amplitude `b` and threshold `a` whose second
/// amplitude spends the rest of the budget. `None` if `b^2 > S`.
pub fn one_bit_on_budget(budget: f64, b: f64, a: f64) -> Option<OneBitScheme> {
    let rest = budget - b * b;
    if rest < -1e-15 * budget {
        return None;
    }
    let mut s = OneBitScheme { b, a, c: 0.0 };
    let p = s.second_use_probability();
    if p > 0.0 && rest > 0.0 {
        s.c = (rest / p).sqrt();
    }
    Some(s)
}

const B_STEPS: usize = 40;
const A_STEPS: usize = 60;
const A_MAX: f64 = 6.0;

/// Minimises the one-bit error probability at energy `S`.
///
/// The second amplitude is eliminated through the budget. A grid over
/// `(b, a)`, which contains the no-feedback point `b = sqrt(S), a = 0`, is
/// followed by a shrinking compass search from the best cell.
pub fn one_bit_optimize(budget: f64) -> Result<(OneBitScheme, f64)> {
    if !(budget > 0.0) {
        return Err(Error::InvalidConfig(format!("budget must be positive, got {budget}")));
    }
    let root = budget.sqrt();
    let eval = |frac: f64, a: f64| -> f64 {
        match one_bit_on_budget(budget, frac.clamp(0.0, 1.0) * root, a.max(0.0)) {
            Some(s) => one_bit_ber(&s).0,
            None => f64::INFINITY,
        }
    };
    let cells: Vec<(usize, f64, f64, f64)> = (0..=B_STEPS)
        .flat_map(|i| (0..=A_STEPS).map(move |j| (i, j)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, j)| {
            let frac = i as f64 / B_STEPS as f64;
            let a = A_MAX * j as f64 / A_STEPS as f64;
            (i * (A_STEPS + 1) + j, frac, a, eval(frac, a))
        })
        .collect();
    let (_, mut frac, mut a, mut best) = cells.into_iter().fold((usize::MAX, 0.0, 0.0, f64::INFINITY), |acc, c| {
        if c.3 < acc.3 || (c.3 == acc.3 && c.0 < acc.0) {
            c
        } else {
            acc
        }
    });
    let mut step_f = 1.0 / B_STEPS as f64;
    let mut step_a = A_MAX / A_STEPS as f64;
    while step_f > 1e-9 || step_a > 1e-9 {
        let mut moved = false;
        for (df, da) in [(step_f, 0.0), (-step_f, 0.0), (0.0, step_a), (0.0, -step_a)] {
            let (nf, na) = ((frac + df).clamp(0.0, 1.0), (a + da).max(0.0));
            let v = eval(nf, na);
            if v < best {
                best = v;
                frac = nf;
                a = na;
                moved = true;
            }
        }
        if !moved {
            step_f *= 0.5;
            step_a *= 0.5;
        }
    }
    let scheme = one_bit_on_budget(budget, frac * root, a)
        .ok_or_else(|| Error::Infeasible("one-bit search left the budget".into()))?;
    Ok((scheme, best))
}

/// Direct simulation of the one-bit scheme with the ML decoder.
pub fn one_bit_monte_carlo(scheme: &OneBitScheme, trials: u64, seed: u64) -> Result<McReport> {
    let s = *scheme;
    monte_carlo_with(trials, seed, move |rng| {
        let one = rng.random::<bool>();
        let sign = if one { 1.0 } else { -1.0 };
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let y1 = sign * s.b + z1;
        let mut energy = s.b * s.b;
        let stat = if y1.abs() <= s.a {
            energy += s.c * s.c;
            s.b * y1 + s.c * (sign * s.c + z2)
        } else {
            y1
        };
        ((stat > 0.0) != one, energy)
    })
}
