//! Seeded Monte Carlo estimates of error probability and energy.
//!
//! Trial `t` draws from its own ChaCha8 stream `(seed, t)`: first the
//! message bit, then the noise samples in channel-use order (all `M`
//! coordinates of a use before the next use). Trials are tallied in
//! fixed-size chunks which are combined in index order, so reports do not
//! depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::belief::{decide, posterior, MessageBit};
use crate::channel::{channel_use, EncoderSpec, MimoEncoder};
use crate::error::{Error, Result};

const CHUNK: u64 = 4096;
const Z95: f64 = 1.959_963_984_540_054;

/// Random stream of trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub trials: u64,
    pub errors: u64,
    pub ber_hat: f64,
    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub ber_se: f64,
    pub ber_ci95: (f64, f64),
    pub mean_energy: f64,
    pub energy_se: f64,
    pub energy_ci95: (f64, f64),
    /// Largest per-trial energy observed.
    pub energy_max: f64,
    pub seed: u64,
    pub channels: usize,
}

/// The two energy estimators from the same trials: actual transmitted
/// energy and its posterior-weighted form `sum_k p0 p1 v_k^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_se: f64,
    pub rhs_se: f64,
    /// Standard error of the per-trial difference.
    pub diff_se: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    n: u64,
    errors: u64,
    e_sum: f64,
    e_sq: f64,
    e_max: f64,
    w_sum: f64,
    w_sq: f64,
    d_sq: f64,
}

impl Tally {
    fn add(&mut self, error: bool, energy: f64, weighted: f64) {
        self.n += 1;
        self.errors += error as u64;
        self.e_sum += energy;
        self.e_sq += energy * energy;
        self.e_max = self.e_max.max(energy);
        self.w_sum += weighted;
        self.w_sq += weighted * weighted;
        let d = energy - weighted;
        self.d_sq += d * d;
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.n += o.n;
        self.errors += o.errors;
        self.e_sum += o.e_sum;
        self.e_sq += o.e_sq;
        self.e_max = self.e_max.max(o.e_max);
        self.w_sum += o.w_sum;
        self.w_sq += o.w_sq;
        self.d_sq += o.d_sq;
        self
    }
}

fn mean_se(sum: f64, sq: f64, n: u64) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

fn run_chunks(trials: u64, f: impl Fn(u64) -> (bool, f64, f64) + Sync) -> Tally {
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            for trial in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let (err, e, w) = f(trial);
                t.add(err, e, w);
            }
            t
        })
        .collect();
    parts.into_iter().fold(Tally::default(), Tally::merge)
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    Ok(())
}

/// One scalar trial: `(error, transmitted energy, sum p0 p1 v^2)`.
fn scalar_trial(spec: &EncoderSpec, rng: &mut ChaCha8Rng) -> (bool, f64, f64) {
    let m = MessageBit::from_bool(rng.random::<bool>());
    let mut l = 0.0;
    let mut energy = 0.0;
    let mut weighted = 0.0;
    for k in 1..=spec.horizon() {
        let z: f64 = rng.sample(StandardNormal);
        let v = spec.gap(k, l);
        weighted += posterior(l).product() * v * v;
        let (_, _, u, _, next) = channel_use(l, v, m, z);
        energy += u * u;
        l = next;
    }
    (decide(l) != m, energy, weighted)
}

fn report(t: Tally, seed: u64, channels: usize) -> McReport {
    let n = t.n as f64;
    let ber_hat = t.errors as f64 / n;
    let ber_se = (ber_hat * (1.0 - ber_hat) / n).sqrt();
    let (mean_energy, energy_se) = mean_se(t.e_sum, t.e_sq, t.n);
    McReport {
        trials: t.n,
        errors: t.errors,
        ber_hat,
        ber_se,
        ber_ci95: ((ber_hat - Z95 * ber_se).max(0.0), (ber_hat + Z95 * ber_se).min(1.0)),
        mean_energy,
        energy_se,
        energy_ci95: (mean_energy - Z95 * energy_se, mean_energy + Z95 * energy_se),
        energy_max: t.e_max,
        seed,
        channels,
    }
}

pub fn monte_carlo(spec: &EncoderSpec, trials: u64, seed: u64) -> Result<McReport> {
    check_trials(trials)?;
    let t = run_chunks(trials, |i| scalar_trial(spec, &mut trial_rng(seed, i)));
    Ok(report(t, seed, 1))
}

/// Monte Carlo over the vector channel. Each use consumes `M` noise draws.
pub fn monte_carlo_mimo(enc: &MimoEncoder, trials: u64, seed: u64) -> Result<McReport> {
    check_trials(trials)?;
    let n = enc.base().horizon();
    let m_ch = enc.channels();
    let t = run_chunks(trials, |i| {
        let mut rng = trial_rng(seed, i);
        let m = MessageBit::from_bool(rng.random::<bool>());
        let noise: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m_ch).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let tr = enc.run_trial(m, &noise).expect("noise shape matches the encoder");
        (tr.decoded != m, tr.energy_spent, f64::NAN)
    });
    Ok(report(t, seed, m_ch))
}

/// Monte Carlo of an arbitrary scheme: `trial` maps a trial's stream to
/// `(error, transmitted energy)`.
pub fn monte_carlo_with(
    trials: u64,
    seed: u64,
    trial: impl Fn(&mut ChaCha8Rng) -> (bool, f64) + Sync,
) -> Result<McReport> {
    check_trials(trials)?;
    let t = run_chunks(trials, |i| {
        let (err, e) = trial(&mut trial_rng(seed, i));
        (err, e, f64::NAN)
    });
    Ok(report(t, seed, 1))
}

pub fn energy_identity_check(spec: &EncoderSpec, trials: u64, seed: u64) -> Result<EnergyIdentity> {
    check_trials(trials)?;
    let t = run_chunks(trials, |i| scalar_trial(spec, &mut trial_rng(seed, i)));
    let (lhs, lhs_se) = mean_se(t.e_sum, t.e_sq, t.n);
    let (rhs, rhs_se) = mean_se(t.w_sum, t.w_sq, t.n);
    let (_, diff_se) = mean_se(t.e_sum - t.w_sum, t.d_sq, t.n);
    Ok(EnergyIdentity {
        lhs,
        rhs,
        lhs_se,
        rhs_se,
        diff_se,
    })
}
