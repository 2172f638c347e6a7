//! Executable encoder and decoder over the AWGN channel with noiseless
//! feedback, and the vector-channel embedding.
//!
//! Both ends track the same LLR: the decoder from the observations, the
//! encoder from the fed-back observations. Given the gap amplitude `v`
//! chosen by the policy, the two candidate transmissions are
//! `u1 = p0 v` and `u0 = -p1 v`, whose posterior mean is zero.

use crate::belief::{decide, llr_update, posterior, MessageBit};
use crate::dp::PolicyTable;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Candidate transmissions `(u1, u0)` at state `l` with gap `v`.
pub fn encoder_amplitudes(l: f64, v: f64) -> (f64, f64) {
    let p = posterior(l);
    (p.p0 * v, -p.p1 * v)
}

/// An encoder/decoder pair driven by a policy table.
#[derive(Debug, Clone)]
pub struct EncoderSpec {
    policy: PolicyTable,
}

impl EncoderSpec {
    pub fn new(policy: PolicyTable) -> Self {
        Self { policy }
    }

    pub fn policy(&self) -> &PolicyTable {
        &self.policy
    }

    pub fn grid(&self) -> &Grid {
        self.policy.grid()
    }

    pub fn horizon(&self) -> usize {
        self.policy.horizon()
    }

    /// Gap amplitude at stage `k` (1-based), interpolated in `l`.
    pub fn gap(&self, k: usize, l: f64) -> f64 {
        self.policy.amplitude(k, l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    /// LLR before this channel use.
    pub l: f64,
    pub v: f64,
    pub u1: f64,
    pub u0: f64,
    /// The transmitted value `u^m`.
    pub u: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub m: MessageBit,
    pub steps: Vec<Step>,
    pub final_llr: f64,
    pub decoded: MessageBit,
    /// `sum_k u_k^2`.
    pub energy_spent: f64,
}

impl Trajectory {
    /// `l_1, ..., l_{N+1}`.
    pub fn llrs(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.steps.iter().map(|s| s.l).collect();
        out.push(self.final_llr);
        out
    }

    pub fn observations(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.y).collect()
    }

    pub fn is_error(&self) -> bool {
        self.decoded != self.m
    }
}

/// One channel use from state `l`: returns `(u1, u0, u, y, l_next)`.
#[inline]
pub(crate) fn channel_use(l: f64, v: f64, m: MessageBit, z: f64) -> (f64, f64, f64, f64, f64) {
    let (u1, u0) = encoder_amplitudes(l, v);
    let u = match m {
        MessageBit::One => u1,
        MessageBit::Zero => u0,
    };
    let y = u + z;
    let d1 = y - u1;
    let d0 = y - u0;
    (u1, u0, u, y, l + 0.5 * (d0 * d0 - d1 * d1))
}

/// Sends `m` through `N` channel uses with the given noise samples.
pub fn run_trial(spec: &EncoderSpec, m: MessageBit, noise: &[f64]) -> Result<Trajectory> {
    let n = spec.horizon();
    if noise.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} noise samples, got {}",
            noise.len()
        )));
    }
    let mut l = 0.0;
    let mut steps = Vec::with_capacity(n);
    let mut energy = 0.0;
    for (k, &z) in (1..=n).zip(noise) {
        let v = spec.gap(k, l);
        let (u1, u0, u, y, next) = channel_use(l, v, m, z);
        steps.push(Step { l, v, u1, u0, u, y });
        energy += u * u;
        l = next;
    }
    Ok(Trajectory {
        m,
        steps,
        final_llr: l,
        decoded: decide(l),
        energy_spent: energy,
    })
}

/// Decoder side: rebuilds `l_1, ..., l_{N+1}` from the observations alone.
pub fn decoder_llrs(spec: &EncoderSpec, observations: &[f64]) -> Result<Vec<f64>> {
    if observations.len() != spec.horizon() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} observations, got {}",
            spec.horizon(),
            observations.len()
        )));
    }
    let mut l = 0.0;
    let mut out = Vec::with_capacity(observations.len() + 1);
    out.push(l);
    for (k, &y) in observations.iter().enumerate() {
        let (u1, u0) = encoder_amplitudes(l, spec.gap(k + 1, l));
        l = llr_update(l, &[u1], &[u0], &[y])?;
        out.push(l);
    }
    Ok(out)
}

/// The scalar scheme run over `M` parallel unit-variance channels with all
/// energy on the first coordinate.
#[derive(Debug, Clone)]
pub struct MimoEncoder {
    base: EncoderSpec,
    channels: usize,
}

pub fn mimo_embed(spec: &EncoderSpec, channels: usize) -> Result<MimoEncoder> {
    if channels < 1 {
        return Err(Error::InvalidConfig("channel count must be at least 1".into()));
    }
    Ok(MimoEncoder {
        base: spec.clone(),
        channels,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimoStep {
    pub l: f64,
    pub v: f64,
    pub u1: Vec<f64>,
    pub u0: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimoTrajectory {
    pub m: MessageBit,
    pub steps: Vec<MimoStep>,
    pub final_llr: f64,
    pub decoded: MessageBit,
    pub energy_spent: f64,
}

impl MimoTrajectory {
    pub fn llrs(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.steps.iter().map(|s| s.l).collect();
        out.push(self.final_llr);
        out
    }
}

impl MimoEncoder {
    pub fn base(&self) -> &EncoderSpec {
        &self.base
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Codeword pair at state `l`: the scalar pair on coordinate 1, zeros
    /// elsewhere.
    pub fn codewords(&self, l: f64, v: f64) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = encoder_amplitudes(l, v);
        let mut u1 = vec![0.0; self.channels];
        let mut u0 = vec![0.0; self.channels];
        u1[0] = a;
        u0[0] = b;
        (u1, u0)
    }

    /// `noise[k]` is the length-`M` noise vector of channel use `k + 1`.
    pub fn run_trial(&self, m: MessageBit, noise: &[Vec<f64>]) -> Result<MimoTrajectory> {
        let n = self.base.horizon();
        if noise.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} noise vectors, got {}",
                noise.len()
            )));
        }
        let mut l = 0.0;
        let mut steps = Vec::with_capacity(n);
        let mut energy = 0.0;
        for (k, z) in (1..=n).zip(noise) {
            if z.len() != self.channels {
                return Err(Error::DimensionMismatch(format!(
                    "noise vector has {} coordinates, expected {}",
                    z.len(),
                    self.channels
                )));
            }
            let v = self.base.gap(k, l);
            let (u1, u0) = self.codewords(l, v);
            let x = match m {
                MessageBit::One => u1.clone(),
                MessageBit::Zero => u0.clone(),
            };
            let y: Vec<f64> = x.iter().zip(z).map(|(a, b)| a + b).collect();
            energy += x.iter().map(|a| a * a).sum::<f64>();
            let next = llr_update(l, &u1, &u0, &y)?;
            steps.push(MimoStep { l, v, u1, u0, x, y });
            l = next;
        }
        Ok(MimoTrajectory {
            m,
            steps,
            final_llr: l,
            decoded: decide(l),
            energy_spent: energy,
        })
    }
}
