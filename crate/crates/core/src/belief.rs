//! Scalar belief-state math shared by the solver, the simulator and the
//! baselines.
//!
//! The log-likelihood ratio `l = log p(y|m=1)/p(y|m=0)` is carried as a
//! plain `f64`. It is finite everywhere in this crate; the solver clamps it
//! to its grid range.

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// The transmitted message. Both values are a priori equally likely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageBit {
    Zero,
    One,
}

impl MessageBit {
    pub fn from_bool(one: bool) -> Self {
        if one {
            MessageBit::One
        } else {
            MessageBit::Zero
        }
    }

    /// `(-1)^(m+1)`: +1 for `One`, -1 for `Zero`.
    pub fn drift_sign(self) -> f64 {
        match self {
            MessageBit::One => 1.0,
            MessageBit::Zero => -1.0,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            MessageBit::Zero => 0,
            MessageBit::One => 1,
        }
    }
}

/// Posterior probabilities of the two messages given the LLR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub p0: f64,
    pub p1: f64,
}

impl Posterior {
    /// `p0 * p1 = 1 / (4 cosh^2(l/2))`, the energy weight of the gap amplitude.
    pub fn product(&self) -> f64 {
        self.p0 * self.p1
    }
}

pub fn std_normal_pdf(t: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Gaussian upper tail `Q(a) = P(Z > a)`.
pub fn qfunc(a: f64) -> f64 {
    0.5 * libm::erfc(a * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal CDF, `Phi(a) = Q(-a)`.
pub fn normal_cdf(a: f64) -> f64 {
    qfunc(-a)
}

/// Logistic posteriors `p1 = 1/(e^-l + 1)`, `p0 = 1/(e^l + 1)`.
///
/// Only `exp(-|l|)` is ever evaluated, so this is exact in the tails and
/// symmetric: `posterior(l).p1 == posterior(-l).p0` bit for bit.
pub fn posterior(l: f64) -> Posterior {
    let e = (-l.abs()).exp();
    let small = e / (1.0 + e);
    let large = 1.0 - small;
    if l >= 0.0 {
        Posterior { p0: small, p1: large }
    } else {
        Posterior { p0: large, p1: small }
    }
}

/// Decoder-side LLR update `l - |y-u1|^2/2 + |y-u0|^2/2` for vector
/// channels.
///
/// Each coordinate contributes `(y-u0)^2 - (y-u1)^2`, so coordinates where
/// both candidate codewords are zero add exactly nothing.
pub fn llr_update(l: f64, u1: &[f64], u0: &[f64], y: &[f64]) -> Result<f64> {
    if u1.len() != u0.len() || u1.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "u1 has {} coordinates, u0 {}, y {}",
            u1.len(),
            u0.len(),
            y.len()
        )));
    }
    let mut acc = 0.0;
    for ((&a, &b), &obs) in u1.iter().zip(u0).zip(y) {
        let d1 = obs - a;
        let d0 = obs - b;
        acc += d0 * d0 - d1 * d1;
    }
    Ok(l + 0.5 * acc)
}

/// Encoder-side dynamics `f^m(l, v, z) = l + (-1)^(m+1) v^2/2 + v z`.
pub fn transition(l: f64, v: f64, m: MessageBit, z: f64) -> f64 {
    l + m.drift_sign() * 0.5 * v * v + v * z
}

/// Lagrangian stage cost `lambda * p0 * p1 * v^2`.
pub fn stage_cost(l: f64, v: f64, lambda: f64) -> f64 {
    lambda * posterior(l).product() * v * v
}

/// Posterior probability of the losing hypothesis, `1/(e^|l| + 1)`.
pub fn terminal_cost(l: f64) -> f64 {
    let e = (-l.abs()).exp();
    e / (1.0 + e)
}

/// Maximum-likelihood decision; the tie `l == 0` decodes to zero.
pub fn decide(l: f64) -> MessageBit {
    MessageBit::from_bool(l > 0.0)
}
