//! Smallest transmission with a positive key rate.

use super::{evaluate, Method, SweepAxis};
use crate::error::{Error, Result};
use crate::keyrate::ProtocolSpec;

/// Probes used to check that the key rate grows with transmission.
pub const MONOTONICITY_PROBES: usize = 16;
pub const TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 60;
// Slack for rounding when comparing neighbouring probes.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Smallest `t` found with `K(t) > 0`, within [`TOLERANCE`].
    At(f64),
    /// `K(1) ≤ 0`: no transmission gives a key.
    NeverPositive,
}

impl Threshold {
    pub fn value(self) -> Option<f64> {
        match self {
            Threshold::At(t) => Some(t),
            Threshold::NeverPositive => None,
        }
    }
}

/// Bisection on a key-rate profile `k(t)` over `(0, 1]`.
///
/// The profile is first sampled at `t = j/16`; a decrease between neighbours
/// is reported as [`Error::Precondition`], since bisection would be
/// meaningless. The returned `t*` brackets the sign change:
/// `k(t* − tol) ≤ 0 < k(t*)`.
pub fn find_threshold(mut k: impl FnMut(f64) -> Result<f64>) -> Result<Threshold> {
    let probes: Vec<f64> = (1..=MONOTONICITY_PROBES)
        .map(|j| j as f64 / MONOTONICITY_PROBES as f64)
        .collect();
    let values = probes.iter().map(|&t| k(t)).collect::<Result<Vec<f64>>>()?;
    for j in 1..values.len() {
        if values[j] < values[j - 1] - MONOTONE_SLACK {
            return Err(Error::Precondition(format!(
                "key rate is not increasing in transmission: K({}) = {} > K({}) = {}",
                probes[j - 1],
                values[j - 1],
                probes[j],
                values[j]
            )));
        }
    }
    if values[values.len() - 1] <= 0.0 {
        return Ok(Threshold::NeverPositive);
    }
    let first_positive = values.iter().position(|&v| v > 0.0).expect("last probe is positive");
    let mut hi = probes[first_positive];
    // K(0) ≤ 0 always (no correlations); it is never evaluated.
    let mut lo = if first_positive == 0 {
        0.0
    } else {
        probes[first_positive - 1]
    };
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if k(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Threshold::At(hi))
}

/// Threshold transmission along `axis` for a fixed source and noise.
pub fn threshold_transmission(
    spec: &ProtocolSpec,
    v: f64,
    w1: f64,
    w2: f64,
    axis: SweepAxis,
    method: Method,
) -> Result<Threshold> {
    axis.params(v, w1, w2, 1.0)?;
    find_threshold(|t| Ok(evaluate(method, spec, &axis.params(v, w1, w2, t)?)?.key_rate))
}
