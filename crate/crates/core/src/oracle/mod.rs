//! Independent ground truth and the tools built on top of it: the purified
//! network pipeline, Monte Carlo checks, threshold search and sweeps.

pub mod generic;
pub mod montecarlo;
pub mod suite;
pub mod sweep;
pub mod threshold;

use crate::channel::ChannelParams;
use crate::error::{invalid, Result};
use crate::keyrate::{key_rate, KeyRateBreakdown, ProtocolSpec};

pub use generic::generic_key_rate;
pub use montecarlo::{monte_carlo_mi, McEstimate};
pub use sweep::{sweep, SweepGrid, SweepRow};
pub use threshold::{threshold_transmission, Threshold};

/// Which implementation computes a key rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Closed-form expressions in [`crate::keyrate`].
    Closed,
    /// Purified-network pipeline in [`generic`].
    Generic,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Generic => "generic",
        }
    }
}

/// Method selection for sweeps and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Methods {
    Closed,
    Generic,
    Both,
}

impl Methods {
    pub fn includes(self, m: Method) -> bool {
        matches!(
            (self, m),
            (Methods::Both, _) | (Methods::Closed, Method::Closed) | (Methods::Generic, Method::Generic)
        )
    }
}

pub fn evaluate(method: Method, spec: &ProtocolSpec, params: &ChannelParams) -> Result<KeyRateBreakdown> {
    match method {
        Method::Closed => key_rate(spec, params),
        Method::Generic => generic_key_rate(spec, params),
    }
}

/// How a single transmission value `t` maps onto the two arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Source in the middle: `T1 = T2 = √t`, so the effective transmission is `t`.
    EffectiveSymmetric,
    /// Source at Alice: `T1 = 1`, `T2 = t`.
    EffectiveTrusted,
    /// Each arm has transmission `t`; the effective transmission is `t²`.
    PerArm,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::EffectiveSymmetric => "symmetric",
            SweepAxis::EffectiveTrusted => "trusted",
            SweepAxis::PerArm => "per-arm",
        }
    }

    pub fn params(self, v: f64, w1: f64, w2: f64, t: f64) -> Result<ChannelParams> {
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid(format!("transmission must lie in [0, 1], got {t}")));
        }
        let (t1, t2) = match self {
            SweepAxis::EffectiveSymmetric => (t.sqrt(), t.sqrt()),
            SweepAxis::EffectiveTrusted => (1.0, t),
            SweepAxis::PerArm => (t, t),
        };
        ChannelParams::new(v, t1, t2, w1, w2)
    }
}
