//! Secret key rates of continuous-variable QKD when the entangled source sits
//! between Alice and Bob and is controlled by the eavesdropper.
//!
//! - [`gaussian`]: covariance-matrix calculus (symplectic maps, conditioning,
//!   symplectic spectra, entropies).
//! - [`channel`]: the two-arm entangling-cloner channel and its six-mode
//!   purification.
//! - [`keyrate`]: closed-form mutual information, Holevo bounds and key rates
//!   for the eight prepare/measure/reconcile protocols.
//! - [`oracle`]: the purified-network pipeline that cross-checks the closed
//!   forms, Monte Carlo checks, threshold search and sweeps.
//!
//! Units are shot-noise units for variances and bits per channel use for
//! rates.

// Range checks are written so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod gaussian;
pub mod keyrate;
pub mod oracle;

pub use channel::{ChannelParams, PurifiedNetwork, ReducedAbParams};
pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, ModeRole, Quadrature, SymplecticMatrix};
pub use keyrate::{key_rate, KeyRateBreakdown, Measurement, ProtocolSpec, Reconciliation, StatePrep};
pub use oracle::{Method, Methods, SweepAxis};
