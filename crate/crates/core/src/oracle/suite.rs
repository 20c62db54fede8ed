//! Self-verification suite behind `cvqkd verify`.
//!
//! Each check returns a pass/fail outcome with a one-line detail; an error
//! raised while evaluating a check counts as a failure.

use super::montecarlo::monte_carlo_mi;
use super::threshold::threshold_transmission;
use super::{generic_key_rate, Method, SweepAxis, Threshold};
use crate::channel::{build_purified_network, reduced_ab, ChannelParams};
use crate::error::Result;
use crate::gaussian::{
    apply_symplectic, beam_splitter, condition_heterodyne, condition_homodyne, von_neumann_entropy, CovarianceMatrix,
    Quadrature,
};
use crate::keyrate::{key_rate, mutual_information, Measurement, ProtocolSpec, Reconciliation, StatePrep};

/// Effective-transmission threshold of coherent/homodyne/direct with the
/// source in the middle, V = 20, W = 1 (purified-network pipeline).
pub const MIDDLE_THRESHOLD_COHERENT_HOM_V20: f64 = 0.367_448;

pub const GRID_V: [f64; 5] = [1.2, 2.0, 8.0, 20.0, 100.0];
pub const GRID_T: [f64; 5] = [0.1, 0.35, 0.7, 0.9, 1.0];
pub const GRID_W: [f64; 3] = [1.0, 1.01, 1.2];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            mc_samples: 1_000_000,
            seed: 2012,
        }
    }
}

const fn spec(p: StatePrep, m: Measurement, r: Reconciliation) -> ProtocolSpec {
    ProtocolSpec::new(p, m, r)
}

const COH_HOM_DR: ProtocolSpec = spec(StatePrep::Coherent, Measurement::Homodyne, Reconciliation::Direct);

/// Channel points of the standard grid (symmetric noise `W1 = W2`).
pub fn standard_channels() -> Vec<ChannelParams> {
    let mut out = Vec::new();
    for v in GRID_V {
        for t1 in GRID_T {
            for t2 in GRID_T {
                for w in GRID_W {
                    out.push(ChannelParams {
                        v,
                        t1,
                        t2,
                        w1: w,
                        w2: w,
                    });
                }
            }
        }
    }
    out
}

fn outcome(name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn lossless_decoupling() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut log_v_err = 0.0f64;
    for v in [1.5, 4.0, 20.0] {
        let p = ChannelParams::new(v, 1.0, 1.0, 1.0, 1.0)?;
        for s in ProtocolSpec::all() {
            let k = key_rate(&s, &p)?;
            worst = worst.max(k.holevo.abs()).max((k.key_rate - k.i_ab).abs());
            if s.state_prep == StatePrep::Squeezed && s.measurement == Measurement::Homodyne {
                log_v_err = log_v_err.max((k.key_rate - v.log2()).abs());
            }
        }
    }
    Ok((
        worst <= 1e-9 && log_v_err <= 1e-9,
        format!("max |χ|,|K-I| = {worst:.2e}; |K - log2 V| = {log_v_err:.2e}"),
    ))
}

fn oracle_agreement(channels: &[ChannelParams]) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for p in channels {
        for s in ProtocolSpec::all() {
            let d = (key_rate(&s, p)?.key_rate - generic_key_rate(&s, p)?.key_rate).abs();
            worst = worst.max(d);
        }
    }
    Ok((
        worst <= 1e-7,
        format!(
            "max |K_closed - K_generic| = {worst:.2e} over {} points",
            8 * channels.len()
        ),
    ))
}

fn purification_identity(channels: &[ChannelParams]) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for p in channels {
        let net = build_purified_network(p)?;
        let d = von_neumann_entropy(&net.eve_marginal()?)? - von_neumann_entropy(&net.alice_bob()?)?;
        worst = worst.max(d.abs());
    }
    Ok((worst <= 1e-8, format!("max |S(E) - S(AB)| = {worst:.2e}")))
}

fn symmetric_channels() -> Vec<ChannelParams> {
    let mut out = Vec::new();
    for v in GRID_V {
        for t in GRID_T {
            for w in GRID_W {
                out.push(ChannelParams {
                    v,
                    t1: t,
                    t2: t,
                    w1: w,
                    w2: w,
                });
            }
        }
    }
    out
}

fn mirror_equivalences() -> Result<(bool, String)> {
    use Measurement::*;
    use Reconciliation::*;
    use StatePrep::*;
    let pairs = [
        (spec(Coherent, Homodyne, Direct), spec(Squeezed, Heterodyne, Reverse)),
        (spec(Squeezed, Heterodyne, Direct), spec(Coherent, Homodyne, Reverse)),
    ];
    let mut worst = 0.0f64;
    for p in symmetric_channels() {
        for (x, y) in pairs {
            worst = worst.max((generic_key_rate(&x, &p)?.key_rate - generic_key_rate(&y, &p)?.key_rate).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max |K_DR - K_RR(mirror)| = {worst:.2e}")))
}

fn self_dual() -> Result<(bool, String)> {
    use Measurement::*;
    use Reconciliation::*;
    use StatePrep::*;
    let mut worst = 0.0f64;
    for p in symmetric_channels() {
        for (prep, meas) in [(Squeezed, Homodyne), (Coherent, Heterodyne)] {
            let dr = key_rate(&spec(prep, meas, Direct), &p)?.key_rate;
            let rr = key_rate(&spec(prep, meas, Reverse), &p)?.key_rate;
            worst = worst.max((dr - rr).abs());
        }
    }
    Ok((worst <= 1e-9, format!("max |K_DR - K_RR| = {worst:.2e}")))
}

fn three_db_limit() -> Result<(bool, String)> {
    let t = threshold_transmission(&COH_HOM_DR, 1e4, 1.0, 1.0, SweepAxis::EffectiveTrusted, Method::Closed)?;
    Ok(match t {
        Threshold::At(t) => ((t - 0.5).abs() <= 1e-3, format!("trusted-source threshold T = {t:.6}")),
        Threshold::NeverPositive => (false, "never positive".into()),
    })
}

fn beats_three_db() -> Result<(bool, String)> {
    let t = threshold_transmission(
        &COH_HOM_DR,
        20.0,
        1.0,
        1.0,
        SweepAxis::EffectiveSymmetric,
        Method::Generic,
    )?;
    let k = generic_key_rate(&COH_HOM_DR, &ChannelParams::symmetric(20.0, 0.45, 1.0)?)?.key_rate;
    Ok(match t {
        Threshold::At(t) => (
            t < 0.5 && k > 0.0 && (t - MIDDLE_THRESHOLD_COHERENT_HOM_V20).abs() <= 1e-5,
            format!("middle-source threshold T_eff = {t:.6}; K(0.45) = {k:.6}"),
        ),
        Threshold::NeverPositive => (false, "never positive".into()),
    })
}

fn reverse_squeezed_secure() -> Result<(bool, String)> {
    let s = spec(StatePrep::Squeezed, Measurement::Homodyne, Reconciliation::Reverse);
    let mut min = f64::INFINITY;
    for j in 1..=19 {
        let t = 0.05 * j as f64;
        min = min.min(key_rate(&s, &ChannelParams::trusted(20.0, t, 1.0)?)?.key_rate);
    }
    Ok((min > 0.0, format!("min K over T2 in 0.05..0.95 = {min:.6}")))
}

fn dominance() -> Result<(bool, String)> {
    let mut counterexamples = Vec::new();
    for v in [2.0, 8.0, 20.0] {
        for t in [0.2, 0.4, 0.6, 0.8] {
            let p = ChannelParams::symmetric(v, t, 1.0)?;
            let best = key_rate(&COH_HOM_DR, &p)?.key_rate;
            for s in ProtocolSpec::all() {
                if s == COH_HOM_DR {
                    continue;
                }
                let k = key_rate(&s, &p)?.key_rate;
                if k > best + 1e-9 {
                    counterexamples.push(format!("{s} at V={v} T_eff={t}: {k:.4} > {best:.4}"));
                }
            }
        }
    }
    Ok(if counterexamples.is_empty() {
        (true, "coherent-hom/dr maximal on every grid point".into())
    } else {
        (
            false,
            format!(
                "{} counterexamples, first: {}",
                counterexamples.len(),
                counterexamples[0]
            ),
        )
    })
}

fn excess_noise_monotone() -> Result<(bool, String)> {
    let mut violations = Vec::new();
    for s in ProtocolSpec::all() {
        let mut prev = f64::INFINITY;
        for w in [1.0, 1.05, 1.1, 1.5] {
            let k = key_rate(&s, &ChannelParams::symmetric(20.0, 0.6, w)?)?.key_rate;
            if k > prev {
                violations.push(format!("{s} at W={w}"));
            }
            prev = k;
        }
    }
    Ok((
        violations.is_empty(),
        format!("{} increases {:?}", violations.len(), violations),
    ))
}

/// Points covering all four prepare/measure pairs.
pub fn monte_carlo_points() -> Vec<(ProtocolSpec, ChannelParams)> {
    use Measurement::*;
    use Reconciliation::*;
    use StatePrep::*;
    vec![
        (
            spec(Squeezed, Homodyne, Direct),
            ChannelParams {
                v: 4.0,
                t1: 1.0,
                t2: 1.0,
                w1: 1.0,
                w2: 1.0,
            },
        ),
        (
            spec(Squeezed, Heterodyne, Direct),
            ChannelParams {
                v: 20.0,
                t1: 0.7,
                t2: 0.7,
                w1: 1.0,
                w2: 1.0,
            },
        ),
        (
            spec(Coherent, Homodyne, Direct),
            ChannelParams {
                v: 20.0,
                t1: 0.6,
                t2: 0.8,
                w1: 1.1,
                w2: 1.05,
            },
        ),
        (
            spec(Coherent, Heterodyne, Direct),
            ChannelParams {
                v: 8.0,
                t1: 0.35,
                t2: 0.9,
                w1: 1.2,
                w2: 1.0,
            },
        ),
        (
            spec(Squeezed, Homodyne, Reverse),
            ChannelParams {
                v: 100.0,
                t1: 0.1,
                t2: 1.0,
                w1: 1.01,
                w2: 1.01,
            },
        ),
        (
            spec(Coherent, Heterodyne, Reverse),
            ChannelParams {
                v: 2.0,
                t1: 0.9,
                t2: 0.9,
                w1: 1.0,
                w2: 1.0,
            },
        ),
    ]
}

fn monte_carlo(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (s, p) in monte_carlo_points() {
        let est = monte_carlo_mi(&s, &p, cfg.mc_samples, cfg.seed)?;
        let exact = mutual_information(&s, &reduced_ab(&p)?)?;
        worst = worst.max((est.estimate - exact).abs() / est.std_error);
    }
    Ok((
        worst <= 3.0,
        format!(
            "max |MC - I_AB| / stderr = {worst:.2} (n = {}, seed = {})",
            cfg.mc_samples, cfg.seed
        ),
    ))
}

fn squeezed_holevo_invariance(channels: &[ChannelParams]) -> Result<(bool, String)> {
    let hom = spec(StatePrep::Squeezed, Measurement::Homodyne, Reconciliation::Direct);
    let het = spec(StatePrep::Squeezed, Measurement::Heterodyne, Reconciliation::Direct);
    let mut worst = 0.0f64;
    for p in channels {
        worst = worst.max((generic_key_rate(&hom, p)?.holevo - generic_key_rate(&het, p)?.holevo).abs());
    }
    Ok((worst <= 1e-8, format!("max |χ_hom - χ_het| = {worst:.2e}")))
}

/// One-shot heterodyne against splitter + two homodynes on a few
/// correlated states.
fn heterodyne_two_paths() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for p in standard_channels().iter().step_by(37) {
        let net = build_purified_network(p)?;
        for mode in 0..net.cm.n_modes() {
            let direct = condition_heterodyne(&net.cm, mode)?;
            let explicit = heterodyne_by_splitter(&net.cm, mode)?;
            worst = worst.max(direct.max_abs_diff(&explicit));
        }
    }
    Ok((worst <= 1e-10, format!("max elementwise difference = {worst:.2e}")))
}

/// Heterodyne as a 50/50 splitter with vacuum, `x` on the signal port and `p`
/// on the vacuum port. Remaining modes come back in their original order.
pub fn heterodyne_by_splitter(gamma: &CovarianceMatrix, mode: usize) -> Result<CovarianceMatrix> {
    let port = gamma.n_modes();
    let extended = gamma.direct_sum(&crate::gaussian::vacuum_cm(1)?);
    let mixed = apply_symplectic(&extended, &beam_splitter(0.5, mode, port, port + 1)?)?;
    let after_x = condition_homodyne(&mixed, mode, Quadrature::X)?;
    // the vacuum port is now the last mode
    condition_homodyne(&after_x, after_x.n_modes() - 1, Quadrature::P)
}

pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckOutcome> {
    let grid = standard_channels();
    vec![
        outcome("lossless decoupling", lossless_decoupling()),
        outcome("closed form vs purified network", oracle_agreement(&grid)),
        outcome("purification identity S(E)=S(AB)", purification_identity(&grid)),
        outcome("mirror equivalences (generic)", mirror_equivalences()),
        outcome("self-dual protocols DR=RR", self_dual()),
        outcome("3 dB limit, trusted source", three_db_limit()),
        outcome("beyond 3 dB, source in the middle", beats_three_db()),
        outcome("reverse squeezed-hom always secure", reverse_squeezed_secure()),
        outcome("coherent-hom/dr dominance", dominance()),
        outcome("excess-noise monotonicity", excess_noise_monotone()),
        outcome("Monte Carlo mutual information", monte_carlo(cfg)),
        outcome("squeezed-prep Holevo invariance", squeezed_holevo_invariance(&grid)),
        outcome("heterodyne two-path equality", heterodyne_two_paths()),
    ]
}
