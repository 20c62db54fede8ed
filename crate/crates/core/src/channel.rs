//! The untrusted-source channel: an EPR source between Alice and Bob, each arm
//! attacked by its own entangling cloner.

use crate::error::{invalid, Result};
use crate::gaussian::{apply_symplectic, beam_splitter, epr_cm, partial_trace, CovarianceMatrix, ModeRole};

/// Source variance, arm transmissions and cloner variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Local variance of each source mode (shot-noise units).
    pub v: f64,
    /// Transmission of Alice's arm.
    pub t1: f64,
    /// Transmission of Bob's arm.
    pub t2: f64,
    /// Variance of the cloner on Alice's arm.
    pub w1: f64,
    /// Variance of the cloner on Bob's arm.
    pub w2: f64,
}

impl ChannelParams {
    pub fn new(v: f64, t1: f64, t2: f64, w1: f64, w2: f64) -> Result<Self> {
        let p = Self { v, t1, t2, w1, w2 };
        p.validate()?;
        Ok(p)
    }

    /// Arms with equal transmission `√t_eff` and equal cloner variance `w`.
    pub fn symmetric(v: f64, t_eff: f64, w: f64) -> Result<Self> {
        let (t1, t2) = symmetric_arms(t_eff)?;
        Self::new(v, t1, t2, w, w)
    }

    /// Source at Alice's station: only Bob's arm is lossy.
    pub fn trusted(v: f64, t: f64, w: f64) -> Result<Self> {
        Self::new(v, 1.0, t, w, w)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.v, self.t1, self.t2, self.w1, self.w2]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(invalid(format!("channel parameters must be finite: {self:?}")));
        }
        if self.v < 1.0 {
            return Err(invalid(format!("source variance V must be >= 1, got {}", self.v)));
        }
        for (name, t) in [("T1", self.t1), ("T2", self.t2)] {
            if !(0.0..=1.0).contains(&t) {
                return Err(invalid(format!("{name} must lie in [0, 1], got {t}")));
            }
        }
        for (name, w) in [("W1", self.w1), ("W2", self.w2)] {
            if w < 1.0 {
                return Err(invalid(format!("{name} must be >= 1, got {w}")));
            }
        }
        Ok(())
    }

    /// Exchanges the roles of the two arms.
    pub fn swap_arms(&self) -> Self {
        Self {
            v: self.v,
            t1: self.t2,
            t2: self.t1,
            w1: self.w2,
            w2: self.w1,
        }
    }

    pub fn t_eff(&self) -> f64 {
        effective_transmission(self.t1, self.t2)
    }
}

/// Alice–Bob covariance matrix in standard form: blocks `a·I`, `b·I`, `c·Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedAbParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ReducedAbParams {
    pub fn to_cm(&self) -> CovarianceMatrix {
        let Self { a, b, c } = *self;
        CovarianceMatrix::from_row_slice(
            4,
            &[
                a, 0.0, c, 0.0, //
                0.0, a, 0.0, -c, //
                c, 0.0, b, 0.0, //
                0.0, -c, 0.0, b,
            ],
        )
        .expect("4x4 is a valid shape")
    }

    /// The same state with Alice and Bob relabelled.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            c: self.c,
        }
    }
}

pub fn reduced_ab(params: &ChannelParams) -> Result<ReducedAbParams> {
    params.validate()?;
    let ChannelParams { v, t1, t2, w1, w2 } = *params;
    Ok(ReducedAbParams {
        a: t1 * v + (1.0 - t1) * w1,
        b: t2 * v + (1.0 - t2) * w2,
        c: (t1 * t2).sqrt() * (v * v - 1.0).sqrt(),
    })
}

/// Two lossy arms in series act as a single channel of transmission `t1·t2`.
pub fn effective_transmission(t1: f64, t2: f64) -> f64 {
    t1 * t2
}

/// Splits an effective transmission evenly over the two arms.
pub fn symmetric_arms(t_eff: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&t_eff) {
        return Err(invalid(format!(
            "effective transmission must lie in [0, 1], got {t_eff}"
        )));
    }
    let t = t_eff.sqrt();
    Ok((t, t))
}

/// Fixed layout of the six modes in [`PurifiedNetwork::cm`].
pub const NETWORK_ROLES: [ModeRole; 6] = [
    ModeRole::SourceToAlice,
    ModeRole::SourceToBob,
    ModeRole::Cloner1In,
    ModeRole::Cloner1Keep,
    ModeRole::Cloner2In,
    ModeRole::Cloner2Keep,
];

/// Global pure state of Alice, Bob and Eve's four cloner modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PurifiedNetwork {
    pub cm: CovarianceMatrix,
    roles: Vec<ModeRole>,
}

impl PurifiedNetwork {
    pub fn roles(&self) -> &[ModeRole] {
        &self.roles
    }

    /// Mode index of `role`, if the network carries it.
    pub fn index(&self, role: ModeRole) -> Option<usize> {
        self.roles.iter().position(|&r| r == role)
    }

    pub fn alice(&self) -> usize {
        self.index(ModeRole::SourceToAlice)
            .expect("network always holds Alice's mode")
    }

    pub fn bob(&self) -> usize {
        self.index(ModeRole::SourceToBob)
            .expect("network always holds Bob's mode")
    }

    /// Eve's modes in network order.
    pub fn eve(&self) -> Vec<usize> {
        [
            ModeRole::Cloner1In,
            ModeRole::Cloner1Keep,
            ModeRole::Cloner2In,
            ModeRole::Cloner2Keep,
        ]
        .iter()
        .filter_map(|&r| self.index(r))
        .collect()
    }

    pub fn alice_bob(&self) -> Result<CovarianceMatrix> {
        partial_trace(&self.cm, &[self.alice(), self.bob()])
    }

    pub fn eve_marginal(&self) -> Result<CovarianceMatrix> {
        partial_trace(&self.cm, &self.eve())
    }
}

/// `epr(V) ⊕ epr(W1) ⊕ epr(W2)`, then one beam splitter per arm mixing the
/// source mode with the injected half of that arm's cloner pair.
pub fn build_purified_network(params: &ChannelParams) -> Result<PurifiedNetwork> {
    params.validate()?;
    let source = epr_cm(params.v)?;
    let cloner1 = epr_cm(params.w1)?;
    let cloner2 = epr_cm(params.w2)?;
    // Modes (0,1) source, (2,3) Alice-arm cloner, (4,5) Bob-arm cloner.
    let stacked = source.direct_sum(&cloner1).direct_sum(&cloner2);
    let n = NETWORK_ROLES.len();
    let alice_arm = beam_splitter(params.t1, 0, 2, n)?;
    let bob_arm = beam_splitter(params.t2, 1, 4, n)?;
    let cm = apply_symplectic(&apply_symplectic(&stacked, &alice_arm)?, &bob_arm)?;
    Ok(PurifiedNetwork {
        cm,
        roles: NETWORK_ROLES.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{symplectic_eigenvalues, von_neumann_entropy};
    use approx::assert_abs_diff_eq;

    #[test]
    fn reduced_ab_limits() {
        let r = reduced_ab(&ChannelParams::new(7.0, 1.0, 1.0, 3.0, 2.0).unwrap()).unwrap();
        assert_eq!((r.a, r.b), (7.0, 7.0));
        assert_abs_diff_eq!(r.c, 48f64.sqrt(), epsilon = 1e-14);

        let r = reduced_ab(&ChannelParams::new(7.0, 0.0, 0.6, 1.4, 2.0).unwrap()).unwrap();
        assert_eq!(r.a, 1.4);
        assert_eq!(r.c, 0.0);

        let r = reduced_ab(&ChannelParams::new(20.0, 0.5, 0.5, 1.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(r.a, 10.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r.b, 10.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r.c, 0.5 * 399f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn parameter_validation() {
        assert!(ChannelParams::new(0.9, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ChannelParams::new(2.0, 1.1, 1.0, 1.0, 1.0).is_err());
        assert!(ChannelParams::new(2.0, 1.0, -0.1, 1.0, 1.0).is_err());
        assert!(ChannelParams::new(2.0, 1.0, 1.0, 0.5, 1.0).is_err());
        assert!(ChannelParams::new(2.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
        assert!(ChannelParams::new(1.0, 0.0, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn transmissions() {
        assert_eq!(effective_transmission(1.0, 0.6), 0.6);
        assert_abs_diff_eq!(
            effective_transmission(0.5f64.sqrt(), 0.5f64.sqrt()),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(effective_transmission(0.8, 0.9), 0.72, epsilon = 1e-15);
        assert_eq!(symmetric_arms(0.25).unwrap(), (0.5, 0.5));
        assert_eq!(symmetric_arms(1.0).unwrap(), (1.0, 1.0));
        let (t1, t2) = symmetric_arms(0.5).unwrap();
        assert_abs_diff_eq!(t1, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(t1, t2);
        assert!(symmetric_arms(1.5).is_err());
    }

    #[test]
    fn lossless_network_decouples_eve() {
        let p = ChannelParams::new(6.0, 1.0, 1.0, 1.7, 2.5).unwrap();
        let net = build_purified_network(&p).unwrap();
        assert!(net.alice_bob().unwrap().max_abs_diff(&epr_cm(6.0).unwrap()) < 1e-12);
        let eve = net.eve_marginal().unwrap();
        let expected = epr_cm(1.7).unwrap().direct_sum(&epr_cm(2.5).unwrap());
        assert!(eve.max_abs_diff(&expected) < 1e-12);
        assert!(von_neumann_entropy(&eve).unwrap() < 1e-9);
    }

    #[test]
    fn marginal_matches_reduced_ab() {
        let p = ChannelParams::new(20.0, 0.7, 0.4, 1.1, 1.3).unwrap();
        let net = build_purified_network(&p).unwrap();
        let expected = reduced_ab(&p).unwrap().to_cm();
        assert!(net.alice_bob().unwrap().max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn network_is_pure() {
        let p = ChannelParams::new(35.0, 0.3, 0.85, 1.4, 1.02).unwrap();
        let net = build_purified_network(&p).unwrap();
        for nu in symplectic_eigenvalues(&net.cm).unwrap() {
            assert_abs_diff_eq!(nu, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn role_map() {
        let net = build_purified_network(&ChannelParams::trusted(3.0, 0.5, 1.0).unwrap()).unwrap();
        assert_eq!(net.alice(), 0);
        assert_eq!(net.bob(), 1);
        assert_eq!(net.eve(), vec![2, 3, 4, 5]);
        assert_eq!(net.index(ModeRole::PrepVacuum), None);
    }

    #[test]
    fn dead_arm_cuts_source_correlations() {
        let p = ChannelParams::new(9.0, 0.0, 0.8, 1.3, 1.3).unwrap();
        let net = build_purified_network(&p).unwrap();
        let alice = net.alice();
        // Alice now holds the injected cloner mode, uncorrelated with Bob.
        assert!(net.cm.block(alice, net.bob()).amax() < 1e-15);
        assert_eq!(reduced_ab(&p).unwrap().c, 0.0);
    }
}
