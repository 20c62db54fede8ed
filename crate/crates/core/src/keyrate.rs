//! Closed-form mutual information, Holevo bound and key rate for the eight
//! prepare/measure/reconcile combinations.
//!
//! Only direct reconciliation has its own formulas. A reverse-reconciliation
//! protocol is evaluated as the direct protocol obtained by swapping the roles
//! of Alice and Bob: the reference party's measurement becomes the new state
//! preparation, the other party's preparation becomes the new measurement,
//! and the two arms of the channel trade places.

use std::fmt;

use nalgebra::Matrix2;

use crate::channel::{reduced_ab, ChannelParams, ReducedAbParams};
use crate::error::{invalid, numerical, Result};
use crate::gaussian::{mode_entropy, standard_form_spectrum, PHYSICAL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatePrep {
    /// Alice homodynes her half of the source.
    Squeezed,
    /// Alice heterodynes her half of the source.
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measurement {
    Homodyne,
    Heterodyne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reconciliation {
    /// Alice's data is the reference.
    Direct,
    /// Bob's data is the reference.
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProtocolSpec {
    pub state_prep: StatePrep,
    pub measurement: Measurement,
    pub reconciliation: Reconciliation,
}

impl ProtocolSpec {
    pub const fn new(state_prep: StatePrep, measurement: Measurement, reconciliation: Reconciliation) -> Self {
        Self {
            state_prep,
            measurement,
            reconciliation,
        }
    }

    /// All eight protocols, direct before reverse within each prep/measurement pair.
    pub fn all() -> [ProtocolSpec; 8] {
        use Measurement::*;
        use Reconciliation::*;
        use StatePrep::*;
        [
            Self::new(Squeezed, Homodyne, Direct),
            Self::new(Squeezed, Homodyne, Reverse),
            Self::new(Squeezed, Heterodyne, Direct),
            Self::new(Squeezed, Heterodyne, Reverse),
            Self::new(Coherent, Homodyne, Direct),
            Self::new(Coherent, Homodyne, Reverse),
            Self::new(Coherent, Heterodyne, Direct),
            Self::new(Coherent, Heterodyne, Reverse),
        ]
    }

    /// Alice's detector in the entanglement-based picture.
    pub fn alice_measurement(&self) -> Measurement {
        match self.state_prep {
            StatePrep::Squeezed => Measurement::Homodyne,
            StatePrep::Coherent => Measurement::Heterodyne,
        }
    }

    pub fn bob_measurement(&self) -> Measurement {
        self.measurement
    }

    /// `squeezed-hom`, `coherent-het`, ...
    pub fn protocol_name(&self) -> &'static str {
        match (self.state_prep, self.measurement) {
            (StatePrep::Squeezed, Measurement::Homodyne) => "squeezed-hom",
            (StatePrep::Squeezed, Measurement::Heterodyne) => "squeezed-het",
            (StatePrep::Coherent, Measurement::Homodyne) => "coherent-hom",
            (StatePrep::Coherent, Measurement::Heterodyne) => "coherent-het",
        }
    }

    /// `dr` or `rr`.
    pub fn recon_name(&self) -> &'static str {
        match self.reconciliation {
            Reconciliation::Direct => "dr",
            Reconciliation::Reverse => "rr",
        }
    }
}

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.protocol_name(), self.recon_name())
    }
}

/// Entropic bookkeeping of one key-rate evaluation, all in bits (per use).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateBreakdown {
    pub i_ab: f64,
    /// Eve's entropy.
    pub s_e: f64,
    /// Eve's entropy conditioned on the reference party's data.
    pub s_e_cond: f64,
    pub holevo: f64,
    pub key_rate: f64,
}

impl KeyRateBreakdown {
    pub(crate) fn assemble(i_ab: f64, s_e: f64, s_e_cond: f64) -> Result<Self> {
        let holevo = clamp_holevo(s_e - s_e_cond)?;
        Ok(Self {
            i_ab,
            s_e,
            s_e_cond,
            holevo,
            key_rate: i_ab - holevo,
        })
    }
}

/// Rounding can leave χ a hair below zero; anything further is a bug.
pub(crate) fn clamp_holevo(chi: f64) -> Result<f64> {
    if chi >= 0.0 {
        Ok(chi)
    } else if chi >= -PHYSICAL_TOL {
        Ok(0.0)
    } else {
        Err(numerical(format!("Holevo bound {chi:e} is negative")))
    }
}

/// Symplectic invariants and eigenvalues behind a direct-reconciliation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoIntermediates {
    /// `Δ = a² + b² − 2c²`.
    pub delta: f64,
    /// `D = ab − c²`.
    pub d: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    /// Second conditional eigenvalue; only the coherent/homodyne case has one.
    pub lambda4: Option<f64>,
    /// `A = (a + bD + Δ)/(a + 1)`, coherent/homodyne only.
    pub cap_a: Option<f64>,
    /// `B = D(b + D)/(a + 1)`, coherent/homodyne only.
    pub cap_b: Option<f64>,
}

/// `S(E)`, `S(E|A)` and `χ = S(E) − S(E|A)` for direct reconciliation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoBound {
    pub s_e: f64,
    pub s_e_cond: f64,
    pub chi: f64,
    pub intermediates: HolevoIntermediates,
}

fn check_reduced(r: &ReducedAbParams) -> Result<()> {
    let ok = [r.a, r.b, r.c].iter().all(|x| x.is_finite()) && r.a >= 1.0 - PHYSICAL_TOL && r.b >= 1.0 - PHYSICAL_TOL;
    if !ok {
        return Err(invalid(format!("reduced Alice-Bob parameters out of range: {r:?}")));
    }
    Ok(())
}

/// `½·log2(v / v_cond)`, failing when the conditional variance is not positive.
fn half_log_ratio(v: f64, v_cond: f64) -> Result<f64> {
    if !(v_cond > 0.0) {
        return Err(numerical(format!(
            "conditional variance {v_cond:e} is not positive; the Alice-Bob state is unphysical"
        )));
    }
    Ok(0.5 * (v / v_cond).log2())
}

/// Shannon information between Alice's and Bob's measured data.
///
/// Symmetric under direct/reverse, so the reconciliation field is ignored.
pub fn mutual_information(spec: &ProtocolSpec, r: &ReducedAbParams) -> Result<f64> {
    check_reduced(r)?;
    let ReducedAbParams { a, b, c } = *r;
    let c2 = c * c;
    match (spec.state_prep, spec.measurement) {
        (StatePrep::Squeezed, Measurement::Homodyne) => half_log_ratio(a, a - c2 / b),
        (StatePrep::Squeezed, Measurement::Heterodyne) => half_log_ratio(a, a - c2 / (b + 1.0)),
        (StatePrep::Coherent, Measurement::Homodyne) => half_log_ratio(a + 1.0, a + 1.0 - c2 / b),
        // both quadratures carry information
        (StatePrep::Coherent, Measurement::Heterodyne) => Ok(2.0 * half_log_ratio(b + 1.0, b + 1.0 - c2 / (a + 1.0))?),
    }
}

fn nu_from_square(sq: f64, label: &str) -> Result<f64> {
    let floor = (1.0 - PHYSICAL_TOL) * (1.0 - PHYSICAL_TOL);
    if !(sq >= floor) {
        return Err(numerical(format!("{label}² = {sq} is below the uncertainty bound")));
    }
    Ok(sq.sqrt().max(1.0))
}

fn nu_checked(nu: f64, label: &str) -> Result<f64> {
    if !(nu >= 1.0 - PHYSICAL_TOL) {
        return Err(numerical(format!("{label} = {nu} is below the uncertainty bound")));
    }
    Ok(nu.max(1.0))
}

/// Holevo bound for direct reconciliation.
pub fn holevo_direct(spec: &ProtocolSpec, r: &ReducedAbParams) -> Result<HolevoBound> {
    if spec.reconciliation != Reconciliation::Direct {
        return Err(invalid(format!("holevo_direct called with reverse protocol {spec}")));
    }
    check_reduced(r)?;
    let ReducedAbParams { a, b, c } = *r;
    let c2 = c * c;
    let delta = a * a + b * b - 2.0 * c2;
    let d = a * b - c2;

    let (l1, l2) = standard_form_spectrum(a, b, c)?;
    let lambda1 = nu_checked(l1, "λ1")?;
    let lambda2 = nu_checked(l2, "λ2")?;
    let s_e = mode_entropy(lambda1)? + mode_entropy(lambda2)?;

    let mut inter = HolevoIntermediates {
        delta,
        d,
        lambda1,
        lambda2,
        lambda3: 1.0,
        lambda4: None,
        cap_a: None,
        cap_b: None,
    };

    let s_e_cond = match (spec.state_prep, spec.measurement) {
        // Bob's detector does not enter Eve's information about Alice.
        (StatePrep::Squeezed, _) => {
            inter.lambda3 = nu_from_square(b * (b - c2 / a), "λ3")?;
            mode_entropy(inter.lambda3)?
        }
        (StatePrep::Coherent, Measurement::Heterodyne) => {
            inter.lambda3 = nu_checked(b - c2 / (a + 1.0), "λ3")?;
            mode_entropy(inter.lambda3)?
        }
        (StatePrep::Coherent, Measurement::Homodyne) => {
            let (l3, l4) = coherent_homodyne_conditional(a, b, c)?;
            inter.lambda3 = l3;
            inter.lambda4 = Some(l4);
            inter.cap_a = Some((a + b * d + delta) / (a + 1.0));
            inter.cap_b = Some(d * (b + d) / (a + 1.0));
            mode_entropy(l3)? + mode_entropy(l4)?
        }
    };

    let chi = clamp_holevo(s_e - s_e_cond)?;
    Ok(HolevoBound {
        s_e,
        s_e_cond,
        chi,
        intermediates: inter,
    })
}

/// Symplectic eigenvalues of Bob plus the heterodyne vacuum port, given one
/// quadrature of Alice's heterodyne outcome.
///
/// The conditional matrix has no x–p coupling, so `ν²` are the eigenvalues of
/// `M_x·M_p` (trace `A`, determinant `B`). The discriminant is formed from the
/// entries of that product rather than `A² − 4B`, which cancels catastrophically
/// at the pure-state limit.
fn coherent_homodyne_conditional(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let s2 = std::f64::consts::SQRT_2;
    let ap1 = a + 1.0;
    let mx = Matrix2::new(b - c * c / ap1, s2 * c / ap1, s2 * c / ap1, 2.0 * a / ap1);
    let mp = Matrix2::new(b, -c / s2, -c / s2, ap1 / 2.0);
    let p = mx * mp;
    let tr = p[(0, 0)] + p[(1, 1)];
    let diff = p[(0, 0)] - p[(1, 1)];
    let disc = (diff * diff + 4.0 * p[(0, 1)] * p[(1, 0)]).max(0.0).sqrt();
    Ok((
        nu_from_square(0.5 * (tr + disc), "λ3")?,
        nu_from_square(0.5 * (tr - disc), "λ4")?,
    ))
}

/// Swaps the reference party: direct ↔ reverse, with the reference party's
/// detector becoming the state preparation and vice versa.
pub fn mirror_protocol(spec: &ProtocolSpec) -> ProtocolSpec {
    let state_prep = match spec.measurement {
        Measurement::Homodyne => StatePrep::Squeezed,
        Measurement::Heterodyne => StatePrep::Coherent,
    };
    let measurement = match spec.state_prep {
        StatePrep::Squeezed => Measurement::Homodyne,
        StatePrep::Coherent => Measurement::Heterodyne,
    };
    let reconciliation = match spec.reconciliation {
        Reconciliation::Direct => Reconciliation::Reverse,
        Reconciliation::Reverse => Reconciliation::Direct,
    };
    ProtocolSpec {
        state_prep,
        measurement,
        reconciliation,
    }
}

/// `K = I_AB − χ` in bits per channel use. Negative values are returned as is.
pub fn key_rate(spec: &ProtocolSpec, params: &ChannelParams) -> Result<KeyRateBreakdown> {
    let (spec, params) = match spec.reconciliation {
        Reconciliation::Direct => (*spec, *params),
        Reconciliation::Reverse => (mirror_protocol(spec), params.swap_arms()),
    };
    let r = reduced_ab(&params)?;
    let i_ab = mutual_information(&spec, &r)?;
    let bound = holevo_direct(&spec, &r)?;
    Ok(KeyRateBreakdown {
        i_ab,
        s_e: bound.s_e,
        s_e_cond: bound.s_e_cond,
        holevo: bound.chi,
        key_rate: i_ab - bound.chi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use Measurement::*;
    use Reconciliation::*;
    use StatePrep::*;

    fn lossless(v: f64) -> ReducedAbParams {
        ReducedAbParams {
            a: v,
            b: v,
            c: (v * v - 1.0).sqrt(),
        }
    }

    #[test]
    fn lossless_mutual_information() {
        let sq_hom = ProtocolSpec::new(Squeezed, Homodyne, Direct);
        assert_abs_diff_eq!(
            mutual_information(&sq_hom, &lossless(4.0)).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        let coh_hom = ProtocolSpec::new(Coherent, Homodyne, Direct);
        // (V+1)/(V+1−(V²−1)/V) = V at V=4 → ½·log2 4
        assert_abs_diff_eq!(
            mutual_information(&coh_hom, &lossless(4.0)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let coh_het = ProtocolSpec::new(Coherent, Heterodyne, Direct);
        assert_abs_diff_eq!(
            mutual_information(&coh_het, &lossless(3.0)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn uncorrelated_modes_share_nothing() {
        let r = ReducedAbParams { a: 3.0, b: 1.7, c: 0.0 };
        for spec in ProtocolSpec::all() {
            assert_eq!(mutual_information(&spec, &r).unwrap(), 0.0);
        }
    }

    #[test]
    fn unphysical_reduced_state_fails() {
        // a − c²/b < 0
        let r = ReducedAbParams { a: 2.0, b: 2.0, c: 2.5 };
        let spec = ProtocolSpec::new(Squeezed, Homodyne, Direct);
        assert!(matches!(mutual_information(&spec, &r), Err(crate::Error::Numerical(_))));
        assert!(holevo_direct(&spec, &r).is_err());
        let bad = ReducedAbParams { a: 0.5, b: 2.0, c: 0.0 };
        assert!(mutual_information(&spec, &bad).is_err());
    }

    #[test]
    fn lossless_holevo_vanishes() {
        for v in [1.0, 1.5, 4.0, 20.0, 100.0] {
            for spec in ProtocolSpec::all().into_iter().filter(|s| s.reconciliation == Direct) {
                let h = holevo_direct(&spec, &lossless(v)).unwrap();
                assert!(h.chi.abs() <= 1e-9, "{spec} at V={v}: χ = {}", h.chi);
                assert_abs_diff_eq!(h.intermediates.d, 1.0, epsilon = 1e-9 * v * v);
                assert_abs_diff_eq!(h.intermediates.lambda1, 1.0, epsilon = 1e-9);
                assert_abs_diff_eq!(h.intermediates.lambda2, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn holevo_rejects_reverse() {
        let spec = ProtocolSpec::new(Squeezed, Homodyne, Reverse);
        assert!(holevo_direct(&spec, &lossless(2.0)).is_err());
    }

    #[test]
    fn coherent_homodyne_conditional_matches_invariants() {
        for (a, b, c) in [(10.5, 10.5, 0.5 * 399f64.sqrt()), (3.0, 1.4, 0.9), (50.0, 8.0, 12.0)] {
            let r = ReducedAbParams { a, b, c };
            let h = holevo_direct(&ProtocolSpec::new(Coherent, Homodyne, Direct), &r).unwrap();
            let i = h.intermediates;
            let (l3, l4) = (i.lambda3, i.lambda4.unwrap());
            assert_abs_diff_eq!(l3 * l3 + l4 * l4, i.cap_a.unwrap(), epsilon = 1e-9 * i.cap_a.unwrap());
            assert_abs_diff_eq!(l3 * l3 * l4 * l4, i.cap_b.unwrap(), epsilon = 1e-9 * i.cap_b.unwrap());
        }
    }

    #[test]
    fn no_source_no_key() {
        for spec in ProtocolSpec::all() {
            for t in [0.2, 0.9, 1.0] {
                let p = ChannelParams::new(1.0, t, 1.0, 1.0, 1.0).unwrap();
                let k = key_rate(&spec, &p).unwrap();
                assert!(k.key_rate.abs() < 1e-12, "{spec}: {k:?}");
            }
        }
    }

    #[test]
    fn lossless_squeezed_homodyne_key() {
        let p = ChannelParams::new(4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let k = key_rate(&ProtocolSpec::new(Squeezed, Homodyne, Direct), &p).unwrap();
        assert_abs_diff_eq!(k.key_rate, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(k.i_ab, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(
            mirror_protocol(&ProtocolSpec::new(Coherent, Homodyne, Direct)),
            ProtocolSpec::new(Squeezed, Heterodyne, Reverse)
        );
        assert_eq!(
            mirror_protocol(&ProtocolSpec::new(Squeezed, Homodyne, Direct)),
            ProtocolSpec::new(Squeezed, Homodyne, Reverse)
        );
        assert_eq!(
            mirror_protocol(&ProtocolSpec::new(Coherent, Heterodyne, Reverse)),
            ProtocolSpec::new(Coherent, Heterodyne, Direct)
        );
        for spec in ProtocolSpec::all() {
            assert_eq!(mirror_protocol(&mirror_protocol(&spec)), spec);
        }
    }

    #[test]
    fn all_protocols_distinct() {
        let all = ProtocolSpec::all();
        for (i, s) in all.iter().enumerate() {
            assert!(!all[..i].contains(s));
        }
    }

    #[test]
    fn names() {
        let s = ProtocolSpec::new(Squeezed, Heterodyne, Reverse);
        assert_eq!(s.protocol_name(), "squeezed-het");
        assert_eq!(s.recon_name(), "rr");
        assert_eq!(s.to_string(), "squeezed-het/rr");
    }

    #[test]
    fn slightly_negative_holevo_clamps() {
        assert_eq!(clamp_holevo(-5e-10).unwrap(), 0.0);
        assert_eq!(clamp_holevo(0.25).unwrap(), 0.25);
        assert!(clamp_holevo(-1e-6).is_err());
    }
}
