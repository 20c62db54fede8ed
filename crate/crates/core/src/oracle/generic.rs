//! Key rates computed directly on the purified six-mode network.
//!
//! Nothing here uses the closed forms of [`crate::keyrate`]: mutual
//! information comes from the covariance of the measured quadratures, Eve's
//! entropies from the symplectic spectra of her four modes before and after
//! the reference party's measurement. Reverse reconciliation conditions on Bob
//! directly instead of going through the mirror mapping.

use nalgebra::DMatrix;

use crate::channel::{build_purified_network, ChannelParams};
use crate::error::{numerical, Result};
use crate::gaussian::{
    apply_symplectic, beam_splitter, condition_heterodyne, condition_homodyne, partial_trace, vacuum_cm,
    von_neumann_entropy, CovarianceMatrix, ModeRole, Quadrature,
};
use crate::keyrate::{KeyRateBreakdown, Measurement, ProtocolSpec, Reconciliation};

/// A covariance matrix whose modes carry role labels.
#[derive(Debug, Clone)]
struct LabelledState {
    cm: CovarianceMatrix,
    roles: Vec<ModeRole>,
}

impl LabelledState {
    fn index(&self, role: ModeRole) -> usize {
        self.roles
            .iter()
            .position(|&r| r == role)
            .unwrap_or_else(|| panic!("mode {role:?} not present"))
    }

    /// Mixes `role` with a fresh vacuum on a 50/50 splitter: the first step of
    /// a heterodyne detector. Returns the index of the vacuum port.
    fn open_heterodyne_port(&mut self, role: ModeRole) -> Result<usize> {
        let port = self.cm.n_modes();
        let extended = self.cm.direct_sum(&vacuum_cm(1)?);
        let bs = beam_splitter(0.5, self.index(role), port, port + 1)?;
        self.cm = apply_symplectic(&extended, &bs)?;
        self.roles.push(ModeRole::PrepVacuum);
        Ok(port)
    }

    fn remove(&mut self, mode: usize) {
        self.roles.remove(mode);
    }

    fn entropy_of(&self, roles: &[ModeRole]) -> Result<f64> {
        let keep: Vec<usize> = roles.iter().map(|&r| self.index(r)).collect();
        von_neumann_entropy(&partial_trace(&self.cm, &keep)?)
    }
}

const EVE: [ModeRole; 4] = [
    ModeRole::Cloner1In,
    ModeRole::Cloner1Keep,
    ModeRole::Cloner2In,
    ModeRole::Cloner2Keep,
];

/// Who measures what, given a protocol: `(reference, other)`.
fn detectors(spec: &ProtocolSpec) -> ((ModeRole, Measurement), (ModeRole, Measurement)) {
    let alice = (ModeRole::SourceToAlice, spec.alice_measurement());
    let bob = (ModeRole::SourceToBob, spec.bob_measurement());
    match spec.reconciliation {
        Reconciliation::Direct => (alice, bob),
        Reconciliation::Reverse => (bob, alice),
    }
}

/// Conditions the state on the reference party's key data.
///
/// A heterodyning reference whose partner only homodynes keeps just the
/// quadrature that matches the partner's choice; that is one homodyne on one
/// output of the heterodyne splitter.
fn condition_on_reference(
    state: &LabelledState,
    reference: ModeRole,
    detector: Measurement,
    partner: Measurement,
) -> Result<LabelledState> {
    let mut out = state.clone();
    let mode = out.index(reference);
    match (detector, partner) {
        (Measurement::Homodyne, _) => {
            out.cm = condition_homodyne(&out.cm, mode, Quadrature::X)?;
        }
        (Measurement::Heterodyne, Measurement::Heterodyne) => {
            out.cm = condition_heterodyne(&out.cm, mode)?;
        }
        (Measurement::Heterodyne, Measurement::Homodyne) => {
            out.open_heterodyne_port(reference)?;
            out.cm = condition_homodyne(&out.cm, mode, Quadrature::X)?;
        }
    }
    out.remove(mode);
    Ok(out)
}

/// Mutual information of the measured quadratures on a two-mode Alice–Bob
/// state (Alice = mode 0, Bob = mode 1).
///
/// Heterodyne is modelled physically: a 50/50 splitter with vacuum, `x` read
/// on the signal port and `p` on the vacuum port. When only one party
/// heterodynes, only its `x` outcome is kept (sifting to the partner's
/// quadrature).
pub fn measured_mutual_information(spec: &ProtocolSpec, ab: &CovarianceMatrix) -> Result<f64> {
    if ab.n_modes() != 2 {
        return Err(numerical(format!(
            "expected a two-mode Alice-Bob state, got {} modes",
            ab.n_modes()
        )));
    }
    let mut state = LabelledState {
        cm: ab.clone(),
        roles: vec![ModeRole::SourceToAlice, ModeRole::SourceToBob],
    };
    let both_het =
        spec.alice_measurement() == Measurement::Heterodyne && spec.bob_measurement() == Measurement::Heterodyne;

    let mut outcomes = |role: ModeRole, det: Measurement| -> Result<Vec<usize>> {
        let signal = 2 * state.index(role);
        match det {
            Measurement::Homodyne => Ok(vec![signal]),
            Measurement::Heterodyne => {
                let port = state.open_heterodyne_port(role)?;
                Ok(if both_het {
                    vec![signal, 2 * port + 1]
                } else {
                    vec![signal]
                })
            }
        }
    };
    let alice = outcomes(ModeRole::SourceToAlice, spec.alice_measurement())?;
    let bob = outcomes(ModeRole::SourceToBob, spec.bob_measurement())?;

    let all: Vec<usize> = alice.iter().chain(bob.iter()).copied().collect();
    let sigma = state.cm.matrix().select_rows(&all).select_columns(&all);
    gaussian_mutual_information(&sigma, alice.len())
}

/// `½·log2(det Σ_A · det Σ_B / det Σ)` for a jointly Gaussian vector whose
/// first `dim_a` components belong to A.
pub fn gaussian_mutual_information(sigma: &DMatrix<f64>, dim_a: usize) -> Result<f64> {
    let k = sigma.nrows();
    if dim_a == 0 || dim_a >= k || sigma.ncols() != k {
        return Err(numerical(format!(
            "bad split {dim_a} of a {k}-dimensional outcome vector"
        )));
    }
    let det_a = sigma.view((0, 0), (dim_a, dim_a)).determinant();
    let det_b = sigma.view((dim_a, dim_a), (k - dim_a, k - dim_a)).determinant();
    let det = sigma.determinant();
    if !(det > 0.0 && det_a > 0.0 && det_b > 0.0) {
        return Err(numerical(format!(
            "outcome covariance is not positive definite (det = {det:e}, det_A = {det_a:e}, det_B = {det_b:e})"
        )));
    }
    Ok(0.5 * (det_a * det_b / det).log2())
}

/// Key rate from the purified network; the independent cross-check of
/// [`crate::keyrate::key_rate`].
pub fn generic_key_rate(spec: &ProtocolSpec, params: &ChannelParams) -> Result<KeyRateBreakdown> {
    let net = build_purified_network(params)?;
    let i_ab = measured_mutual_information(spec, &net.alice_bob()?)?;

    let state = LabelledState {
        cm: net.cm.clone(),
        roles: net.roles().to_vec(),
    };
    let s_e = state.entropy_of(&EVE)?;

    let ((reference, detector), (_, partner)) = detectors(spec);
    let conditioned = condition_on_reference(&state, reference, detector, partner)?;
    let s_e_cond = conditioned.entropy_of(&EVE)?;

    KeyRateBreakdown::assemble(i_ab, s_e, s_e_cond)
}
