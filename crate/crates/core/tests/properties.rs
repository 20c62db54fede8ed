use cvqkd_core::channel::build_purified_network;
use cvqkd_core::gaussian::{
    apply_symplectic, beam_splitter, condition_heterodyne, epr_cm, symplectic_eigenvalues, thermal_cm,
    von_neumann_entropy,
};
use cvqkd_core::keyrate::mirror_protocol;
use cvqkd_core::oracle::generic_key_rate;
use cvqkd_core::oracle::suite::heterodyne_by_splitter;
use cvqkd_core::{key_rate, ChannelParams, CovarianceMatrix, ProtocolSpec, Reconciliation, SymplecticMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn channel() -> impl Strategy<Value = ChannelParams> {
    (1.0..50.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 1.0..2.0f64, 1.0..2.0f64)
        .prop_map(|(v, t1, t2, w1, w2)| ChannelParams::new(v, t1, t2, w1, w2).unwrap())
}

fn protocol() -> impl Strategy<Value = ProtocolSpec> {
    (0..8usize).prop_map(|i| ProtocolSpec::all()[i])
}

/// Single-mode squeezing by `r` and rotation by `phi` on `mode`.
fn squeeze_rotate(r: f64, phi: f64, mode: usize, n_modes: usize) -> SymplecticMatrix {
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let (c, s) = (phi.cos(), phi.sin());
    let k = 2 * mode;
    m[(k, k)] = r * c;
    m[(k, k + 1)] = r * s;
    m[(k + 1, k)] = -s / r;
    m[(k + 1, k + 1)] = c / r;
    SymplecticMatrix::from_matrix(m).unwrap()
}

fn mixed_state(v: f64, w: f64) -> CovarianceMatrix {
    epr_cm(v).unwrap().direct_sum(&thermal_cm(w).unwrap())
}

proptest! {
    #[test]
    fn spectrum_invariant_under_symplectic_maps(
        v in 1.0..30.0f64,
        w in 1.0..5.0f64,
        t in 0.0..=1.0f64,
        r in 0.3..3.0f64,
        phi in 0.0..std::f64::consts::TAU,
        mode in 0..3usize,
    ) {
        let gamma = mixed_state(v, w);
        let s = beam_splitter(t, 0, 2, 3).unwrap().then(&squeeze_rotate(r, phi, mode, 3)).unwrap();
        let before = symplectic_eigenvalues(&gamma).unwrap();
        let after = symplectic_eigenvalues(&apply_symplectic(&gamma, &s).unwrap()).unwrap();
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() <= 1e-8 * x.max(1.0), "{before:?} vs {after:?}");
        }
    }

    #[test]
    fn purified_network_is_pure(p in channel()) {
        let net = build_purified_network(&p).unwrap();
        let nu = symplectic_eigenvalues(&net.cm).unwrap();
        for x in nu {
            prop_assert!((x - 1.0).abs() <= 1e-7, "ν = {x}");
        }
        let s_e = von_neumann_entropy(&net.eve_marginal().unwrap()).unwrap();
        let s_ab = von_neumann_entropy(&net.alice_bob().unwrap()).unwrap();
        prop_assert!((s_e - s_ab).abs() <= 1e-8);
    }

    #[test]
    fn heterodyne_matches_splitter_and_homodynes(
        v in 1.0..30.0f64,
        w in 1.0..5.0f64,
        t in 0.0..=1.0f64,
        r in 0.3..3.0f64,
        mode in 0..3usize,
    ) {
        let s = beam_splitter(t, 1, 2, 3).unwrap().then(&squeeze_rotate(r, 0.7, 2, 3)).unwrap();
        let gamma = apply_symplectic(&mixed_state(v, w), &s).unwrap();
        let direct = condition_heterodyne(&gamma, mode).unwrap();
        let explicit = heterodyne_by_splitter(&gamma, mode).unwrap();
        prop_assert!(direct.max_abs_diff(&explicit) <= 1e-9 * v.max(1.0) * r.max(1.0 / r).powi(2));
    }

    #[test]
    fn reverse_is_mirrored_direct_with_swapped_arms(spec in protocol(), p in channel()) {
        prop_assume!(spec.reconciliation == Reconciliation::Reverse);
        let rr = generic_key_rate(&spec, &p).unwrap().key_rate;
        let dr = generic_key_rate(&mirror_protocol(&spec), &p.swap_arms()).unwrap().key_rate;
        prop_assert!((rr - dr).abs() <= 1e-8, "{rr} vs {dr}");
    }

    #[test]
    fn key_rate_never_exceeds_mutual_information(spec in protocol(), p in channel()) {
        let k = key_rate(&spec, &p).unwrap();
        prop_assert!(k.holevo >= 0.0);
        prop_assert!(k.key_rate <= k.i_ab + 1e-12);
    }

    #[test]
    fn closed_form_matches_purified_network(spec in protocol(), p in channel()) {
        let closed = key_rate(&spec, &p).unwrap().key_rate;
        let generic = generic_key_rate(&spec, &p).unwrap().key_rate;
        prop_assert!((closed - generic).abs() <= 1e-7, "{spec} {p:?}: {closed} vs {generic}");
    }
}
