use cvqkd_core::oracle::{sweep, threshold_transmission, SweepGrid, Threshold};
use cvqkd_core::{Measurement, Method, Methods, ProtocolSpec, Reconciliation, StatePrep, SweepAxis};

const COH_HOM_DR: ProtocolSpec = ProtocolSpec::new(StatePrep::Coherent, Measurement::Homodyne, Reconciliation::Direct);

fn grid(spec: ProtocolSpec, axis: SweepAxis) -> SweepGrid {
    SweepGrid {
        spec,
        v: 20.0,
        w1: 1.0,
        w2: 1.0,
        axis,
        t_start: 0.0,
        t_end: 1.0,
        steps: 101,
    }
}

#[test]
fn middle_source_curve_survives_past_trusted_cutoff() {
    let middle = sweep(&grid(COH_HOM_DR, SweepAxis::EffectiveSymmetric), Methods::Both).unwrap();
    let trusted = sweep(&grid(COH_HOM_DR, SweepAxis::EffectiveTrusted), Methods::Both).unwrap();
    let cutoff = |rows: &[cvqkd_core::oracle::SweepRow]| {
        rows.iter()
            .find(|r| r.closed.unwrap().key_rate > 0.0)
            .map(|r| r.t)
            .unwrap()
    };
    let (t_middle, t_trusted) = (cutoff(&middle), cutoff(&trusted));
    assert!(t_middle < t_trusted, "{t_middle} vs {t_trusted}");
    assert!(t_trusted > 0.5);

    for rows in [&middle, &trusted] {
        for r in rows.iter() {
            let d = r.closed.unwrap().key_rate - r.generic.unwrap().key_rate;
            assert!(d.abs() <= 1e-7, "t = {}: {d:e}", r.t);
        }
    }
    // zero transmission carries no correlations
    assert!(middle[0].closed.unwrap().i_ab.abs() < 1e-12);
}

#[test]
fn trusted_source_thresholds() {
    let t = threshold_transmission(&COH_HOM_DR, 1e4, 1.0, 1.0, SweepAxis::EffectiveTrusted, Method::Closed)
        .unwrap()
        .value()
        .unwrap();
    assert!((t - 0.5).abs() <= 1e-3, "{t}");

    let rr = ProtocolSpec::new(StatePrep::Squeezed, Measurement::Homodyne, Reconciliation::Reverse);
    let t = threshold_transmission(&rr, 20.0, 1.0, 1.0, SweepAxis::EffectiveTrusted, Method::Generic).unwrap();
    assert!(matches!(t, Threshold::At(x) if x <= 1e-6), "{t:?}");
}

#[test]
fn unentangled_source_gives_no_key() {
    let t = threshold_transmission(
        &COH_HOM_DR,
        1.0,
        1.5,
        1.5,
        SweepAxis::EffectiveSymmetric,
        Method::Closed,
    )
    .unwrap();
    assert_eq!(t, Threshold::NeverPositive);
}
