use std::f64::consts::PI;

use proptest::prelude::*;
use spinstat_core::dynamics::{
    exchange_phase, lattice_evolution, partial_swap_phase, precession_unitary, RotationSchedule,
};
use spinstat_core::experiments::{
    beamsplitter_entanglement, controlled_rotation_interferometer, correlator_chain_check,
    entanglement_sweep, ChainVerdict, TransportModel,
};
use spinstat_core::par;
use spinstat_core::qcore::{max_abs_diff, partial_trace, wrap_phase, CVector, Ket, Tensor, C64};
use spinstat_core::spinrep::{rotation, SpinLabel, Vec3};

fn spin() -> impl Strategy<Value = SpinLabel> {
    (0u32..=6).prop_map(SpinLabel::from_two_s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kickback_phase_is_the_partial_swap_phase(s in spin(), alpha in 0.0f64..=1.0) {
        let r = controlled_rotation_interferometer(s, alpha, TransportModel::Dynamical).unwrap();
        let want = partial_swap_phase(s, alpha, s.two_s() as i32).unwrap().arg();
        prop_assert!(wrap_phase(r.phase.unwrap() - want).abs() < 1e-12);
        prop_assert!((r.visibility - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concurrence_closed_form(s in spin(), alpha in 0.0f64..=1.0) {
        let p = beamsplitter_entanglement(s, alpha).unwrap();
        let theta = -2.0 * PI * s.spin() * alpha;
        let want = (C64::from_polar(1.0, theta) - 1.0).norm() / 2.0;
        prop_assert!((p.concurrence - want).abs() < 1e-12);
    }

    #[test]
    fn any_split_full_turn_gives_the_exchange_sign(
        two_s in 1u32..=4,
        split in 0.05f64..0.95,
        angle_split in -1.0f64..2.0,
    ) {
        let s = SpinLabel::from_two_s(two_s);
        let sch = RotationSchedule::two_step(Vec3::z(), 2.0 * PI, 1.0, split, angle_split).unwrap();
        let init = Ket::basis(vec![s.dim()], 0).unwrap();
        let r = exchange_phase(s, &sch, &init).unwrap();
        let want = if s.exchange_sign() == 1 { 0.0 } else { PI };
        prop_assert!((r.phase().unwrap().abs() - want).abs() < 1e-9);
        prop_assert!((r.fidelity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_turn_is_scalar_on_any_state(
        s in spin(),
        axis in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        seed in 0u64..1000,
    ) {
        let axis = Vec3::new(axis.0, axis.1, axis.2);
        prop_assume!(axis.norm() > 0.1);
        let d = rotation(s, &axis.normalize(), 2.0 * PI).unwrap();
        let amps: Vec<C64> = (0..s.dim())
            .map(|k| C64::new(((seed + k as u64) as f64).sin(), ((seed * 3 + k as u64) as f64).cos()))
            .collect();
        let psi = Ket::normalized(CVector::from_vec(amps), vec![s.dim()]).unwrap();
        let out = psi.evolve(&d).unwrap();
        let overlap = psi.inner(&out).unwrap();
        prop_assert!((overlap - C64::new(f64::from(s.exchange_sign()), 0.0)).norm() < 1e-10);
    }
}

#[test]
fn parallel_and_sequential_sweeps_agree() {
    let alphas: Vec<f64> = (0..=200).map(|k| f64::from(k) / 200.0).collect();
    let s = SpinLabel::from_two_s(3);
    let seq: Vec<_> = par::map_sequential(&alphas, |&a| beamsplitter_entanglement(s, a).unwrap());
    let any: Vec<_> = par::map(&alphas, |&a| beamsplitter_entanglement(s, a).unwrap());
    assert_eq!(seq, any);
    let mut shuffled = alphas.clone();
    shuffled.reverse();
    assert_eq!(entanglement_sweep(s, &shuffled).unwrap(), seq);
}

#[test]
fn uniform_field_spin_decouples_from_motion() {
    let s = SpinLabel::ONE;
    let n = 6;
    let w = Vec3::new(0.3, -0.2, 0.9);
    let site = Ket::basis(vec![n], 2).unwrap();
    let spin_state = Ket::from_slice(
        &[C64::new(0.6, 0.0), C64::new(0.0, 0.48), C64::new(0.64, 0.0)],
        vec![3],
    )
    .unwrap();
    let t = 1.7;
    let out = lattice_evolution(n, 1.3, s, &vec![w; n], t, &site.tensor(&spin_state)).unwrap();
    let reduced = partial_trace(&out.projector(), &[n, 3], &[1]).unwrap();
    let alone = spin_state
        .evolve(&precession_unitary(s, &w, t).unwrap())
        .unwrap()
        .projector();
    assert!(max_abs_diff(reduced.entries(), alone.entries()) < 1e-10);
}

#[test]
fn correlator_verdict_follows_the_exchange_sign() {
    for two_s in 0..=7u32 {
        let s = SpinLabel::from_two_s(two_s);
        for sign in [1, -1] {
            let r = correlator_chain_check(s, sign).unwrap();
            let expect = if sign == s.exchange_sign() {
                ChainVerdict::Consistent
            } else {
                ChainVerdict::InconsistentModel
            };
            assert_eq!(r.verdict, expect, "2S={two_s} sign={sign}");
        }
    }
}
