//! The cat protocol at N = 200, U = 0.1, t = 1.

use catlab_core::dynamics::{
    beta_from_inverse, prepare_and_evolve, InitialState, TwistTurnParams, PURE_STATE_BETA,
};
use catlab_core::metrology::{
    cat_split, cfi_finite_difference, jz_distribution, metrology_report, ReadoutSpec,
    DEFAULT_FD_DELTA,
};
use catlab_core::spin::{cartesian_ops, SpinAxis, SpinSpace};

fn figure_params() -> TwistTurnParams<f64> {
    TwistTurnParams::new(SpinSpace::new(200).unwrap(), 1.0, 0.1).unwrap()
}

#[test]
fn cold_zero_state_is_a_cat() {
    let p = figure_params();
    let ev = prepare_and_evolve(InitialState::Zero, PURE_STATE_BETA, 1.4, &p).unwrap();
    let jz = cartesian_ops::<f64>(p.space).jz;
    let r = metrology_report(&ev.rho, &jz, &ReadoutSpec::default()).unwrap();
    println!(
        "cold zero: lambda {:.3} widths {:.3}/{:.3} r_c {:.4} r_q {:.8}",
        r.lambda,
        r.split.peak_width_left,
        r.split.peak_width_right,
        r.r_c.unwrap(),
        r.r_q.unwrap()
    );
    assert!((r.lambda - 65.0).abs() <= 6.5);
    assert!((r.r_q.unwrap() - 1.0).abs() < 1e-6);
    assert!((r.r_c.unwrap() - 0.75).abs() < 0.05);
}

#[test]
fn cold_pi_state_is_symmetric() {
    let p = figure_params();
    let ev = prepare_and_evolve(InitialState::Pi, PURE_STATE_BETA, 1.0, &p).unwrap();
    let d = jz_distribution(&ev.rho);
    let probs = d.probs();
    for k in 0..probs.len() {
        assert!((probs[k] - probs[probs.len() - 1 - k]).abs() < 1e-6);
    }
    let split = cat_split(&d);
    assert!(split.extensive_difference > 40.0);
    assert!(split.mean.abs() < 1e-6);
}

#[test]
fn hot_zero_state() {
    let p = figure_params();
    let beta = beta_from_inverse(10.0).unwrap();
    let ev = prepare_and_evolve(InitialState::Zero, beta, 1.1, &p).unwrap();
    let jz = cartesian_ops::<f64>(p.space).jz;
    let r = metrology_report(&ev.rho, &jz, &ReadoutSpec::default()).unwrap();
    println!(
        "hot zero: lambda {:.3} r_c {:.4} r_q {:.4} lr_c {:.3} lr_q {:.3}",
        r.lambda,
        r.r_c.unwrap(),
        r.r_q.unwrap(),
        r.reduced_lambda_c.unwrap(),
        r.reduced_lambda_q.unwrap()
    );
    assert!(r.r_c.unwrap() <= 0.10);
    assert!(r.r_q.unwrap() < 0.2);
    assert!(r.reduced_lambda_q.unwrap() > 3.0 && r.reduced_lambda_q.unwrap() < 15.0);
    assert!(r.reduced_lambda_c.unwrap() < r.reduced_lambda_q.unwrap());
}

#[test]
fn zero_time_is_single_peak() {
    let p = figure_params();
    let ev = prepare_and_evolve(InitialState::Pi, PURE_STATE_BETA, 0.0, &p).unwrap();
    let d = jz_distribution(&ev.rho);
    let probs = d.probs();
    let peak = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    assert_eq!(p.space.m_int(peak), 0);
    // unimodal
    for k in 0..peak {
        assert!(probs[k] <= probs[k + 1] + 1e-15);
    }
    for k in peak..probs.len() - 1 {
        assert!(probs[k] + 1e-15 >= probs[k + 1]);
    }
}

#[test]
fn finite_difference_on_evolved_cat() {
    let p = figure_params();
    let ev = prepare_and_evolve(InitialState::Zero, PURE_STATE_BETA, 1.4, &p).unwrap();
    let jz = cartesian_ops::<f64>(p.space).jz;
    let exact = catlab_core::metrology::cfi_commutator(&ev.rho, &jz, &ReadoutSpec::default()).unwrap();
    let fd = cfi_finite_difference(&ev.rho, &SpinAxis::z(), &ReadoutSpec::default(), DEFAULT_FD_DELTA).unwrap();
    assert!((fd.value - exact).abs() <= 1e-4 * exact, "{} vs {exact}", fd.value);
}
