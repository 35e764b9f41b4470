mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use ptbench::bench::{
    bench_probabilities, chsh_bound, chsh_c, max_chsh, max_violation, max_violation_in,
    p_single_closed_form, run_bench, run_bench_from, signaling_delta, signaling_delta_in,
};
use ptbench::medium::derive;
use ptbench::{probabilities, Complex64, ExperimentSettings, MediumPosition, PTMediumParams, PolPosState};
use rand::Rng;

fn sin_alpha(s: f64) -> PTMediumParams {
    PTMediumParams::with_sin_alpha(s, 1.0, 0.0).unwrap()
}

#[test]
fn pipeline_matches_closed_form_on_random_settings() {
    let mut rng = common::rng(11);
    for _ in 0..1000 {
        let m = common::unbroken_medium(&mut rng);
        let s = ExperimentSettings::new(m, rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let p = bench_probabilities(&s).unwrap();
        let (h, v) = p_single_closed_form(&s).unwrap();
        assert!((p.pa_h - h).abs() <= 1e-10 && (p.pa_v - v).abs() <= 1e-10, "{s:?}");
    }
}

#[test]
fn position_marginals_are_half() {
    let mut rng = common::rng(12);
    for _ in 0..500 {
        let m = common::unbroken_medium(&mut rng);
        let s = ExperimentSettings::new(m, rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let p = bench_probabilities(&s).unwrap();
        assert!((p.pb_u - 0.5).abs() <= 1e-10 && (p.pb_l - 0.5).abs() <= 1e-10);
        let total: f64 = p.joint().iter().sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn hermitian_media_never_signal() {
    let mut rng = common::rng(13);
    for _ in 0..300 {
        let m = PTMediumParams::new(
            rng.random_range(0.0..5.0),
            if rng.random_bool(0.5) { 0.0 } else { PI },
            rng.random_range(0.1..5.0),
            rng.random_range(0.0..2.0 * PI),
        )
        .unwrap();
        let d = signaling_delta(&m, rng.random_range(0.0..PI), rng.random_range(0.0..PI), rng.random_range(0.0..PI)).unwrap();
        assert!(d <= 1e-12, "{m:?} {d}");
    }
}

#[test]
fn medium_before_splitter_never_signals() {
    let mut rng = common::rng(14);
    for _ in 0..300 {
        let mut s = ExperimentSettings::new(common::non_hermitian_medium(&mut rng), 0.0, rng.random_range(0.0..PI));
        s.medium_position = MediumPosition::BeforeBs;
        let d = signaling_delta_in(&s, rng.random_range(0.0..PI), rng.random_range(0.0..PI)).unwrap();
        assert!(d <= 1e-10);
    }
}

#[test]
fn total_intensity_matches_gain_for_any_settings() {
    let mut rng = common::rng(15);
    for _ in 0..200 {
        let m = common::unbroken_medium(&mut rng);
        let sa = derive(&m).unwrap().alpha.sin();
        let s = ExperimentSettings::new(m, rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let total = run_bench(&s).unwrap().total();
        let want = 2.0 * (1.0 + sa * sa) / (1.0 - sa * sa);
        assert!((total - want).abs() <= 1e-10 * want);
    }
}

#[test]
fn probabilities_are_scale_invariant() {
    let mut rng = common::rng(16);
    for _ in 0..100 {
        let m = common::unbroken_medium(&mut rng);
        let s = ExperimentSettings::new(m, rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let z = Complex64::from_polar(rng.random_range(0.01..100.0), rng.random_range(0.0..2.0 * PI));
        let a = probabilities(&run_bench(&s).unwrap()).unwrap();
        let b = probabilities(&run_bench_from(&PolPosState::initial().scaled(z), &s).unwrap()).unwrap();
        for (x, y) in a.joint().iter().zip(b.joint()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn disabling_the_swap_keeps_polarization_marginals() {
    let mut rng = common::rng(17);
    for _ in 0..100 {
        let mut s = ExperimentSettings::new(common::unbroken_medium(&mut rng), rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let a = bench_probabilities(&s).unwrap();
        s.mirror_swap = false;
        let b = bench_probabilities(&s).unwrap();
        assert!((a.pa_h - b.pa_h).abs() <= 1e-12);
    }
}

#[test]
fn closed_form_violation_for_extreme_splitters() {
    // r = 1 vs t = 1 with phi2 = 0: 2 s |sin 2b| / (1 + s^2).
    for s in [0.1, 0.5, 0.8] {
        for beta in [0.1, FRAC_PI_4, 1.2] {
            let d = signaling_delta(&sin_alpha(s), beta, FRAC_PI_2, 0.0).unwrap();
            let want = 2.0 * s * (2.0 * beta).sin().abs() / (1.0 + s * s);
            assert!((d - want).abs() < 1e-12);
        }
    }
}

#[test]
fn correlation_is_a_bounded_probability_combination() {
    for s in [0.0, 0.4, 0.9] {
        for i in 0..12 {
            for j in 0..12 {
                let c = chsh_c(i as f64 * PI / 12.0, j as f64 * PI / 12.0, &sin_alpha(s)).unwrap();
                assert!(c.abs() <= 1.0 + 1e-12);
            }
        }
    }
}

#[test]
fn chsh_at_hermitian_point_reaches_two() {
    let r = max_chsh(&sin_alpha(0.0), 50).unwrap();
    assert!((r.s_max - 2.0).abs() < 1e-4, "{}", r.s_max);
    assert!(r.s_max <= 2.0 + 1e-9);
}

#[test]
fn chsh_scales_with_alpha() {
    let m = sin_alpha(0.5);
    let r = max_chsh(&m, 50).unwrap();
    assert!((r.s_max - 1.2).abs() < 1e-4);
    assert!((chsh_bound(&m).unwrap() - 1.2).abs() < 1e-15);
    let fig2 = max_chsh(&PTMediumParams::fig2(), 50).unwrap();
    assert!((fig2.s_max - 1.99746).abs() < 1e-5);
}

#[test]
fn max_violation_examples() {
    assert!(max_violation(&sin_alpha(0.0), 40).unwrap().delta < 1e-12);
    let v = max_violation(&sin_alpha(0.5), 40).unwrap();
    assert!((v.delta - 0.8).abs() < 1e-9);
    let mut before = ExperimentSettings::new(sin_alpha(0.5), 0.0, 0.0);
    before.medium_position = MediumPosition::BeforeBs;
    assert!(max_violation_in(&before, 20).unwrap().delta < 1e-10);
}

#[test]
fn scans_are_bit_stable() {
    let m = sin_alpha(0.3);
    assert_eq!(max_chsh(&m, 16).unwrap(), max_chsh(&m, 16).unwrap());
    assert_eq!(max_violation(&m, 16).unwrap(), max_violation(&m, 16).unwrap());
}
