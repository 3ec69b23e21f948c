use proptest::prelude::*;
use stochairy::operator::{self, propagate, QuasiState};
use stochairy::{OperatorSpec, Potential};

fn noisy(seed: u64, length: f64) -> OperatorSpec {
    OperatorSpec::stochastic_airy(2.0, 1e-3, length, seed).unwrap()
}

#[test]
fn greens_formula_with_noise() {
    for seed in 0..5 {
        let spec = noisy(seed, 5.0);
        let (l1, l2) = (3.0 + seed as f64, 7.5 - 0.5 * seed as f64);
        let u1 = propagate(&spec, l1, QuasiState::new(0.0, 0.0, 1.0), 0.0, 5.0).unwrap();
        let u2 = propagate(&spec, l2, QuasiState::new(0.0, 0.0, 1.0), 0.0, 5.0).unwrap();
        let r = operator::greens_residual(&spec, &u1, &u2, 0.0, 5.0).unwrap();
        assert!(r < 1e-3, "seed {seed}: {r}");
        let r = operator::greens_residual(&spec, &u1, &u2, 1.0, 4.0).unwrap();
        assert!(r < 1e-3, "seed {seed}: {r}");
    }
}

#[test]
fn greens_formula_rejects_uncovered_interval() {
    let spec = noisy(1, 5.0);
    let u = propagate(&spec, 1.0, QuasiState::new(0.0, 0.0, 1.0), 0.0, 3.0).unwrap();
    assert!(operator::greens_residual(&spec, &u, &u, 0.0, 4.0).is_err());
}

#[test]
fn apply_on_noisy_solutions() {
    // Below the turning point, where the solution stays of order one.
    for seed in 0..10 {
        let spec = noisy(seed, 5.0);
        let lambda = 6.0;
        let log = propagate(&spec, lambda, QuasiState::new(0.0, 0.0, 1.0), 0.0, 5.0).unwrap();
        let u: Vec<f64> = log.states.iter().map(|s| s.u).collect();
        let v: Vec<f64> = u.iter().map(|x| lambda * x).collect();
        let d = operator::apply(&spec, &u, &v).unwrap();
        assert!(d < 1e-2, "seed {seed}: {d}");
    }
}

#[test]
fn apply_rejects_nonzero_origin() {
    let spec = OperatorSpec::deterministic(Potential::Zero, 0.1, 1.0).unwrap();
    assert!(operator::apply(&spec, &[1.0, 1.0, 1.0], &[0.0; 3]).is_err());
}

#[test]
fn bracket_is_conserved_with_noise() {
    for seed in 0..5 {
        let spec = noisy(seed, 10.0);
        let s1 = QuasiState::new(0.0, 0.0, 1.0);
        let s2 = QuasiState::new(0.0, 1.0, 0.5);
        let a = propagate(&spec, 12.0, s1, 0.0, 10.0).unwrap();
        let b = propagate(&spec, 12.0, s2, 0.0, 10.0).unwrap();
        let w0 = operator::wronskian(&s1, &s2).unwrap();
        let w1 = operator::wronskian(&a.last(), &b.last()).unwrap();
        assert!((w1 - w0).abs() < 1e-3 * 10.0, "seed {seed}: {w0} → {w1}");
    }
}

#[test]
fn wronskian_rejects_mismatched_times() {
    let a = QuasiState::new(0.0, 1.0, 0.0);
    let b = QuasiState::new(0.5, 0.0, 1.0);
    assert!(operator::wronskian(&a, &b).is_err());
}

#[test]
fn propagation_log_csv() {
    let spec = OperatorSpec::deterministic(Potential::Zero, 0.5, 1.0).unwrap();
    let log = propagate(&spec, 0.0, QuasiState::new(0.0, 0.0, 1.0), 0.0, 1.0).unwrap();
    let mut buf = Vec::new();
    log.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("t,u,uq"));
    assert_eq!(text.lines().count(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagation_is_linear(
        seed in 0u64..1000,
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
        lambda in 0.0f64..12.0,
    ) {
        let spec = OperatorSpec::stochastic_airy(2.0, 1e-2, 3.0, seed).unwrap();
        let s1 = QuasiState::new(0.0, 0.3, -1.0);
        let s2 = QuasiState::new(0.0, -0.7, 0.4);
        let mix = QuasiState::new(0.0, alpha * s1.u + beta * s2.u, alpha * s1.uq + beta * s2.uq);
        let a = propagate(&spec, lambda, s1, 0.0, 3.0).unwrap();
        let b = propagate(&spec, lambda, s2, 0.0, 3.0).unwrap();
        let m = propagate(&spec, lambda, mix, 0.0, 3.0).unwrap();
        for ((x, y), z) in a.states.iter().zip(&b.states).zip(&m.states) {
            let scale = 1.0 + x.u.abs() + y.u.abs() + x.uq.abs() + y.uq.abs();
            prop_assert!((alpha * x.u + beta * y.u - z.u).abs() <= 1e-9 * (alpha.abs() + beta.abs()) * scale);
            prop_assert!((alpha * x.uq + beta * y.uq - z.uq).abs() <= 1e-9 * (alpha.abs() + beta.abs()) * scale);
        }
    }
}
