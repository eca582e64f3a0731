use eulerdd::analysis::builtin;
use eulerdd::dynamics::{f_map, q_map};
use eulerdd::group::pi_g;
use eulerdd::linalg::{c, random_complex, random_hermitian, CMat};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_matrix(seed: u64, d: usize) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMat::from_fn(d, d, |_, _| random_complex(&mut rng))
}

fn scenario_name(k: usize) -> &'static str {
    ["carr-purcell", "pauli", "spin-flip", "symmetric-s3"][k]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn f_and_q_are_linear(k in 0usize..4, s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let s = builtin(scenario_name(k), None, 0).unwrap();
        let d = s.rep.dim();
        let x = random_matrix(s1, d);
        let y = random_matrix(s2, d);
        let combo = &x * c(a, 0.0) + &y * c(0.0, b);
        let lhs = f_map(&s.profiles, &combo, 32).unwrap();
        let rhs = f_map(&s.profiles, &x, 32).unwrap() * c(a, 0.0)
            + f_map(&s.profiles, &y, 32).unwrap() * c(0.0, b);
        prop_assert!((lhs - rhs).norm() < 1e-10);
        let lhs = q_map(&s.rep, &s.profiles, &combo, 32).unwrap();
        let rhs = q_map(&s.rep, &s.profiles, &x, 32).unwrap() * c(a, 0.0)
            + q_map(&s.rep, &s.profiles, &y, 32).unwrap() * c(0.0, b);
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn maps_preserve_trace_and_hermiticity(k in 0usize..4, seed in any::<u64>()) {
        let s = builtin(scenario_name(k), None, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_hermitian(&mut rng, s.rep.dim());
        for out in [
            f_map(&s.profiles, &x, 32).unwrap(),
            q_map(&s.rep, &s.profiles, &x, 32).unwrap(),
            pi_g(&s.rep, &x).unwrap(),
        ] {
            prop_assert!((out.trace() - x.trace()).norm() < 1e-10);
            prop_assert!((&out - out.adjoint()).norm() < 1e-12);
        }
    }

    #[test]
    fn pi_is_idempotent(k in 0usize..4, seed in any::<u64>()) {
        let s = builtin(scenario_name(k), None, 0).unwrap();
        let x = random_matrix(seed, s.rep.dim());
        let p = pi_g(&s.rep, &x).unwrap();
        let pp = pi_g(&s.rep, &p).unwrap();
        prop_assert!((pp - &p).norm() < 1e-12 * (1.0 + p.norm()));
    }
}

#[test]
fn f_of_sigma_z_matches_closed_form() {
    let s = builtin("carr-purcell", None, 0).unwrap();
    let z = eulerdd::linalg::pauli_z();
    // u(τ) = exp(−iπτσx/2): u†σz u = cos(πτ)σz + sin(πτ)σy, averaged over τ ∈ [0, 1].
    let expected = eulerdd::linalg::pauli_y() * c(2.0 / std::f64::consts::PI, 0.0);
    let got = f_map(&s.profiles, &z, 1024).unwrap();
    assert!((got - expected).norm() < 1e-9);
}

#[test]
fn simpson_error_falls_as_fourth_power() {
    let s = builtin("carr-purcell", None, 0).unwrap();
    let z = eulerdd::linalg::pauli_z();
    let expected = eulerdd::linalg::pauli_y() * c(2.0 / std::f64::consts::PI, 0.0);
    let errs: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| (f_map(&s.profiles, &z, n).unwrap() - &expected).norm())
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((12.0..20.0).contains(&ratio), "{errs:?}");
    }
}
