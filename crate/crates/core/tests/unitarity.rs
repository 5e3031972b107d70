mod common;

use polyprop::propagators::{abm4_step, rk4_step, AbmHistory};
use polyprop::spin_bath::{build_hamiltonian, initial_state, SpinBathParams};
use polyprop::{DenseHermitian, Error, Method, PropagatorConfig, StateVector, Stepper};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn polynomial_steps_preserve_norm_at_tight_tolerance() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let n = rng.random_range(2..=64);
        let h = DenseHermitian::random(n, &mut rng);
        for method in [Method::Chebyshev, Method::Hermite, Method::Laguerre] {
            let cfg = PropagatorConfig::new(method, 0.05).with_tol(1e-10);
            let mut stepper = Stepper::new(&h, cfg).unwrap();
            let mut psi = StateVector::random(n, &mut rng);
            for _ in 0..5 {
                stepper.step(&mut psi).unwrap();
                assert!((psi.norm() - 1.0).abs() <= 1e-8, "{method} n={n}");
            }
        }
    }
}

#[test]
fn oversized_step_is_a_convergence_error_with_a_hint() {
    let p = SpinBathParams::sampled(16.0, 4, 0.5, 1).unwrap();
    let h = build_hamiltonian(&p).unwrap();
    let psi = initial_state(&p).unwrap();
    for method in [Method::Chebyshev, Method::Hermite, Method::Laguerre] {
        let mut stepper = Stepper::new(&h, PropagatorConfig::new(method, 2.0)).unwrap();
        let mut v = psi.clone();
        let err = stepper.step(&mut v).unwrap_err();
        assert!(err.is_convergence(), "{method}: {err}");
        if let Error::Convergence { suggested_dt, .. } = err {
            let s = suggested_dt.expect("hint present");
            assert!(s > 0.0 && s < 2.0);
        }
    }
}

#[test]
fn rk4_norm_drift_follows_its_stability_polynomial() {
    // |R(-i theta)|^2 = 1 - theta^6/72 + theta^8/576 per eigenmode
    let p = SpinBathParams::sampled(16.0, 4, 0.5, 42).unwrap();
    let h = build_hamiltonian(&p).unwrap();
    let dt = 0.0036;
    let e_max = polyprop::propagators::estimate_spectral_bound(&h).unwrap() / 2.0;
    let theta = e_max * dt;
    let bound = theta.powi(6) / 72.0;
    let mut psi = initial_state(&p).unwrap();
    for _ in 0..20 {
        let next = rk4_step(&h, &psi, dt).unwrap();
        let drift = (next.norm() - psi.norm()).abs();
        assert!(drift <= bound, "drift {drift:e} bound {bound:e}");
        psi = next;
    }
}

#[test]
fn abm4_tracks_rk4_on_spin_bath() {
    let p = SpinBathParams::sampled(16.0, 3, 0.5, 5).unwrap();
    let h = build_hamiltonian(&p).unwrap();
    let dense = common::dense_of(&h);
    let psi0 = initial_state(&p).unwrap();
    let dt = 0.002;
    let mut hist = AbmHistory::default();
    let mut psi = psi0.clone();
    let mut matvecs = 0;
    for _ in 0..200 {
        let (next, rep) = abm4_step(&h, &mut hist, &psi, dt).unwrap();
        matvecs += rep.matvecs;
        psi = next;
    }
    assert_eq!(matvecs, 6 + 5 + 5 + 2 * 197);
    let exact = common::exact_evolve(&dense, &psi0, 200.0 * dt);
    assert!(psi.distance(&exact).unwrap() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_steps_are_pure_phases(e in -5.0f64..5.0, dt in 0.0f64..0.5, m in 0usize..3) {
        let method = [Method::Chebyshev, Method::Hermite, Method::Laguerre][m];
        let h = DenseHermitian::diagonal(&[e]);
        let cfg = PropagatorConfig::new(method, dt).with_tol(1e-12).with_k_max(200);
        let mut stepper = Stepper::new(&h, cfg).unwrap();
        let mut psi = StateVector::basis(1, 0);
        stepper.step(&mut psi).unwrap();
        let want = polyprop::Complex64::from_polar(1.0, -e * dt);
        prop_assert!((psi[0] - want).norm() < 1e-10);
    }

    #[test]
    fn steps_are_linear(seed in 0u64..1000, a in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = DenseHermitian::random(6, &mut rng);
        let x = StateVector::random(6, &mut rng);
        let y = StateVector::random(6, &mut rng);
        let cfg = PropagatorConfig::new(Method::Laguerre, 0.1).with_tol(1e-13).with_k_max(60);
        let step = |v: &StateVector| polyprop::propagators::laguerre_step(&h, v, &cfg).unwrap().0;
        let s = x.add_scaled(polyprop::Complex64::new(a, 0.0), &y).unwrap();
        let lhs = step(&s);
        let rhs = step(&x).add_scaled(polyprop::Complex64::new(a, 0.0), &step(&y)).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-9);
    }
}
