use acfront::core::{hamiltonian, heteroclinic, heteroclinic_deriv, weight_wh, Grid1D, Orientation, NORM_SQ};
use acfront::forcing::{background_state, background_state_nonlinear, eval_forcing, forcing_partials, Epsilon, Forcing, Profile, Topography};
use acfront::numerics::quad::{integrate, QuadOptions};
use proptest::prelude::*;

fn orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![Just(Orientation::Up), Just(Orientation::Down)]
}

fn odd_forcing() -> impl Strategy<Value = Forcing> {
    prop_oneof![
        (0.3f64..2.0).prop_map(|mu| Forcing::topography(Topography::exp_hill(mu))),
        (0.5f64..4.0).prop_map(|p| Forcing::topography(Topography::alg_hill(p))),
        (-2.0f64..2.0, 0.2f64..3.0).prop_map(|(a, k)| Forcing::topography(Topography::sinusoid(a, k))),
        (-1.0f64..1.0, -1.0f64..1.0, 0.2f64..3.0).prop_map(|(a1, a2, k)| Forcing::triple(a1, a2, 0.0, k)),
    ]
}

fn any_forcing() -> impl Strategy<Value = Forcing> {
    prop_oneof![
        odd_forcing(),
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.2f64..3.0).prop_map(|(a1, a2, a3, k)| Forcing::triple(a1, a2, a3, k)),
        (-1.0f64..1.0, 0.1f64..2.0, -1.0f64..1.0).prop_map(|(a, k, c)| Forcing::Canonical {
            f1: Profile::Cos { amp: a, k },
            f2: Profile::Const { c },
            f3: Profile::Sin { amp: 0.3, k },
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn front_lies_on_the_zero_energy_level(o in orientation(), phi in -5.0f64..5.0, x in -20.0f64..20.0) {
        let h = hamiltonian(heteroclinic(o, x, phi), heteroclinic_deriv(o, x, phi));
        prop_assert!((h - 0.25).abs() < 1e-12, "H = {h}");
    }

    #[test]
    fn down_front_is_the_reflected_up_front(phi in -5.0f64..5.0, x in -20.0f64..20.0) {
        let up = heteroclinic(Orientation::Up, x, phi);
        let down = heteroclinic(Orientation::Down, x, phi);
        prop_assert_eq!(down, -up);
        let mirrored = heteroclinic(Orientation::Up, phi - (x - phi), phi);
        prop_assert!((mirrored + up).abs() < 1e-14, "{mirrored} vs {}", -up);
    }

    #[test]
    fn weight_is_even(y in -30.0f64..30.0) {
        prop_assert!((weight_wh(y) - weight_wh(-y)).abs() <= 1e-15 * weight_wh(y).abs().max(1e-300));
    }

    #[test]
    fn odd_forcings_are_antisymmetric_in_state(f in odd_forcing(), u in -2.0f64..2.0, v in -2.0f64..2.0, x in -10.0f64..10.0) {
        let a = eval_forcing(&f, u, v, x);
        let b = eval_forcing(&f, -u, -v, x);
        prop_assert!((a + b).abs() < 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn partials_match_central_differences(f in any_forcing(), u in -2.0f64..2.0, v in -2.0f64..2.0, x in -10.0f64..10.0) {
        let h = 1e-5;
        let (fu, fv, fx) = forcing_partials(&f, u, v, x);
        let du = (eval_forcing(&f, u + h, v, x) - eval_forcing(&f, u - h, v, x)) / (2.0 * h);
        let dv = (eval_forcing(&f, u, v + h, x) - eval_forcing(&f, u, v - h, x)) / (2.0 * h);
        let dx = (eval_forcing(&f, u, v, x + h) - eval_forcing(&f, u, v, x - h)) / (2.0 * h);
        for (exact, fd) in [(fu, du), (fv, dv), (fx, dx)] {
            prop_assert!((exact - fd).abs() < 1e-6 * (1.0 + exact.abs()), "{exact} vs {fd}");
        }
    }
}

#[test]
fn squared_norm_of_front_derivative_by_quadrature() {
    let r = integrate(|x| heteroclinic_deriv(Orientation::Up, x, 0.3).powi(2), -40.0, 40.0, QuadOptions::default()).unwrap();
    assert!((r.value - NORM_SQ).abs() < 1e-10, "{} vs {NORM_SQ}", r.value);
    assert!((NORM_SQ - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);
}

#[test]
fn background_state_correction_is_first_order_in_eps() {
    let f = Forcing::topography(Topography::sinusoid(1.0, 2.0));
    let grid = Grid1D::new(-10.0, 10.0, 401).unwrap();
    for sign in [1.0, -1.0] {
        let dev = |eps: f64| {
            let b = background_state(sign, &f, Epsilon::new(eps).unwrap(), &grid).unwrap();
            b.values().iter().map(|v| (v - sign).abs()).fold(0.0, f64::max)
        };
        let ratio = dev(0.1) / dev(0.05);
        assert!((ratio - 2.0).abs() < 1e-9, "ratio {ratio}");

        let gap = |eps: f64| {
            let e = Epsilon::new(eps).unwrap();
            let lin = background_state(sign, &f, e, &grid).unwrap();
            let full = background_state_nonlinear(sign, &f, e, &grid).unwrap();
            lin.sup_distance(&full)
        };
        let order = (gap(0.04) / gap(0.02)).log2();
        assert!((order - 2.0).abs() < 0.3, "observed order {order}");
    }
}

#[test]
fn sinusoidal_background_matches_closed_form() {
    // For g(x) = -4a sin 2x the convolution solves w'' - 2w = -g, so w = g/(2 + 4).
    let f = Forcing::topography(Topography::sinusoid(0.7, 2.0));
    let grid = Grid1D::new(-10.0, 10.0, 201).unwrap();
    let eps = 0.05;
    let b = background_state(1.0, &f, Epsilon::new(eps).unwrap(), &grid).unwrap();
    for (x, v) in grid.nodes().iter().zip(b.values()) {
        let expected = 1.0 + eps * (-4.0 * 0.7 * (2.0 * x).sin()) / 6.0;
        assert!((v - expected).abs() < 1e-9, "x = {x}: {v} vs {expected}");
    }
}
