use acfront::core::Orientation;
use acfront::forcing::{Epsilon, Forcing, Topography};
use acfront::frontdyn::{
    integrate, nfront_potential, nfront_rhs, rescaled_rhs_topographic, FrontModel, FrontState, IntegrateControls, TAU_PER_T,
};
use proptest::prelude::*;
use std::f64::consts::SQRT_2;

fn forcing() -> impl Strategy<Value = Forcing> {
    prop_oneof![
        Just(Forcing::Zero),
        (0.5f64..1.5).prop_map(|mu| Forcing::topography(Topography::exp_hill(mu))),
        (1.5f64..3.0).prop_map(|p| Forcing::topography(Topography::alg_hill(p))),
        (0.5f64..2.5).prop_map(|k| Forcing::topography(Topography::sinusoid(1.0, k))),
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b, c)| Forcing::triple(a, b, c, 1.3)),
    ]
}

fn state() -> impl Strategy<Value = (Vec<f64>, Orientation, f64)> {
    (
        -10.0f64..0.0,
        prop::collection::vec(1.5f64..6.0, 1..5),
        prop_oneof![Just(Orientation::Up), Just(Orientation::Down)],
        0.01f64..0.3,
    )
        .prop_map(|(start, gaps, first, eps)| {
            let mut positions = vec![start];
            for g in gaps {
                positions.push(positions.last().unwrap() + g);
            }
            (positions, first, eps)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn rhs_is_minus_gradient_of_potential(f in forcing(), (positions, first, eps) in state()) {
        let model = FrontModel::new(&f);
        let e = Epsilon::new(eps).unwrap();
        let s = FrontState::new(positions.clone(), first, e).unwrap();
        let rhs = nfront_rhs(&s, &model.up, &model.down).unwrap();
        let h = 1e-5;
        for j in 0..positions.len() {
            let shifted = |d: f64| {
                let mut p = positions.clone();
                p[j] += d;
                nfront_potential(&FrontState::new(p, first, e).unwrap(), &model.up, &model.down).unwrap()
            };
            let grad = (shifted(h) - shifted(-h)) / (2.0 * h);
            prop_assert!((rhs[j] + grad).abs() < 1e-6 * (1.0 + rhs[j].abs()), "j = {j}: rhs {} grad {grad}", rhs[j]);
        }
    }

    #[test]
    fn homogeneous_dynamics_is_translation_covariant((positions, first, eps) in state(), shift in -20.0f64..20.0) {
        let model = FrontModel::new(&Forcing::Zero);
        let e = Epsilon::new(eps).unwrap();
        let s = FrontState::new(positions.clone(), first, e).unwrap();
        let moved = FrontState::new(positions.iter().map(|p| p + shift).collect(), first, e).unwrap();
        let a = nfront_rhs(&s, &model.up, &model.down).unwrap();
        let b = nfront_rhs(&moved, &model.up, &model.down).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn rescaled_system_is_a_time_change(mu in 0.4f64..1.5, (positions, _first, eps) in state()) {
        let f = Forcing::topography(Topography::exp_hill(mu));
        let model = FrontModel::new(&f);
        let e = Epsilon::new(eps).unwrap();
        let s = FrontState::new(positions.clone(), Orientation::Up, e).unwrap();
        let rhs = nfront_rhs(&s, &model.up, &model.down).unwrap();
        let psi: Vec<f64> = positions.iter().map(|p| SQRT_2 * p).collect();
        let scaled = rescaled_rhs_topographic(&psi, &model.up, e).unwrap();
        for (r, q) in rhs.iter().zip(&scaled) {
            let expected = SQRT_2 * r / TAU_PER_T;
            prop_assert!((q - expected).abs() < 1e-10 * (1.0 + q.abs()), "{q} vs {expected}");
        }
    }
}

fn recorded_with(s0: &FrontState, model: &FrontModel, t_end: f64, rtol: f64) -> Vec<FrontState> {
    let controls =
        IntegrateControls { output_every: Some(t_end / 50.0), delta_min: 1.0, rtol, atol: rtol * 1e-2, ..IntegrateControls::default() };
    integrate(s0, t_end, model, controls).unwrap().states
}

fn recorded(s0: &FrontState, model: &FrontModel, t_end: f64) -> Vec<FrontState> {
    recorded_with(s0, model, t_end, 1e-8)
}

#[test]
fn potential_decreases_along_trajectories() {
    let e = Epsilon::new(0.1).unwrap();
    for f in [Forcing::Zero, Forcing::topography(Topography::exp_hill(1.0)), Forcing::topography(Topography::sinusoid(1.0, 2.0))] {
        let model = FrontModel::new(&f);
        let s0 = FrontState::new(vec![-4.0, -0.5, 3.0, 6.0], Orientation::Up, e).unwrap();
        let states = recorded(&s0, &model, 200.0);
        let v: Vec<f64> = states.iter().map(|s| nfront_potential(s, &model.up, &model.down).unwrap()).collect();
        for w in v.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{f:?}: {} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn homogeneous_front_configurations_contract() {
    let model = FrontModel::new(&Forcing::Zero);
    let s0 = FrontState::new(vec![-10.0, -4.0, 3.0, 11.0], Orientation::Down, Epsilon::new(0.1).unwrap()).unwrap();
    let traj = integrate(&s0, 2000.0, &model, IntegrateControls::default()).unwrap();
    let states = traj.states;
    assert!(states.len() > 3, "{} states", states.len());
    for w in states.windows(2) {
        let (a, b) = (&w[0].positions, &w[1].positions);
        assert!(b[b.len() - 1] - b[0] < a[a.len() - 1] - a[0]);
        assert!(b[0] > a[0] && b[b.len() - 1] < a[a.len() - 1]);
    }
}

#[test]
fn homogeneous_trajectories_shift_with_the_initial_state() {
    let model = FrontModel::new(&Forcing::Zero);
    let e = Epsilon::new(0.05).unwrap();
    let base = vec![-6.0, 0.0, 6.5];
    let shift = 7.25;
    let controls = IntegrateControls { rtol: 1e-11, atol: 1e-13, ..IntegrateControls::default() };
    let run = |p: Vec<f64>| integrate(&FrontState::new(p, Orientation::Up, e).unwrap(), 100.0, &model, controls).unwrap();
    let a = run(base.clone());
    let b = run(base.iter().map(|p| p + shift).collect());
    assert!(a.events.is_empty() && b.events.is_empty());
    assert_eq!(a.times.last(), Some(&100.0));
    assert_eq!(b.times.last(), Some(&100.0));
    for (p, q) in a.last().positions.iter().zip(&b.last().positions) {
        assert!((q - p - shift).abs() < 1e-8, "{p} + {shift} vs {q}");
    }
    assert!((a.last().positions[0] - base[0]).abs() > 1e-3, "the fronts should have moved");
}
