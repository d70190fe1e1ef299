use acfront::core::Orientation;
use acfront::forcing::{Forcing, Topography};
use acfront::melnikov::{tail_constants_algebraic, tail_constants_exponential, MelnikovFn, TailModel};
use proptest::prelude::*;
use std::f64::consts::SQRT_2;

fn orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![Just(Orientation::Up), Just(Orientation::Down)]
}

fn localized_hill() -> impl Strategy<Value = Topography> {
    prop_oneof![(0.3f64..2.0).prop_map(Topography::exp_hill), (0.5f64..4.0).prop_map(Topography::alg_hill)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closed_form_matches_quadrature_for_triples(
        a1 in -1.0f64..1.0,
        a2 in -1.0f64..1.0,
        a3 in -1.0f64..1.0,
        k in 0.3f64..3.0,
        o in orientation(),
        phi in -6.0f64..6.0,
    ) {
        let closed = MelnikovFn::periodic_closed(a1, a2, a3, k, o).unwrap();
        let quad = MelnikovFn::quadrature(Forcing::triple(a1, a2, a3, k), o);
        let (c, q) = (closed.value(phi).unwrap(), quad.value(phi).unwrap());
        let scale = 1.0 + a1.abs() + a2.abs() + a3.abs();
        prop_assert!((c - q).abs() < 1e-8 * scale, "closed {c} quadrature {q}");
    }

    #[test]
    fn periodic_forcing_gives_periodic_melnikov(amp in -2.0f64..2.0, k in 0.3f64..3.0, o in orientation(), phi in -5.0f64..5.0) {
        let r = MelnikovFn::quadrature(Forcing::topography(Topography::sinusoid(amp, k)), o);
        let period = 2.0 * std::f64::consts::PI / k;
        let (a, b) = (r.value(phi).unwrap(), r.value(phi + period).unwrap());
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn topographic_melnikov_is_orientation_independent(t in localized_hill(), phi in -8.0f64..8.0) {
        let f = Forcing::topography(t);
        let up = MelnikovFn::quadrature(f.clone(), Orientation::Up).value(phi).unwrap();
        let down = MelnikovFn::quadrature(f, Orientation::Down).value(phi).unwrap();
        prop_assert!((up - down).abs() < 1e-10 * (1.0 + up.abs()), "{up} vs {down}");
    }

    #[test]
    fn even_hill_gives_odd_melnikov(t in localized_hill(), phi in 0.0f64..8.0) {
        let r = MelnikovFn::auto(Forcing::topography(t), Orientation::Up);
        let (a, b) = (r.value(phi).unwrap(), r.value(-phi).unwrap());
        prop_assert!((a + b).abs() < 1e-10 * (1.0 + a.abs()), "R({phi}) = {a}, R(-{phi}) = {b}");
    }
}

fn tail_error(topo: &Topography, model: &TailModel, psi: f64) -> f64 {
    let r = MelnikovFn::quadrature(Forcing::topography(topo.clone()), Orientation::Up);
    let actual = r.value(psi / SQRT_2).unwrap();
    let predicted = model.predicted(psi).unwrap();
    (actual / predicted - 1.0).abs()
}

#[test]
fn algebraic_tails_approach_the_limit_constant() {
    for p in [1.5, 2.0, 3.0] {
        let topo = Topography::alg_hill(p);
        let model = tail_constants_algebraic(&topo, p);
        for sign in [1.0, -1.0] {
            let near = tail_error(&topo, &model, sign * 20.0);
            let far = tail_error(&topo, &model, sign * 80.0);
            assert!(far < near, "p = {p}: {near} -> {far}");
            assert!(far < 0.02, "p = {p}: relative error {far} at |ψ| = 80");
        }
    }
}

#[test]
fn exponential_tails_follow_the_leading_term() {
    for mu in [0.5, 1.5] {
        let topo = Topography::exp_hill(mu);
        let model = tail_constants_exponential(&topo, mu).unwrap();
        for sign in [1.0, -1.0] {
            let near = tail_error(&topo, &model, sign * 10.0);
            let far = tail_error(&topo, &model, sign * 20.0);
            assert!(far < near, "μ = {mu}: {near} -> {far}");
            assert!(far < 0.01, "μ = {mu}: relative error {far} at |ψ| = 20");
        }
    }
}
