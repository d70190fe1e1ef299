use acfront::core::{Orientation, INV_NORM_SQ};
use acfront::forcing::{Epsilon, Forcing, Topography};
use acfront::frontdyn::{jacobian_eigenvalues, jacobian_with, FrontModel};
use acfront::stationary::{
    enumerate_stationary_localized, enumerate_stationary_periodic, mu_star, two_front_eigenvalues, two_front_solve,
};

fn eps(v: f64) -> Epsilon {
    Epsilon::new(v).unwrap()
}

#[test]
fn localized_counts_follow_the_zero_count_law() {
    let cases = [
        (2, 0.3, 1e-3),
        (2, 0.4, 1e-4),
        (2, 0.45, 1e-3),
        (3, 0.25, 1e-4),
        (3, 0.2, 1e-6),
        (3, 0.28, 1e-5),
    ];
    for (n, mu, e) in cases {
        assert!(mu < mu_star(n));
        let res = enumerate_stationary_localized(&Topography::exp_hill(mu), eps(e), n).unwrap();
        let k = res.zeros.len();
        assert_eq!(k, 1, "μ = {mu}: zeros {:?}", res.zeros);
        assert_eq!(res.expected_count, (k + 1) * n - 1);
        assert_eq!(res.fronts.len(), res.expected_count, "N = {n}, μ = {mu}, ε = {e}: {:?}", res.failures);
        assert!(res.all_unstable);
        for f in &res.fronts {
            assert!(f.newton_residual < 1e-10, "{f:?}");
            assert!(f.unstable_count >= 1);
        }
    }
}

#[test]
fn every_multifront_localized_pattern_is_unstable() {
    for n in [2, 3, 4] {
        let res = enumerate_stationary_localized(&Topography::exp_hill(0.8), eps(1e-3), n).unwrap();
        assert_eq!(res.fronts.len(), res.expected_count, "N = {n}: {:?}", res.failures);
        assert!(res.all_unstable);
        for f in &res.fronts {
            assert!(f.newton_residual < 1e-10);
            assert!(f.eigenvalues.iter().any(|z| z.re > 0.0), "{f:?}");
        }
    }
}

#[test]
fn two_front_closed_form_matches_the_jacobian_at_solutions() {
    let model = FrontModel::new(&Forcing::topography(Topography::exp_hill(0.8)));
    let e = eps(1e-3);
    let res = enumerate_stationary_localized(&Topography::exp_hill(0.8), e, 2).unwrap();
    for f in &res.fronts {
        let p = [f.positions[0], f.positions[1]];
        let st = two_front_eigenvalues(p, Orientation::Up, e, &model).unwrap();
        let ev = jacobian_eigenvalues(&jacobian_with(&p, Orientation::Up, e.value(), &model).unwrap());
        for i in 0..2 {
            assert!((ev[i] - st.lambda[i]).abs() < 1e-6 * ev[i].abs().max(1e-12), "{ev:?} vs {:?}", st.lambda);
        }
        let (solved, _) = two_front_solve(p, Orientation::Up, e, &model).unwrap();
        assert!(solved.positions.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-8));
    }
}

#[test]
fn lattice_eigenvalues_follow_the_isolated_slopes() {
    let forcing = Forcing::topography(Topography::sinusoid(1.0, 2.0));
    let e = 0.01;
    let res = enumerate_stationary_periodic(&forcing, eps(e), Orientation::Up, &[0, 3, 6]).unwrap();
    assert!(!res.patterns.is_empty());
    let mut stable = 0;
    for p in &res.patterns {
        assert!(p.front.newton_residual < 1e-10);
        let mut actual: Vec<f64> = p.front.eigenvalues.iter().map(|z| z.re).collect();
        actual.sort_by(f64::total_cmp);
        assert_eq!(actual.len(), p.predicted.len());
        for (a, q) in actual.iter().zip(&p.predicted) {
            assert!((a - q).abs() <= 0.1 * q.abs(), "{actual:?} vs {:?}", p.predicted);
        }
        assert_eq!(p.predicted_stable, p.front.unstable_count == 0);
        if p.predicted_stable {
            stable += 1;
            assert!(actual.iter().all(|&a| a < 0.0));
        }
    }
    assert!(stable >= 1);
    // Predictions scale with ε R'/‖u_h'‖², so they are O(ε).
    for p in &res.patterns {
        for q in &p.predicted {
            assert!(q.abs() < 16.0 * e * INV_NORM_SQ);
        }
    }
}
