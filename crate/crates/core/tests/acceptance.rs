//! Acceptance run: every criterion at its stated tolerance and runtime budget, one line each.

use acfront::cli::scenarios::find_scenario;
use acfront::core::{Grid1D, Orientation};
use acfront::forcing::{background_state_nonlinear, Epsilon, Forcing, Profile, Topography};
use acfront::frontdyn::{integrate, nfront_potential, nfront_rhs, FrontModel, FrontState, IntegrateControls};
use acfront::geometry::{bifurcation_scan, homoclinic_intersections, LobeTransition, SectionSettings};
use acfront::melnikov::{pitchfork_mu, solhill_closed, tail_constants_algebraic, tail_weight, MelnikovFn};
use acfront::pde::{discrete_spectrum, evans_homogeneous, homogeneous_front_operator, run, PdeOutcome, SpectrumOptions};
use acfront::stationary::{enumerate_stationary_localized, enumerate_stationary_periodic};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c01_melnikov_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let (a1, a2, a3) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let k = rng.gen_range(0.3..3.0);
        let o = if rng.gen_bool(0.5) { Orientation::Up } else { Orientation::Down };
        let closed = MelnikovFn::periodic_closed(a1, a2, a3, k, o).map_err(|e| e.to_string())?;
        let quad = MelnikovFn::quadrature(Forcing::triple(a1, a2, a3, k), o);
        let period = 2.0 * PI / k;
        for i in 0..200 {
            // Samples avoid the zeros of sin(kφ).
            let phi = -period + 2.0 * period * (i as f64 + 0.37) / 200.0;
            let c = closed.value(phi).map_err(|e| e.to_string())?;
            let q = quad.value(phi).map_err(|e| e.to_string())?;
            worst = worst.max((q - c).abs() / c.abs());
        }
    }
    check(worst < 1e-8, format!("max rel. error {worst:.2e}"))
}

fn c02_solhill_closed_form() -> Outcome {
    let quad = MelnikovFn::quadrature(Forcing::topography(Topography::exp_hill(1.0)), Orientation::Up);
    let mut worst: f64 = 0.0;
    for i in 0..=400 {
        let psi = -10.0 + 20.0 * i as f64 / 400.0;
        if psi.abs() < 1e-3 {
            continue;
        }
        let c = solhill_closed(psi);
        let q = quad.value(psi / SQRT_2).map_err(|e| e.to_string())?;
        worst = worst.max((q - c).abs() / c.abs());
    }
    check(worst < 1e-6, format!("max rel. error {worst:.2e}"))
}

fn c03_pitchfork() -> Outcome {
    let mu = pitchfork_mu().map_err(|e| e.to_string())?;
    check((mu - 0.722133).abs() < 1e-3, format!("mu_PF = {mu:.6}"))
}

fn c04_evans_and_spectrum() -> Outcome {
    let d0 = evans_homogeneous(Complex64::new(0.0, 0.0)).map_err(|e| e.to_string())?.norm();
    let d1 = evans_homogeneous(Complex64::new(-1.5, 0.0)).map_err(|e| e.to_string())?.norm();
    let grid = Grid1D::new(-40.0, 40.0, 4001).map_err(|e| e.to_string())?;
    let op = homogeneous_front_operator(grid).map_err(|e| e.to_string())?;
    let mut ev: Vec<f64> = discrete_spectrum(&op, SpectrumOptions::default()).map_err(|e| e.to_string())?.iter().map(|z| z.re).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let spectral = ev.len() >= 2 && ev[0].abs() < 1e-3 && (ev[1] + 1.5).abs() < 1e-3;
    check(d0 < 1e-12 && d1 < 1e-12 && spectral, format!("|D(0)| = {d0:.1e}, |D(-3/2)| = {d1:.1e}, eigenvalues {ev:.5?}"))
}

fn c05_gradient_flow() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let forcings = [
        Forcing::topography(Topography::exp_hill(1.0)),
        Forcing::topography(Topography::alg_hill(2.0)),
        Forcing::topography(Topography::sinusoid(1.0, 2.0)),
        Forcing::triple(0.7, -0.3, 0.4, 1.3),
        Forcing::Zero,
    ];
    let models: Vec<FrontModel> = forcings.iter().map(FrontModel::new).collect();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let model = &models[i % models.len()];
        let n = rng.gen_range(2..6);
        let mut p = vec![rng.gen_range(-8.0..0.0)];
        for _ in 1..n {
            p.push(p.last().unwrap() + rng.gen_range(1.5..6.0));
        }
        let first = if rng.gen_bool(0.5) { Orientation::Up } else { Orientation::Down };
        let eps = Epsilon::new(rng.gen_range(0.01..0.3)).map_err(|e| e.to_string())?;
        let s = FrontState::new(p.clone(), first, eps).map_err(|e| e.to_string())?;
        let rhs = nfront_rhs(&s, &model.up, &model.down).map_err(|e| e.to_string())?;
        let h = 1e-5;
        for j in 0..n {
            let v = |d: f64| {
                let mut q = p.clone();
                q[j] += d;
                nfront_potential(&FrontState::new(q, first, eps).unwrap(), &model.up, &model.down).unwrap()
            };
            let grad = (v(h) - v(-h)) / (2.0 * h);
            worst = worst.max((rhs[j] + grad).abs() / (1.0 + rhs[j].abs()));
        }
    }
    let eps = Epsilon::new(0.1).map_err(|e| e.to_string())?;
    let mut monotone = true;
    for i in 0..10 {
        let model = &models[i % models.len()];
        let start = vec![-6.0 + 0.3 * i as f64, -1.5, 2.0 + 0.2 * i as f64, 6.5];
        let s0 = FrontState::new(start, Orientation::Up, eps).map_err(|e| e.to_string())?;
        let traj = integrate(&s0, 300.0, model, IntegrateControls::default()).map_err(|e| e.to_string())?;
        let v: Vec<f64> = traj.states.iter().map(|s| nfront_potential(s, &model.up, &model.down).unwrap()).collect();
        monotone &= v.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
    }
    let flat = FrontModel::new(&Forcing::Zero);
    let s0 = FrontState::new(vec![-10.0, -4.0, 3.0, 11.0], Orientation::Down, eps).map_err(|e| e.to_string())?;
    let traj = integrate(&s0, 2000.0, &flat, IntegrateControls::default()).map_err(|e| e.to_string())?;
    let extent: Vec<f64> = traj.states.iter().map(|s| s.positions[s.n() - 1] - s.positions[0]).collect();
    let shrinking = extent.len() > 3 && extent.windows(2).all(|w| w[1] < w[0]);
    check(
        worst < 1e-6 && monotone && shrinking,
        format!("max gradient mismatch {worst:.1e}, V monotone on 10 runs: {monotone}, extent decreasing: {shrinking}"),
    )
}

fn c06_tails() -> Outcome {
    let mu = 0.5;
    let psi: f64 = 25.0;
    let s = MelnikovFn::quadrature(Forcing::topography(Topography::exp_hill(mu)), Orientation::Up);
    let h_plus = -4.0 * SQRT_2 * mu;
    let w_plus = tail_weight(mu, true).map_err(|e| e.to_string())?;
    let exp_err = ((mu * psi).exp() * s.value(psi / SQRT_2).map_err(|e| e.to_string())? / (h_plus * w_plus) - 1.0).abs();

    let p = 2.0;
    let psi: f64 = 50.0;
    let topo = Topography::alg_hill(p);
    let s = MelnikovFn::quadrature(Forcing::topography(topo.clone()), Orientation::Up);
    let limit = -2f64.powf(2.5) * (p - 1.0) / 3.0;
    let model_limit = tail_constants_algebraic(&topo, p).limit_constant(true);
    let alg_err = (psi * psi * s.value(psi / SQRT_2).map_err(|e| e.to_string())? / limit - 1.0).abs();
    check(
        exp_err < 0.02 && alg_err < 0.05 && (model_limit - limit).abs() < 1e-12,
        format!("exponential rel. error {exp_err:.2e}, algebraic rel. error {alg_err:.2e}"),
    )
}

fn c07_stationary_counts() -> Outcome {
    let eps = Epsilon::new(1e-3).map_err(|e| e.to_string())?;
    let mut counts = Vec::new();
    let mut unstable = true;
    for n in [2, 3, 4] {
        let r = enumerate_stationary_localized(&Topography::exp_hill(0.8), eps, n).map_err(|e| e.to_string())?;
        counts.push(r.fronts.len());
        unstable &= r.fronts.iter().all(|f| f.eigenvalues.iter().any(|z| z.re > 0.0));
    }
    check(counts == [7, 11, 15] && unstable, format!("counts {counts:?}, all unstable: {unstable}"))
}

fn c08_periodic_eigenvalues() -> Outcome {
    let forcing = Forcing::topography(Topography::sinusoid(1.0, 2.0));
    let eps = Epsilon::new(0.01).map_err(|e| e.to_string())?;
    let res = enumerate_stationary_periodic(&forcing, eps, Orientation::Up, &[0, 3, 6]).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for p in &res.patterns {
        let mut actual: Vec<f64> = p.front.eigenvalues.iter().map(|z| z.re).collect();
        actual.sort_by(f64::total_cmp);
        for (a, q) in actual.iter().zip(&p.predicted) {
            worst = worst.max((a - q).abs() / q.abs());
        }
    }
    check(
        res.rho_min >= 1.2 && !res.patterns.is_empty() && worst < 0.1,
        format!("{} patterns, rho_min {:.2}, max rel. deviation {worst:.2e}", res.patterns.len(), res.rho_min),
    )
}

fn c09_pde_behaviour() -> Outcome {
    let fig1a = find_scenario("fig1a").map_err(|e| e.to_string())?;
    let a = run(&fig1a.config).map_err(|e| e.to_string())?;
    let sup = a.final_field.values().iter().map(|v| (v + 1.0).abs()).fold(0.0, f64::max);
    let fig1c = find_scenario("fig1c").map_err(|e| e.to_string())?;
    let c = run(&fig1c.config).map_err(|e| e.to_string())?;
    let last = c.tracks.last().ok_or("no tracks")?;
    check(
        a.outcome == PdeOutcome::AllFrontsAnnihilated && sup < 0.05 && c.outcome == PdeOutcome::Pinned && last.positions.len() == 2 && last.max_speed < 1e-5,
        format!(
            "fig1a {:?} with |u+1| = {sup:.1e}; fig1c {:?} at t = {} with {} fronts, speed {:.1e}",
            a.outcome,
            c.outcome,
            c.final_time,
            last.positions.len(),
            last.max_speed
        ),
    )
}

fn c10_pde_vs_ode() -> Outcome {
    let mut config = find_scenario("fig1c").map_err(|e| e.to_string())?.config;
    config.t_end = 200.0;
    config.stop_when_pinned = false;
    let r = run(&config).map_err(|e| e.to_string())?;
    // The ODE starts from the tracked PDE positions at t0.
    let t0 = 5.0;
    let p0: Vec<f64> = (0..2).map(|j| r.position_near(j, t0).ok_or("front lost")).collect::<Result<_, _>>()?;
    let s0 = FrontState::new(p0, Orientation::Up, Epsilon::new(config.eps).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let model = FrontModel::new(&config.forcing);
    let traj = integrate(&s0, 200.0 - t0, &model, IntegrateControls::default()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for s in r.tracks.iter().filter(|s| s.t >= t0 && s.t <= 200.0) {
        for (j, p) in s.positions.iter().enumerate() {
            let o = traj.position_at(j, s.t - t0).or(traj.last().positions.get(j).copied()).ok_or("ODE front lost")?;
            worst = worst.max((o - p).abs());
        }
    }
    check(worst < 0.5, format!("max |x_PDE - x_ODE| = {worst:.2e} on t in [{t0}, 200]"))
}

fn lobe_family(alpha1: f64) -> Forcing {
    Forcing::Canonical { f1: Profile::Cos { amp: alpha1, k: PI }, f2: Profile::zero(), f3: Profile::zero() }
}

fn c11_lobe_thresholds() -> Outcome {
    let s = SectionSettings::new(0.1);
    let counts: Vec<usize> = [-0.094, -0.098, -0.151]
        .iter()
        .map(|&a| homoclinic_intersections(&lobe_family(a), s).map(|h| h.len()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..=14).map(|i| -0.09 - 0.005 * i as f64).collect();
    let found = bifurcation_scan(lobe_family, &grid, s, 1e-4).map_err(|e| e.to_string())?;
    let sn = found.iter().find(|t| t.kind == LobeTransition::SaddleNode).map(|t| t.param);
    let pf = found.iter().find(|t| t.kind == LobeTransition::Pitchfork).map(|t| t.param);
    let near = |v: Option<f64>, target: f64| v.is_some_and(|v| (v - target).abs() <= 0.01);
    check(
        counts == [0, 2, 4] && near(sn, -0.096) && near(pf, -0.141),
        format!("counts {counts:?}, SN at {sn:.5?}, PF at {pf:.5?}"),
    )
}

fn c12_background_order() -> Outcome {
    let f = Forcing::topography(Topography::sinusoid(1.0, 2.0));
    let grid = Grid1D::new(-10.0, 10.0, 2001).map_err(|e| e.to_string())?;
    let err = |eps: f64| -> Result<f64, String> {
        let u = background_state_nonlinear(1.0, &f, Epsilon::new(eps).map_err(|e| e.to_string())?, &grid).map_err(|e| e.to_string())?;
        Ok(grid
            .nodes()
            .iter()
            .zip(u.values())
            .map(|(x, v)| (v - (1.0 - 2.0 * eps / 3.0 * (2.0 * x).sin())).abs())
            .fold(0.0, f64::max))
    };
    let (e1, e2) = (err(0.1)?, err(0.05)?);
    let ratio = e1 / e2;
    check((3.2..=4.8).contains(&ratio), format!("errors {e1:.3e} / {e2:.3e}, ratio {ratio:.3}"))
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: "C1", title: "Melnikov closed form", budget: Duration::from_secs(5), run: c01_melnikov_closed_form },
        Criterion { id: "C2", title: "S_exp(psi; 1) closed form", budget: Duration::from_secs(5), run: c02_solhill_closed_form },
        Criterion { id: "C3", title: "pitchfork decay rate", budget: Duration::from_secs(10), run: c03_pitchfork },
        Criterion { id: "C4", title: "Evans function and discrete spectrum", budget: Duration::from_secs(60), run: c04_evans_and_spectrum },
        Criterion { id: "C5", title: "gradient-flow structure", budget: Duration::from_secs(30), run: c05_gradient_flow },
        Criterion { id: "C6", title: "Melnikov tail asymptotics", budget: Duration::from_secs(10), run: c06_tails },
        Criterion { id: "C7", title: "localized stationary counts", budget: Duration::from_secs(120), run: c07_stationary_counts },
        Criterion { id: "C8", title: "periodic eigenvalue law", budget: Duration::from_secs(30), run: c08_periodic_eigenvalues },
        Criterion { id: "C9", title: "PDE annihilation and pinning", budget: Duration::from_secs(600), run: c09_pde_behaviour },
        Criterion { id: "C10", title: "PDE against front ODE", budget: Duration::from_secs(600), run: c10_pde_vs_ode },
        Criterion { id: "C11", title: "lobe bifurcation thresholds", budget: Duration::from_secs(120), run: c11_lobe_thresholds },
        Criterion { id: "C12", title: "background state order", budget: Duration::from_secs(10), run: c12_background_order },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {:?} budget", c.budget)),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!("{} {:<4} {:<38} {:>8.2}s  {detail}", if pass { "PASS" } else { "FAIL" }, c.id, c.title, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
