//! Built-in PDE scenarios reproducing the published simulation setups at desk scale.

use crate::forcing::{Forcing, Profile, Topography};
use crate::pde::{InitialCondition, PdeRunConfig, Scheme, TanhTerm};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A named, fully specified PDE run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub description: String,
    /// Set when the reduced theory is not known to apply.
    pub exploratory: bool,
    pub config: PdeRunConfig,
}

fn terms(spec: &[(f64, f64)], steepness: f64, offset: f64) -> InitialCondition {
    InitialCondition::Terms {
        terms: spec.iter().map(|&(sign, center)| TanhTerm { sign, steepness, center }).collect(),
        offset,
    }
}

fn topo(t: Topography) -> Forcing {
    Forcing::topography(t)
}

fn neg_alg(p: f64) -> Topography {
    Topography::AlgHill { p, sign: -1.0 }
}

fn f1_only(f1: Profile) -> Forcing {
    Forcing::Canonical { f1, f2: Profile::zero(), f3: Profile::zero() }
}

struct Builder {
    id: String,
    description: String,
    exploratory: bool,
    config: PdeRunConfig,
}

impl Builder {
    fn new(id: &str, description: &str, domain: (f64, f64), forcing: Forcing, eps: f64, ic: InitialCondition, t_end: f64) -> Self {
        let mut config = PdeRunConfig::new(domain.0, domain.1, forcing, eps, ic, t_end);
        config.pin_after = 10.0;
        config.snapshot_every = Some(t_end / 20.0);
        if config.forcing.is_zero() || eps == 0.0 {
            config.stop_when_pinned = false;
        }
        Self { id: id.into(), description: description.into(), exploratory: false, config }
    }

    fn exploratory(mut self) -> Self {
        self.exploratory = true;
        self
    }

    fn dt(mut self, dt: f64) -> Self {
        self.config.scheme = Scheme::ImexTheta { dt, theta: 0.5 };
        self
    }

    fn dx(mut self, dx: f64) -> Self {
        self.config.dx = dx;
        self
    }

    fn track_every(mut self, dt: f64) -> Self {
        self.config.track_every = dt;
        self
    }

    fn build(self) -> Scenario {
        Scenario { id: self.id, description: self.description, exploratory: self.exploratory, config: self.config }
    }
}

const TWO_FRONT: [(f64, f64); 2] = [(1.0, -4.0), (-1.0, 4.0)];
const THREE_FRONT: [(f64, f64); 3] = [(1.0, -7.0), (-1.0, 1.0), (1.0, 9.1)];
const FIVE_FRONT_WIDE: [(f64, f64); 5] = [(1.0, 1.0), (-1.0, 15.0), (1.0, 25.0), (-1.0, 37.0), (1.0, 48.0)];
const FIVE_FRONT_HILL: [(f64, f64); 5] = [(1.0, -6.0), (-1.0, -0.5), (1.0, 6.0), (-1.0, 11.5), (1.0, 17.5)];
const SIX_FRONT: [(f64, f64); 6] = [(1.0, -13.0), (-1.0, 7.5), (1.0, -1.1), (-1.0, 5.0), (1.0, 10.0), (-1.0, 15.9)];

/// Every built-in scenario, in registry order.
pub fn builtin_scenarios() -> Vec<Scenario> {
    let sin2x = || topo(Topography::sinusoid(1.0, 2.0));
    let mut out = vec![
        Builder::new("fig1a", "two fronts, homogeneous medium: the pair annihilates", (-10.0, 10.0), Forcing::Zero, 0.1, terms(&TWO_FRONT, 1.0, -1.0), 3000.0),
        Builder::new("fig1b", "two fronts on the exponential hill H_exp(x; 1)", (-10.0, 10.0), topo(Topography::exp_hill(1.0)), 0.1, terms(&TWO_FRONT, 1.0, -1.0), 3000.0),
        Builder::new("fig1c", "two fronts on H = sin 2x: pinned two-front end state", (-10.0, 10.0), sin2x(), 0.1, terms(&TWO_FRONT, 1.0, -1.0), 3000.0),
        Builder::new("fig1d", "three fronts, homogeneous medium", (-25.0, 25.0), Forcing::Zero, 0.1, terms(&THREE_FRONT, 1.0, 0.0), 3000.0),
        Builder::new("fig1e", "three fronts on the algebraic hill H_alg(x; 2)", (-25.0, 25.0), topo(Topography::alg_hill(2.0)), 0.1, terms(&THREE_FRONT, 1.0, 0.0), 3000.0),
        Builder::new("fig1f", "three fronts on H = sin 2x", (-25.0, 25.0), sin2x(), 0.1, terms(&THREE_FRONT, 1.0, 0.0), 3000.0),
        Builder::new(
            "fig2-pinned-multifront",
            "three fronts pinned by f1 = cos(4πx/15) near its stable phases",
            (-60.0, 60.0),
            f1_only(Profile::Cos { amp: 1.0, k: 4.0 * std::f64::consts::PI / 15.0 }),
            0.1,
            terms(&[(1.0, -11.0), (-1.0, 4.0), (1.0, 19.0)], 1.0, 0.0),
            2000.0,
        ),
        Builder::new("fig3-5fronts-per", "five fronts with periodic f1 = sin(x/5)", (-500.0, 1500.0), f1_only(Profile::Sin { amp: 1.0, k: 0.2 }), 0.1, terms(&FIVE_FRONT_WIDE, 1.0, 0.0), 1000.0),
        Builder::new("fig3-5fronts-alg025", "five fronts on the valley -H_alg(x; 0.25)", (-500.0, 1500.0), topo(neg_alg(0.25)), 0.1, terms(&FIVE_FRONT_WIDE, 1.0, 0.0), 1000.0),
        Builder::new("fig3-5fronts-algm050", "five fronts on the valley -H_alg(x; -0.5)", (-500.0, 1500.0), topo(neg_alg(-0.5)), 0.1, terms(&FIVE_FRONT_WIDE, 1.0, 0.0), 1000.0),
        Builder::new(
            "fig11-4front-a",
            "four steep fronts on -H_alg(x; 0.5): the middle pair merges, the outer fronts escape",
            (-20.0, 20.0),
            topo(neg_alg(0.5)),
            0.02,
            terms(&[(1.0, -10.0), (-1.0, -2.5), (1.0, 2.5), (-1.0, 10.0)], 5.0, -1.0),
            2000.0,
        ),
        Builder::new(
            "fig11-4front-c",
            "as fig11-4front-a with the first front at -7.5: both pairs annihilate",
            (-20.0, 20.0),
            topo(neg_alg(0.5)),
            0.02,
            terms(&[(1.0, -7.5), (-1.0, -2.5), (1.0, 2.5), (-1.0, 10.0)], 5.0, -1.0),
            800.0,
        ),
        Builder::new("fig12-5front-a", "five fronts on H_alg(x; 1.25): a single front survives", (-50.0, 50.0), topo(Topography::alg_hill(1.25)), 0.2, terms(&FIVE_FRONT_HILL, 1.0, 0.0), 8000.0),
        Builder::new(
            "fig12-5front-c",
            "as fig12-5front-a with the first front at -7: a front settles on the hilltop",
            (-50.0, 50.0),
            topo(Topography::alg_hill(1.25)),
            0.2,
            terms(&[(1.0, -7.0), (-1.0, -0.5), (1.0, 6.0), (-1.0, 11.5), (1.0, 17.5)], 1.0, 0.0),
            8000.0,
        ),
    ];
    for (tag, eps) in [("0", 0.0), ("0.01", 0.01), ("0.1", 0.1), ("0.4", 0.4)] {
        out.push(Builder::new(
            &format!("fig13-2front-periodic-eps{tag}"),
            &format!("two fronts on H = sin(0.8977x) with eps = {tag}"),
            (-40.0, 40.0),
            topo(Topography::sinusoid(1.0, 0.8977)),
            eps,
            terms(&[(1.0, -3.5), (-1.0, 6.0)], 1.0, -1.0),
            2000.0,
        ));
    }
    out.push(Builder::new(
        "fig18-3front-periodic",
        "three fronts with periodic f1 = cos x",
        (-15.0, 15.0),
        f1_only(Profile::Cos { amp: 1.0, k: 1.0 }),
        0.1,
        terms(&[(1.0, -8.5), (-1.0, -1.0), (1.0, 8.0)], 1.0, 0.0),
        2000.0,
    ));
    for (tag, f, what) in [
        ("flat", Forcing::Zero, "homogeneous medium"),
        ("valley", topo(neg_alg(2.0)), "weak valley -H_alg(x; 2): accelerated coarsening"),
        ("hill", topo(Topography::alg_hill(2.0)), "weak hill H_alg(x; 2)"),
    ] {
        out.push(Builder::new(&format!("fig19-coarsen-{tag}"), &format!("six-front coarsening, {what}"), (-30.0, 30.0), f, 0.1, terms(&SIX_FRONT, 1.0, -1.0), 2000.0));
    }
    for (tag, delta) in [("0", 0.0), ("0.025", 0.025), ("0.04", 0.04), ("0.06", 0.06)] {
        let mixed = Topography::Mixed { loc: Box::new(neg_alg(0.5)), per: Box::new(Topography::sinusoid(1.0, 3.0)), delta };
        out.push(Builder::new(
            &format!("fig20-mixed-delta{tag}"),
            &format!("three fronts on -H_alg(x; 0.5) + {tag} sin 3x"),
            (-200.0, 200.0),
            topo(mixed),
            0.1,
            terms(&[(1.0, 1.0), (-1.0, 19.0), (1.0, 30.0)], 1.0, 0.0),
            2000.0,
        ));
    }
    for (tag, p) in [("0.4", 0.4), ("0.0", 0.0), ("-0.4", -0.4)] {
        out.push(Builder::new(
            &format!("fig21-5front-p{tag}"),
            &format!("five fronts on -H_alg(x; {tag}): the front trains spread out"),
            (-500.0, 500.0),
            topo(neg_alg(p)),
            0.1,
            terms(&FIVE_FRONT_HILL, 1.0, 0.0),
            1000.0,
        ));
    }
    out.push(
        Builder::new("fig22-beyond-p-1.5", "one front on -H_alg(x; -1.5), unbounded H''", (-100.0, 100.0), topo(neg_alg(-1.5)), 0.1, terms(&[(1.0, 10.0)], 1.0, 0.0), 1.0)
            .exploratory()
            .dx(0.01)
            .dt(2e-5)
            .track_every(0.01),
    );
    out.push(
        Builder::new(
            "fig22-beyond-p-1.2",
            "five fronts on -H_alg(x; -1.2), unbounded H''",
            (-100.0, 200.0),
            topo(neg_alg(-1.2)),
            0.1,
            terms(&[(1.0, 1.0), (-1.0, 15.0), (1.0, 25.0), (-1.0, 37.0), (1.0, 50.0)], 1.0, 0.0),
            2.0,
        )
        .exploratory()
        .dx(0.01)
        .dt(5e-5)
        .track_every(0.01),
    );
    out.into_iter().map(Builder::build).collect()
}

/// Short names accepted in place of full ids.
const ALIASES: [(&str, &str); 6] = [
    ("fig19-flat", "fig19-coarsen-flat"),
    ("fig19-valley", "fig19-coarsen-valley"),
    ("fig19-hill", "fig19-coarsen-hill"),
    ("fig21-p0.4", "fig21-5front-p0.4"),
    ("fig21-p0.0", "fig21-5front-p0.0"),
    ("fig21-p-0.4", "fig21-5front-p-0.4"),
];

/// Looks up a scenario by id or alias.
pub fn find_scenario(id: &str) -> Result<Scenario> {
    let id = ALIASES.iter().find(|(a, _)| *a == id).map(|(_, full)| *full).unwrap_or(id);
    builtin_scenarios().into_iter().find(|s| s.id == id).ok_or_else(|| Error::UnknownScenario(id.to_string()))
}

/// Ids matching `pattern`, where a trailing `*` matches any suffix.
pub fn match_scenarios(pattern: &str) -> Result<Vec<Scenario>> {
    if let Some(prefix) = pattern.strip_suffix('*') {
        let found: Vec<Scenario> = builtin_scenarios().into_iter().filter(|s| s.id.starts_with(prefix)).collect();
        if found.is_empty() {
            return Err(Error::UnknownScenario(pattern.to_string()));
        }
        return Ok(found);
    }
    Ok(vec![find_scenario(pattern)?])
}

/// Applies a `key=value` override to a serialized value. Dotted keys address nested fields;
/// values are parsed as JSON and fall back to a plain string.
pub fn apply_override(target: &mut serde_json::Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::InvalidInput(format!("override `{assignment}` is not of the form key=value")))?;
    let value: serde_json::Value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| serde_json::Value::String(raw.trim().to_string()));
    let mut node = target;
    let parts: Vec<&str> = key.trim().split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::InvalidInput(format!("`{}` is not an object", parts[..i].join("."))))?;
        if !obj.contains_key(*part) {
            let known: Vec<&String> = obj.keys().collect();
            return Err(Error::InvalidInput(format!("unknown key `{part}` in override `{key}` (known: {known:?})")));
        }
        node = obj.get_mut(*part).expect("key checked above");
    }
    *node = value;
    Ok(())
}

/// Returns `config` with every override applied.
pub fn with_overrides(config: &PdeRunConfig, overrides: &[String]) -> Result<PdeRunConfig> {
    let mut v = serde_json::to_value(config)?;
    for o in overrides {
        apply_override(&mut v, o)?;
    }
    let cfg: PdeRunConfig = serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("override produced an invalid config: {e}")))?;
    cfg.forcing.validate()?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_listed() {
        let all = builtin_scenarios();
        let mut ids: Vec<&str> = all.iter().map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        let n = ids.len();
        ids.dedup();
        assert_eq!(ids.len(), n);
        for id in ["fig1a", "fig1f", "fig2-pinned-multifront", "fig3-5fronts-algm050", "fig13-2front-periodic-eps0.4", "fig20-mixed-delta0.06", "fig22-beyond-p-1.2"] {
            assert!(find_scenario(id).is_ok(), "{id}");
        }
        assert_eq!(find_scenario("fig19-valley").unwrap().id, "fig19-coarsen-valley");
        assert!(matches!(find_scenario("fig99"), Err(Error::UnknownScenario(_))));
        assert_eq!(match_scenarios("fig13-*").unwrap().len(), 4);
        for s in &all {
            s.config.validate().unwrap();
            s.config.forcing.validate().unwrap();
            assert_eq!(s.exploratory, s.id.starts_with("fig22"));
        }
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let s = find_scenario("fig1c").unwrap();
        let c = with_overrides(&s.config, &["t_end=50".into(), "scheme.ImexTheta.dt=0.01".into(), "eps=0.05".into()]).unwrap();
        assert_eq!(c.t_end, 50.0);
        assert_eq!(c.eps, 0.05);
        assert_eq!(c.scheme, Scheme::ImexTheta { dt: 0.01, theta: 0.5 });
        assert!(with_overrides(&s.config, &["nope=1".into()]).is_err());
        assert!(with_overrides(&s.config, &["t_end".into()]).is_err());
        assert!(with_overrides(&s.config, &["t_end=-1".into()]).is_err());
    }
}
