//! TOML run configuration with strict validation.
//!
//! ```toml
//! shape = "circle"            # or { kind = "perturbed_circle", r0 = 1.0, d1 = 0.1, d2 = 3 }
//! n_points = 400
//! dt = 1e-5
//! t_end = 1e-3
//! stepper = "forward_euler"   # or "rk2"
//! b_rule = "simpson"          # or "trapezoid"
//! forcing = "oscillatory"     # or "none", or { amplitude = 500.0, omega = 1570.8 }
//!
//! [stencil]
//! degree = 6                  # k defaults to the largest odd integer <= sqrt(n_points)
//! ```
//!
//! Unknown keys are rejected and every offending key is reported at once.

use std::path::{Path, PathBuf};

use serde::Serialize;
use toml::{Table, Value};

use crate::assembly::QuadratureRule;
use crate::error::{ConfigIssue, Error, Result};
use crate::evolution::{Forcing, SimulationConfig, Stepper};
use crate::experiments::{Sampling, ShapeKind, ShapeSpec};

/// Remesh cadence used when `remesh = true` is given without `remesh_every`.
pub const DEFAULT_REMESH_EVERY: usize = 10;

/// Parameters of the convergence subcommands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub n_values: Vec<usize>,
    pub curvature_n_values: Vec<usize>,
    pub dt_values: Vec<f64>,
    pub degrees: Vec<usize>,
    /// Number of random samplings per `N` in the curvature study.
    pub seeds: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            n_values: vec![100, 200, 400, 800],
            curvature_n_values: vec![100, 200, 400, 800, 1600],
            dt_values: vec![4e-5, 2e-5, 1e-5, 5e-6],
            degrees: vec![3, 4],
            seeds: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub shape: ShapeSpec,
    pub simulation: SimulationConfig,
    pub seed: u64,
    pub study: StudyConfig,
}

impl RunConfig {
    /// Replaces the seed, including the one inside random sampling.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let Sampling::UniformRandom { .. } = self.shape.sampling {
            self.shape.sampling = Sampling::UniformRandom { seed };
        }
    }
}

const TOP_KEYS: &[&str] = &[
    "shape",
    "n_points",
    "sampling",
    "seed",
    "dt",
    "t_end",
    "stepper",
    "b_rule",
    "forcing",
    "remesh",
    "remesh_every",
    "snapshot_every",
    "stencil",
    "study",
];
const STENCIL_KEYS: &[&str] = &["k", "degree", "chart_tol", "max_chart_iters"];
const STUDY_KEYS: &[&str] = &["n_values", "curvature_n_values", "dt_values", "degrees", "seeds"];
const SHAPE_KEYS: &[&str] = &["kind", "r0", "d1", "d2", "control_points"];
const FORCING_KEYS: &[&str] = &["amplitude", "omega"];

struct Checker {
    issues: Vec<ConfigIssue>,
}

impl Checker {
    fn issue(&mut self, key: &str, expected: impl Into<String>) {
        self.issues.push(ConfigIssue {
            key: key.to_string(),
            expected: expected.into(),
        });
    }

    fn unknown(&mut self, table: &Table, allowed: &[&str], prefix: &str) {
        for k in table.keys() {
            if !allowed.contains(&k.as_str()) {
                self.issue(&format!("{prefix}{k}"), "unknown key");
            }
        }
    }

    fn float(
        &mut self,
        table: &Table,
        key: &str,
        path: &str,
        ok: impl Fn(f64) -> bool,
        rule: &str,
    ) -> Option<f64> {
        let v = match table.get(key)? {
            Value::Float(f) => *f,
            Value::Integer(i) => *i as f64,
            _ => {
                self.issue(path, format!("expected a number with {rule}"));
                return None;
            }
        };
        if ok(v) {
            Some(v)
        } else {
            self.issue(path, format!("got {v}, expected {rule}"));
            None
        }
    }

    fn int(
        &mut self,
        table: &Table,
        key: &str,
        path: &str,
        ok: impl Fn(i64) -> bool,
        rule: &str,
    ) -> Option<i64> {
        match table.get(key)? {
            Value::Integer(i) if ok(*i) => Some(*i),
            Value::Integer(i) => {
                self.issue(path, format!("got {i}, expected {rule}"));
                None
            }
            _ => {
                self.issue(path, format!("expected an integer with {rule}"));
                None
            }
        }
    }

    fn choice<'a>(&mut self, table: &'a Table, key: &str, path: &str, options: &[&str]) -> Option<&'a str> {
        match table.get(key)? {
            Value::String(s) if options.contains(&s.as_str()) => Some(s.as_str()),
            _ => {
                self.issue(path, format!("expected one of {}", options.join(", ")));
                None
            }
        }
    }

    fn list<T>(
        &mut self,
        table: &Table,
        key: &str,
        path: &str,
        item: impl Fn(&Value) -> Option<T>,
        rule: &str,
    ) -> Option<Vec<T>> {
        match table.get(key)? {
            Value::Array(items) if !items.is_empty() => {
                let parsed: Option<Vec<T>> = items.iter().map(item).collect();
                if parsed.is_none() {
                    self.issue(path, format!("expected a list of {rule}"));
                }
                parsed
            }
            _ => {
                self.issue(path, format!("expected a non-empty list of {rule}"));
                None
            }
        }
    }
}

fn positive_int(v: &Value) -> Option<usize> {
    v.as_integer().filter(|i| *i > 0).map(|i| i as usize)
}

fn positive_float(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) if *f > 0.0 && f.is_finite() => Some(*f),
        Value::Integer(i) if *i > 0 => Some(*i as f64),
        _ => None,
    }
}

fn shape_kind(c: &mut Checker, value: &Value, base: &Path) -> Option<ShapeKind> {
    const KINDS: &[&str] = &["circle", "perturbed_circle", "heart", "humanoid"];
    let (kind, table) = match value {
        Value::String(s) => (s.as_str(), None),
        Value::Table(t) => {
            c.unknown(t, SHAPE_KEYS, "shape.");
            match t.get("kind") {
                Some(Value::String(s)) => (s.as_str(), Some(t)),
                _ => {
                    c.issue("shape.kind", format!("expected one of {}", KINDS.join(", ")));
                    return None;
                }
            }
        }
        _ => {
            c.issue("shape", "expected a shape name or a table with `kind`");
            return None;
        }
    };
    let empty = Table::new();
    let t = table.unwrap_or(&empty);
    match kind {
        "circle" => Some(ShapeKind::Circle),
        "heart" => Some(ShapeKind::Heart),
        "perturbed_circle" => {
            let r0 = c
                .float(t, "r0", "shape.r0", |v| v > 0.0, "r0 > 0")
                .or(if t.contains_key("r0") { None } else { Some(1.0) });
            let d1 = c.float(t, "d1", "shape.d1", |v| v >= 0.0, "d1 >= 0");
            let d2 = c.int(t, "d2", "shape.d2", |v| v >= 0, "integer d2 >= 0");
            if !t.contains_key("d1") {
                c.issue("shape.d1", "required for perturbed_circle");
            }
            if !t.contains_key("d2") {
                c.issue("shape.d2", "required for perturbed_circle");
            }
            Some(ShapeKind::PerturbedCircle {
                r0: r0?,
                d1: d1?,
                d2: d2? as u32,
            })
        }
        "humanoid" => {
            let control_points = match t.get("control_points") {
                None => None,
                Some(Value::String(p)) => Some(base.join(p)),
                Some(_) => {
                    c.issue("shape.control_points", "expected a file path");
                    return None;
                }
            };
            Some(ShapeKind::Humanoid { control_points })
        }
        _ => {
            c.issue("shape.kind", format!("expected one of {}", KINDS.join(", ")));
            None
        }
    }
}

fn forcing(c: &mut Checker, value: &Value) -> Option<Forcing> {
    match value {
        Value::String(s) if s == "none" => Some(Forcing::None),
        Value::String(s) if s == "oscillatory" => Some(Forcing::oscillatory()),
        Value::Table(t) => {
            c.unknown(t, FORCING_KEYS, "forcing.");
            let amplitude = c.float(
                t,
                "amplitude",
                "forcing.amplitude",
                f64::is_finite,
                "a finite value",
            );
            let omega = c.float(t, "omega", "forcing.omega", f64::is_finite, "a finite value");
            if !t.contains_key("amplitude") || !t.contains_key("omega") {
                c.issue("forcing", "table form needs both amplitude and omega");
                return None;
            }
            Some(Forcing::Cosine {
                amplitude: amplitude?,
                omega: omega?,
            })
        }
        _ => {
            c.issue(
                "forcing",
                "expected \"none\", \"oscillatory\" or { amplitude, omega }",
            );
            None
        }
    }
}

/// Parses TOML text. Relative control-point paths resolve against `base`.
pub fn parse_config_str(text: &str, base: &Path) -> Result<RunConfig> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        Error::Config(vec![ConfigIssue {
            key: "<document>".into(),
            expected: format!("valid TOML ({})", e.message()),
        }])
    })?;
    let mut c = Checker { issues: Vec::new() };
    c.unknown(&root, TOP_KEYS, "");

    let kind = match root.get("shape") {
        Some(v) => shape_kind(&mut c, v, base),
        None => {
            c.issue("shape", "required");
            None
        }
    };
    let n_points = c
        .int(
            &root,
            "n_points",
            "n_points",
            |v| v >= crate::curve::MIN_POINTS as i64,
            "n_points >= 5",
        )
        .map_or(400, |v| v as usize);
    let seed = c
        .int(&root, "seed", "seed", |v| v >= 0, "seed >= 0")
        .map_or(0, |v| v as u64);
    let sampling = match c.choice(
        &root,
        "sampling",
        "sampling",
        &["uniform_angle", "uniform_random"],
    ) {
        Some("uniform_random") => Sampling::UniformRandom { seed },
        _ => Sampling::UniformAngle,
    };

    let mut sim = SimulationConfig::default();
    if let Some(v) = c.float(&root, "dt", "dt", |v| v > 0.0 && v.is_finite(), "dt > 0") {
        sim.dt = v;
    }
    if let Some(v) = c.float(
        &root,
        "t_end",
        "t_end",
        |v| v >= 0.0 && v.is_finite(),
        "t_end >= 0",
    ) {
        sim.t_end = v;
    }
    if let Some(s) = c.choice(&root, "stepper", "stepper", &["forward_euler", "rk2"]) {
        sim.stepper = s.parse::<Stepper>().expect("checked option");
    }
    if let Some(s) = c.choice(&root, "b_rule", "b_rule", &["trapezoid", "simpson"]) {
        sim.b_rule = s.parse::<QuadratureRule>().expect("checked option");
    }
    if let Some(v) = root.get("forcing") {
        if let Some(f) = forcing(&mut c, v) {
            sim.forcing = f;
        }
    }
    let remesh = match root.get("remesh") {
        None => false,
        Some(Value::Boolean(b)) => *b,
        Some(_) => {
            c.issue("remesh", "expected true or false");
            false
        }
    };
    sim.remesh_every = match c.int(
        &root,
        "remesh_every",
        "remesh_every",
        |v| v >= 0,
        "remesh_every >= 0",
    ) {
        Some(v) => v as usize,
        None if remesh => DEFAULT_REMESH_EVERY,
        None => 0,
    };
    if let Some(v) = c.int(
        &root,
        "snapshot_every",
        "snapshot_every",
        |v| v >= 0,
        "snapshot_every >= 0",
    ) {
        sim.snapshot_every = v as usize;
    }

    match root.get("stencil") {
        None => {}
        Some(Value::Table(t)) => {
            c.unknown(t, STENCIL_KEYS, "stencil.");
            let degree = c.int(t, "degree", "stencil.degree", |v| v >= 2, "degree >= 2");
            if let Some(d) = degree {
                sim.degree = d as usize;
            }
            if let Some(k) = c.int(t, "k", "stencil.k", |v| v > 0 && v % 2 == 1, "an odd k > 0") {
                let k = k as usize;
                if k <= sim.degree {
                    c.issue(
                        "stencil.k",
                        format!("got {k}, expected k > degree ({})", sim.degree),
                    );
                } else if k > n_points {
                    c.issue(
                        "stencil.k",
                        format!("got {k}, expected k <= n_points ({n_points})"),
                    );
                } else {
                    sim.k = Some(k);
                }
            }
            if let Some(v) = c.float(t, "chart_tol", "stencil.chart_tol", |v| v > 0.0, "chart_tol > 0") {
                sim.chart_tol = v;
            }
            if let Some(v) = c.int(
                t,
                "max_chart_iters",
                "stencil.max_chart_iters",
                |v| v > 0,
                "max_chart_iters > 0",
            ) {
                sim.max_chart_iters = v as usize;
            }
        }
        Some(_) => c.issue("stencil", "expected a table"),
    }

    let mut study = StudyConfig::default();
    match root.get("study") {
        None => {}
        Some(Value::Table(t)) => {
            c.unknown(t, STUDY_KEYS, "study.");
            if let Some(v) = c.list(t, "n_values", "study.n_values", positive_int, "positive integers") {
                study.n_values = v;
            }
            if let Some(v) = c.list(
                t,
                "curvature_n_values",
                "study.curvature_n_values",
                positive_int,
                "positive integers",
            ) {
                study.curvature_n_values = v;
            }
            if let Some(v) = c.list(
                t,
                "dt_values",
                "study.dt_values",
                positive_float,
                "positive numbers",
            ) {
                study.dt_values = v;
            }
            if let Some(v) = c.list(
                t,
                "degrees",
                "study.degrees",
                |v| positive_int(v).filter(|d| *d >= 2),
                "integers >= 2",
            ) {
                study.degrees = v;
            }
            if let Some(v) = c.int(t, "seeds", "study.seeds", |v| v > 0, "seeds > 0") {
                study.seeds = v as usize;
            }
        }
        Some(_) => c.issue("study", "expected a table"),
    }

    if !c.issues.is_empty() {
        return Err(Error::Config(c.issues));
    }
    let kind = kind.expect("shape issues were reported above");
    Ok(RunConfig {
        shape: ShapeSpec {
            kind,
            n_points,
            sampling,
        },
        simulation: sim,
        seed,
        study,
    })
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_str(&text, &base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        parse_config_str(text, Path::new("."))
    }

    fn keys(e: Error) -> Vec<String> {
        match e {
            Error::Config(issues) => issues.into_iter().map(|i| i.key).collect(),
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_is_defaulted() {
        let c = parse("shape = \"circle\"\nn_points = 400\n").unwrap();
        assert_eq!(c.shape, ShapeSpec::circle(400));
        assert_eq!(c.simulation.stencil(400).k, 19);
        assert_eq!(c.simulation.degree, 6);
        assert_eq!(c.simulation.dt, 1e-5);
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn negative_dt_names_key() {
        let e = parse("shape = \"circle\"\ndt = -1\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("dt") && msg.contains("dt > 0"), "{msg}");
    }

    #[test]
    fn unknown_key_listed() {
        let e = parse("shape = \"circle\"\nmeshsize = 3\n").unwrap_err();
        assert_eq!(keys(e), vec!["meshsize"]);
    }

    #[test]
    fn all_issues_reported_together() {
        let e =
            parse("shape = \"blob\"\ndt = 0\nstepper = \"rk4\"\n[stencil]\nk = 4\nfoo = 1\n").unwrap_err();
        let mut k = keys(e);
        k.sort();
        assert_eq!(k, vec!["dt", "shape.kind", "stencil.foo", "stencil.k", "stepper"]);
    }

    #[test]
    fn perturbed_circle_table() {
        let c = parse(
            "shape = { kind = \"perturbed_circle\", d1 = 0.3, d2 = 5 }\nremesh = true\nstepper = \"rk2\"\n[stencil]\nk = 21\n",
        )
        .unwrap();
        assert_eq!(
            c.shape.kind,
            ShapeKind::PerturbedCircle {
                r0: 1.0,
                d1: 0.3,
                d2: 5
            }
        );
        assert_eq!(c.simulation.remesh_every, DEFAULT_REMESH_EVERY);
        assert_eq!(c.simulation.stepper, Stepper::Rk2);
        assert_eq!(c.simulation.k, Some(21));
    }

    #[test]
    fn missing_shape_and_bad_forcing() {
        let mut k = keys(parse("forcing = 3\n").unwrap_err());
        k.sort();
        assert_eq!(k, vec!["forcing", "shape"]);
    }

    #[test]
    fn seed_feeds_random_sampling() {
        let mut c = parse("shape = \"circle\"\nsampling = \"uniform_random\"\nseed = 7\n").unwrap();
        assert_eq!(c.shape.sampling, Sampling::UniformRandom { seed: 7 });
        c.set_seed(9);
        assert_eq!(c.shape.sampling, Sampling::UniformRandom { seed: 9 });
    }
}
