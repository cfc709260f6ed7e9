use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use rffb_core::bounds::lecam_constants;

/// Experiment kinds, spelled in configs and reports as kebab-case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    BoundsTable,
    ProbabilityEnvelope,
    ExpectedSup,
    Lipschitz,
    ParameterIdentity,
    Lecam,
    Affinity,
    KrrGap,
    SvmGap,
    CompareInversions,
}

impl Kind {
    pub const ALL: [Kind; 10] = [
        Kind::BoundsTable,
        Kind::ProbabilityEnvelope,
        Kind::ExpectedSup,
        Kind::Lipschitz,
        Kind::ParameterIdentity,
        Kind::Lecam,
        Kind::Affinity,
        Kind::KrrGap,
        Kind::SvmGap,
        Kind::CompareInversions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::BoundsTable => "bounds-table",
            Kind::ProbabilityEnvelope => "probability-envelope",
            Kind::ExpectedSup => "expected-sup",
            Kind::Lipschitz => "lipschitz",
            Kind::ParameterIdentity => "parameter-identity",
            Kind::Lecam => "lecam",
            Kind::Affinity => "affinity",
            Kind::KrrGap => "krr-gap",
            Kind::SvmGap => "svm-gap",
            Kind::CompareInversions => "compare-inversions",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A config problem, located by a path such as `R[2]` or `trials`.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error at `{path}`: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsTable {
    pub d: Vec<u32>,
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    #[serde(rename = "D")]
    pub features: Vec<u64>,
    pub epsilon: Vec<f64>,
}

/// A single extra `(R, D, ε)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Anchor {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "D")]
    pub features: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilityEnvelope {
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    #[serde(rename = "D")]
    pub features: Vec<usize>,
    /// Explicit ε values crossed with every `(R, D)`.
    #[serde(default)]
    pub epsilon: Option<Vec<f64>>,
    /// Alternative to `epsilon`: per `(R, D)`, the ε at which the bound
    /// equals this value.
    #[serde(default)]
    pub target_bound: Option<f64>,
    #[serde(default)]
    pub anchors: Vec<Anchor>,
    pub trials: usize,
    /// Also write one CSV line per trial.
    #[serde(default)]
    pub write_trials: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedSup {
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    #[serde(rename = "D")]
    pub features: Vec<usize>,
    pub trials: usize,
}

fn default_relative_slack() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lipschitz {
    #[serde(rename = "D")]
    pub features: Vec<usize>,
    #[serde(rename = "R")]
    pub r: f64,
    pub r_grid: usize,
    pub trials: usize,
    /// Allowed excess over `1/D`, relative.
    #[serde(default = "default_relative_slack")]
    pub relative_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterIdentity {
    pub r: Vec<f64>,
    #[serde(rename = "D")]
    pub features: Vec<usize>,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lecam {
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    #[serde(rename = "D")]
    pub features: Vec<u64>,
    pub trials: usize,
}

/// A variance ratio, or the string `"gamma"` for the two-point constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rho {
    Value(f64),
    Named(NamedRho),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedRho {
    Gamma,
}

impl Rho {
    pub fn value(self) -> f64 {
        match self {
            Rho::Value(v) => v,
            Rho::Named(NamedRho::Gamma) => lecam_constants().gamma,
        }
    }
}

fn default_affinity_tolerance() -> f64 {
    0.003
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Affinity {
    pub rho: Vec<Rho>,
    #[serde(rename = "D")]
    pub features: Vec<u64>,
    pub samples: usize,
    #[serde(default = "default_affinity_tolerance")]
    pub tolerance: f64,
}

fn default_radius() -> f64 {
    1.5
}
fn default_noise() -> f64 {
    0.1
}
fn default_probes() -> usize {
    20
}
fn default_separation() -> f64 {
    3.0
}
fn default_spread() -> f64 {
    0.7
}
fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrrGap {
    pub n: usize,
    pub d: usize,
    pub lambda: Vec<f64>,
    #[serde(rename = "D")]
    pub features: Vec<usize>,
    pub seeds: usize,
    /// Training and probe points are uniform in a ball of this radius.
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_noise")]
    pub noise: f64,
    #[serde(default = "default_probes")]
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmGap {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "C0")]
    pub c0: Vec<f64>,
    #[serde(rename = "D")]
    pub features: Vec<usize>,
    pub seeds: usize,
    #[serde(default = "default_separation")]
    pub separation: f64,
    #[serde(default = "default_spread")]
    pub spread: f64,
    /// Probe points are uniform in a ball of this radius.
    #[serde(default = "default_separation")]
    pub probe_radius: f64,
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_min_d_eps2() -> f64 {
    1.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareInversions {
    pub d: Vec<u32>,
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    #[serde(rename = "D")]
    pub features: Vec<u64>,
    pub tau: Vec<f64>,
    /// Rows with `Dε²` below this are reported but not asserted.
    #[serde(default = "default_min_d_eps2")]
    pub min_d_eps2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    BoundsTable(BoundsTable),
    ProbabilityEnvelope(ProbabilityEnvelope),
    ExpectedSup(ExpectedSup),
    Lipschitz(Lipschitz),
    ParameterIdentity(ParameterIdentity),
    Lecam(Lecam),
    Affinity(Affinity),
    KrrGap(KrrGap),
    SvmGap(SvmGap),
    CompareInversions(CompareInversions),
}

impl Plan {
    pub fn kind(&self) -> Kind {
        match self {
            Plan::BoundsTable(_) => Kind::BoundsTable,
            Plan::ProbabilityEnvelope(_) => Kind::ProbabilityEnvelope,
            Plan::ExpectedSup(_) => Kind::ExpectedSup,
            Plan::Lipschitz(_) => Kind::Lipschitz,
            Plan::ParameterIdentity(_) => Kind::ParameterIdentity,
            Plan::Lecam(_) => Kind::Lecam,
            Plan::Affinity(_) => Kind::Affinity,
            Plan::KrrGap(_) => Kind::KrrGap,
            Plan::SvmGap(_) => Kind::SvmGap,
            Plan::CompareInversions(_) => Kind::CompareInversions,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    /// Output directory; the command line can override it.
    pub output: Option<PathBuf>,
    pub plan: Plan,
    /// The config as read, for the report.
    pub raw: Value,
}

const COMMON_FIELDS: [&str; 4] = ["kind", "name", "seed", "output"];

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("experiment")
            .to_owned();
        Ok(Self::from_json_str(&text, &stem)?)
    }

    /// Parses and validates a config. `default_name` is used when the
    /// config has no `name`.
    pub fn from_json_str(text: &str, default_name: &str) -> Result<Self, ConfigError> {
        let raw: Value = serde_json::from_str(text)
            .map_err(|e| ConfigError::new("$", format!("invalid JSON: {e}")))?;
        let obj = raw
            .as_object()
            .ok_or_else(|| ConfigError::new("$", "config must be a JSON object"))?;
        let kind_str = obj
            .get("kind")
            .ok_or_else(|| ConfigError::new("kind", "missing field"))?
            .as_str()
            .ok_or_else(|| ConfigError::new("kind", "must be a string"))?;
        let kind = Kind::parse(kind_str).ok_or_else(|| {
            let known: Vec<_> = Kind::ALL.iter().map(|k| k.as_str()).collect();
            ConfigError::new(
                "kind",
                format!(
                    "unknown kind `{kind_str}`, expected one of {}",
                    known.join(", ")
                ),
            )
        })?;
        let seed = obj
            .get("seed")
            .ok_or_else(|| ConfigError::new("seed", "missing field"))?
            .as_u64()
            .ok_or_else(|| ConfigError::new("seed", "must be a nonnegative integer"))?;
        let name = match obj.get("name") {
            None => default_name.to_owned(),
            Some(v) => v
                .as_str()
                .filter(|s| !s.is_empty())
                .ok_or_else(|| ConfigError::new("name", "must be a non-empty string"))?
                .to_owned(),
        };
        let output = match obj.get("output") {
            None => None,
            Some(v) => {
                Some(PathBuf::from(v.as_str().ok_or_else(|| {
                    ConfigError::new("output", "must be a string")
                })?))
            }
        };
        let rest: Map<String, Value> = obj
            .iter()
            .filter(|(k, _)| !COMMON_FIELDS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let rest = Value::Object(rest);
        let plan = match kind {
            Kind::BoundsTable => Plan::BoundsTable(params(rest)?),
            Kind::ProbabilityEnvelope => Plan::ProbabilityEnvelope(params(rest)?),
            Kind::ExpectedSup => Plan::ExpectedSup(params(rest)?),
            Kind::Lipschitz => Plan::Lipschitz(params(rest)?),
            Kind::ParameterIdentity => Plan::ParameterIdentity(params(rest)?),
            Kind::Lecam => Plan::Lecam(params(rest)?),
            Kind::Affinity => Plan::Affinity(params(rest)?),
            Kind::KrrGap => Plan::KrrGap(params(rest)?),
            Kind::SvmGap => Plan::SvmGap(params(rest)?),
            Kind::CompareInversions => Plan::CompareInversions(params(rest)?),
        };
        validate(&plan)?;
        Ok(Self {
            name,
            seed,
            output,
            plan,
            raw,
        })
    }

    pub fn kind(&self) -> Kind {
        self.plan.kind()
    }

    /// Replaces the master seed, keeping the echoed config in sync.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let Some(obj) = self.raw.as_object_mut() {
            obj.insert("seed".into(), Value::from(seed));
        }
    }
}

fn params<T: DeserializeOwned>(rest: Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(rest).map_err(|e| {
        let inner = e.inner().to_string();
        let mut path = e.path().to_string();
        // Missing fields are reported against the enclosing object.
        if let Some(field) = inner
            .strip_prefix("missing field `")
            .and_then(|s| s.split('`').next())
        {
            path = if path == "." {
                field.to_owned()
            } else {
                format!("{path}.{field}")
            };
        }
        ConfigError::new(path, inner)
    })
}

struct Check {
    errors: Vec<ConfigError>,
}

impl Check {
    fn new() -> Self {
        Self { errors: Vec::new() }
    }

    fn fail(&mut self, path: impl Into<String>, msg: impl Into<String>) {
        self.errors.push(ConfigError::new(path, msg));
    }

    fn non_empty<T>(&mut self, path: &str, v: &[T]) {
        if v.is_empty() {
            self.fail(path, "must not be empty");
        }
    }

    fn positive_list(&mut self, path: &str, v: &[f64]) {
        self.non_empty(path, v);
        for (i, x) in v.iter().enumerate() {
            if !(x.is_finite() && *x > 0.0) {
                self.fail(
                    format!("{path}[{i}]"),
                    format!("must be positive and finite, got {x}"),
                );
            }
        }
    }

    fn positive_ints<T: Copy + Into<u64>>(&mut self, path: &str, v: &[T]) {
        self.non_empty(path, v);
        for (i, x) in v.iter().enumerate() {
            if (*x).into() == 0 {
                self.fail(format!("{path}[{i}]"), "must be >= 1");
            }
        }
    }

    fn positive_usizes(&mut self, path: &str, v: &[usize]) {
        let v: Vec<u64> = v.iter().map(|&x| x as u64).collect();
        self.positive_ints(path, &v);
    }

    fn positive(&mut self, path: &str, x: f64) {
        if !(x.is_finite() && x > 0.0) {
            self.fail(path, format!("must be positive and finite, got {x}"));
        }
    }

    fn at_least(&mut self, path: &str, x: usize, min: usize) {
        if x < min {
            self.fail(path, format!("must be >= {min}, got {x}"));
        }
    }

    fn finish(mut self) -> Result<(), ConfigError> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(self.errors.remove(0))
        }
    }
}

fn validate(plan: &Plan) -> Result<(), ConfigError> {
    let mut c = Check::new();
    match plan {
        Plan::BoundsTable(p) => {
            c.positive_ints("d", &p.d);
            c.positive_list("R", &p.r);
            c.positive_ints("D", &p.features);
            c.positive_list("epsilon", &p.epsilon);
        }
        Plan::ProbabilityEnvelope(p) => {
            c.positive_list("R", &p.r);
            c.positive_usizes("D", &p.features);
            c.at_least("trials", p.trials, 1);
            match (&p.epsilon, p.target_bound) {
                (Some(e), None) => c.positive_list("epsilon", e),
                (None, Some(b)) => {
                    if !(b > 0.0 && b < 1.0) {
                        c.fail("target_bound", format!("must lie in (0, 1), got {b}"));
                    }
                }
                (Some(_), Some(_)) => c.fail(
                    "epsilon",
                    "give either `epsilon` or `target_bound`, not both",
                ),
                (None, None) => c.fail("epsilon", "missing field (or give `target_bound`)"),
            }
            for (i, a) in p.anchors.iter().enumerate() {
                c.positive(&format!("anchors[{i}].R"), a.r);
                c.positive(&format!("anchors[{i}].epsilon"), a.epsilon);
                c.at_least(&format!("anchors[{i}].D"), a.features, 1);
            }
        }
        Plan::ExpectedSup(p) => {
            c.positive_list("R", &p.r);
            c.positive_usizes("D", &p.features);
            c.at_least("trials", p.trials, 2);
        }
        Plan::Lipschitz(p) => {
            c.positive_usizes("D", &p.features);
            c.positive("R", p.r);
            c.at_least("r_grid", p.r_grid, 2);
            c.at_least("trials", p.trials, 2);
            if !(p.relative_slack >= 0.0) {
                c.fail("relative_slack", "must be nonnegative");
            }
        }
        Plan::ParameterIdentity(p) => {
            c.positive_list("r", &p.r);
            c.positive_usizes("D", &p.features);
            c.at_least("trials", p.trials, 2);
            for (i, r) in p.r.iter().enumerate() {
                for (j, &d) in p.features.iter().enumerate() {
                    let dr2 = d as f64 * r * r;
                    if dr2 > rffb_core::lab::MAX_DR2 {
                        c.fail(
                            format!("r[{i}]"),
                            format!(
                                "D r^2 = {dr2} with D[{j}] = {d} exceeds {}",
                                rffb_core::lab::MAX_DR2
                            ),
                        );
                    }
                }
            }
        }
        Plan::Lecam(p) => {
            c.positive_list("R", &p.r);
            c.positive_ints("D", &p.features);
            c.at_least("trials", p.trials, 2);
        }
        Plan::Affinity(p) => {
            c.non_empty("rho", &p.rho);
            for (i, r) in p.rho.iter().enumerate() {
                let v = r.value();
                if !(v > 0.0 && v <= 1.0) {
                    c.fail(format!("rho[{i}]"), format!("must lie in (0, 1], got {v}"));
                }
            }
            c.positive_ints("D", &p.features);
            c.at_least("samples", p.samples, 2);
            c.positive("tolerance", p.tolerance);
        }
        Plan::KrrGap(p) => {
            c.at_least("n", p.n, 1);
            c.at_least("d", p.d, 1);
            c.positive_list("lambda", &p.lambda);
            c.positive_usizes("D", &p.features);
            c.at_least("seeds", p.seeds, 1);
            c.positive("radius", p.radius);
            if !(p.noise >= 0.0) {
                c.fail("noise", "must be nonnegative");
            }
            c.at_least("probes", p.probes, 1);
        }
        Plan::SvmGap(p) => {
            c.at_least("n", p.n, 1);
            if p.n > rffb_core::downstream::MAX_SVM_POINTS {
                c.fail(
                    "n",
                    format!("must be <= {}", rffb_core::downstream::MAX_SVM_POINTS),
                );
            }
            c.at_least("d", p.d, 1);
            c.positive_list("C0", &p.c0);
            c.positive_usizes("D", &p.features);
            c.at_least("seeds", p.seeds, 1);
            c.positive("spread", p.spread);
            c.positive("probe_radius", p.probe_radius);
            if !(p.separation >= 0.0) {
                c.fail("separation", "must be nonnegative");
            }
            c.at_least("probes", p.probes, 1);
            c.positive("tol", p.tol);
        }
        Plan::CompareInversions(p) => {
            c.positive_ints("d", &p.d);
            c.positive_list("R", &p.r);
            c.positive_ints("D", &p.features);
            c.non_empty("tau", &p.tau);
            for (i, t) in p.tau.iter().enumerate() {
                if !(t.is_finite() && *t >= 0.0) {
                    c.fail(format!("tau[{i}]"), format!("must be nonnegative, got {t}"));
                }
            }
        }
    }
    c.finish()
}
