//! Experiment configuration: a flat `key = value` text document.
//!
//! Keys are dotted to group related settings (`data.n`, `schedule.c`);
//! `#` starts a comment; blank lines are ignored. Unknown keys are errors,
//! as are missing or ill-typed values: [`validate_config`] reports every
//! violation with its key path rather than stopping at the first.

use std::collections::BTreeMap;
use std::fmt;

/// The experiment kinds the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    VarianceSweep,
    Stability,
    BoundsContainment,
    RegSweep,
    ProxCheck,
    PathProbe,
}

impl ExperimentKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "variance-sweep" => ExperimentKind::VarianceSweep,
            "stability" => ExperimentKind::Stability,
            "bounds-containment" => ExperimentKind::BoundsContainment,
            "reg-sweep" => ExperimentKind::RegSweep,
            "prox-check" => ExperimentKind::ProxCheck,
            "path-probe" => ExperimentKind::PathProbe,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::VarianceSweep => "variance-sweep",
            ExperimentKind::Stability => "stability",
            ExperimentKind::BoundsContainment => "bounds-containment",
            ExperimentKind::RegSweep => "reg-sweep",
            ExperimentKind::ProxCheck => "prox-check",
            ExperimentKind::PathProbe => "path-probe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Logistic,
    LeastSquares,
    TinyMlp,
}

impl ModelKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "logistic" => ModelKind::Logistic,
            "least-squares" => ModelKind::LeastSquares,
            "tiny-mlp" => ModelKind::TinyMlp,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Logistic => "logistic",
            ModelKind::LeastSquares => "least-squares",
            ModelKind::TinyMlp => "tiny-mlp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synth { n: usize, dim: usize, margin: f64 },
    LibSvm { path: String, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegKindSpec {
    Ridge,
    ElasticNet,
    Tikhonov,
}

impl RegKindSpec {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ridge" => RegKindSpec::Ridge,
            "elastic-net" => RegKindSpec::ElasticNet,
            "tikhonov" => RegKindSpec::Tikhonov,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegKindSpec::Ridge => "ridge",
            RegKindSpec::ElasticNet => "elastic-net",
            RegKindSpec::Tikhonov => "tikhonov",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    SlowLog,
    Inverse,
}

impl ScheduleKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "slow-log" => ScheduleKind::SlowLog,
            "inverse" => ScheduleKind::Inverse,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::SlowLog => "slow-log",
            ScheduleKind::Inverse => "inverse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    VarianceProb,
    RegularizedProb,
}

impl BoundKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "variance-prob" => BoundKind::VarianceProb,
            "regularized-prob" => BoundKind::RegularizedProb,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::VarianceProb => "variance-prob",
            BoundKind::RegularizedProb => "regularized-prob",
        }
    }
}

/// A fully validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: ModelKind,
    pub mlp_hidden: Vec<usize>,
    pub data: DataSource,
    pub noise_probs: Vec<f64>,
    pub noise_p: f64,
    pub noise_alphabet: Vec<f64>,
    pub reg_kind: RegKindSpec,
    pub reg_mu: f64,
    pub lambda: Option<f64>,
    pub lambda_list: Vec<f64>,
    pub schedule_kind: ScheduleKind,
    pub schedule_c: f64,
    pub horizon: usize,
    pub horizons: Vec<usize>,
    pub datasets: usize,
    pub paths: usize,
    pub trials: usize,
    pub bound: Option<BoundKind>,
    pub confidence: f64,
    pub window: usize,
    pub thin: usize,
    pub radius: f64,
    pub held_out: usize,
    pub master_seed: u64,
    pub out: String,
}

/// Validation failures, one entry per violated key.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub errors: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "config error: {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "model",
    "mlp.hidden",
    "data.source",
    "data.path",
    "data.n",
    "data.d",
    "data.margin",
    "noise.probs",
    "noise.p",
    "noise.alphabet",
    "reg.kind",
    "reg.mu",
    "lambda",
    "lambda.list",
    "schedule.kind",
    "schedule.c",
    "horizon",
    "horizons",
    "replicas.datasets",
    "replicas.paths",
    "trials",
    "bound",
    "delta",
    "window",
    "thin",
    "radius",
    "heldout",
    "seed",
    "out",
];

struct Raw {
    map: BTreeMap<String, String>,
    errors: Vec<String>,
}

impl Raw {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let raw = self.map.get(key)?.clone();
        match raw.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.errors.push(format!("{key}: `{raw}` is not {what}"));
                None
            }
        }
    }

    fn parse_list<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Option<Vec<T>> {
        let raw = self.map.get(key)?.clone();
        let mut out = Vec::new();
        for tok in raw.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            match tok.parse() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.errors.push(format!("{key}: `{tok}` is not {what}"));
                    return None;
                }
            }
        }
        Some(out)
    }
}

/// Parse and validate a config document. Every violation is reported with
/// its key path; no partially valid config is ever returned.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {}: expected `key = value`, got `{line}`", lineno + 1));
            continue;
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            errors.push(format!("{key}: unknown key"));
            continue;
        }
        if map.insert(key.clone(), value).is_some() {
            errors.push(format!("{key}: duplicate key"));
        }
    }
    let mut raw = Raw { map, errors };

    let experiment = match raw.get("experiment") {
        None => {
            raw.errors.push("experiment: missing (required)".into());
            None
        }
        Some(s) => match ExperimentKind::parse(s) {
            Some(k) => Some(k),
            None => {
                raw.errors.push(format!(
                    "experiment: `{s}` is not one of variance-sweep, stability, bounds-containment, reg-sweep, prox-check, path-probe"
                ));
                None
            }
        },
    };
    let model = match raw.get("model") {
        None => {
            raw.errors.push("model: missing (required)".into());
            None
        }
        Some(s) => match ModelKind::parse(s) {
            Some(k) => Some(k),
            None => {
                raw.errors
                    .push(format!("model: `{s}` is not one of logistic, least-squares, tiny-mlp"));
                None
            }
        },
    };
    let mlp_hidden: Vec<usize> = raw.parse_list("mlp.hidden", "a positive integer").unwrap_or_default();
    if model == Some(ModelKind::TinyMlp) && mlp_hidden.is_empty() {
        raw.errors.push("mlp.hidden: required for model = tiny-mlp".into());
    }
    if mlp_hidden.iter().any(|&h| h == 0) {
        raw.errors.push("mlp.hidden: layer widths must be >= 1".into());
    }

    let data = match raw.get("data.source").map(str::to_string) {
        None => {
            raw.errors.push("data.source: missing (required)".into());
            None
        }
        Some(src) => match src.as_str() {
            "synth" => {
                let n = raw.parse::<usize>("data.n", "an integer");
                let d = raw.parse::<usize>("data.d", "an integer");
                let margin = raw.parse::<f64>("data.margin", "a number");
                if raw.get("data.n").is_none() {
                    raw.errors.push("data.n: missing (required for synth)".into());
                }
                if raw.get("data.d").is_none() {
                    raw.errors.push("data.d: missing (required for synth)".into());
                }
                if raw.get("data.margin").is_none() {
                    raw.errors.push("data.margin: missing (required for synth)".into());
                }
                let mut ok = true;
                if let Some(n) = n {
                    if n < 2 {
                        raw.errors.push("data.n: need at least 2 samples".into());
                        ok = false;
                    }
                }
                if let Some(d) = d {
                    if d == 0 {
                        raw.errors.push("data.d: need dimension >= 1".into());
                        ok = false;
                    }
                }
                if let Some(margin) = margin {
                    if margin < 0.0 {
                        raw.errors.push("data.margin: must be >= 0".into());
                        ok = false;
                    }
                }
                match (n, d, margin, ok) {
                    (Some(n), Some(d), Some(margin), true) => {
                        Some(DataSource::Synth { n, dim: d, margin })
                    }
                    _ => None,
                }
            }
            "libsvm" => {
                let path = raw.get("data.path").map(str::to_string);
                let n = raw.parse::<usize>("data.n", "an integer");
                match (path, n) {
                    (Some(path), Some(n)) => {
                        if !std::path::Path::new(&path).exists() {
                            raw.errors.push(format!("data.path: file `{path}` does not exist"));
                            None
                        } else {
                            Some(DataSource::LibSvm { path, n })
                        }
                    }
                    (path, _) => {
                        if path.is_none() {
                            raw.errors.push("data.path: missing (required for libsvm)".into());
                        }
                        if raw.get("data.n").is_none() {
                            raw.errors.push("data.n: missing (required for libsvm)".into());
                        }
                        None
                    }
                }
            }
            other => {
                raw.errors.push(format!("data.source: `{other}` is not one of synth, libsvm"));
                None
            }
        },
    };

    let noise_probs: Vec<f64> = raw.parse_list("noise.probs", "a number").unwrap_or_default();
    let noise_p: f64 = raw.parse("noise.p", "a number").unwrap_or(0.0);
    let noise_alphabet: Vec<f64> =
        raw.parse_list("noise.alphabet", "a number").unwrap_or_else(|| vec![-1.0, 1.0]);
    for p in noise_probs.iter().chain(std::iter::once(&noise_p)) {
        if !(0.0..=1.0).contains(p) {
            raw.errors.push(format!("noise probability {p} outside [0, 1]"));
        }
    }
    if noise_alphabet.is_empty() {
        raw.errors.push("noise.alphabet: must not be empty".into());
    }

    let reg_kind = match raw.get("reg.kind") {
        None => RegKindSpec::Ridge,
        Some(s) => match RegKindSpec::parse(s) {
            Some(k) => k,
            None => {
                raw.errors
                    .push(format!("reg.kind: `{s}` is not one of ridge, elastic-net, tikhonov"));
                RegKindSpec::Ridge
            }
        },
    };
    let reg_mu: f64 = raw.parse("reg.mu", "a number").unwrap_or(0.0);
    if reg_mu < 0.0 {
        raw.errors.push("reg.mu: must be >= 0".into());
    }
    let lambda: Option<f64> = raw.parse("lambda", "a number");
    if let Some(l) = lambda {
        if l <= 0.0 {
            raw.errors.push("lambda: must be > 0".into());
        }
    }
    let lambda_list: Vec<f64> = raw.parse_list("lambda.list", "a number").unwrap_or_default();
    if lambda_list.iter().any(|&l| l <= 0.0) {
        raw.errors.push("lambda.list: weights must be > 0".into());
    }

    let schedule_kind = match raw.get("schedule.kind") {
        None => {
            raw.errors.push("schedule.kind: missing (required)".into());
            ScheduleKind::SlowLog
        }
        Some(s) => match ScheduleKind::parse(s) {
            Some(k) => k,
            None => {
                raw.errors.push(format!("schedule.kind: `{s}` is not one of slow-log, inverse"));
                ScheduleKind::SlowLog
            }
        },
    };
    let schedule_c: f64 = raw.parse("schedule.c", "a number").unwrap_or_else(|| {
        if raw.get("schedule.c").is_none() {
            raw.errors.push("schedule.c: missing (required)".into());
        }
        1.0
    });
    if schedule_c <= 0.0 {
        raw.errors.push("schedule.c: must be > 0".into());
    }

    let horizon: usize = raw.parse("horizon", "an integer").unwrap_or_else(|| {
        if raw.get("horizon").is_none() && experiment != Some(ExperimentKind::PathProbe) {
            raw.errors.push("horizon: missing (required)".into());
        }
        1
    });
    if horizon == 0 {
        raw.errors.push("horizon: must be >= 1 (a negative or zero T is invalid)".into());
    }
    let horizons: Vec<usize> = raw.parse_list("horizons", "an integer").unwrap_or_default();
    if horizons.iter().any(|&t| t == 0) {
        raw.errors.push("horizons: entries must be >= 1".into());
    }

    let datasets: usize = raw.parse("replicas.datasets", "an integer").unwrap_or(1);
    let paths: usize = raw.parse("replicas.paths", "an integer").unwrap_or(1);
    if datasets == 0 {
        raw.errors.push("replicas.datasets: must be >= 1".into());
    }
    if paths == 0 {
        raw.errors.push("replicas.paths: must be >= 1".into());
    }
    let trials: usize = raw.parse("trials", "an integer").unwrap_or(200);
    if trials == 0 {
        raw.errors.push("trials: must be >= 1".into());
    }
    let bound = match raw.get("bound") {
        None => None,
        Some(s) => match BoundKind::parse(s) {
            Some(k) => Some(k),
            None => {
                raw.errors
                    .push(format!("bound: `{s}` is not one of variance-prob, regularized-prob"));
                None
            }
        },
    };
    let confidence: f64 = raw.parse("delta", "a number").unwrap_or(0.1);
    if !(confidence > 0.0 && confidence < 1.0) {
        raw.errors.push(format!("delta: {confidence} outside (0, 1)"));
    }
    let window: usize = raw.parse("window", "an integer").unwrap_or(50);
    if window == 0 {
        raw.errors.push("window: must be >= 1".into());
    }
    let thin: usize = raw.parse("thin", "an integer").unwrap_or(10);
    if thin == 0 {
        raw.errors.push("thin: must be >= 1".into());
    }
    let radius: f64 = raw.parse("radius", "a number").unwrap_or(10.0);
    if radius <= 0.0 {
        raw.errors.push("radius: must be > 0".into());
    }
    let held_out: usize = raw.parse("heldout", "an integer").unwrap_or(0);
    let master_seed: u64 = raw.parse("seed", "an unsigned integer").unwrap_or(0);
    let out = raw.get("out").unwrap_or("results").to_string();
    if out.is_empty() {
        raw.errors.push("out: must not be empty".into());
    }

    // The variance window consumes recorded (thinned) iterates.
    if matches!(
        experiment,
        Some(ExperimentKind::VarianceSweep)
            | Some(ExperimentKind::Stability)
            | Some(ExperimentKind::BoundsContainment)
    ) && window > horizon / thin.max(1) + 1
    {
        raw.errors.push(format!(
            "window: {window} exceeds the {} iterates recorded at thin = {thin} over horizon = {horizon}",
            horizon / thin.max(1) + 1
        ));
    }

    // Per-kind requirements.
    match experiment {
        Some(ExperimentKind::VarianceSweep) => {
            if noise_probs.is_empty() {
                raw.errors.push("noise.probs: required and nonempty for variance-sweep".into());
            }
        }
        Some(ExperimentKind::RegSweep) => {
            if lambda_list.is_empty() {
                raw.errors.push("lambda.list: required and nonempty for reg-sweep".into());
            }
            if held_out == 0 {
                raw.errors.push("heldout: required (>= 1) for reg-sweep".into());
            }
            if schedule_kind != ScheduleKind::Inverse {
                raw.errors.push("schedule.kind: reg-sweep uses the inverse schedule".into());
            }
        }
        Some(ExperimentKind::BoundsContainment) => {
            if bound.is_none() {
                raw.errors.push("bound: required for bounds-containment".into());
            }
            if held_out == 0 {
                raw.errors.push("heldout: required (>= 1) for bounds-containment".into());
            }
            if bound == Some(BoundKind::RegularizedProb) {
                if lambda.is_none() {
                    raw.errors.push("lambda: required for bound = regularized-prob".into());
                }
                if schedule_kind != ScheduleKind::Inverse {
                    raw.errors
                        .push("schedule.kind: regularized-prob containment uses the inverse schedule".into());
                }
            }
        }
        Some(ExperimentKind::PathProbe) => {
            if horizons.is_empty() {
                raw.errors.push("horizons: required and nonempty for path-probe".into());
            }
            if lambda.is_none() {
                raw.errors.push("lambda: required for path-probe (proximal decay probes)".into());
            }
        }
        Some(ExperimentKind::Stability) | Some(ExperimentKind::ProxCheck) | None => {}
    }

    if !raw.errors.is_empty() {
        return Err(ConfigError { errors: raw.errors });
    }
    Ok(ExperimentConfig {
        experiment: experiment.expect("checked above"),
        model: model.expect("checked above"),
        mlp_hidden,
        data: data.expect("checked above"),
        noise_probs,
        noise_p,
        noise_alphabet,
        reg_kind,
        reg_mu,
        lambda,
        lambda_list,
        schedule_kind,
        schedule_c,
        horizon,
        horizons,
        datasets,
        paths,
        trials,
        bound,
        confidence,
        window,
        thin,
        radius,
        held_out,
        master_seed,
        out,
    })
}

impl ExperimentConfig {
    /// Canonical one-line-per-key rendering of the effective config, used
    /// for the fingerprint hash. The output directory is excluded: it does
    /// not affect results.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let mut push = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        push("experiment", self.experiment.name().into());
        push("model", self.model.name().into());
        push("mlp.hidden", join(&self.mlp_hidden));
        match &self.data {
            DataSource::Synth { n, dim, margin } => {
                push("data.source", "synth".into());
                push("data.n", n.to_string());
                push("data.d", dim.to_string());
                push("data.margin", margin.to_string());
            }
            DataSource::LibSvm { path, n } => {
                push("data.source", "libsvm".into());
                push("data.path", path.clone());
                push("data.n", n.to_string());
            }
        }
        push("noise.probs", join(&self.noise_probs));
        push("noise.p", self.noise_p.to_string());
        push("noise.alphabet", join(&self.noise_alphabet));
        push("reg.kind", self.reg_kind.name().into());
        push("reg.mu", self.reg_mu.to_string());
        push("lambda", self.lambda.map(|l| l.to_string()).unwrap_or_default());
        push("lambda.list", join(&self.lambda_list));
        push("schedule.kind", self.schedule_kind.name().into());
        push("schedule.c", self.schedule_c.to_string());
        push("horizon", self.horizon.to_string());
        push("horizons", join(&self.horizons));
        push("replicas.datasets", self.datasets.to_string());
        push("replicas.paths", self.paths.to_string());
        push("trials", self.trials.to_string());
        push("bound", self.bound.map(|b| b.name().to_string()).unwrap_or_default());
        push("delta", self.confidence.to_string());
        push("window", self.window.to_string());
        push("thin", self.thin.to_string());
        push("radius", self.radius.to_string());
        push("heldout", self.held_out.to_string());
        push("seed", self.master_seed.to_string());
        s
    }

    pub fn config_hash(&self) -> String {
        format!("{:016x}", crate::stats::fnv1a(self.canonical().as_bytes()))
    }
}

fn join<T: ToString>(list: &[T]) -> String {
    list.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}
