//! Experiment orchestration: each config kind expands into independent
//! replica cells, cells run on a worker pool, and rows are merged in a
//! deterministic order (sweep value, dataset, path, trial), so results are
//! byte-identical for any worker count.

use crate::config::{
    BoundKind, DataSource, ExperimentConfig, ExperimentKind, ModelKind, RegKindSpec, ScheduleKind,
};
use crate::output::{summarize, Containment, ResultRow, Summary};
use rayon::prelude::*;
use stability_core::bounds::{self, BoundInputs, BoundReport};
use stability_core::data::{parse_libsvm, Dataset};
use stability_core::estimators::{
    estimate_nu2, estimate_on_average, generalization_gap, probe_uniform, DatasetGenerator,
    EstimatorError, GaussianGenerator, OnAverageConfig, SubsampleGenerator, UniformProbeConfig,
};
use stability_core::models::{self, Constants, LossModel};
use stability_core::optim::{self, RunOptions, StepSchedule};
use stability_core::proxreg::{contract_probe, Regularizer};
use stability_core::seeds;
use std::fmt;

#[derive(Debug)]
pub enum RunError {
    /// A constraint that only became checkable once data-dependent
    /// quantities were known; mapped to the config-error exit code.
    ConfigDomain(String),
    Io(std::io::Error),
    Failed(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::ConfigDomain(m) => write!(f, "config error: {m}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
            RunError::Failed(m) => write!(f, "run error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

macro_rules! from_failed {
    ($($ty:ty),*) => {$(
        impl From<$ty> for RunError {
            fn from(e: $ty) -> Self {
                RunError::Failed(e.to_string())
            }
        }
    )*};
}

from_failed!(
    stability_core::data::DataError,
    stability_core::models::ModelError,
    stability_core::optim::OptimError,
    stability_core::proxreg::ProxError,
    EstimatorError,
    stability_core::bounds::BoundError
);

pub struct RunOutcome {
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
}

/// The loaded experiment environment: model, data dimension and, for
/// LIBSVM sources, the sample pool.
struct Env {
    model: LossModel,
    train_n: usize,
    pool: Option<Dataset>,
}

fn load_env(cfg: &ExperimentConfig) -> Result<Env, RunError> {
    let (data_dim, train_n, pool) = match &cfg.data {
        DataSource::Synth { n, dim, margin: _ } => (*dim, *n, None),
        DataSource::LibSvm { path, n } => {
            let text = std::fs::read_to_string(path)?;
            let pool = parse_libsvm(&text, false)
                .map_err(|e| RunError::ConfigDomain(format!("data.path: {e}")))?;
            if *n > pool.len() {
                return Err(RunError::ConfigDomain(format!(
                    "data.n: subsample size {n} exceeds the {} samples in `{path}`",
                    pool.len()
                )));
            }
            (pool.dim(), *n, Some(pool))
        }
    };
    let model = match cfg.model {
        ModelKind::Logistic => LossModel::logistic(data_dim),
        ModelKind::LeastSquares => LossModel::least_squares(data_dim),
        ModelKind::TinyMlp => LossModel::tiny_mlp(data_dim, cfg.mlp_hidden.clone()),
    };
    Ok(Env { model, train_n, pool })
}

impl Env {
    /// Generator for training replicas with corruption probability `p`.
    fn generator(&self, cfg: &ExperimentConfig, p: f64, n: usize) -> Box<dyn DatasetGenerator> {
        let noise = (p > 0.0).then(|| (p, cfg.noise_alphabet.clone()));
        match (&cfg.data, &self.pool) {
            (DataSource::Synth { dim, margin, .. }, _) => {
                Box::new(GaussianGenerator { n, dim: *dim, margin: *margin, noise })
            }
            (DataSource::LibSvm { .. }, Some(pool)) => {
                Box::new(SubsampleGenerator { pool: pool.clone(), n: n.min(pool.len()), noise })
            }
            (DataSource::LibSvm { .. }, None) => unreachable!("pool loaded with the env"),
        }
    }
}

fn schedule_of(cfg: &ExperimentConfig) -> Result<StepSchedule, RunError> {
    Ok(match cfg.schedule_kind {
        ScheduleKind::SlowLog => StepSchedule::slow_log(cfg.schedule_c)?,
        ScheduleKind::Inverse => StepSchedule::inverse(cfg.schedule_c)?,
    })
}

fn regularizer_of(cfg: &ExperimentConfig, weight: f64, dim: usize) -> Result<Regularizer, RunError> {
    Ok(match cfg.reg_kind {
        RegKindSpec::Ridge => Regularizer::ridge(weight)?,
        RegKindSpec::ElasticNet => Regularizer::elastic_net(weight, cfg.reg_mu)?,
        RegKindSpec::Tikhonov => {
            // The harness exposes the identity Tikhonov matrix; other
            // matrices are available through the library API.
            let rows = (0..dim)
                .map(|i| {
                    let mut row = vec![0.0; dim];
                    row[i] = 1.0;
                    row
                })
                .collect();
            Regularizer::tikhonov(weight, rows)?
        }
    })
}

/// Distribution-level constants: a closed-form envelope for logistic and
/// least squares, sampled constants (flagged estimated) for the MLP.
fn constants_of(cfg: &ExperimentConfig, env: &Env, gen: &dyn DatasetGenerator) -> Result<Constants, RunError> {
    match env.model {
        LossModel::TinyMlp(_) => {
            let pilot = gen.dataset(seeds::derive(cfg.master_seed, seeds::DOMAIN_PROBE, 0xC0))?;
            Ok(models::constants(&env.model, &pilot, cfg.radius)?)
        }
        _ => {
            let (max_norm, max_label) = match &env.pool {
                Some(pool) => {
                    let max_label = pool
                        .samples()
                        .iter()
                        .map(|s| s.label.abs())
                        .chain(cfg.noise_alphabet.iter().map(|a| a.abs()))
                        .fold(0.0f64, f64::max);
                    (pool.max_feature_norm(), max_label)
                }
                // Synthetic features live in the unit ball surely; labels
                // come from the corruption alphabet or are +-1.
                None => {
                    let max_label = cfg
                        .noise_alphabet
                        .iter()
                        .map(|a| a.abs())
                        .fold(1.0f64, f64::max);
                    (1.0, max_label)
                }
            };
            Ok(models::envelope_constants(&env.model, max_norm, max_label, cfg.radius)?)
        }
    }
}

fn run_flags(consts: &Constants, schedule: StepSchedule) -> Vec<String> {
    let mut flags = Vec::new();
    if consts.estimated {
        flags.push("estimated-constants".to_string());
    }
    if !schedule.satisfies_smoothness(consts.smoothness) {
        flags.push("assumptions-violated".to_string());
    }
    flags
}

fn too_many_invalid(invalid: usize, total: usize) -> Result<(), RunError> {
    if invalid * 5 > total {
        return Err(RunError::Failed(format!(
            "{invalid} of {total} trials were invalidated (more than 20%)"
        )));
    }
    Ok(())
}

/// Execute a validated config on `workers` threads (0 = rayon default) and
/// return the ordered rows plus the summary.
pub fn run_config(cfg: &ExperimentConfig, workers: usize) -> Result<RunOutcome, RunError> {
    if workers == 0 {
        return dispatch(cfg);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Failed(e.to_string()))?;
    pool.install(|| dispatch(cfg))
}

fn dispatch(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let env = load_env(cfg)?;
    match cfg.experiment {
        ExperimentKind::VarianceSweep => variance_sweep(cfg, &env),
        ExperimentKind::Stability => stability(cfg, &env),
        ExperimentKind::BoundsContainment => bounds_containment(cfg, &env),
        ExperimentKind::RegSweep => reg_sweep(cfg, &env),
        ExperimentKind::ProxCheck => prox_check(cfg, &env),
        ExperimentKind::PathProbe => path_probe(cfg, &env),
    }
}

fn base_row(cfg: &ExperimentConfig) -> ResultRow {
    ResultRow {
        experiment: cfg.experiment.name().to_string(),
        master_seed: cfg.master_seed,
        config_hash: cfg.config_hash(),
        ..ResultRow::default()
    }
}

fn variance_sweep(cfg: &ExperimentConfig, env: &Env) -> Result<RunOutcome, RunError> {
    let schedule = schedule_of(cfg)?;
    let w0 = vec![0.0; env.model.param_dim()];
    let opts = RunOptions { thin: cfg.thin, record_risk: false, radius_limit: Some(cfg.radius) };
    let cells: Vec<(usize, usize, usize)> = (0..cfg.noise_probs.len())
        .flat_map(|p| (0..cfg.datasets).flat_map(move |i| (0..cfg.paths).map(move |j| (p, i, j))))
        .collect();
    let results: Vec<Result<Option<ResultRow>, RunError>> = cells
        .par_iter()
        .map(|&(p_idx, i, j)| -> Result<Option<ResultRow>, RunError> {
            let p = cfg.noise_probs[p_idx];
            let gen = env.generator(cfg, p, env.train_n);
            let cell = (p_idx * cfg.datasets + i) as u64;
            let ds = gen.dataset(seeds::derive(cfg.master_seed, seeds::DOMAIN_DATASET, cell))?;
            let path = optim::draw_path(
                ds.len(),
                cfg.horizon,
                seeds::derive(cfg.master_seed, seeds::DOMAIN_PATH, cell * cfg.paths as u64 + j as u64),
            )?;
            let traj = match optim::run_sgd(&env.model, &ds, schedule, &path, &w0, opts) {
                Ok(t) => t,
                Err(optim::OptimError::Diverged { .. }) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            if traj.stopped_at.is_some() {
                return Ok(None);
            }
            let nu2 = estimate_nu2(&env.model, &ds, &traj, cfg.window)?;
            let consts = models::constants(&env.model, &ds, cfg.radius)?;
            Ok(Some(ResultRow {
                sweep: Some(p),
                dataset: Some(i),
                path: Some(j),
                nu2: Some(nu2.nu2),
                flags: run_flags(&consts, schedule),
                ..base_row(cfg)
            }))
        })
        .collect();
    let mut rows = Vec::new();
    let mut invalid = 0usize;
    for r in results {
        match r? {
            Some(row) => rows.push(row),
            None => invalid += 1,
        }
    }
    too_many_invalid(invalid, cells.len())?;
    sort_rows(&mut rows);
    let summary = summarize(
        &rows,
        cfg.experiment.name(),
        cfg.master_seed,
        &cfg.config_hash(),
        invalid,
        None,
        Vec::new(),
    );
    Ok(RunOutcome { rows, summary })
}

fn stability(cfg: &ExperimentConfig, env: &Env) -> Result<RunOutcome, RunError> {
    let schedule = schedule_of(cfg)?;
    let reg = match cfg.lambda {
        Some(weight) => Some(regularizer_of(cfg, weight, env.model.param_dim())?),
        None => None,
    };
    let gen = env.generator(cfg, cfg.noise_p, env.train_n);
    let oa = OnAverageConfig {
        datasets: cfg.datasets,
        paths: cfg.paths,
        horizon: cfg.horizon,
        schedule,
        reg,
        window: cfg.window,
        thin: cfg.thin,
        radius_limit: Some(cfg.radius),
        compute_min_risk: matches!(env.model, LossModel::LeastSquares { .. }),
        master_seed: cfg.master_seed,
    };
    let w0 = vec![0.0; env.model.param_dim()];
    let report = estimate_on_average(&env.model, gen.as_ref(), &oa, &w0)?;
    let mut rows: Vec<ResultRow> = report
        .cells
        .iter()
        .filter(|c| c.valid)
        .map(|c| ResultRow {
            dataset: Some(c.dataset),
            path: Some(c.path),
            delta_t: c.delta_final,
            nu2: c.nu2,
            ..base_row(cfg)
        })
        .collect();
    sort_rows(&mut rows);
    let summary = summarize(
        &rows,
        cfg.experiment.name(),
        cfg.master_seed,
        &cfg.config_hash(),
        report.invalid_trials,
        None,
        Vec::new(),
    );
    Ok(RunOutcome { rows, summary })
}

fn bound_report_for(
    cfg: &ExperimentConfig,
    env: &Env,
    consts: &Constants,
    nu2: f64,
    f0: f64,
) -> Result<BoundReport, RunError> {
    let inputs = BoundInputs {
        n: env.train_n,
        horizon: cfg.horizon,
        confidence: cfg.confidence,
        loss_bound: consts.loss_bound,
        grad_bound: consts.grad_bound,
        smoothness: consts.smoothness,
        step_c: cfg.schedule_c,
        initial_risk: f0,
        variance: nu2,
        pl_constant: consts.pl_constant,
        reg_weight: cfg.lambda,
        min_risk: None,
        // The runs start at w0 = 0 where every supported regularizer
        // vanishes, so the regularized initial risk equals f0.
        initial_reg_risk: Some(f0),
        stability: None,
        beta: None,
        rho: None,
        estimated_constants: consts.estimated,
    };
    let report = match cfg.bound.expect("validated") {
        BoundKind::VarianceProb => bounds::variance_prob_bound(&inputs)?,
        BoundKind::RegularizedProb => match bounds::regularized_prob_bound(&inputs) {
            Ok(r) => r,
            Err(bounds::BoundError::DomainViolation(m)) => {
                // The lambda <= L case makes the formula undefined: a
                // config-level error for this experiment kind.
                return Err(RunError::ConfigDomain(format!("lambda: {m}")));
            }
            Err(e) => return Err(e.into()),
        },
    };
    Ok(report)
}

fn bounds_containment(cfg: &ExperimentConfig, env: &Env) -> Result<RunOutcome, RunError> {
    let schedule = schedule_of(cfg)?;
    let gen = env.generator(cfg, cfg.noise_p, env.train_n);
    let consts = constants_of(cfg, env, gen.as_ref())?;
    let reg = match cfg.bound.expect("validated") {
        BoundKind::RegularizedProb => {
            let weight = cfg.lambda.expect("validated");
            if weight <= consts.smoothness {
                return Err(RunError::ConfigDomain(format!(
                    "lambda: regularizer weight {weight} must exceed the smoothness constant {}",
                    consts.smoothness
                )));
            }
            Some(regularizer_of(cfg, weight, env.model.param_dim())?)
        }
        BoundKind::VarianceProb => None,
    };
    let w0 = vec![0.0; env.model.param_dim()];

    // Pilot phase: the on-average variance estimate feeding the bound.
    let pilot_cfg = OnAverageConfig {
        datasets: cfg.datasets,
        paths: cfg.paths,
        horizon: cfg.horizon,
        schedule,
        reg: reg.clone(),
        window: cfg.window,
        thin: cfg.thin,
        radius_limit: Some(cfg.radius),
        compute_min_risk: false,
        master_seed: cfg.master_seed,
    };
    let pilot = estimate_on_average(&env.model, gen.as_ref(), &pilot_cfg, &w0)?;

    let held_gen = env.generator(cfg, cfg.noise_p, cfg.held_out);
    let held = held_gen.dataset(seeds::derive(cfg.master_seed, seeds::DOMAIN_HELD_OUT, 0))?;
    let f0 = models::empirical_risk(&env.model, &held, &w0)?;
    let report = bound_report_for(cfg, env, &consts, pilot.nu2_mean, f0)?;

    let opts = RunOptions { thin: cfg.thin, record_risk: false, radius_limit: Some(cfg.radius) };
    let results: Vec<Result<Option<ResultRow>, RunError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Option<ResultRow>, RunError> {
            let ds_seed = seeds::derive(cfg.master_seed, seeds::DOMAIN_DATASET, 1_000_000 + t as u64);
            let ds = gen.dataset(ds_seed)?;
            let path = optim::draw_path(
                ds.len(),
                cfg.horizon,
                seeds::derive(cfg.master_seed, seeds::DOMAIN_PATH, 1_000_000 + t as u64),
            )?;
            let traj = match &reg {
                Some(r) => optim::run_prox_sgd(&env.model, &ds, r, schedule, &path, &w0, opts),
                None => optim::run_sgd(&env.model, &ds, schedule, &path, &w0, opts),
            };
            let traj = match traj {
                Ok(t) => t,
                Err(optim::OptimError::Diverged { .. }) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            if traj.stopped_at.is_some() {
                return Ok(None);
            }
            let nu2 = estimate_nu2(&env.model, &ds, &traj, cfg.window)?;
            let gap = generalization_gap(&env.model, &traj.end, &ds, &held)?;
            let mut flags = run_flags(&consts, schedule);
            for f in &report.flags {
                if !flags.contains(f) {
                    flags.push(f.clone());
                }
            }
            Ok(Some(ResultRow {
                trial: Some(t),
                nu2: Some(nu2.nu2),
                gap: Some(gap.gap),
                train_risk: Some(gap.train_risk),
                test_risk: Some(gap.test_risk),
                bound: Some(report.name.clone()),
                bound_value: Some(report.value),
                flags,
                ..base_row(cfg)
            }))
        })
        .collect();
    let mut rows = Vec::new();
    let mut invalid = pilot.invalid_trials;
    for r in results {
        match r? {
            Some(row) => rows.push(row),
            None => invalid += 1,
        }
    }
    too_many_invalid(invalid, cfg.trials + pilot.total_trials)?;
    sort_rows(&mut rows);
    let contained = rows.iter().filter(|r| r.gap.unwrap_or(f64::INFINITY) <= report.value).count();
    let containment = Containment {
        bound: report.name.clone(),
        bound_value: report.value,
        contained,
        trials: rows.len(),
        fraction: if rows.is_empty() { 0.0 } else { contained as f64 / rows.len() as f64 },
    };
    let mut summary = summarize(
        &rows,
        cfg.experiment.name(),
        cfg.master_seed,
        &cfg.config_hash(),
        invalid,
        Some(containment),
        Vec::new(),
    );
    summary.bound_report = Some(report);
    Ok(RunOutcome { rows, summary })
}

fn reg_sweep(cfg: &ExperimentConfig, env: &Env) -> Result<RunOutcome, RunError> {
    let schedule = schedule_of(cfg)?;
    let w0 = vec![0.0; env.model.param_dim()];
    let opts = RunOptions { thin: cfg.thin, record_risk: false, radius_limit: Some(cfg.radius) };
    let cells: Vec<(usize, usize, usize)> = (0..cfg.lambda_list.len())
        .flat_map(|l| (0..cfg.datasets).flat_map(move |i| (0..cfg.paths).map(move |j| (l, i, j))))
        .collect();
    let results: Vec<Result<Option<ResultRow>, RunError>> = cells
        .par_iter()
        .map(|&(l_idx, i, j)| -> Result<Option<ResultRow>, RunError> {
            let weight = cfg.lambda_list[l_idx];
            let reg = regularizer_of(cfg, weight, env.model.param_dim())?;
            let gen = env.generator(cfg, cfg.noise_p, env.train_n);
            // Datasets, held-out sets and paths are shared across the
            // lambda grid so the sweep is a paired comparison.
            let ds = gen.dataset(seeds::derive(cfg.master_seed, seeds::DOMAIN_DATASET, i as u64))?;
            let held_gen = env.generator(cfg, cfg.noise_p, cfg.held_out);
            let held =
                held_gen.dataset(seeds::derive(cfg.master_seed, seeds::DOMAIN_HELD_OUT, i as u64))?;
            let path = optim::draw_path(
                ds.len(),
                cfg.horizon,
                seeds::derive(cfg.master_seed, seeds::DOMAIN_PATH, (i * cfg.paths + j) as u64),
            )?;
            let traj = match optim::run_prox_sgd(&env.model, &ds, &reg, schedule, &path, &w0, opts) {
                Ok(t) => t,
                Err(optim::OptimError::Diverged { .. }) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            if traj.stopped_at.is_some() {
                return Ok(None);
            }
            let gap = generalization_gap(&env.model, &traj.end, &ds, &held)?;
            let consts = models::constants(&env.model, &ds, cfg.radius)?;
            Ok(Some(ResultRow {
                sweep: Some(weight),
                dataset: Some(i),
                path: Some(j),
                gap: Some(gap.gap),
                train_risk: Some(gap.train_risk),
                test_risk: Some(gap.test_risk),
                flags: run_flags(&consts, schedule),
                ..base_row(cfg)
            }))
        })
        .collect();
    let mut rows = Vec::new();
    let mut invalid = 0usize;
    for r in results {
        match r? {
            Some(row) => rows.push(row),
            None => invalid += 1,
        }
    }
    too_many_invalid(invalid, cells.len())?;
    sort_rows(&mut rows);
    let summary = summarize(
        &rows,
        cfg.experiment.name(),
        cfg.master_seed,
        &cfg.config_hash(),
        invalid,
        None,
        Vec::new(),
    );
    Ok(RunOutcome { rows, summary })
}

fn prox_check(cfg: &ExperimentConfig, env: &Env) -> Result<RunOutcome, RunError> {
    let weight = cfg.lambda.unwrap_or(1.0);
    let dim = env.model.param_dim();
    let reg = regularizer_of(cfg, weight, dim)?;
    let oracle_cases = (cfg.trials / 10).max(1);
    let probe = contract_probe(
        &reg,
        dim,
        cfg.trials,
        oracle_cases,
        seeds::derive(cfg.master_seed, seeds::DOMAIN_PROBE, 1),
    )?;
    let mut rows = vec![
        ResultRow {
            check: Some("contraction-excess".into()),
            value: Some(probe.contraction_excess),
            trial: Some(cfg.trials),
            ..base_row(cfg)
        },
        ResultRow {
            check: Some("gradient-map-excess".into()),
            value: Some(probe.map_excess),
            trial: Some(cfg.trials),
            ..base_row(cfg)
        },
        ResultRow {
            check: Some("prox-oracle-residual".into()),
            value: Some(probe.oracle_residual),
            trial: Some(oracle_cases),
            ..base_row(cfg)
        },
    ];
    sort_rows(&mut rows);
    let warnings = if probe.contraction_excess > 1e-9
        || probe.map_excess > 1e-9
        || probe.oracle_residual > 1e-8
    {
        vec!["prox contract violated beyond tolerance".to_string()]
    } else {
        Vec::new()
    };
    let summary = summarize(
        &rows,
        cfg.experiment.name(),
        cfg.master_seed,
        &cfg.config_hash(),
        0,
        None,
        warnings,
    );
    Ok(RunOutcome { rows, summary })
}

fn path_probe(cfg: &ExperimentConfig, env: &Env) -> Result<RunOutcome, RunError> {
    let schedule = schedule_of(cfg)?;
    let weight = cfg.lambda.expect("validated");
    let reg = regularizer_of(cfg, weight, env.model.param_dim())?;
    let gen = env.generator(cfg, cfg.noise_p, env.train_n);
    let w0 = vec![0.0; env.model.param_dim()];
    let mut rows = Vec::new();

    for (t_idx, &horizon) in cfg.horizons.iter().enumerate() {
        let probe_cfg = UniformProbeConfig {
            dataset_pairs: cfg.datasets,
            paths_per_pair: cfg.paths,
            probe_samples: 4,
            t0_grid: vec![(horizon / 10).max(1)],
            replacements_per_t0: 2,
            horizon,
            schedule,
            radius_limit: Some(cfg.radius),
            master_seed: seeds::derive(cfg.master_seed, seeds::DOMAIN_PROBE, t_idx as u64),
        };
        let probe = probe_uniform(&env.model, Some(&reg), gen.as_ref(), &probe_cfg)?;
        rows.push(ResultRow {
            sweep: Some(horizon as f64),
            beta_hat: Some(probe.beta_hat),
            rho_hat: Some(probe.rho_hat),
            ..base_row(cfg)
        });
    }

    // Log-log decay slopes of the path-perturbation norm at the largest
    // horizon.
    let horizon = *cfg.horizons.iter().max().expect("validated nonempty");
    let t0 = (horizon / 10).max(1);
    let opts = RunOptions { thin: cfg.thin, record_risk: false, radius_limit: Some(cfg.radius) };
    let slope_rows: Vec<Result<Option<ResultRow>, RunError>> = (0..cfg.datasets)
        .into_par_iter()
        .map(|i| -> Result<Option<ResultRow>, RunError> {
            let ds_seed = seeds::derive(cfg.master_seed, seeds::DOMAIN_DATASET, 5_000_000 + i as u64);
            let ds = gen.dataset(ds_seed)?;
            let path = optim::draw_path(
                ds.len(),
                horizon,
                seeds::derive(cfg.master_seed, seeds::DOMAIN_PATH, 5_000_000 + i as u64),
            )?;
            let new_index = optim::random_other_index(
                ds.len(),
                path.index(t0),
                seeds::derive(cfg.master_seed, seeds::DOMAIN_PROBE, 5_000_000 + i as u64),
            );
            let run = optim::run_path_perturbed(
                &env.model,
                &ds,
                Some(&reg),
                schedule,
                &path,
                t0,
                new_index,
                &w0,
                opts,
            )?;
            if run.stopped_at.is_some() {
                return Ok(None);
            }
            Ok(fit_loglog_slope(&run.delta, 2 * t0, horizon).map(|slope| ResultRow {
                sweep: Some(horizon as f64),
                dataset: Some(i),
                slope: Some(slope),
                ..base_row(cfg)
            }))
        })
        .collect();
    let mut invalid = 0usize;
    for r in slope_rows {
        match r? {
            Some(row) => rows.push(row),
            None => invalid += 1,
        }
    }
    sort_rows(&mut rows);
    let summary = summarize(
        &rows,
        cfg.experiment.name(),
        cfg.master_seed,
        &cfg.config_hash(),
        invalid,
        None,
        Vec::new(),
    );
    Ok(RunOutcome { rows, summary })
}

/// Least-squares slope of `ln delta_t` against `ln t` over `t` in
/// `[from, to]`, skipping nonpositive values.
pub fn fit_loglog_slope(delta: &[f64], from: usize, to: usize) -> Option<f64> {
    let points: Vec<(f64, f64)> = (from..=to.min(delta.len() - 1))
        .filter(|&t| delta[t] > 0.0)
        .map(|t| ((t as f64).ln(), delta[t].ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in &points {
        cov += (x - mx) * (y - my);
        var += (x - mx) * (x - mx);
    }
    (var > 0.0).then(|| cov / var)
}

fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        let key = |r: &ResultRow| {
            (
                r.sweep.map(|s| s.to_bits()).unwrap_or(0),
                r.dataset.unwrap_or(usize::MAX),
                r.path.unwrap_or(usize::MAX),
                r.trial.unwrap_or(usize::MAX),
                r.check.clone().unwrap_or_default(),
            )
        };
        key(a).cmp(&key(b))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_slope_recovers_power_law() {
        let delta: Vec<f64> = (0..200).map(|t| if t < 10 { 0.0 } else { 5.0 * (t as f64).powf(-0.75) }).collect();
        let slope = fit_loglog_slope(&delta, 20, 199).unwrap();
        assert!((slope + 0.75).abs() < 1e-12);
    }

    #[test]
    fn loglog_slope_handles_degenerate_series() {
        assert_eq!(fit_loglog_slope(&[0.0, 0.0, 0.0], 0, 2), None);
        assert_eq!(fit_loglog_slope(&[1.0], 0, 0), None);
    }
}
