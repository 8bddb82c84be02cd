//! Monte Carlo estimators of the quantities the bounds consume.
//!
//! Everything here reduces runs of the optimizers to scalar estimates with
//! standard errors: the on-average stochastic-gradient variance measured
//! along the optimization path, the on-average iterate stability from
//! coupled runs, reference minima of the empirical risk, uniform-stability
//! probes and generalization gaps. Replica cells are indexed by
//! `(dataset, path)` seeds derived from a master seed, so every estimate is
//! reproducible and cells may be computed in parallel by callers.

use crate::data::{replace_one, DataError, Dataset, Sample};
use crate::linalg;
use crate::models::{self, LossModel, ModelError};
use crate::optim::{self, OptimError, RunOptions, StepSchedule, Trajectory};
use crate::proxreg::Regularizer;
use crate::seeds;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("window of {window} exceeds the {stored} recorded iterates")]
    WindowTooLarge { window: usize, stored: usize },
    #[error("{invalid} of {total} trials were invalidated (more than 20%)")]
    TooManyInvalidTrials { invalid: usize, total: usize },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Optim(#[from] OptimError),
}

/// Exact variance of the per-sample gradient around the full gradient at a
/// fixed parameter: `(1/n) sum_k ||grad l(w; z_k) - grad f_S(w)||^2`. The
/// expectation over a uniform index is the dataset average, so this is
/// computed exactly rather than sampled.
pub fn variance_at(model: &LossModel, ds: &Dataset, w: &[f64]) -> Result<f64, EstimatorError> {
    let mean = models::empirical_grad(model, ds, w)?;
    let mut acc = 0.0;
    for z in ds.samples() {
        let g = models::grad(model, w, z)?;
        acc += linalg::dist(&g, &mean).powi(2);
    }
    Ok(acc / ds.len() as f64)
}

/// Windowed path variance: the mean of [`variance_at`] over the last
/// `window` recorded iterates of a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceEstimate {
    pub per_iterate: Vec<f64>,
    pub nu2: f64,
    pub window: usize,
}

pub fn estimate_nu2(
    model: &LossModel,
    ds: &Dataset,
    traj: &Trajectory,
    window: usize,
) -> Result<VarianceEstimate, EstimatorError> {
    if window == 0 {
        return Err(EstimatorError::InvalidArgument("window must be >= 1".into()));
    }
    if traj.stored.len() < window {
        return Err(EstimatorError::WindowTooLarge { window, stored: traj.stored.len() });
    }
    let start = traj.stored.len() - window;
    let per_iterate: Vec<f64> = traj.stored[start..]
        .iter()
        .map(|(_, w)| variance_at(model, ds, w))
        .collect::<Result<_, _>>()?;
    let nu2 = per_iterate.iter().sum::<f64>() / window as f64;
    Ok(VarianceEstimate { per_iterate, nu2, window })
}

/// Streaming mean/stderr accumulator for a fixed-length curve.
#[derive(Debug, Clone, Default)]
pub struct CurveAccumulator {
    sums: Vec<f64>,
    sumsq: Vec<f64>,
    count: usize,
}

/// Mean curve with pointwise standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct CurveStat {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub count: usize,
}

impl CurveAccumulator {
    pub fn push(&mut self, values: &[f64]) {
        if self.sums.is_empty() {
            self.sums = vec![0.0; values.len()];
            self.sumsq = vec![0.0; values.len()];
        }
        assert_eq!(self.sums.len(), values.len(), "curve length changed");
        for (i, &v) in values.iter().enumerate() {
            self.sums[i] += v;
            self.sumsq[i] += v * v;
        }
        self.count += 1;
    }

    pub fn finish(self) -> CurveStat {
        let n = self.count.max(1) as f64;
        let mean: Vec<f64> = self.sums.iter().map(|s| s / n).collect();
        let stderr = self
            .sumsq
            .iter()
            .zip(&mean)
            .map(|(sq, m)| {
                if self.count < 2 {
                    0.0
                } else {
                    let var = (sq / n - m * m).max(0.0) * n / (n - 1.0);
                    (var / n).sqrt()
                }
            })
            .collect();
        CurveStat { mean, stderr, count: self.count }
    }
}

/// Mean and standard error of a scalar sample.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Source of dataset replicas and i.i.d. fresh samples for the
/// replace-one experiments.
pub trait DatasetGenerator: Sync {
    fn dataset(&self, seed: u64) -> Result<Dataset, DataError>;
    fn fresh_sample(&self, seed: u64) -> Result<Sample, DataError>;
}

/// Synthetic Gaussian replicas with optional label corruption. Corruption
/// seeds are derived from the dataset seed, so each replica carries its own
/// fixed corrupted labels.
#[derive(Debug, Clone)]
pub struct GaussianGenerator {
    pub n: usize,
    pub dim: usize,
    pub margin: f64,
    pub noise: Option<(f64, Vec<f64>)>,
}

impl DatasetGenerator for GaussianGenerator {
    fn dataset(&self, seed: u64) -> Result<Dataset, DataError> {
        let ds = crate::data::synth_gaussian(self.n, self.dim, self.margin, seed)?;
        match &self.noise {
            None => Ok(ds),
            Some((p, alphabet)) => {
                let spec = crate::data::LabelNoiseSpec::new(
                    *p,
                    alphabet.clone(),
                    seeds::derive(seed, seeds::DOMAIN_CORRUPTION, 0),
                )?;
                crate::data::corrupt_labels(&ds, &spec)
            }
        }
    }

    fn fresh_sample(&self, seed: u64) -> Result<Sample, DataError> {
        let mut s = crate::data::fresh_gaussian_sample(self.dim, self.margin, seed);
        if let Some((p, alphabet)) = &self.noise {
            let mut rng = seeds::rng(seeds::derive(seed, seeds::DOMAIN_CORRUPTION, 1));
            if rand::Rng::random::<f64>(&mut rng) < *p {
                s.label = alphabet[rand::Rng::random_range(&mut rng, 0..alphabet.len())];
            }
        }
        Ok(s)
    }
}

/// Dataset replicas subsampled without replacement from a fixed pool
/// (e.g. a LIBSVM file), with fresh samples drawn uniformly from the pool.
/// Optional label corruption is applied per replica with a seed derived
/// from the replica seed.
#[derive(Debug, Clone)]
pub struct SubsampleGenerator {
    pub pool: Dataset,
    pub n: usize,
    pub noise: Option<(f64, Vec<f64>)>,
}

impl SubsampleGenerator {
    fn corrupted(&self, ds: Dataset, seed: u64) -> Result<Dataset, DataError> {
        match &self.noise {
            None => Ok(ds),
            Some((p, alphabet)) => {
                let spec = crate::data::LabelNoiseSpec::new(
                    *p,
                    alphabet.clone(),
                    seeds::derive(seed, seeds::DOMAIN_CORRUPTION, 0),
                )?;
                crate::data::corrupt_labels(&ds, &spec)
            }
        }
    }
}

impl DatasetGenerator for SubsampleGenerator {
    fn dataset(&self, seed: u64) -> Result<Dataset, DataError> {
        if self.n > self.pool.len() {
            return Err(DataError::InvalidArgument(format!(
                "subsample size {} exceeds pool size {}",
                self.n,
                self.pool.len()
            )));
        }
        let mut rng = seeds::rng(seed);
        // Partial Fisher-Yates over index handles.
        let mut indices: Vec<usize> = (0..self.pool.len()).collect();
        for i in 0..self.n {
            let j = rand::Rng::random_range(&mut rng, i..indices.len());
            indices.swap(i, j);
        }
        let samples: Vec<Sample> =
            indices[..self.n].iter().map(|&i| self.pool.sample(i).clone()).collect();
        let ds = Dataset::new(samples, self.pool.dim(), self.pool.provenance.clone())?;
        self.corrupted(ds, seed)
    }

    fn fresh_sample(&self, seed: u64) -> Result<Sample, DataError> {
        let mut rng = seeds::rng(seed);
        let mut s = self.pool.sample(rand::Rng::random_range(&mut rng, 0..self.pool.len())).clone();
        if let Some((p, alphabet)) = &self.noise {
            if rand::Rng::random::<f64>(&mut rng) < *p {
                s.label = alphabet[rand::Rng::random_range(&mut rng, 0..alphabet.len())];
            }
        }
        Ok(s)
    }
}

/// A fixed dataset replicated verbatim; the fresh sample is its first
/// sample, so the perturbed pair is an identity perturbation. Used by
/// tests.
#[derive(Debug, Clone)]
pub struct FixedGenerator(pub Dataset);

impl DatasetGenerator for FixedGenerator {
    fn dataset(&self, _seed: u64) -> Result<Dataset, DataError> {
        Ok(self.0.clone())
    }

    fn fresh_sample(&self, _seed: u64) -> Result<Sample, DataError> {
        Ok(self.0.sample(0).clone())
    }
}

/// Configuration of the on-average Monte Carlo estimate: `datasets` (m)
/// replicas, `paths` (k) sample paths each, horizon `T`.
#[derive(Debug, Clone)]
pub struct OnAverageConfig {
    pub datasets: usize,
    pub paths: usize,
    pub horizon: usize,
    pub schedule: StepSchedule,
    pub reg: Option<Regularizer>,
    pub window: usize,
    pub thin: usize,
    pub radius_limit: Option<f64>,
    /// Also estimate the mean reference minimum of the empirical risk.
    /// Exact for least squares; a long full-batch descent otherwise, so
    /// leave it off when the bound in play does not need `E[f_S*]`.
    pub compute_min_risk: bool,
    pub master_seed: u64,
}

/// On-average iterate stability from coupled runs.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityEstimate {
    pub mean_final: f64,
    pub stderr_final: f64,
    pub replicas: usize,
    pub curve: CurveStat,
}

/// Outcome of one `(dataset, path)` replica cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellOutcome {
    pub dataset: usize,
    pub path: usize,
    pub valid: bool,
    pub delta_final: Option<f64>,
    pub nu2: Option<f64>,
}

/// Aggregated output of [`estimate_on_average`].
#[derive(Debug, Clone, Serialize)]
pub struct OnAverageReport {
    pub nu2_mean: f64,
    pub nu2_stderr: f64,
    pub stability: StabilityEstimate,
    pub min_risk_mean: Option<f64>,
    pub min_risk_stderr: Option<f64>,
    /// Mean per-step `||grad l(w_{t,S}; z_0)||` curve over all cells.
    pub grad0_curve: CurveStat,
    /// Per-step residual of the averaged stability recursion
    /// (nonpositive in expectation).
    pub recursion_residual: CurveStat,
    pub invalid_trials: usize,
    pub total_trials: usize,
    pub cells: Vec<CellOutcome>,
}

/// Estimate the on-average quantities by Monte Carlo over dataset replicas
/// and sample paths: for each dataset replica a fresh sample builds the
/// perturbed pair, each path drives one coupled run. Invalid trials
/// (radius exceeded or diverged) are excluded and counted; more than 20%
/// invalid is an error.
pub fn estimate_on_average(
    model: &LossModel,
    generator: &dyn DatasetGenerator,
    cfg: &OnAverageConfig,
    w0: &[f64],
) -> Result<OnAverageReport, EstimatorError> {
    if cfg.datasets == 0 || cfg.paths == 0 {
        return Err(EstimatorError::InvalidArgument("need at least one dataset and path".into()));
    }
    let opts = RunOptions { thin: cfg.thin, record_risk: false, radius_limit: cfg.radius_limit };
    let mut nu2s = Vec::new();
    let mut deltas = Vec::new();
    let mut fstars = Vec::new();
    let mut delta_curve = CurveAccumulator::default();
    let mut grad0_curve = CurveAccumulator::default();
    let mut residual_curve = CurveAccumulator::default();
    let mut invalid = 0usize;
    let mut total = 0usize;
    let mut cells = Vec::with_capacity(cfg.datasets * cfg.paths);
    for i in 0..cfg.datasets {
        let ds_seed = seeds::derive(cfg.master_seed, seeds::DOMAIN_DATASET, i as u64);
        let ds = generator.dataset(ds_seed)?;
        let fresh = generator.fresh_sample(seeds::derive(cfg.master_seed, seeds::DOMAIN_FRESH, i as u64))?;
        let pair = replace_one(&ds, fresh)?;
        let consts = models::constants(model, &pair.base, cfg.radius_limit.unwrap_or(10.0))?;
        if cfg.compute_min_risk {
            fstars.push(reference_minimum(model, &ds, 1e-8, 200_000)?.value);
        }
        for j in 0..cfg.paths {
            total += 1;
            let path_seed =
                seeds::derive(cfg.master_seed, seeds::DOMAIN_PATH, (i * cfg.paths + j) as u64);
            let path = optim::draw_path(ds.len(), cfg.horizon, path_seed)?;
            let run = match optim::run_coupled(model, &pair, cfg.schedule, &path, w0, cfg.reg.as_ref(), opts)
            {
                Ok(run) => run,
                Err(OptimError::Diverged { .. }) => {
                    invalid += 1;
                    cells.push(CellOutcome { dataset: i, path: j, valid: false, delta_final: None, nu2: None });
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            if run.stopped_at.is_some() {
                invalid += 1;
                cells.push(CellOutcome { dataset: i, path: j, valid: false, delta_final: None, nu2: None });
                continue;
            }
            deltas.push(*run.delta.last().expect("delta series nonempty"));
            delta_curve.push(&run.delta);
            grad0_curve.push(&run.grad0_base);
            // Residual of the averaged recursion, per run:
            // delta_{t+1} - (1 + alpha_t L) delta_t - (2 alpha_t / n) g0_t.
            let n = ds.len() as f64;
            let residuals: Vec<f64> = (0..run.grad0_base.len())
                .map(|t| {
                    let alpha = cfg.schedule.eval(t);
                    run.delta[t + 1]
                        - (1.0 + alpha * consts.smoothness) * run.delta[t]
                        - 2.0 * alpha / n * run.grad0_base[t]
                })
                .collect();
            residual_curve.push(&residuals);
            let nu2 = estimate_nu2(model, &ds, &run.base, cfg.window)?;
            nu2s.push(nu2.nu2);
            cells.push(CellOutcome {
                dataset: i,
                path: j,
                valid: true,
                delta_final: Some(*run.delta.last().expect("delta series nonempty")),
                nu2: Some(nu2.nu2),
            });
        }
    }
    if invalid * 5 > total {
        return Err(EstimatorError::TooManyInvalidTrials { invalid, total });
    }
    if deltas.is_empty() {
        return Err(EstimatorError::InvalidArgument("all trials were invalidated".into()));
    }
    let (nu2_mean, nu2_stderr) = mean_stderr(&nu2s);
    let (delta_mean, delta_stderr) = mean_stderr(&deltas);
    let (min_risk_mean, min_risk_stderr) = if fstars.is_empty() {
        (None, None)
    } else {
        let (m, s) = mean_stderr(&fstars);
        (Some(m), Some(s))
    };
    Ok(OnAverageReport {
        nu2_mean,
        nu2_stderr,
        stability: StabilityEstimate {
            mean_final: delta_mean,
            stderr_final: delta_stderr,
            replicas: deltas.len(),
            curve: delta_curve.finish(),
        },
        min_risk_mean,
        min_risk_stderr,
        grad0_curve: grad0_curve.finish(),
        recursion_residual: residual_curve.finish(),
        invalid_trials: invalid,
        total_trials: total,
        cells,
    })
}

/// Reference minimum of the empirical risk.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceMin {
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Deterministic reference for `f_S*`: exact normal equations (minimum-norm
/// via the eigendecomposition) for least squares, long full-batch gradient
/// descent to the gradient tolerance otherwise.
pub fn reference_minimum(
    model: &LossModel,
    ds: &Dataset,
    grad_tol: f64,
    max_iter: usize,
) -> Result<ReferenceMin, EstimatorError> {
    match model {
        LossModel::LeastSquares { dim } => {
            let rows: Vec<Vec<f64>> = ds.samples().iter().map(|s| s.features.clone()).collect();
            let gram = linalg::SymMatrix::gram(&rows, ds.len() as f64);
            let (vals, vecs) = linalg::sym_eigen(&gram);
            let mut rhs = vec![0.0; *dim];
            for s in ds.samples() {
                linalg::add_scaled(&mut rhs, s.label / ds.len() as f64, &s.features);
            }
            let tol = vals.last().copied().unwrap_or(0.0).max(1e-300) * 1e-12;
            let mut w = vec![0.0; *dim];
            for (lam, v) in vals.iter().zip(&vecs) {
                if *lam > tol {
                    linalg::add_scaled(&mut w, linalg::dot(v, &rhs) / lam, v);
                }
            }
            let value = models::empirical_risk(model, ds, &w)?;
            let grad_norm = linalg::norm(&models::empirical_grad(model, ds, &w)?);
            Ok(ReferenceMin { value, grad_norm, iterations: 0 })
        }
        _ => {
            let consts = models::constants(model, ds, 10.0)?;
            let step = 1.0 / consts.smoothness;
            let (w, value, grad_norm, iterations) =
                full_batch_gd(model, ds, &vec![0.0; model.param_dim()], step, max_iter, grad_tol)?;
            let _ = w;
            Ok(ReferenceMin { value, grad_norm, iterations })
        }
    }
}

/// Plain full-batch gradient descent, the reference optimizer used for
/// minima and separability checks.
pub fn full_batch_gd(
    model: &LossModel,
    ds: &Dataset,
    w0: &[f64],
    step: f64,
    max_iter: usize,
    grad_tol: f64,
) -> Result<(Vec<f64>, f64, f64, usize), EstimatorError> {
    let mut w = w0.to_vec();
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    for it in 0..max_iter {
        let g = models::empirical_grad(model, ds, &w)?;
        grad_norm = linalg::norm(&g);
        iterations = it;
        if grad_norm <= grad_tol {
            break;
        }
        linalg::add_scaled(&mut w, -step, &g);
    }
    let value = models::empirical_risk(model, ds, &w)?;
    Ok((w, value, grad_norm, iterations))
}

/// Lower-bound probes of the uniform-stability constants.
#[derive(Debug, Clone, Serialize)]
pub struct UniformProbe {
    /// Max over probed dataset pairs and probe samples of the
    /// mean-over-paths loss difference at the final iterates.
    pub beta_hat: f64,
    /// Max over probed path perturbations and probe samples of the loss
    /// difference at the final iterates.
    pub rho_hat: f64,
    pub beta_probes: usize,
    pub rho_probes: usize,
    /// Largest coupled final-iterate distance seen while probing beta.
    pub max_coupled_delta: f64,
}

/// Configuration of [`probe_uniform`].
#[derive(Debug, Clone)]
pub struct UniformProbeConfig {
    pub dataset_pairs: usize,
    pub paths_per_pair: usize,
    pub probe_samples: usize,
    pub t0_grid: Vec<usize>,
    pub replacements_per_t0: usize,
    pub horizon: usize,
    pub schedule: StepSchedule,
    pub radius_limit: Option<f64>,
    pub master_seed: u64,
}

/// Probe the uniform-stability constants of (proximal) SGD from below:
/// `beta_hat` maximizes the mean-over-paths loss difference over probed
/// `(S, Sbar, z)` triples, `rho_hat` maximizes the pathwise loss difference
/// over probed `(t0, index, z)` replacements. Both are lower bounds of the
/// true suprema and are nondecreasing in the probe counts.
pub fn probe_uniform(
    model: &LossModel,
    reg: Option<&Regularizer>,
    generator: &dyn DatasetGenerator,
    cfg: &UniformProbeConfig,
) -> Result<UniformProbe, EstimatorError> {
    let w0 = vec![0.0; model.param_dim()];
    let opts = RunOptions { radius_limit: cfg.radius_limit, ..RunOptions::default() };
    let mut beta_hat = 0.0f64;
    let mut rho_hat = 0.0f64;
    let mut beta_probes = 0usize;
    let mut rho_probes = 0usize;
    let mut max_delta = 0.0f64;
    for i in 0..cfg.dataset_pairs {
        let ds_seed = seeds::derive(cfg.master_seed, seeds::DOMAIN_DATASET, i as u64);
        let ds = generator.dataset(ds_seed)?;
        let fresh =
            generator.fresh_sample(seeds::derive(cfg.master_seed, seeds::DOMAIN_FRESH, i as u64))?;
        let probes: Vec<Sample> = (0..cfg.probe_samples)
            .map(|p| {
                generator.fresh_sample(seeds::derive(
                    cfg.master_seed,
                    seeds::DOMAIN_PROBE,
                    (i * cfg.probe_samples + p) as u64,
                ))
            })
            .collect::<Result<_, _>>()?;
        let pair = replace_one(&ds, fresh)?;
        // beta: mean over paths of the loss difference per probe sample.
        let mut diff_sums = vec![0.0f64; probes.len()];
        let mut path_count = 0usize;
        for j in 0..cfg.paths_per_pair {
            let path_seed =
                seeds::derive(cfg.master_seed, seeds::DOMAIN_PATH, (i * cfg.paths_per_pair + j) as u64);
            let path = optim::draw_path(ds.len(), cfg.horizon, path_seed)?;
            let run = optim::run_coupled(model, &pair, cfg.schedule, &path, &w0, reg, opts)?;
            if run.stopped_at.is_some() {
                continue;
            }
            path_count += 1;
            max_delta = max_delta.max(*run.delta.last().expect("nonempty"));
            for (p, probe) in probes.iter().enumerate() {
                let a = models::loss(model, &run.base.end, probe)?;
                let b = models::loss(model, &run.replaced_end, probe)?;
                diff_sums[p] += (a - b).abs();
            }
            // rho: perturb one path index of the base run.
            for (k, &t0) in cfg.t0_grid.iter().enumerate() {
                if t0 >= path.len() {
                    continue;
                }
                for r in 0..cfg.replacements_per_t0 {
                    let pick = seeds::derive(
                        cfg.master_seed,
                        seeds::DOMAIN_PROBE,
                        0x1000 + (((i * cfg.paths_per_pair + j) * cfg.t0_grid.len() + k)
                            * cfg.replacements_per_t0
                            + r) as u64,
                    );
                    let new_index = optim::random_other_index(ds.len(), path.index(t0), pick);
                    let path_run = optim::run_path_perturbed(
                        model, &ds, reg, cfg.schedule, &path, t0, new_index, &w0, opts,
                    )?;
                    if path_run.stopped_at.is_some() {
                        continue;
                    }
                    for probe in &probes {
                        let a = models::loss(model, &path_run.end_base, probe)?;
                        let b = models::loss(model, &path_run.end_perturbed, probe)?;
                        rho_hat = rho_hat.max((a - b).abs());
                        rho_probes += 1;
                    }
                }
            }
        }
        if path_count > 0 {
            for s in &diff_sums {
                beta_hat = beta_hat.max(s / path_count as f64);
                beta_probes += 1;
            }
        }
    }
    Ok(UniformProbe { beta_hat, rho_hat, beta_probes, rho_probes, max_coupled_delta: max_delta })
}

/// Train/held-out risk gap at a parameter vector.
#[derive(Debug, Clone, Serialize)]
pub struct GapEstimate {
    pub train_risk: f64,
    pub test_risk: f64,
    pub gap: f64,
    pub held_out_size: usize,
}

/// `|f_S(w) - f_heldout(w)|`, the measured generalization gap.
pub fn generalization_gap(
    model: &LossModel,
    w: &[f64],
    train: &Dataset,
    held_out: &Dataset,
) -> Result<GapEstimate, EstimatorError> {
    if held_out.is_empty() {
        return Err(EstimatorError::InvalidArgument("empty held-out set".into()));
    }
    let train_risk = models::empirical_risk(model, train, w)?;
    let test_risk = models::empirical_risk(model, held_out, w)?;
    Ok(GapEstimate {
        train_risk,
        test_risk,
        gap: (train_risk - test_risk).abs(),
        held_out_size: held_out.len(),
    })
}
