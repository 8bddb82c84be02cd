//! SGD and proximal SGD with decaying step schedules.
//!
//! A run consumes a pre-drawn [`SamplePath`] of uniform indices, so two
//! runs sharing a path are coupled: [`run_coupled`] advances trajectories
//! on a perturbed dataset pair in lockstep and records the iterate distance
//! `delta_t` together with the gradient norms at the replaced sample, which
//! are the raw series behind every stability estimate.
//! [`run_path_perturbed`] instead perturbs one index of the path itself.
//!
//! No projection step is performed; callers pass a `radius_limit` and a
//! trajectory that leaves the certified parameter ball is marked stopped
//! (the trial is invalid) rather than clipped.

use crate::data::{Dataset, PerturbedPair};
use crate::linalg;
use crate::models::{self, LossModel, ModelError};
use crate::proxreg::{self, ProxError, Regularizer};
use crate::seeds;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptimError {
    #[error("iterate diverged (non-finite) at step {step}")]
    Diverged { step: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Prox(#[from] ProxError),
}

/// Decaying step-size schedule, evaluated with natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum StepSchedule {
    /// `alpha_t = c / ((t + 2) ln(t + 2))`.
    SlowLog { c: f64 },
    /// `alpha_t = c / (t + 2)`.
    Inverse { c: f64 },
}

impl StepSchedule {
    pub fn slow_log(c: f64) -> Result<Self, OptimError> {
        Self::check(c)?;
        Ok(StepSchedule::SlowLog { c })
    }

    pub fn inverse(c: f64) -> Result<Self, OptimError> {
        Self::check(c)?;
        Ok(StepSchedule::Inverse { c })
    }

    fn check(c: f64) -> Result<(), OptimError> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(OptimError::InvalidArgument(format!("schedule constant {c} must be > 0")));
        }
        Ok(())
    }

    /// Step size at iteration `t >= 0`. The `t + 2` offset keeps
    /// `ln(t + 2) >= ln 2 > 0`, so there is no singularity.
    pub fn eval(&self, t: usize) -> f64 {
        let s = (t + 2) as f64;
        match self {
            StepSchedule::SlowLog { c } => c / (s * s.ln()),
            StepSchedule::Inverse { c } => c / s,
        }
    }

    pub fn constant(&self) -> f64 {
        match self {
            StepSchedule::SlowLog { c } | StepSchedule::Inverse { c } => *c,
        }
    }

    /// Whether the schedule constant satisfies `c < 1/L`. Violations are a
    /// warning, not an error: exploratory runs are allowed but get flagged.
    pub fn satisfies_smoothness(&self, smoothness: f64) -> bool {
        self.constant() < 1.0 / smoothness
    }
}

/// A pre-drawn sequence of uniform sample indices.
#[derive(Debug, Clone, Serialize)]
pub struct SamplePath {
    pub seed: u64,
    pub n: usize,
    indices: Vec<u32>,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn index(&self, t: usize) -> usize {
        self.indices[t] as usize
    }

    /// Copy of the path with position `t0` replaced by `new_index`.
    pub fn with_replaced(&self, t0: usize, new_index: usize) -> Result<SamplePath, OptimError> {
        if t0 >= self.len() {
            return Err(OptimError::InvalidArgument(format!(
                "replacement position {t0} out of range (path length {})",
                self.len()
            )));
        }
        if new_index >= self.n {
            return Err(OptimError::InvalidArgument(format!(
                "replacement index {new_index} out of range (n = {})",
                self.n
            )));
        }
        let mut indices = self.indices.clone();
        indices[t0] = new_index as u32;
        Ok(SamplePath { seed: self.seed, n: self.n, indices })
    }
}

/// Draw `len` i.i.d. uniform indices on `{0, .., n-1}`.
pub fn draw_path(n: usize, len: usize, seed: u64) -> Result<SamplePath, OptimError> {
    if n == 0 {
        return Err(OptimError::InvalidArgument("need n >= 1 to draw a path".into()));
    }
    if len == 0 {
        return Err(OptimError::InvalidArgument("need a path of length >= 1".into()));
    }
    let mut rng = seeds::rng(seed);
    let indices = (0..len).map(|_| rng.random_range(0..n) as u32).collect();
    Ok(SamplePath { seed, n, indices })
}

/// Recording and monitoring options for a run.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Store the iterate every `thin` steps (plus the final iterate).
    pub thin: usize,
    /// Also record the empirical risk at the stored steps.
    pub record_risk: bool,
    /// Invalidate the trajectory when `||w_t||` exceeds this.
    pub radius_limit: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { thin: 10, record_risk: false, radius_limit: None }
    }
}

/// Dense per-step record: step size, sampled index and the norm of the
/// sampled stochastic gradient.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub alpha: f64,
    pub index: u32,
    pub grad_norm: f64,
}

/// One optimization run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// Thinned iterates `(t, w_t)`, always including the final iterate.
    pub stored: Vec<(usize, Vec<f64>)>,
    pub steps: Vec<StepRecord>,
    /// Empirical risk at the stored steps, when requested.
    pub risk_samples: Vec<(usize, f64)>,
    /// Step at which the radius limit was exceeded; the trial is invalid.
    pub stopped_at: Option<usize>,
}

struct Runner<'a> {
    model: &'a LossModel,
    ds: &'a Dataset,
    reg: Option<&'a Regularizer>,
    schedule: StepSchedule,
    opts: RunOptions,
    w: Vec<f64>,
    traj: Trajectory,
}

impl<'a> Runner<'a> {
    fn new(
        model: &'a LossModel,
        ds: &'a Dataset,
        reg: Option<&'a Regularizer>,
        schedule: StepSchedule,
        w0: &[f64],
        opts: RunOptions,
        horizon: usize,
    ) -> Result<Self, OptimError> {
        if w0.len() != model.param_dim() {
            return Err(OptimError::InvalidArgument(format!(
                "w0 has dimension {}, model needs {}",
                w0.len(),
                model.param_dim()
            )));
        }
        if opts.thin == 0 {
            return Err(OptimError::InvalidArgument("thin must be >= 1".into()));
        }
        let traj = Trajectory {
            start: w0.to_vec(),
            end: Vec::new(),
            stored: Vec::with_capacity(horizon / opts.thin + 2),
            steps: Vec::with_capacity(horizon),
            risk_samples: Vec::new(),
            stopped_at: None,
        };
        Ok(Runner { model, ds, reg, schedule, opts, w: w0.to_vec(), traj })
    }

    fn record(&mut self, t: usize) -> Result<(), OptimError> {
        self.traj.stored.push((t, self.w.clone()));
        if self.opts.record_risk {
            let risk = models::empirical_risk(self.model, self.ds, &self.w)?;
            self.traj.risk_samples.push((t, risk));
        }
        Ok(())
    }

    /// Advance one step; returns false when the radius limit was exceeded.
    fn step(&mut self, t: usize, sample_index: usize) -> Result<bool, OptimError> {
        let alpha = self.schedule.eval(t);
        let g = models::grad(self.model, &self.w, self.ds.sample(sample_index))?;
        self.traj.steps.push(StepRecord {
            alpha,
            index: sample_index as u32,
            grad_norm: linalg::norm(&g),
        });
        linalg::add_scaled(&mut self.w, -alpha, &g);
        if let Some(reg) = self.reg {
            self.w = proxreg::prox(reg, &self.w, alpha)?;
        }
        if self.w.iter().any(|v| !v.is_finite()) {
            return Err(OptimError::Diverged { step: t });
        }
        if let Some(limit) = self.opts.radius_limit {
            if linalg::norm(&self.w) > limit {
                self.traj.stopped_at = Some(t);
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn finish(mut self, t: usize) -> Result<Trajectory, OptimError> {
        if self.traj.stored.last().map(|(s, _)| *s) != Some(t) {
            self.record(t)?;
        }
        self.traj.end = self.w;
        Ok(self.traj)
    }
}

fn run_inner(
    model: &LossModel,
    ds: &Dataset,
    reg: Option<&Regularizer>,
    schedule: StepSchedule,
    path: &SamplePath,
    w0: &[f64],
    opts: RunOptions,
) -> Result<Trajectory, OptimError> {
    if path.n != ds.len() {
        return Err(OptimError::InvalidArgument(format!(
            "path drawn for n = {}, dataset has {}",
            path.n,
            ds.len()
        )));
    }
    let horizon = path.len();
    let mut runner = Runner::new(model, ds, reg, schedule, w0, opts, horizon)?;
    for t in 0..horizon {
        if t % opts.thin == 0 {
            runner.record(t)?;
        }
        if !runner.step(t, path.index(t))? {
            return runner.finish(t + 1);
        }
    }
    runner.finish(horizon)
}

/// Plain SGD: `w_{t+1} = w_t - alpha_t grad(w_t; z_{xi_t})`.
pub fn run_sgd(
    model: &LossModel,
    ds: &Dataset,
    schedule: StepSchedule,
    path: &SamplePath,
    w0: &[f64],
    opts: RunOptions,
) -> Result<Trajectory, OptimError> {
    run_inner(model, ds, None, schedule, path, w0, opts)
}

/// Proximal SGD: `w_{t+1} = prox(w_t - alpha_t grad(w_t; z_{xi_t}), alpha_t)`.
pub fn run_prox_sgd(
    model: &LossModel,
    ds: &Dataset,
    reg: &Regularizer,
    schedule: StepSchedule,
    path: &SamplePath,
    w0: &[f64],
    opts: RunOptions,
) -> Result<Trajectory, OptimError> {
    run_inner(model, ds, Some(reg), schedule, path, w0, opts)
}

/// Result of advancing two trajectories on a perturbed dataset pair with a
/// shared sample path and shared initialization.
#[derive(Debug, Clone)]
pub struct CoupledRunResult {
    /// `delta_t = ||w_{t,S} - w_{t,Sbar}||` for `t = 0..=T`.
    pub delta: Vec<f64>,
    /// First step whose sampled index equals the replaced index.
    pub first_hit: Option<usize>,
    /// `||grad l(w_{t,S}; z_0)||` per step, `z_0` the base sample at the
    /// replaced position.
    pub grad0_base: Vec<f64>,
    /// `||grad l(w_{t,Sbar}; z_0')||` per step, `z_0'` the fresh sample.
    pub grad0_replaced: Vec<f64>,
    /// The base-dataset trajectory (carries stored iterates and records).
    pub base: Trajectory,
    pub replaced_end: Vec<f64>,
    /// Step at which either trajectory left the radius ball.
    pub stopped_at: Option<usize>,
}

/// Run SGD (or proximal SGD when `reg` is given) on both datasets of the
/// pair with the same sample path, schedule and initialization.
pub fn run_coupled(
    model: &LossModel,
    pair: &PerturbedPair,
    schedule: StepSchedule,
    path: &SamplePath,
    w0: &[f64],
    reg: Option<&Regularizer>,
    opts: RunOptions,
) -> Result<CoupledRunResult, OptimError> {
    if path.n != pair.base.len() {
        return Err(OptimError::InvalidArgument(format!(
            "path drawn for n = {}, dataset has {}",
            path.n,
            pair.base.len()
        )));
    }
    let horizon = path.len();
    let z0_base = pair.base.sample(pair.replaced_index);
    let z0_replaced = pair.replaced.sample(pair.replaced_index);
    let mut base = Runner::new(model, &pair.base, reg, schedule, w0, opts, horizon)?;
    let mut other = Runner::new(model, &pair.replaced, reg, schedule, w0, opts, horizon)?;
    let mut delta = Vec::with_capacity(horizon + 1);
    let mut grad0_base = Vec::with_capacity(horizon);
    let mut grad0_replaced = Vec::with_capacity(horizon);
    let mut first_hit = None;
    delta.push(0.0);
    let mut stopped_at = None;
    let mut executed = horizon;
    for t in 0..horizon {
        if t % opts.thin == 0 {
            base.record(t)?;
        }
        grad0_base.push(linalg::norm(&models::grad(model, &base.w, z0_base)?));
        grad0_replaced.push(linalg::norm(&models::grad(model, &other.w, z0_replaced)?));
        let idx = path.index(t);
        if idx == pair.replaced_index && first_hit.is_none() {
            first_hit = Some(t);
        }
        let ok_base = base.step(t, idx)?;
        let ok_other = other.step(t, idx)?;
        delta.push(linalg::dist(&base.w, &other.w));
        if !ok_base || !ok_other {
            stopped_at = Some(t);
            executed = t + 1;
            break;
        }
    }
    let base_traj = base.finish(executed)?;
    let other_traj = other.finish(executed)?;
    Ok(CoupledRunResult {
        delta,
        first_hit,
        grad0_base,
        grad0_replaced,
        base: base_traj,
        replaced_end: other_traj.end,
        stopped_at,
    })
}

/// Result of coupling a run to a copy whose sample path differs at one step.
#[derive(Debug, Clone)]
pub struct PathPerturbedRun {
    /// `||w_t - w_t'||` for `t = 0..=T`.
    pub delta: Vec<f64>,
    pub end_base: Vec<f64>,
    pub end_perturbed: Vec<f64>,
    pub stopped_at: Option<usize>,
}

/// Run twice on the same dataset with paths differing only at `t0`, where
/// the perturbed path samples `new_index` instead.
#[allow(clippy::too_many_arguments)]
pub fn run_path_perturbed(
    model: &LossModel,
    ds: &Dataset,
    reg: Option<&Regularizer>,
    schedule: StepSchedule,
    path: &SamplePath,
    t0: usize,
    new_index: usize,
    w0: &[f64],
    opts: RunOptions,
) -> Result<PathPerturbedRun, OptimError> {
    let perturbed = path.with_replaced(t0, new_index)?;
    if path.n != ds.len() {
        return Err(OptimError::InvalidArgument(format!(
            "path drawn for n = {}, dataset has {}",
            path.n,
            ds.len()
        )));
    }
    let horizon = path.len();
    let mut a = Runner::new(model, ds, reg, schedule, w0, opts, horizon)?;
    let mut b = Runner::new(model, ds, reg, schedule, w0, opts, horizon)?;
    let mut delta = Vec::with_capacity(horizon + 1);
    delta.push(0.0);
    let mut stopped_at = None;
    let mut executed = horizon;
    for t in 0..horizon {
        let ok_a = a.step(t, path.index(t))?;
        let ok_b = b.step(t, perturbed.index(t))?;
        delta.push(linalg::dist(&a.w, &b.w));
        if !ok_a || !ok_b {
            stopped_at = Some(t);
            executed = t + 1;
            break;
        }
    }
    let ta = a.finish(executed)?;
    let tb = b.finish(executed)?;
    Ok(PathPerturbedRun { delta, end_base: ta.end, end_perturbed: tb.end, stopped_at })
}

/// Helper used by tests and experiments: a random index different from
/// `avoid`, uniform over the rest.
pub fn random_other_index(n: usize, avoid: usize, seed: u64) -> usize {
    let mut rng = seeds::rng(seed);
    loop {
        let idx = rng.random_range(0..n);
        if idx != avoid || n == 1 {
            return idx;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{replace_one, synth_gaussian, Dataset, Provenance, Sample};
    use crate::models::constants;

    #[test]
    fn schedule_values() {
        let inv = StepSchedule::inverse(0.3).unwrap();
        assert!((inv.eval(1) - 0.1).abs() < 1e-15);
        let slow = StepSchedule::slow_log(0.5).unwrap();
        // 0.5 / (2 ln 2)
        assert!((slow.eval(0) - 0.36067376022224085).abs() < 1e-15);
    }

    #[test]
    fn schedules_are_nonincreasing() {
        for sched in [StepSchedule::slow_log(1.7).unwrap(), StepSchedule::inverse(2.3).unwrap()] {
            let mut prev = sched.eval(0);
            for t in 1..1_000_000 {
                let a = sched.eval(t);
                assert!(a <= prev && a > 0.0, "{sched:?} not monotone at t={t}");
                prev = a;
            }
        }
    }

    #[test]
    fn path_singleton_support() {
        let path = draw_path(1, 100, 3).unwrap();
        assert!(path.indices().iter().all(|&i| i == 0));
    }

    #[test]
    fn path_frequencies_concentrate() {
        let n = 10;
        let len = 100_000;
        let path = draw_path(n, len, 99).unwrap();
        let mut counts = vec![0usize; n];
        for &i in path.indices() {
            counts[i as usize] += 1;
        }
        let tol = 3.0 * (len as f64 * 0.1 * 0.9).sqrt() / len as f64;
        for c in counts {
            let freq = c as f64 / len as f64;
            assert!((freq - 0.1).abs() <= tol, "frequency {freq} outside {tol} of 0.1");
        }
    }

    #[test]
    fn path_is_deterministic() {
        let a = draw_path(7, 1000, 5).unwrap();
        let b = draw_path(7, 1000, 5).unwrap();
        assert_eq!(a.indices(), b.indices());
    }

    #[test]
    fn sgd_fixed_point_at_interpolation() {
        // <w0, x> = y for the single sample, so every gradient vanishes.
        let ds = Dataset::new(vec![Sample::new(vec![1.0, 0.0], 2.0)], 2, Provenance::manual()).unwrap();
        let model = LossModel::least_squares(2);
        let path = draw_path(1, 200, 1).unwrap();
        let sched = StepSchedule::inverse(0.5).unwrap();
        let traj = run_sgd(&model, &ds, sched, &path, &[2.0, -3.0], RunOptions::default()).unwrap();
        assert_eq!(traj.end, vec![2.0, -3.0]);
    }

    #[test]
    fn sgd_matches_scalar_recursion() {
        // 1D least squares with x = 1, y = 0: w_{t+1} = (1 - alpha_t) w_t.
        let ds = Dataset::new(vec![Sample::new(vec![1.0], 0.0)], 1, Provenance::manual()).unwrap();
        let model = LossModel::least_squares(1);
        let horizon = 500;
        let path = draw_path(1, horizon, 1).unwrap();
        let sched = StepSchedule::inverse(0.9).unwrap();
        let w0 = 1.5;
        let traj = run_sgd(&model, &ds, sched, &path, &[w0], RunOptions::default()).unwrap();
        let mut expected = w0;
        for t in 0..horizon {
            expected *= 1.0 - sched.eval(t);
        }
        assert!((traj.end[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn runs_are_bit_identical() {
        let ds = synth_gaussian(50, 4, 1.0, 8).unwrap();
        let model = LossModel::logistic(4);
        let path = draw_path(50, 1000, 77).unwrap();
        let sched = StepSchedule::slow_log(1.0).unwrap();
        let a = run_sgd(&model, &ds, sched, &path, &vec![0.0; 4], RunOptions::default()).unwrap();
        let b = run_sgd(&model, &ds, sched, &path, &vec![0.0; 4], RunOptions::default()).unwrap();
        assert_eq!(a.end, b.end);
        assert_eq!(a.stored.len(), b.stored.len());
        for (x, y) in a.stored.iter().zip(&b.stored) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn prox_sgd_contracts_zero_gradient_model() {
        // All-zero features: every stochastic gradient is zero, so the
        // ridge prox drives w to zero geometrically.
        let ds = Dataset::new(vec![Sample::new(vec![0.0, 0.0], 0.0)], 2, Provenance::manual()).unwrap();
        let model = LossModel::least_squares(2);
        let reg = Regularizer::ridge(2.0).unwrap();
        let horizon = 300;
        let path = draw_path(1, horizon, 1).unwrap();
        let sched = StepSchedule::inverse(0.7).unwrap();
        let w0 = vec![3.0, -1.0];
        let traj = run_prox_sgd(&model, &ds, &reg, sched, &path, &w0, RunOptions::default()).unwrap();
        let mut factor = 1.0;
        for t in 0..horizon {
            factor /= 1.0 + sched.eval(t) * reg.weight();
        }
        assert!((traj.end[0] - 3.0 * factor).abs() < 1e-12);
        assert!((traj.end[1] - (-factor)).abs() < 1e-12);
    }

    #[test]
    fn prox_sgd_with_vanishing_weight_matches_sgd() {
        let ds = synth_gaussian(30, 3, 1.0, 4).unwrap();
        let model = LossModel::logistic(3);
        let reg = Regularizer::ridge(1e-12).unwrap();
        let path = draw_path(30, 500, 6).unwrap();
        let sched = StepSchedule::inverse(1.0).unwrap();
        let plain = run_sgd(&model, &ds, sched, &path, &vec![0.0; 3], RunOptions::default()).unwrap();
        let proxed =
            run_prox_sgd(&model, &ds, &reg, sched, &path, &vec![0.0; 3], RunOptions::default()).unwrap();
        assert!(linalg::dist(&plain.end, &proxed.end) < 1e-6);
    }

    #[test]
    fn coupled_identical_pair_has_zero_delta() {
        let ds = synth_gaussian(20, 3, 1.0, 15).unwrap();
        let pair = replace_one(&ds, ds.sample(0).clone()).unwrap();
        let model = LossModel::logistic(3);
        let path = draw_path(20, 400, 9).unwrap();
        let sched = StepSchedule::slow_log(1.0).unwrap();
        let run =
            run_coupled(&model, &pair, sched, &path, &vec![0.0; 3], None, RunOptions::default()).unwrap();
        assert!(run.delta.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn coupled_delta_zero_until_first_hit_and_bounded_growth() {
        let ds = synth_gaussian(25, 3, 1.0, 16).unwrap();
        let fresh = crate::data::fresh_gaussian_sample(3, 1.0, 161);
        let pair = replace_one(&ds, fresh).unwrap();
        let model = LossModel::logistic(3);
        let consts = constants(&model, &pair.base, 10.0).unwrap();
        let path = draw_path(25, 600, 10).unwrap();
        let sched = StepSchedule::slow_log(1.0).unwrap();
        let run =
            run_coupled(&model, &pair, sched, &path, &vec![0.0; 3], None, RunOptions::default()).unwrap();
        let hit = run.first_hit.expect("600 draws on 25 samples hit index 0");
        for t in 0..=hit {
            assert_eq!(run.delta[t], 0.0, "delta nonzero before first hit at t={t}");
        }
        // Pathwise recursion on non-hit steps, and the two-gradient bound
        // on hit steps.
        for t in 0..path.len() {
            let alpha = sched.eval(t);
            let bound = if path.index(t) != 0 {
                (1.0 + alpha * consts.smoothness) * run.delta[t]
            } else {
                run.delta[t] + alpha * (run.grad0_base[t] + run.grad0_replaced[t])
            };
            assert!(
                run.delta[t + 1] <= bound + 1e-9,
                "per-step bound violated at t={t}: {} > {}",
                run.delta[t + 1],
                bound
            );
        }
    }

    #[test]
    fn coupled_prox_runs_contract_faster() {
        let ds = synth_gaussian(25, 3, 1.0, 18).unwrap();
        let fresh = crate::data::fresh_gaussian_sample(3, 1.0, 181);
        let pair = replace_one(&ds, fresh).unwrap();
        let model = LossModel::logistic(3);
        let consts = constants(&model, &pair.base, 10.0).unwrap();
        let reg = Regularizer::ridge(3.0 * consts.smoothness).unwrap();
        let path = draw_path(25, 600, 12).unwrap();
        let sched = StepSchedule::inverse(1.0).unwrap();
        let run = run_coupled(&model, &pair, sched, &path, &vec![0.0; 3], Some(&reg), RunOptions::default())
            .unwrap();
        for t in 0..path.len() {
            if path.index(t) != 0 {
                let alpha = sched.eval(t);
                let factor = (1.0 + alpha * consts.smoothness) / (1.0 + alpha * reg.weight());
                assert!(
                    run.delta[t + 1] <= factor * run.delta[t] + 1e-9,
                    "prox per-step bound violated at t={t}"
                );
            }
        }
    }

    #[test]
    fn path_perturbed_zero_when_replacement_matches() {
        let ds = synth_gaussian(15, 2, 1.0, 20).unwrap();
        let model = LossModel::logistic(2);
        let path = draw_path(15, 200, 21).unwrap();
        let t0 = 50;
        let sched = StepSchedule::inverse(1.0).unwrap();
        let run = run_path_perturbed(
            &model,
            &ds,
            None,
            sched,
            &path,
            t0,
            path.index(t0),
            &vec![0.0; 2],
            RunOptions::default(),
        )
        .unwrap();
        assert!(run.delta.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn path_perturbed_initial_jump_is_bounded() {
        let ds = synth_gaussian(15, 2, 1.0, 22).unwrap();
        let model = LossModel::logistic(2);
        let consts = constants(&model, &ds, 10.0).unwrap();
        let path = draw_path(15, 200, 23).unwrap();
        let t0 = 40;
        let new_index = random_other_index(15, path.index(t0), 24);
        let sched = StepSchedule::inverse(1.0).unwrap();
        let run = run_path_perturbed(
            &model,
            &ds,
            None,
            sched,
            &path,
            t0,
            new_index,
            &vec![0.0; 2],
            RunOptions::default(),
        )
        .unwrap();
        for t in 0..=t0 {
            assert_eq!(run.delta[t], 0.0);
        }
        let bound = 2.0 * sched.eval(t0) * consts.grad_bound;
        assert!(run.delta[t0 + 1] <= bound + 1e-9);
    }

    #[test]
    fn radius_limit_marks_trajectory_stopped() {
        let ds = Dataset::new(vec![Sample::new(vec![1.0], 10.0)], 1, Provenance::manual()).unwrap();
        let model = LossModel::least_squares(1);
        let path = draw_path(1, 100, 1).unwrap();
        let sched = StepSchedule::inverse(0.9).unwrap();
        let opts = RunOptions { radius_limit: Some(0.5), ..RunOptions::default() };
        let traj = run_sgd(&model, &ds, sched, &path, &[0.0], opts).unwrap();
        assert!(traj.stopped_at.is_some());
        assert!(traj.steps.len() <= 100);
    }
}
