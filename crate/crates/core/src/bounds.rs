//! Closed-form generalization-bound evaluators.
//!
//! Each evaluator takes a [`BoundInputs`] snapshot, validates the inputs it
//! consumes, and returns a [`BoundReport`] carrying the value, the outcome
//! of every assumption check, and flags. Hypothesis-style conditions (step
//! constant below `1/L`, gradient-dominance step range) are warnings so
//! exploratory runs stay possible; conditions without which a formula is
//! undefined (regularizer weight above the smoothness constant, the
//! high-probability step window) are hard errors. All logarithms are
//! natural, matching the step schedules.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("missing input: {0}")]
    MissingInput(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
}

/// Constants and estimates consumed by the bound evaluators.
///
/// `loss_bound`, `grad_bound` and `smoothness` are the certified loss cap,
/// gradient-norm bound and gradient-Lipschitz constant; `variance` is the
/// measured on-average stochastic-gradient variance; `initial_risk` is the
/// held-out estimate of the population risk at the initialization. Optional
/// fields feed the evaluators that need them.
#[derive(Debug, Clone, Serialize)]
pub struct BoundInputs {
    pub n: usize,
    pub horizon: usize,
    pub confidence: f64,
    pub loss_bound: f64,
    pub grad_bound: f64,
    pub smoothness: f64,
    pub step_c: f64,
    pub initial_risk: f64,
    pub variance: f64,
    pub pl_constant: Option<f64>,
    pub reg_weight: Option<f64>,
    pub min_risk: Option<f64>,
    pub initial_reg_risk: Option<f64>,
    pub stability: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub estimated_constants: bool,
}

impl BoundInputs {
    fn validate(&self) -> Result<(), BoundError> {
        if self.n == 0 {
            return Err(BoundError::InvalidInput("n must be >= 1".into()));
        }
        if self.horizon == 0 {
            return Err(BoundError::InvalidInput("horizon must be >= 1".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(BoundError::InvalidInput(format!(
                "confidence {} outside (0, 1)",
                self.confidence
            )));
        }
        for (name, v) in [
            ("loss_bound", self.loss_bound),
            ("grad_bound", self.grad_bound),
            ("smoothness", self.smoothness),
            ("step_c", self.step_c),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(BoundError::InvalidInput(format!("{name} = {v} must be > 0")));
            }
        }
        for (name, v) in [("initial_risk", self.initial_risk), ("variance", self.variance)] {
            if v < 0.0 || !v.is_finite() {
                return Err(BoundError::InvalidInput(format!("{name} = {v} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Outcome of one hypothesis check.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A bound value with its assumption checks, flags and input echo.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    pub checks: Vec<AssumptionCheck>,
    pub flags: Vec<String>,
    pub inputs: BoundInputs,
}

fn report(name: &str, value: f64, checks: Vec<AssumptionCheck>, inputs: &BoundInputs) -> BoundReport {
    let mut flags = Vec::new();
    if inputs.estimated_constants {
        flags.push("estimated-constants".to_string());
    }
    if checks.iter().any(|c| !c.passed) {
        flags.push("assumptions-violated".to_string());
    }
    BoundReport { name: name.to_string(), value, checks, flags, inputs: inputs.clone() }
}

fn smoothness_step_check(inputs: &BoundInputs) -> AssumptionCheck {
    let limit = 1.0 / inputs.smoothness;
    AssumptionCheck {
        name: "step constant below 1/L".into(),
        passed: inputs.step_c < limit,
        detail: format!("c = {} vs 1/L = {}", inputs.step_c, limit),
    }
}

/// Mean-square bound from measured stability:
/// `2 M^2 / n + 12 M sigma * stability`.
pub fn mean_square_bound(inputs: &BoundInputs) -> Result<BoundReport, BoundError> {
    inputs.validate()?;
    let delta_mean = inputs.stability.ok_or(BoundError::MissingInput("stability"))?;
    if delta_mean < 0.0 {
        return Err(BoundError::InvalidInput("stability must be >= 0".into()));
    }
    let n = inputs.n as f64;
    let value =
        2.0 * inputs.loss_bound.powi(2) / n + 12.0 * inputs.loss_bound * inputs.grad_bound * delta_mean;
    Ok(report("mean-square", value, Vec::new(), inputs))
}

/// Probabilistic bound for plain SGD with the slow-log schedule:
/// `sqrt((2 M^2 + 24 M sigma c sqrt(2 L f0 + nu2 / 2) ln T) / (n delta))`.
pub fn variance_prob_bound(inputs: &BoundInputs) -> Result<BoundReport, BoundError> {
    inputs.validate()?;
    let n = inputs.n as f64;
    let m = inputs.loss_bound;
    let grad_term = (2.0 * inputs.smoothness * inputs.initial_risk + 0.5 * inputs.variance).sqrt();
    let inner = 2.0 * m * m
        + 24.0 * m * inputs.grad_bound * inputs.step_c * grad_term * (inputs.horizon as f64).ln();
    let value = (inner / (n * inputs.confidence)).sqrt();
    Ok(report("variance-prob", value, vec![smoothness_step_check(inputs)], inputs))
}

fn pl_checks(inputs: &BoundInputs, gamma: f64) -> Vec<AssumptionCheck> {
    let limit = (1.0 / inputs.smoothness).min(1.0 / (2.0 * gamma));
    vec![
        smoothness_step_check(inputs),
        AssumptionCheck {
            name: "step constant below min(1/L, 1/(2 gamma))".into(),
            passed: inputs.step_c < limit,
            detail: format!("c = {} vs {}", inputs.step_c, limit),
        },
    ]
}

/// Mean-square bound under gradient dominance:
/// `2 M^2 / n + (24 M sigma c / n)(sqrt(2 L fstar) ln T + sqrt(2 L f0 + 2 nu2))`.
pub fn pl_mean_square_bound(inputs: &BoundInputs) -> Result<BoundReport, BoundError> {
    inputs.validate()?;
    let gamma = inputs.pl_constant.ok_or(BoundError::MissingInput("pl_constant"))?;
    let fstar = inputs.min_risk.ok_or(BoundError::MissingInput("min_risk"))?;
    if fstar < 0.0 {
        return Err(BoundError::InvalidInput("min_risk must be >= 0".into()));
    }
    let n = inputs.n as f64;
    let m = inputs.loss_bound;
    let value = 2.0 * m * m / n
        + 24.0 * m * inputs.grad_bound * inputs.step_c / n
            * ((2.0 * inputs.smoothness * fstar).sqrt() * (inputs.horizon as f64).ln()
                + (2.0 * inputs.smoothness * inputs.initial_risk + 2.0 * inputs.variance).sqrt());
    Ok(report("pl-mean-square", value, pl_checks(inputs, gamma), inputs))
}

/// Probabilistic version of the gradient-dominant bound: the square root of
/// [`pl_mean_square_bound`] divided by the confidence parameter, exactly as
/// the closed form prints it.
pub fn pl_prob_bound(inputs: &BoundInputs) -> Result<BoundReport, BoundError> {
    let ms = pl_mean_square_bound(inputs)?;
    let value = (ms.value / inputs.confidence).sqrt();
    Ok(report("pl-prob", value, ms.checks, inputs))
}

/// Probabilistic bound for proximal SGD with a strongly convex regularizer:
/// `sqrt((2 M^2 + (24 M sigma / (lambda - L)) sqrt(L phi0 + nu2)) / (n delta))`.
/// Horizon-free; requires `lambda > L`.
pub fn regularized_prob_bound(inputs: &BoundInputs) -> Result<BoundReport, BoundError> {
    inputs.validate()?;
    let lambda = inputs.reg_weight.ok_or(BoundError::MissingInput("reg_weight"))?;
    let phi0 = inputs.initial_reg_risk.ok_or(BoundError::MissingInput("initial_reg_risk"))?;
    if phi0 < 0.0 {
        return Err(BoundError::InvalidInput("initial_reg_risk must be >= 0".into()));
    }
    if lambda <= inputs.smoothness {
        return Err(BoundError::DomainViolation(format!(
            "regularizer weight {lambda} must exceed the smoothness constant {}",
            inputs.smoothness
        )));
    }
    let n = inputs.n as f64;
    let m = inputs.loss_bound;
    let inner = 2.0 * m * m
        + 24.0 * m * inputs.grad_bound / (lambda - inputs.smoothness)
            * (inputs.smoothness * phi0 + inputs.variance).sqrt();
    let value = (inner / (n * inputs.confidence)).sqrt();
    Ok(report("regularized-prob", value, vec![smoothness_step_check(inputs)], inputs))
}

/// Uniform-stability bound:
/// `2 beta + ((M + 4 n beta) / sqrt(2n) + sqrt(2T) rho) sqrt(ln(2/delta))`.
pub fn uniform_stability_bound(inputs: &BoundInputs) -> Result<BoundReport, BoundError> {
    inputs.validate()?;
    let beta = inputs.beta.ok_or(BoundError::MissingInput("beta"))?;
    let rho = inputs.rho.ok_or(BoundError::MissingInput("rho"))?;
    if beta < 0.0 || rho < 0.0 {
        return Err(BoundError::InvalidInput("beta and rho must be >= 0".into()));
    }
    let n = inputs.n as f64;
    let t = inputs.horizon as f64;
    let conf = (2.0 / inputs.confidence).ln().sqrt();
    let value = 2.0 * beta
        + ((inputs.loss_bound + 4.0 * n * beta) / (2.0 * n).sqrt() + (2.0 * t).sqrt() * rho) * conf;
    Ok(report("uniform-stability", value, Vec::new(), inputs))
}

/// High-probability bound for proximal SGD:
/// `(M / sqrt(n) + 4 sigma^2 / (sqrt(n)(lambda - L))
///   + 4 sigma^2 c / T^{c(lambda - L) - 1/2}) sqrt(ln(2/delta))`.
/// Requires `lambda > L` and `1/(2(lambda-L)) < c < 1/(lambda-L)`.
pub fn high_prob_bound(inputs: &BoundInputs) -> Result<BoundReport, BoundError> {
    inputs.validate()?;
    let lambda = inputs.reg_weight.ok_or(BoundError::MissingInput("reg_weight"))?;
    if lambda <= inputs.smoothness {
        return Err(BoundError::DomainViolation(format!(
            "regularizer weight {lambda} must exceed the smoothness constant {}",
            inputs.smoothness
        )));
    }
    let gap = lambda - inputs.smoothness;
    let (lo, hi) = (1.0 / (2.0 * gap), 1.0 / gap);
    if !(inputs.step_c > lo && inputs.step_c < hi) {
        return Err(BoundError::DomainViolation(format!(
            "step constant {} outside ({lo}, {hi})",
            inputs.step_c
        )));
    }
    let n = inputs.n as f64;
    let t = inputs.horizon as f64;
    let s2 = inputs.grad_bound * inputs.grad_bound;
    let value = (inputs.loss_bound / n.sqrt()
        + 4.0 * s2 / (n.sqrt() * gap)
        + 4.0 * s2 * inputs.step_c / t.powf(inputs.step_c * gap - 0.5))
        * (2.0 / inputs.confidence).ln().sqrt();
    Ok(report("high-prob", value, Vec::new(), inputs))
}

/// Diagnostic bounds on the on-average stochastic gradient norm at the
/// replaced sample.
#[derive(Debug, Clone, Serialize)]
pub struct GradNormBounds {
    /// `sqrt(2 L f0 + nu2 / 2)`, valid for any smooth nonnegative loss.
    pub nonconvex: f64,
    /// `sqrt(2 L fstar + (2 L f0 + 2 nu2) / t)`, the gradient-dominant
    /// refinement at iteration `t`.
    pub gradient_dominant: Option<f64>,
}

pub fn grad_norm_bounds(inputs: &BoundInputs, t: Option<usize>) -> Result<GradNormBounds, BoundError> {
    inputs.validate()?;
    let nonconvex =
        (2.0 * inputs.smoothness * inputs.initial_risk + 0.5 * inputs.variance).sqrt();
    let gradient_dominant = match t {
        None => None,
        Some(0) => return Err(BoundError::InvalidInput("t must be >= 1".into())),
        Some(t) => {
            let fstar = inputs.min_risk.ok_or(BoundError::MissingInput("min_risk"))?;
            Some(
                (2.0 * inputs.smoothness * fstar
                    + (2.0 * inputs.smoothness * inputs.initial_risk + 2.0 * inputs.variance)
                        / t as f64)
                    .sqrt(),
            )
        }
    };
    Ok(GradNormBounds { nonconvex, gradient_dominant })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_inputs() -> BoundInputs {
        BoundInputs {
            n: 1000,
            horizon: 10_000,
            confidence: 0.1,
            loss_bound: 1.0,
            grad_bound: 1.0,
            smoothness: 1.0,
            step_c: 0.1,
            initial_risk: 0.5,
            variance: 0.25,
            pl_constant: Some(0.5),
            reg_weight: Some(3.0),
            min_risk: Some(0.01),
            initial_reg_risk: Some(0.5),
            stability: Some(0.05),
            beta: Some(1e-3),
            rho: Some(1e-3),
            estimated_constants: false,
        }
    }

    // Frozen high-precision re-evaluations of the worked examples.

    #[test]
    fn mean_square_worked_example() {
        let mut inputs = base_inputs();
        inputs.n = 100;
        let r = mean_square_bound(&inputs).unwrap();
        assert!((r.value - 0.62).abs() < 1e-12);
        inputs.stability = Some(0.0);
        let r = mean_square_bound(&inputs).unwrap();
        assert!((r.value - 0.02).abs() < 1e-15);
        inputs.n = 200;
        let r2 = mean_square_bound(&inputs).unwrap();
        assert!((r2.value - 0.01).abs() < 1e-15, "doubling n halves the 2M^2/n term");
    }

    #[test]
    fn variance_prob_worked_example() {
        let r = variance_prob_bound(&base_inputs()).unwrap();
        assert!((r.value - 0.50443729920197344).abs() < 1e-12 * r.value);
        assert!(r.checks.iter().all(|c| c.passed));
        assert!(r.flags.is_empty());
    }

    #[test]
    fn variance_prob_degenerate_case() {
        let mut inputs = base_inputs();
        inputs.variance = 0.0;
        inputs.initial_risk = 0.0;
        let r = variance_prob_bound(&inputs).unwrap();
        let expected = (2.0f64 / (1000.0 * 0.1)).sqrt();
        assert!((r.value - expected).abs() < 1e-15);
    }

    #[test]
    fn pl_mean_square_worked_example() {
        let r = pl_mean_square_bound(&base_inputs()).unwrap();
        assert!((r.value - 0.0080654808756888963).abs() < 1e-12 * r.value);
        let mut inputs = base_inputs();
        inputs.min_risk = Some(0.0);
        let r0 = pl_mean_square_bound(&inputs).unwrap();
        // With fstar = 0 the log-T term vanishes.
        let expected = 2e-3 + 2.4e-3 * (2.0 * 0.5 + 2.0 * 0.25f64).sqrt();
        assert!((r0.value - expected).abs() < 1e-15);
    }

    #[test]
    fn pl_prob_worked_example() {
        let r = pl_prob_bound(&base_inputs()).unwrap();
        assert!((r.value - 0.28399790273325781).abs() < 1e-12 * r.value);
        let mut inputs = base_inputs();
        inputs.confidence = 0.99999;
        // As the confidence parameter rises toward 1 the value approaches
        // sqrt of the mean-square bound.
        let ms = pl_mean_square_bound(&inputs).unwrap();
        let p = pl_prob_bound(&inputs).unwrap();
        assert!((p.value - (ms.value / 0.99999).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn regularized_prob_worked_example() {
        let r = regularized_prob_bound(&base_inputs()).unwrap();
        assert!((r.value - 0.35202705642341275).abs() < 1e-12 * r.value);
        let mut inputs = base_inputs();
        inputs.variance = 0.0;
        inputs.initial_reg_risk = Some(0.0);
        let r = regularized_prob_bound(&inputs).unwrap();
        assert!((r.value - (2.0 / 100.0f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn regularized_prob_requires_weight_above_smoothness() {
        let mut inputs = base_inputs();
        inputs.reg_weight = Some(0.5);
        assert!(matches!(
            regularized_prob_bound(&inputs),
            Err(BoundError::DomainViolation(_))
        ));
    }

    #[test]
    fn uniform_stability_worked_example() {
        let r = uniform_stability_bound(&base_inputs()).unwrap();
        assert!((r.value - 0.44028606107832913).abs() < 1e-12 * r.value);
        let mut inputs = base_inputs();
        inputs.beta = Some(0.0);
        inputs.rho = Some(0.0);
        let r = uniform_stability_bound(&inputs).unwrap();
        let expected = 1.0 / 2000.0f64.sqrt() * (2.0f64 / 0.1).ln().sqrt();
        assert!((r.value - expected).abs() < 1e-15);
    }

    #[test]
    fn uniform_stability_is_linear_in_rho() {
        let mut inputs = base_inputs();
        inputs.rho = Some(0.0);
        let r0 = uniform_stability_bound(&inputs).unwrap();
        inputs.rho = Some(1e-2);
        let r1 = uniform_stability_bound(&inputs).unwrap();
        let slope = (r1.value - r0.value) / 1e-2;
        let expected = (2.0 * 10_000.0f64).sqrt() * (2.0f64 / 0.1).ln().sqrt();
        assert!((slope - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn high_prob_worked_example() {
        let mut inputs = base_inputs();
        inputs.step_c = 0.375;
        let r = high_prob_bound(&inputs).unwrap();
        assert!((r.value - 0.42382260654370196).abs() < 1e-12 * r.value);
    }

    #[test]
    fn high_prob_tail_term_decays_in_horizon() {
        let mut inputs = base_inputs();
        inputs.step_c = 0.375; // c (lambda - L) = 0.75
        let small = high_prob_bound(&inputs).unwrap();
        inputs.horizon = 100_000_000;
        let large = high_prob_bound(&inputs).unwrap();
        assert!(large.value < small.value);
        // At T = 1e8 the tail term is 4 sigma^2 c / T^{1/4} = 1.5 / 100.
        let conf = (2.0f64 / 0.1).ln().sqrt();
        let tail = large.value / conf - (1.0 / 1000.0f64.sqrt() + 4.0 / (1000.0f64.sqrt() * 2.0));
        assert!((tail - 1.5 / 100.0).abs() < 1e-12);
    }

    #[test]
    fn high_prob_rejects_step_outside_window() {
        let mut inputs = base_inputs();
        inputs.step_c = 0.1; // below 1/(2(lambda-L)) = 0.25
        assert!(matches!(high_prob_bound(&inputs), Err(BoundError::DomainViolation(_))));
        inputs.step_c = 0.75; // above 1/(lambda-L) = 0.5
        assert!(matches!(high_prob_bound(&inputs), Err(BoundError::DomainViolation(_))));
    }

    #[test]
    fn grad_norm_bounds_values() {
        let r = grad_norm_bounds(&base_inputs(), Some(100)).unwrap();
        assert!((r.nonconvex - 1.0606601717798212).abs() < 1e-14);
        assert!((r.gradient_dominant.unwrap() - 0.18708286933869708).abs() < 1e-14);
        let mut inputs = base_inputs();
        inputs.initial_risk = 0.0;
        inputs.variance = 0.0;
        let r = grad_norm_bounds(&inputs, None).unwrap();
        assert_eq!(r.nonconvex, 0.0);
        // The gradient-dominant bound tends to sqrt(2 L fstar) as t grows.
        let far = grad_norm_bounds(&base_inputs(), Some(1_000_000_000)).unwrap();
        let limit = (2.0f64 * 0.01).sqrt();
        assert!((far.gradient_dominant.unwrap() - limit).abs() < 1e-6);
    }

    #[test]
    fn missing_inputs_are_reported() {
        let mut inputs = base_inputs();
        inputs.stability = None;
        assert!(matches!(mean_square_bound(&inputs), Err(BoundError::MissingInput("stability"))));
        inputs = base_inputs();
        inputs.min_risk = None;
        assert!(matches!(
            pl_mean_square_bound(&inputs),
            Err(BoundError::MissingInput("min_risk"))
        ));
        inputs = base_inputs();
        inputs.beta = None;
        assert!(matches!(
            uniform_stability_bound(&inputs),
            Err(BoundError::MissingInput("beta"))
        ));
    }

    #[test]
    fn violated_hypotheses_flag_but_do_not_fail() {
        let mut inputs = base_inputs();
        inputs.step_c = 5.0; // c >= 1/L
        let r = variance_prob_bound(&inputs).unwrap();
        assert!(r.checks.iter().any(|c| !c.passed));
        assert!(r.flags.iter().any(|f| f == "assumptions-violated"));
    }

    #[test]
    fn estimated_constants_propagate_to_flags() {
        let mut inputs = base_inputs();
        inputs.estimated_constants = true;
        let r = variance_prob_bound(&inputs).unwrap();
        assert!(r.flags.iter().any(|f| f == "estimated-constants"));
    }

    #[test]
    fn variance_prob_ratio_in_horizon_matches_closed_form() {
        let inputs = base_inputs();
        let r1 = variance_prob_bound(&inputs).unwrap();
        let mut inputs4 = inputs.clone();
        inputs4.horizon = 4 * inputs.horizon;
        let r4 = variance_prob_bound(&inputs4).unwrap();
        let k = 24.0 * 0.1 * (2.0 * 0.5 + 0.5 * 0.25f64).sqrt();
        let predicted = ((2.0 + k * (40_000.0f64).ln()) / (2.0 + k * (10_000.0f64).ln())).sqrt();
        assert!(((r4.value / r1.value) - predicted).abs() < 1e-9);
    }

    #[test]
    fn regularized_prob_is_horizon_free() {
        let mut a = base_inputs();
        let r1 = regularized_prob_bound(&a).unwrap();
        a.horizon = 123_456;
        let r2 = regularized_prob_bound(&a).unwrap();
        assert_eq!(r1.value, r2.value);
    }

    #[test]
    fn pl_mean_square_below_variance_route_for_small_fstar() {
        // With a tiny minimum risk the gradient-dominant mean-square bound
        // undercuts the mean-square value implied by the plain-variance
        // stability term, across a small grid.
        for &t in &[100usize, 10_000, 1_000_000] {
            for &fstar in &[0.0, 1e-6, 1e-4] {
                let mut inputs = base_inputs();
                inputs.horizon = t;
                inputs.min_risk = Some(fstar);
                let pl = pl_mean_square_bound(&inputs).unwrap();
                let n = inputs.n as f64;
                let variance_route = 2.0 / n
                    + 24.0 * inputs.step_c / n
                        * (2.0 * inputs.initial_risk + 0.5 * inputs.variance).sqrt()
                        * (t as f64).ln();
                assert!(
                    pl.value <= variance_route,
                    "t={t} fstar={fstar}: {} > {variance_route}",
                    pl.value
                );
            }
        }
    }

    #[test]
    fn evaluators_are_monotone_in_each_input() {
        // Finite-difference sign checks on a randomized grid, per formula.
        let grids: Vec<BoundInputs> = (0..20)
            .map(|i| {
                let f = 1.0 + 0.13 * i as f64;
                BoundInputs {
                    n: 500 + 100 * i,
                    horizon: 5_000 + 1_000 * i,
                    confidence: 0.05 + 0.01 * i as f64,
                    loss_bound: 0.8 * f,
                    grad_bound: 0.9 * f,
                    smoothness: 0.5 * f,
                    step_c: 0.08 / f,
                    initial_risk: 0.4 * f,
                    variance: 0.2 * f,
                    pl_constant: Some(0.3 * f),
                    reg_weight: Some(2.0 * f),
                    min_risk: Some(0.01 * f),
                    initial_reg_risk: Some(0.4 * f),
                    stability: Some(0.03 * f),
                    beta: Some(1e-3 * f),
                    rho: Some(1e-3 * f),
                    estimated_constants: false,
                }
            })
            .collect();
        for inputs in &grids {
            // variance-prob: increasing in variance and horizon,
            // decreasing in n.
            let base = variance_prob_bound(inputs).unwrap().value;
            let mut up = inputs.clone();
            up.variance *= 1.01;
            assert!(variance_prob_bound(&up).unwrap().value > base);
            let mut up = inputs.clone();
            up.horizon *= 2;
            assert!(variance_prob_bound(&up).unwrap().value > base);
            let mut up = inputs.clone();
            up.n *= 2;
            assert!(variance_prob_bound(&up).unwrap().value < base);

            // regularized-prob: decreasing in the regularizer weight.
            let base = regularized_prob_bound(inputs).unwrap().value;
            let mut up = inputs.clone();
            up.reg_weight = Some(up.reg_weight.unwrap() * 1.5);
            assert!(regularized_prob_bound(&up).unwrap().value < base);

            // high-prob: decreasing in n and in horizon.
            let mut hp = inputs.clone();
            let gap = hp.reg_weight.unwrap() - hp.smoothness;
            hp.step_c = 0.75 / gap;
            let base = high_prob_bound(&hp).unwrap().value;
            let mut up = hp.clone();
            up.n *= 2;
            assert!(high_prob_bound(&up).unwrap().value < base);
            let mut up = hp.clone();
            up.horizon *= 2;
            assert!(high_prob_bound(&up).unwrap().value < base);

            // mean-square: increasing in stability.
            let base = mean_square_bound(inputs).unwrap().value;
            let mut up = inputs.clone();
            up.stability = Some(up.stability.unwrap() * 1.01);
            assert!(mean_square_bound(&up).unwrap().value > base);
        }
    }
}
