//! Per-sample loss models and their constants.
//!
//! Three families are supported: logistic loss, least squares, and a tiny
//! tanh MLP with squared error. All three have nonnegative loss and an
//! analytic gradient. [`constants`] certifies the smoothness constant `L`,
//! the gradient-norm/loss-Lipschitz bound `sigma` and the loss bound `M` on
//! a stated parameter ball: closed forms for logistic and least squares,
//! sampled estimates (inflated by a 1.5 safety factor and flagged
//! `estimated`) for the MLP.
//!
//! The tanh activation is deliberate: the smoothness assumption needs a
//! Lipschitz gradient, which ReLU lacks, so the MLP family is a smooth
//! surrogate for ReLU networks.

use crate::data::{Dataset, Sample};
use crate::linalg;
use crate::seeds;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid data: {0}")]
    InvalidData(String),
}

/// Architecture of the tiny MLP: `input -> hidden... -> 1` with tanh on
/// hidden layers and a linear scalar output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlpArch {
    pub input: usize,
    pub hidden: Vec<usize>,
}

impl MlpArch {
    fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::new();
        let mut prev = self.input;
        for &h in &self.hidden {
            dims.push((prev, h));
            prev = h;
        }
        dims.push((prev, 1));
        dims
    }

    pub fn param_dim(&self) -> usize {
        self.layer_dims().iter().map(|(i, o)| o * (i + 1)).sum()
    }
}

/// A per-sample loss family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LossModel {
    /// `log(1 + exp(-y <w, x>))`.
    Logistic { dim: usize },
    /// `0.5 (<w, x> - y)^2`.
    LeastSquares { dim: usize },
    /// `0.5 (net(w, x) - y)^2` for the tanh MLP.
    TinyMlp(MlpArch),
}

impl LossModel {
    pub fn logistic(dim: usize) -> Self {
        LossModel::Logistic { dim }
    }

    pub fn least_squares(dim: usize) -> Self {
        LossModel::LeastSquares { dim }
    }

    pub fn tiny_mlp(input: usize, hidden: Vec<usize>) -> Self {
        LossModel::TinyMlp(MlpArch { input, hidden })
    }

    /// Dimension of the parameter vector.
    pub fn param_dim(&self) -> usize {
        match self {
            LossModel::Logistic { dim } | LossModel::LeastSquares { dim } => *dim,
            LossModel::TinyMlp(arch) => arch.param_dim(),
        }
    }

    /// Feature dimension the model consumes.
    pub fn data_dim(&self) -> usize {
        match self {
            LossModel::Logistic { dim } | LossModel::LeastSquares { dim } => *dim,
            LossModel::TinyMlp(arch) => arch.input,
        }
    }
}

/// Constants certified for a model on a dataset and parameter ball:
/// `smoothness` is the gradient-Lipschitz constant, `grad_bound` bounds both
/// the gradient norm and the loss Lipschitz constant, `loss_bound` bounds
/// the loss itself on the ball of the stated radius. `pl_constant` is the
/// gradient-dominance constant of the least-squares empirical risk.
#[derive(Debug, Clone, Serialize)]
pub struct Constants {
    pub smoothness: f64,
    pub grad_bound: f64,
    pub loss_bound: f64,
    pub pl_constant: Option<f64>,
    pub radius: f64,
    pub estimated: bool,
}

fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

fn check_dims(model: &LossModel, w: &[f64], z: &Sample) -> Result<(), ModelError> {
    if w.len() != model.param_dim() {
        return Err(ModelError::DimensionMismatch { expected: model.param_dim(), got: w.len() });
    }
    if z.dim() != model.data_dim() {
        return Err(ModelError::DimensionMismatch { expected: model.data_dim(), got: z.dim() });
    }
    Ok(())
}

/// Evaluate the per-sample loss.
pub fn loss(model: &LossModel, w: &[f64], z: &Sample) -> Result<f64, ModelError> {
    check_dims(model, w, z)?;
    Ok(match model {
        LossModel::Logistic { .. } => softplus(-z.label * linalg::dot(w, &z.features)),
        LossModel::LeastSquares { .. } => {
            let r = linalg::dot(w, &z.features) - z.label;
            0.5 * r * r
        }
        LossModel::TinyMlp(arch) => {
            let r = mlp_forward(arch, w, &z.features).output - z.label;
            0.5 * r * r
        }
    })
}

/// Analytic gradient of the per-sample loss in `w`.
pub fn grad(model: &LossModel, w: &[f64], z: &Sample) -> Result<Vec<f64>, ModelError> {
    check_dims(model, w, z)?;
    Ok(match model {
        LossModel::Logistic { .. } => {
            let margin = z.label * linalg::dot(w, &z.features);
            let coeff = -z.label * sigmoid(-margin);
            z.features.iter().map(|&x| coeff * x).collect()
        }
        LossModel::LeastSquares { .. } => {
            let r = linalg::dot(w, &z.features) - z.label;
            z.features.iter().map(|&x| r * x).collect()
        }
        LossModel::TinyMlp(arch) => mlp_grad(arch, w, z),
    })
}

/// Empirical risk `f_S(w)`: the average per-sample loss.
pub fn empirical_risk(model: &LossModel, ds: &Dataset, w: &[f64]) -> Result<f64, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::InvalidData("empty dataset".into()));
    }
    let mut acc = 0.0;
    for z in ds.samples() {
        acc += loss(model, w, z)?;
    }
    Ok(acc / ds.len() as f64)
}

/// Full-batch gradient of the empirical risk.
pub fn empirical_grad(model: &LossModel, ds: &Dataset, w: &[f64]) -> Result<Vec<f64>, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::InvalidData("empty dataset".into()));
    }
    let mut acc = vec![0.0; w.len()];
    for z in ds.samples() {
        let g = grad(model, w, z)?;
        linalg::add_scaled(&mut acc, 1.0, &g);
    }
    let inv = 1.0 / ds.len() as f64;
    for v in &mut acc {
        *v *= inv;
    }
    Ok(acc)
}

struct MlpForward {
    output: f64,
    // Activations per layer, starting with the input.
    activations: Vec<Vec<f64>>,
}

fn mlp_forward(arch: &MlpArch, w: &[f64], x: &[f64]) -> MlpForward {
    let mut activations: Vec<Vec<f64>> = vec![x.to_vec()];
    let dims = arch.layer_dims();
    let mut offset = 0usize;
    for (l, &(din, dout)) in dims.iter().enumerate() {
        let last = l + 1 == dims.len();
        let prev = activations.last().expect("input activation present").clone();
        let mut out = vec![0.0; dout];
        for (o, out_o) in out.iter_mut().enumerate() {
            let row = &w[offset + o * din..offset + (o + 1) * din];
            let bias = w[offset + dout * din + o];
            let z = linalg::dot(row, &prev) + bias;
            *out_o = if last { z } else { z.tanh() };
        }
        offset += dout * (din + 1);
        activations.push(out);
    }
    let output = activations.last().expect("output layer present")[0];
    MlpForward { output, activations }
}

fn mlp_grad(arch: &MlpArch, w: &[f64], z: &Sample) -> Vec<f64> {
    let fw = mlp_forward(arch, w, &z.features);
    let dims = arch.layer_dims();
    let mut grad = vec![0.0; w.len()];
    // Residual of the squared loss is the output-layer delta (linear output).
    let mut delta = vec![fw.output - z.label];
    let mut offsets = Vec::with_capacity(dims.len());
    let mut off = 0usize;
    for &(din, dout) in &dims {
        offsets.push(off);
        off += dout * (din + 1);
    }
    for l in (0..dims.len()).rev() {
        let (din, dout) = dims[l];
        let offset = offsets[l];
        let input = &fw.activations[l];
        for o in 0..dout {
            for i in 0..din {
                grad[offset + o * din + i] = delta[o] * input[i];
            }
            grad[offset + dout * din + o] = delta[o];
        }
        if l > 0 {
            // Back-propagate through this layer's weights and the previous
            // tanh: d tanh = 1 - a^2.
            let mut prev_delta = vec![0.0; din];
            for (i, pd) in prev_delta.iter_mut().enumerate() {
                let mut acc = 0.0;
                for o in 0..dout {
                    acc += delta[o] * w[offset + o * din + i];
                }
                let a = fw.activations[l][i];
                *pd = acc * (1.0 - a * a);
            }
            delta = prev_delta;
        }
    }
    grad
}

fn uniform_in_ball(rng: &mut impl Rng, dim: usize, radius: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let n = linalg::norm(&v).max(1e-300);
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / dim as f64);
    for x in &mut v {
        *x *= r / n;
    }
    v
}

/// Certify Assumption-style constants on the ball of the given radius.
///
/// Logistic and least squares get closed forms from the data norms; the MLP
/// constants are sampled suprema over 10^4 random `(w, z)` pairs, inflated
/// by a 1.5 safety factor and flagged `estimated`.
pub fn constants(model: &LossModel, ds: &Dataset, radius: f64) -> Result<Constants, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::InvalidData("empty dataset".into()));
    }
    if !(radius > 0.0) {
        return Err(ModelError::InvalidData(format!("radius {radius} must be > 0")));
    }
    if ds.dim() != model.data_dim() {
        return Err(ModelError::DimensionMismatch { expected: model.data_dim(), got: ds.dim() });
    }
    match model {
        LossModel::Logistic { .. } => {
            // Per-sample curvature is y^2 ||x||^2 / 4 and the gradient norm
            // is |y| sigmoid ||x||; for +-1 labels these reduce to the
            // familiar ||x||^2 / 4 and ||x|| forms.
            let mut smoothness = 0.0f64;
            let mut grad_bound = 0.0f64;
            let mut reach = 0.0f64;
            for s in ds.samples() {
                let scaled = s.label.abs() * linalg::norm(&s.features);
                smoothness = smoothness.max(scaled * scaled / 4.0);
                grad_bound = grad_bound.max(scaled);
                reach = reach.max(scaled);
            }
            if grad_bound == 0.0 {
                return Err(ModelError::InvalidData("all feature vectors are zero".into()));
            }
            Ok(Constants {
                smoothness,
                grad_bound,
                loss_bound: softplus(radius * reach),
                pl_constant: None,
                radius,
                estimated: false,
            })
        }
        LossModel::LeastSquares { .. } => {
            let max_norm = ds.max_feature_norm();
            if max_norm == 0.0 {
                return Err(ModelError::InvalidData("all feature vectors are zero".into()));
            }
            let mut grad_bound = 0.0f64;
            let mut loss_bound = 0.0f64;
            for s in ds.samples() {
                let nx = linalg::norm(&s.features);
                let reach = radius * nx + s.label.abs();
                grad_bound = grad_bound.max(reach * nx);
                loss_bound = loss_bound.max(0.5 * reach * reach);
            }
            Ok(Constants {
                smoothness: max_norm * max_norm,
                grad_bound,
                loss_bound,
                pl_constant: Some(gradient_dominance_constant(ds)?),
                radius,
                estimated: false,
            })
        }
        LossModel::TinyMlp(_) => sampled_constants(model, ds, radius),
    }
}

/// Sampled suprema over random parameter/sample pairs, with 1.5 inflation.
fn sampled_constants(model: &LossModel, ds: &Dataset, radius: f64) -> Result<Constants, ModelError> {
    const TRIALS: usize = 20_000;
    let dw = model.param_dim();
    let mut rng = seeds::rng(seeds::derive(0x5EED_C057, seeds::DOMAIN_PROBE, dw as u64));
    let mut max_quotient = 0.0f64;
    let mut max_grad = 0.0f64;
    let mut max_loss = 0.0f64;
    for trial in 0..TRIALS {
        let w1 = uniform_in_ball(&mut rng, dw, radius);
        // Alternate far pairs and nearby pairs to probe both global and
        // local curvature.
        let w2 = if trial % 2 == 0 {
            uniform_in_ball(&mut rng, dw, radius)
        } else {
            let step = 1e-3 * radius;
            let dir = uniform_in_ball(&mut rng, dw, 1.0);
            let mut w2 = w1.clone();
            linalg::add_scaled(&mut w2, step, &dir);
            w2
        };
        let z = ds.sample(rng.random_range(0..ds.len()));
        let g1 = grad(model, &w1, z)?;
        let g2 = grad(model, &w2, z)?;
        let dw_norm = linalg::dist(&w1, &w2);
        if dw_norm > 1e-12 {
            max_quotient = max_quotient.max(linalg::dist(&g1, &g2) / dw_norm);
        }
        let g1_norm = linalg::norm(&g1);
        let l1 = loss(model, &w1, z)?;
        // Any valid smoothness constant of a nonnegative smooth loss also
        // satisfies ||grad||^2 <= 2 L loss, so the sampled ratio is a
        // second lower bound on L.
        if l1 > 1e-150 {
            max_quotient = max_quotient.max(g1_norm * g1_norm / (2.0 * l1));
        }
        max_grad = max_grad.max(g1_norm);
        max_loss = max_loss.max(l1);
    }
    Ok(Constants {
        smoothness: 1.5 * max_quotient,
        grad_bound: 1.5 * max_grad,
        loss_bound: 1.5 * max_loss,
        pl_constant: None,
        radius,
        estimated: true,
    })
}

/// Closed-form constants valid for every sample with feature norm at most
/// `max_feature_norm` and label magnitude at most `max_abs_label`, i.e. a
/// distribution-level envelope rather than a per-dataset certificate. Only
/// the closed-form families support this; the MLP needs sampled constants.
pub fn envelope_constants(
    model: &LossModel,
    max_feature_norm: f64,
    max_abs_label: f64,
    radius: f64,
) -> Result<Constants, ModelError> {
    if !(max_feature_norm > 0.0) || !(max_abs_label > 0.0) || !(radius > 0.0) {
        return Err(ModelError::InvalidData(
            "envelope constants need positive norm, label and radius bounds".into(),
        ));
    }
    match model {
        LossModel::Logistic { .. } => {
            let scaled = max_abs_label * max_feature_norm;
            Ok(Constants {
                smoothness: scaled * scaled / 4.0,
                grad_bound: scaled,
                loss_bound: softplus(radius * scaled),
                pl_constant: None,
                radius,
                estimated: false,
            })
        }
        LossModel::LeastSquares { .. } => {
            let reach = radius * max_feature_norm + max_abs_label;
            Ok(Constants {
                smoothness: max_feature_norm * max_feature_norm,
                grad_bound: reach * max_feature_norm,
                loss_bound: 0.5 * reach * reach,
                pl_constant: None,
                radius,
                estimated: false,
            })
        }
        LossModel::TinyMlp(_) => Err(ModelError::InvalidData(
            "the MLP has no closed-form envelope constants".into(),
        )),
    }
}

/// Gradient-dominance (PL) constant of the least-squares empirical risk:
/// the smallest nonzero eigenvalue of `(1/n) X^T X`.
pub fn gradient_dominance_constant(ds: &Dataset) -> Result<f64, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::InvalidData("empty dataset".into()));
    }
    let rows: Vec<Vec<f64>> = ds.samples().iter().map(|s| s.features.clone()).collect();
    let gram = linalg::SymMatrix::gram(&rows, ds.len() as f64);
    let (values, _) = linalg::sym_eigen(&gram);
    let max = values.last().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return Err(ModelError::InvalidData("all-zero design matrix".into()));
    }
    let tol = max * 1e-10;
    values
        .iter()
        .copied()
        .find(|&v| v > tol)
        .ok_or_else(|| ModelError::InvalidData("no nonzero eigenvalue".into()))
}

/// Result of probing the self-bounding inequality
/// `||grad|| <= sqrt(2 L loss)` at random `(w, z)` pairs.
#[derive(Debug, Clone, Serialize)]
pub struct SelfBoundingReport {
    pub worst_ratio: f64,
    pub trials: usize,
    pub pass: bool,
}

/// Probe the self-bounding inequality on `trials` random pairs with `w`
/// drawn uniformly from the certified ball. A pair with vanishing loss and
/// vanishing gradient contributes ratio 0.
pub fn check_self_bounding(
    model: &LossModel,
    ds: &Dataset,
    consts: &Constants,
    trials: usize,
    seed: u64,
) -> Result<SelfBoundingReport, ModelError> {
    let mut rng = seeds::rng(seed);
    let dw = model.param_dim();
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let w = uniform_in_ball(&mut rng, dw, consts.radius);
        let z = ds.sample(rng.random_range(0..ds.len()));
        let l = loss(model, &w, z)?;
        let g = linalg::norm(&grad(model, &w, z)?);
        let bound = (2.0 * consts.smoothness * l).sqrt();
        let ratio = if bound > 1e-150 {
            g / bound
        } else if g <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(ratio);
    }
    Ok(SelfBoundingReport { worst_ratio: worst, trials, pass: worst <= 1.0 + 1e-9 })
}

/// Central finite-difference gradient, used as the test oracle for the
/// analytic gradients.
pub fn finite_difference_grad(model: &LossModel, w: &[f64], z: &Sample) -> Result<Vec<f64>, ModelError> {
    let h = 1e-6 * (1.0 + linalg::norm(w));
    let mut out = vec![0.0; w.len()];
    let mut wp = w.to_vec();
    for i in 0..w.len() {
        let orig = wp[i];
        wp[i] = orig + h;
        let fp = loss(model, &wp, z)?;
        wp[i] = orig - h;
        let fm = loss(model, &wp, z)?;
        wp[i] = orig;
        out[i] = (fp - fm) / (2.0 * h);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_gaussian, Provenance};

    fn unit_feature_dataset() -> Dataset {
        // Hand-built unit-norm feature vectors.
        Dataset::new(
            vec![
                Sample::new(vec![1.0, 0.0], 1.0),
                Sample::new(vec![0.0, 1.0], -1.0),
                Sample::new(vec![(0.5f64).sqrt(), (0.5f64).sqrt()], 1.0),
            ],
            2,
            Provenance::manual(),
        )
        .unwrap()
    }

    #[test]
    fn logistic_loss_values() {
        let model = LossModel::logistic(2);
        let z = Sample::new(vec![0.3, -0.4], 1.0);
        let at_zero = loss(&model, &[0.0, 0.0], &z).unwrap();
        assert!((at_zero - std::f64::consts::LN_2).abs() < 1e-15);

        let z = Sample::new(vec![1.0, 0.0], 1.0);
        let v = loss(&model, &[1.0, 0.0], &z).unwrap();
        // log(1 + e^{-1}) to high precision.
        assert!((v - 0.3132616875182228).abs() < 1e-15);
    }

    #[test]
    fn least_squares_interpolation_is_zero() {
        let model = LossModel::least_squares(2);
        let z = Sample::new(vec![2.0, 1.0], 5.0);
        let w = [2.0, 1.0]; // <w, x> = 5 = y
        assert_eq!(loss(&model, &w, &z).unwrap(), 0.0);
        let g = grad(&model, &w, &z).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn logistic_grad_at_origin() {
        let model = LossModel::logistic(3);
        let z = Sample::new(vec![0.2, -0.7, 0.1], 1.0);
        let g = grad(&model, &[0.0; 3], &z).unwrap();
        for (gi, xi) in g.iter().zip(&z.features) {
            assert!((gi - (-xi / 2.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let model = LossModel::logistic(3);
        let z = Sample::new(vec![1.0, 2.0], 1.0);
        assert!(matches!(
            loss(&model, &[0.0; 3], &z),
            Err(ModelError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            grad(&model, &[0.0; 2], &Sample::new(vec![1.0, 2.0, 3.0], 1.0)),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn analytic_grad_matches_finite_differences() {
        let models = [
            LossModel::logistic(4),
            LossModel::least_squares(4),
            LossModel::tiny_mlp(4, vec![3, 2]),
        ];
        let mut rng = seeds::rng(31);
        for model in &models {
            for _ in 0..50 {
                let w: Vec<f64> =
                    (0..model.param_dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
                let x: Vec<f64> = (0..4).map(|_| StandardNormal.sample(&mut rng)).collect();
                let y = if rng.random::<f64>() < 0.5 { 1.0 } else { -1.0 };
                let z = Sample::new(x, y);
                let g = grad(model, &w, &z).unwrap();
                let fd = finite_difference_grad(model, &w, &z).unwrap();
                let err = linalg::dist(&g, &fd);
                let scale = linalg::norm(&g).max(1e-8);
                assert!(
                    err / scale < 1e-5,
                    "{model:?}: finite-difference mismatch {err} vs scale {scale}"
                );
            }
        }
    }

    #[test]
    fn logistic_constants_on_unit_norm_data() {
        let ds = unit_feature_dataset();
        let c = constants(&LossModel::logistic(2), &ds, 2.0).unwrap();
        assert!((c.smoothness - 0.25).abs() < 1e-15);
        assert!((c.grad_bound - 1.0).abs() < 1e-15);
        assert!((c.loss_bound - softplus(2.0)).abs() < 1e-15);
        assert!(!c.estimated);
    }

    #[test]
    fn least_squares_constants_single_sample() {
        let ds = Dataset::new(vec![Sample::new(vec![1.0, 0.0], 0.5)], 2, Provenance::manual()).unwrap();
        let c = constants(&LossModel::least_squares(2), &ds, 1.0).unwrap();
        assert!((c.smoothness - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mlp_constants_bound_fresh_lipschitz_probes() {
        let ds = synth_gaussian(40, 3, 1.0, 17).unwrap();
        let model = LossModel::tiny_mlp(3, vec![4]);
        let c = constants(&model, &ds, 2.0).unwrap();
        assert!(c.estimated);
        let mut rng = seeds::rng(1818);
        for _ in 0..1000 {
            let w1 = uniform_in_ball(&mut rng, model.param_dim(), 2.0);
            let w2 = uniform_in_ball(&mut rng, model.param_dim(), 2.0);
            let z = ds.sample(rng.random_range(0..ds.len()));
            let g1 = grad(&model, &w1, z).unwrap();
            let g2 = grad(&model, &w2, z).unwrap();
            let q = linalg::dist(&g1, &g2) / linalg::dist(&w1, &w2).max(1e-12);
            assert!(q <= c.smoothness, "Lipschitz probe {q} exceeds certified {}", c.smoothness);
            assert!(linalg::norm(&g1) <= c.grad_bound);
            assert!(loss(&model, &w1, z).unwrap() <= c.loss_bound);
        }
    }

    #[test]
    fn envelope_dominates_dataset_constants() {
        let ds = synth_gaussian(60, 4, 1.0, 99).unwrap();
        for model in [LossModel::logistic(4), LossModel::least_squares(4)] {
            let per_ds = constants(&model, &ds, 3.0).unwrap();
            let env = envelope_constants(&model, 1.0, 1.0, 3.0).unwrap();
            assert!(env.smoothness >= per_ds.smoothness);
            assert!(env.grad_bound >= per_ds.grad_bound);
            assert!(env.loss_bound >= per_ds.loss_bound);
        }
        assert!(envelope_constants(&LossModel::tiny_mlp(4, vec![2]), 1.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn pl_constant_identity_rows() {
        let n = 4;
        let samples: Vec<Sample> = (0..n)
            .map(|i| {
                let mut x = vec![0.0; n];
                x[i] = 1.0;
                Sample::new(x, 1.0)
            })
            .collect();
        let ds = Dataset::new(samples, n, Provenance::manual()).unwrap();
        let gamma = gradient_dominance_constant(&ds).unwrap();
        assert!((gamma - 1.0 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn pl_constant_repeated_unit_row() {
        let r = vec![(0.5f64).sqrt(), -(0.5f64).sqrt()];
        let samples: Vec<Sample> = (0..6).map(|_| Sample::new(r.clone(), 1.0)).collect();
        let ds = Dataset::new(samples, 2, Provenance::manual()).unwrap();
        let gamma = gradient_dominance_constant(&ds).unwrap();
        assert!((gamma - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pl_constant_rejects_zero_design() {
        let ds = Dataset::new(
            vec![Sample::new(vec![0.0, 0.0], 1.0)],
            2,
            Provenance::manual(),
        )
        .unwrap();
        assert!(gradient_dominance_constant(&ds).is_err());
    }

    #[test]
    fn pl_inequality_holds_at_random_points() {
        // f_S(w) - f_S* <= ||grad f_S(w)||^2 / (2 gamma), with f_S* from the
        // eigendecomposition oracle (minimum-norm solve of the normal
        // equations).
        let ds = synth_gaussian(60, 5, 1.0, 23).unwrap();
        let model = LossModel::least_squares(5);
        let gamma = gradient_dominance_constant(&ds).unwrap();
        let rows: Vec<Vec<f64>> = ds.samples().iter().map(|s| s.features.clone()).collect();
        let gram = linalg::SymMatrix::gram(&rows, ds.len() as f64);
        let (vals, vecs) = linalg::sym_eigen(&gram);
        let mut rhs = vec![0.0; 5];
        for s in ds.samples() {
            linalg::add_scaled(&mut rhs, s.label / ds.len() as f64, &s.features);
        }
        let tol = vals.last().unwrap() * 1e-10;
        let mut w_star = vec![0.0; 5];
        for (lam, v) in vals.iter().zip(&vecs) {
            if *lam > tol {
                let coef = linalg::dot(v, &rhs) / lam;
                linalg::add_scaled(&mut w_star, coef, v);
            }
        }
        let f_star = empirical_risk(&model, &ds, &w_star).unwrap();
        let mut rng = seeds::rng(4242);
        for _ in 0..1000 {
            let w: Vec<f64> = (0..5)
                .map(|_| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    3.0 * g
                })
                .collect();
            let f = empirical_risk(&model, &ds, &w).unwrap();
            let g = linalg::norm(&empirical_grad(&model, &ds, &w).unwrap());
            assert!(
                f - f_star <= g * g / (2.0 * gamma) + 1e-9,
                "PL inequality violated: excess {} vs {}",
                f - f_star,
                g * g / (2.0 * gamma)
            );
        }
    }

    #[test]
    fn self_bounding_logistic() {
        let ds = synth_gaussian(50, 4, 1.0, 29).unwrap();
        let model = LossModel::logistic(4);
        let c = constants(&model, &ds, 3.0).unwrap();
        let report = check_self_bounding(&model, &ds, &c, 10_000, 55).unwrap();
        assert!(report.pass, "worst ratio {}", report.worst_ratio);
    }

    #[test]
    fn self_bounding_least_squares_equality_in_1d() {
        // Single sample: L = ||x||^2, so the inequality is an equality.
        let ds = Dataset::new(vec![Sample::new(vec![0.8], 0.3)], 1, Provenance::manual()).unwrap();
        let model = LossModel::least_squares(1);
        let c = constants(&model, &ds, 2.0).unwrap();
        let report = check_self_bounding(&model, &ds, &c, 1000, 7).unwrap();
        assert!(report.pass);
        assert!((report.worst_ratio - 1.0).abs() < 1e-12, "expected equality, got {}", report.worst_ratio);
    }

    #[test]
    fn self_bounding_zero_loss_point() {
        // Interpolating least squares: loss and gradient both vanish.
        let ds = Dataset::new(vec![Sample::new(vec![1.0], 0.0)], 1, Provenance::manual()).unwrap();
        let model = LossModel::least_squares(1);
        let z = ds.sample(0);
        assert_eq!(loss(&model, &[0.0], z).unwrap(), 0.0);
        assert_eq!(linalg::norm(&grad(&model, &[0.0], z).unwrap()), 0.0);
    }
}
