//! Strongly convex regularizers and their proximal mappings.
//!
//! A [`Regularizer`] is a weight `lambda > 0` times a 1-strongly-convex
//! nonnegative base function `h`:
//!
//! * ridge: `h(w) = 0.5 ||w||^2`;
//! * Tikhonov: `h(w) = 0.5 ||G w||^2`, with `G^T G >= I` enforced at
//!   construction by rescaling `G` when its smallest singular value is
//!   below one;
//! * elastic net: `h(w) = mu ||w||_1 + 0.5 ||w||^2` (strong convexity comes
//!   from the quadratic part alone).
//!
//! [`prox`] evaluates the proximal map of the *weighted* function
//! `lambda * h` at step `alpha`, i.e. `argmin_u lambda h(u) +
//! ||u - w||^2 / (2 alpha)`, matching the proximal-SGD step of the
//! regularized empirical risk. Strong convexity makes the map strictly
//! contractive with factor `1 / (1 + alpha lambda)`, which is the tested
//! contract. [`gradient_map`] is the proximal analogue of a gradient step
//! direction and is 1-Lipschitz in the gradient argument.

use crate::linalg::{self, SymMatrix};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProxError {
    #[error("step size {0} must be > 0")]
    InvalidStep(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid regularizer: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Serialize)]
enum RegKind {
    Ridge,
    Tikhonov {
        rows: Vec<Vec<f64>>,
        #[serde(skip)]
        gram: SymMatrix,
    },
    ElasticNet {
        l1_weight: f64,
    },
}

/// A weighted strongly convex regularizer `lambda * h`.
#[derive(Debug, Clone, Serialize)]
pub struct Regularizer {
    kind: RegKind,
    weight: f64,
    rescaled: bool,
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

impl Regularizer {
    pub fn ridge(weight: f64) -> Result<Self, ProxError> {
        Self::check_weight(weight)?;
        Ok(Regularizer { kind: RegKind::Ridge, weight, rescaled: false })
    }

    pub fn elastic_net(weight: f64, l1_weight: f64) -> Result<Self, ProxError> {
        Self::check_weight(weight)?;
        if l1_weight < 0.0 || !l1_weight.is_finite() {
            return Err(ProxError::InvalidArgument(format!(
                "elastic-net l1 weight {l1_weight} must be >= 0"
            )));
        }
        Ok(Regularizer { kind: RegKind::ElasticNet { l1_weight }, weight, rescaled: false })
    }

    /// Tikhonov regularizer from the rows of `G`. If the smallest singular
    /// value of `G` is below one, `G` is rescaled so that `G^T G >= I`
    /// holds and the `was_rescaled` flag is set; a rank-deficient `G` is
    /// rejected since no rescaling can make it 1-strongly convex.
    pub fn tikhonov(weight: f64, rows: Vec<Vec<f64>>) -> Result<Self, ProxError> {
        Self::check_weight(weight)?;
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(ProxError::InvalidArgument("Tikhonov matrix rows must share a nonzero length".into()));
        }
        let gram = SymMatrix::gram(&rows, 1.0);
        let (values, _) = linalg::sym_eigen(&gram);
        let min_eig = values.first().copied().unwrap_or(0.0);
        if min_eig <= 1e-12 {
            return Err(ProxError::InvalidArgument(
                "Tikhonov matrix is rank deficient; G^T G cannot be made >= I".into(),
            ));
        }
        let mut rows = rows;
        let mut rescaled = false;
        if min_eig < 1.0 {
            let scale = 1.0 / min_eig.sqrt();
            for row in &mut rows {
                for v in row {
                    *v *= scale;
                }
            }
            rescaled = true;
        }
        let gram = SymMatrix::gram(&rows, 1.0);
        Ok(Regularizer { kind: RegKind::Tikhonov { rows, gram }, weight, rescaled })
    }

    fn check_weight(weight: f64) -> Result<(), ProxError> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(ProxError::InvalidArgument(format!("weight {weight} must be > 0")));
        }
        Ok(())
    }

    /// The weight `lambda`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// True when the Tikhonov matrix had to be rescaled at construction.
    pub fn was_rescaled(&self) -> bool {
        self.rescaled
    }

    /// Value of the unweighted base function `h`.
    pub fn base_value(&self, w: &[f64]) -> f64 {
        match &self.kind {
            RegKind::Ridge => 0.5 * linalg::dot(w, w),
            RegKind::Tikhonov { rows, .. } => {
                0.5 * rows.iter().map(|r| linalg::dot(r, w).powi(2)).sum::<f64>()
            }
            RegKind::ElasticNet { l1_weight } => {
                l1_weight * w.iter().map(|v| v.abs()).sum::<f64>() + 0.5 * linalg::dot(w, w)
            }
        }
    }

    /// Value of the weighted regularizer `lambda * h`.
    pub fn value(&self, w: &[f64]) -> f64 {
        self.weight * self.base_value(w)
    }
}

/// Proximal map of `alpha * lambda * h` at `w`.
pub fn prox(reg: &Regularizer, w: &[f64], alpha: f64) -> Result<Vec<f64>, ProxError> {
    if !(alpha > 0.0) {
        return Err(ProxError::InvalidStep(alpha));
    }
    let al = alpha * reg.weight;
    Ok(match &reg.kind {
        RegKind::Ridge => w.iter().map(|&v| v / (1.0 + al)).collect(),
        RegKind::ElasticNet { l1_weight } => {
            let t = al * l1_weight;
            w.iter().map(|&v| soft_threshold(v, t) / (1.0 + al)).collect()
        }
        RegKind::Tikhonov { gram, .. } => {
            if gram.dim() != w.len() {
                return Err(ProxError::DimensionMismatch { expected: gram.dim(), got: w.len() });
            }
            // (I + alpha lambda G^T G) u = w, Cholesky plus iterative
            // refinement down to 1e-10 * ||w||.
            let n = w.len();
            let mut a = SymMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let v = al * gram.get(i, j) + if i == j { 1.0 } else { 0.0 };
                    a.set(i, j, v);
                }
            }
            let mut u = linalg::cholesky_solve(&a, w)
                .ok_or_else(|| ProxError::InvalidArgument("prox system is not positive definite".into()))?;
            let target = 1e-10 * linalg::norm(w);
            for _ in 0..5 {
                let au = a.mul_vec(&u);
                let resid: Vec<f64> = w.iter().zip(&au).map(|(b, v)| b - v).collect();
                if linalg::norm(&resid) <= target {
                    break;
                }
                let corr = linalg::cholesky_solve(&a, &resid)
                    .ok_or_else(|| ProxError::InvalidArgument("prox refinement failed".into()))?;
                linalg::add_scaled(&mut u, 1.0, &corr);
            }
            u
        }
    })
}

/// Gradient mapping: `(w - prox(w - alpha g, alpha)) / alpha`.
pub fn gradient_map(reg: &Regularizer, w: &[f64], g: &[f64], alpha: f64) -> Result<Vec<f64>, ProxError> {
    if w.len() != g.len() {
        return Err(ProxError::DimensionMismatch { expected: w.len(), got: g.len() });
    }
    let mut shifted = w.to_vec();
    linalg::add_scaled(&mut shifted, -alpha, g);
    let p = prox(reg, &shifted, alpha)?;
    Ok(w.iter().zip(&p).map(|(wi, pi)| (wi - pi) / alpha).collect())
}

/// Residual report of the coordinate-descent prox oracle.
#[derive(Debug, Clone, Serialize)]
pub struct ProxOracleReport {
    /// `||oracle_minimizer - prox(w, alpha)||`.
    pub residual: f64,
    pub oracle_objective: f64,
    pub prox_objective: f64,
    pub sweeps: usize,
}

/// Independently minimize `lambda h(u) + ||u - w||^2 / (2 alpha)` by cyclic
/// proximal coordinate descent and report the distance to [`prox`].
///
/// Each coordinate update minimizes the objective exactly along that
/// coordinate; sweeps continue until no coordinate moves more than
/// `1e-13 * max(1, ||w||)`.
pub fn prox_oracle_check(reg: &Regularizer, w: &[f64], alpha: f64) -> Result<ProxOracleReport, ProxError> {
    if !(alpha > 0.0) {
        return Err(ProxError::InvalidStep(alpha));
    }
    let lam = reg.weight;
    let n = w.len();
    let mut u = w.to_vec();
    let tol = 1e-13 * linalg::norm(w).max(1.0);
    let max_sweeps = 100_000;
    let mut sweeps = 0;
    for sweep in 0..max_sweeps {
        sweeps = sweep + 1;
        let mut max_move = 0.0f64;
        for i in 0..n {
            let new_ui = match &reg.kind {
                RegKind::Ridge => {
                    // minimize (lam/2) u_i^2 + (u_i - w_i)^2 / (2 alpha)
                    (w[i] / alpha) / (lam + 1.0 / alpha)
                }
                RegKind::ElasticNet { l1_weight } => {
                    // minimize lam mu |u_i| + (lam/2) u_i^2
                    //        + (u_i - w_i)^2 / (2 alpha)
                    let quad = lam + 1.0 / alpha;
                    soft_threshold(w[i] / alpha, lam * l1_weight) / quad
                }
                RegKind::Tikhonov { gram, .. } => {
                    if gram.dim() != n {
                        return Err(ProxError::DimensionMismatch { expected: gram.dim(), got: n });
                    }
                    // minimize (lam/2) u^T G u + ||u - w||^2 / (2 alpha)
                    // along coordinate i.
                    let mut cross = 0.0;
                    for j in 0..n {
                        if j != i {
                            cross += gram.get(i, j) * u[j];
                        }
                    }
                    (w[i] / alpha - lam * cross) / (lam * gram.get(i, i) + 1.0 / alpha)
                }
            };
            max_move = max_move.max((new_ui - u[i]).abs());
            u[i] = new_ui;
        }
        if max_move <= tol {
            break;
        }
    }
    let objective = |v: &[f64]| reg.value(v) + linalg::dist(v, w).powi(2) / (2.0 * alpha);
    let p = prox(reg, w, alpha)?;
    Ok(ProxOracleReport {
        residual: linalg::dist(&u, &p),
        oracle_objective: objective(&u),
        prox_objective: objective(&p),
        sweeps,
    })
}

/// Worst-case excesses over randomized probes of the proximal contracts:
/// contraction beyond `1/(1 + alpha lambda)`, gradient-map expansion
/// beyond the gradient distance, and the distance between [`prox`] and the
/// coordinate-descent oracle.
#[derive(Debug, Clone, Serialize)]
pub struct ContractProbe {
    pub contraction_excess: f64,
    pub map_excess: f64,
    pub oracle_residual: f64,
    pub trials: usize,
    pub oracle_cases: usize,
}

/// Probe the contraction, gradient-map nonexpansiveness and prox-oracle
/// contracts on random Gaussian triples of the given dimension.
pub fn contract_probe(
    reg: &Regularizer,
    dim: usize,
    trials: usize,
    oracle_cases: usize,
    seed: u64,
) -> Result<ContractProbe, ProxError> {
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = crate::seeds::rng(seed);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng, scale: f64| -> Vec<f64> {
        (0..dim)
            .map(|_| {
                let g: f64 = StandardNormal.sample(rng);
                scale * g
            })
            .collect()
    };
    let mut contraction_excess = f64::NEG_INFINITY;
    let mut map_excess = f64::NEG_INFINITY;
    for _ in 0..trials {
        let alpha = 0.01 + 2.0 * rng.random::<f64>();
        let w = draw(&mut rng, 3.0);
        let v = draw(&mut rng, 3.0);
        let pw = prox(reg, &w, alpha)?;
        let pv = prox(reg, &v, alpha)?;
        let lhs = linalg::dist(&pw, &pv);
        let rhs = linalg::dist(&w, &v) / (1.0 + alpha * reg.weight());
        contraction_excess = contraction_excess.max(lhs - rhs);
        let g1 = draw(&mut rng, 2.0);
        let g2 = draw(&mut rng, 2.0);
        let m1 = gradient_map(reg, &w, &g1, alpha)?;
        let m2 = gradient_map(reg, &w, &g2, alpha)?;
        map_excess = map_excess.max(linalg::dist(&m1, &m2) - linalg::dist(&g1, &g2));
    }
    let mut oracle_residual = 0.0f64;
    for _ in 0..oracle_cases {
        let alpha = 0.01 + 2.0 * rng.random::<f64>();
        let w = draw(&mut rng, 3.0);
        oracle_residual = oracle_residual.max(prox_oracle_check(reg, &w, alpha)?.residual);
    }
    Ok(ContractProbe { contraction_excess, map_excess, oracle_residual, trials, oracle_cases })
}
