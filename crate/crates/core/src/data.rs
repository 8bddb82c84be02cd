//! Datasets and their perturbations.
//!
//! A [`Dataset`] is an ordered list of dense [`Sample`]s sharing one feature
//! dimension. Datasets come from three places: LIBSVM text
//! ([`parse_libsvm`]), the synthetic two-class Gaussian generator
//! ([`synth_gaussian`]), or in-memory construction. [`replace_one`] builds
//! the replace-one-sample pair used by coupled stability runs, and
//! [`corrupt_labels`] implements random-label corruption.

use crate::seeds;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("empty input (pass allow_empty to accept an empty dataset)")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("label {0} is outside the corruption alphabet")]
    LabelOutsideAlphabet(f64),
}

/// One data point: a dense feature vector and a real label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: f64,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: f64) -> Self {
        Sample { features, label }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SourceTag {
    Synthetic,
    LibSvm,
    Manual,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub source: SourceTag,
    pub seed: Option<u64>,
    pub corruption_prob: Option<f64>,
}

impl Provenance {
    pub fn manual() -> Self {
        Provenance { source: SourceTag::Manual, seed: None, corruption_prob: None }
    }
}

/// An ordered sample set with a shared feature dimension.
#[derive(Debug, Clone, Serialize)]
pub struct Dataset {
    samples: Vec<Sample>,
    dim: usize,
    pub provenance: Provenance,
}

impl Dataset {
    /// Build a dataset, checking that all samples share `dim` and are finite.
    pub fn new(samples: Vec<Sample>, dim: usize, provenance: Provenance) -> Result<Self, DataError> {
        for (i, s) in samples.iter().enumerate() {
            if s.dim() != dim {
                return Err(DataError::DimensionMismatch { expected: dim, got: s.dim() });
            }
            if !s.label.is_finite() || s.features.iter().any(|v| !v.is_finite()) {
                return Err(DataError::InvalidArgument(format!(
                    "sample {i} contains a non-finite entry"
                )));
            }
        }
        Ok(Dataset { samples, dim, provenance })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &Sample {
        &self.samples[i]
    }

    /// Largest feature-vector norm in the dataset.
    pub fn max_feature_norm(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| crate::linalg::norm(&s.features))
            .fold(0.0, f64::max)
    }
}

/// A dataset together with its replace-one-sample copy.
///
/// The replaced position is pinned to index 0; on-average quantities are
/// index-symmetric so this loses no generality.
#[derive(Debug, Clone)]
pub struct PerturbedPair {
    pub base: Dataset,
    pub replaced: Dataset,
    pub replaced_index: usize,
}

/// Random-label corruption: with probability `p` a label is redrawn
/// uniformly from `alphabet` (possibly reproducing the original), so the
/// effective flip rate is `p * (1 - 1/alphabet.len())`.
#[derive(Debug, Clone)]
pub struct LabelNoiseSpec {
    pub p: f64,
    pub alphabet: Vec<f64>,
    pub seed: u64,
}

impl LabelNoiseSpec {
    pub fn new(p: f64, alphabet: Vec<f64>, seed: u64) -> Result<Self, DataError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(DataError::InvalidArgument(format!(
                "corruption probability {p} outside [0, 1]"
            )));
        }
        if alphabet.is_empty() {
            return Err(DataError::InvalidArgument("empty label alphabet".into()));
        }
        Ok(LabelNoiseSpec { p, alphabet, seed })
    }
}

/// Parse LIBSVM text: one sample per line, `<label> <idx>:<val> ...` with
/// 1-based strictly increasing indices. The dataset dimension is the largest
/// index seen anywhere; missing indices are zero. Blank lines are skipped.
pub fn parse_libsvm(text: &str, allow_empty: bool) -> Result<Dataset, DataError> {
    let mut rows: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut dim = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut tokens = raw.split_whitespace();
        let label_tok = tokens.next().expect("non-blank line has a first token");
        let label: f64 = label_tok.parse().map_err(|_| DataError::Parse {
            line,
            message: format!("label `{label_tok}` is not a number"),
        })?;
        if !label.is_finite() {
            return Err(DataError::Parse { line, message: "label is not finite".into() });
        }
        let mut entries: Vec<(usize, f64)> = Vec::new();
        let mut prev_idx = 0usize;
        for tok in tokens {
            let (idx_str, val_str) = tok.split_once(':').ok_or_else(|| DataError::Parse {
                line,
                message: format!("feature `{tok}` is missing a `:` separator"),
            })?;
            let idx: usize = idx_str.parse().map_err(|_| DataError::Parse {
                line,
                message: format!("feature index `{idx_str}` is not an integer"),
            })?;
            if idx == 0 {
                return Err(DataError::Parse { line, message: "feature indices are 1-based".into() });
            }
            if idx <= prev_idx {
                return Err(DataError::Parse {
                    line,
                    message: format!("feature index {idx} does not increase (previous {prev_idx})"),
                });
            }
            let val: f64 = val_str.parse().map_err(|_| DataError::Parse {
                line,
                message: format!("feature value `{val_str}` is not a number"),
            })?;
            if !val.is_finite() {
                return Err(DataError::Parse { line, message: "feature value is not finite".into() });
            }
            prev_idx = idx;
            entries.push((idx, val));
        }
        dim = dim.max(prev_idx);
        rows.push((label, entries));
    }
    if rows.is_empty() && !allow_empty {
        return Err(DataError::Empty);
    }
    let samples = rows
        .into_iter()
        .map(|(label, entries)| {
            let mut features = vec![0.0; dim];
            for (idx, val) in entries {
                features[idx - 1] = val;
            }
            Sample::new(features, label)
        })
        .collect();
    Dataset::new(
        samples,
        dim,
        Provenance { source: SourceTag::LibSvm, seed: None, corruption_prob: None },
    )
}

/// Serialize a dataset to LIBSVM text. Every feature is written explicitly
/// (1-based dense indices), which keeps the dimension and all values exact
/// under [`parse_libsvm`]; float formatting is the shortest representation
/// that round-trips.
pub fn serialize_libsvm(ds: &Dataset) -> String {
    let mut out = String::new();
    for s in ds.samples() {
        out.push_str(&format!("{}", s.label));
        for (i, v) in s.features.iter().enumerate() {
            out.push_str(&format!(" {}:{}", i + 1, v));
        }
        out.push('\n');
    }
    out
}

/// Fixed scale applied to raw Gaussian draws so sample norms land well
/// inside the unit ball; see [`synth_gaussian`].
fn gaussian_scale(d: usize, margin: f64) -> f64 {
    (d as f64).sqrt() + margin
}

/// Synthetic two-class Gaussian data.
///
/// Class `c` in `{+1, -1}` draws raw features from a unit-variance Gaussian
/// centered at `c * margin * e1`; class counts are exactly balanced and the
/// order is shuffled. Every raw draw is divided by the fixed scale
/// `sqrt(d) + margin` and, in the rare case it still exceeds the unit ball,
/// projected onto it. The transform is applied per sample (a fixed map of
/// the raw draw), so samples remain mutually independent and `||x|| <= 1`
/// holds surely, which gives the logistic model closed-form constants.
pub fn synth_gaussian(n: usize, d: usize, margin: f64, seed: u64) -> Result<Dataset, DataError> {
    if n < 2 {
        return Err(DataError::InvalidArgument(format!("need n >= 2 samples, got {n}")));
    }
    if d < 1 {
        return Err(DataError::InvalidArgument("need d >= 1".into()));
    }
    if margin < 0.0 || !margin.is_finite() {
        return Err(DataError::InvalidArgument(format!("margin {margin} must be >= 0")));
    }
    let mut rng = seeds::rng(seed);
    let mut labels: Vec<f64> = (0..n).map(|i| if i < n.div_ceil(2) { 1.0 } else { -1.0 }).collect();
    // Fisher-Yates shuffle for a seed-stable label order.
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }
    let samples = labels
        .into_iter()
        .map(|label| draw_gaussian_sample(d, margin, label, &mut rng))
        .collect();
    Dataset::new(
        samples,
        d,
        Provenance { source: SourceTag::Synthetic, seed: Some(seed), corruption_prob: None },
    )
}

fn draw_gaussian_sample(d: usize, margin: f64, label: f64, rng: &mut impl Rng) -> Sample {
    let scale = gaussian_scale(d, margin);
    let mut features: Vec<f64> = (0..d)
        .map(|j| {
            let g: f64 = StandardNormal.sample(rng);
            let center = if j == 0 { label * margin } else { 0.0 };
            (center + g) / scale
        })
        .collect();
    let norm = crate::linalg::norm(&features);
    if norm > 1.0 {
        for v in &mut features {
            *v /= norm;
        }
    }
    Sample::new(features, label)
}

/// Draw one fresh sample from the same distribution as [`synth_gaussian`]
/// rows (uniform class, then the fixed Gaussian-draw transform).
pub fn fresh_gaussian_sample(d: usize, margin: f64, seed: u64) -> Sample {
    let mut rng = seeds::rng(seed);
    let label = if rng.random::<f64>() < 0.5 { 1.0 } else { -1.0 };
    draw_gaussian_sample(d, margin, label, &mut rng)
}

/// Independently redraw each label with probability `spec.p`, uniformly
/// from the alphabet. Features are untouched; the output records the
/// corruption probability in its provenance.
pub fn corrupt_labels(ds: &Dataset, spec: &LabelNoiseSpec) -> Result<Dataset, DataError> {
    for s in ds.samples() {
        if !spec.alphabet.iter().any(|&a| a == s.label) {
            return Err(DataError::LabelOutsideAlphabet(s.label));
        }
    }
    let mut rng = seeds::rng(spec.seed);
    let samples = ds
        .samples()
        .iter()
        .map(|s| {
            let mut out = s.clone();
            if rng.random::<f64>() < spec.p {
                out.label = spec.alphabet[rng.random_range(0..spec.alphabet.len())];
            }
            out
        })
        .collect();
    let mut provenance = ds.provenance.clone();
    provenance.corruption_prob = Some(spec.p);
    Dataset::new(samples, ds.dim(), provenance)
}

/// Build the replace-one pair: `replaced` equals `ds` except at index 0,
/// which holds `fresh`.
pub fn replace_one(ds: &Dataset, fresh: Sample) -> Result<PerturbedPair, DataError> {
    if ds.is_empty() {
        return Err(DataError::InvalidArgument("cannot perturb an empty dataset".into()));
    }
    if fresh.dim() != ds.dim() {
        return Err(DataError::DimensionMismatch { expected: ds.dim(), got: fresh.dim() });
    }
    let mut samples = ds.samples().to_vec();
    samples[0] = fresh;
    let replaced = Dataset::new(samples, ds.dim(), ds.provenance.clone())?;
    Ok(PerturbedPair { base: ds.clone(), replaced, replaced_index: 0 })
}
