//! Base variable-selection methods and resampling baselines.
//!
//! Everything here satisfies one contract: a selection method maps a
//! standardized design and a response to a 0/1 mask over the variables.
//! The Lasso (linear and logistic, lambda chosen by cross-validation) is the
//! workhorse; stability selection and the naive group-discard rule are the
//! comparison baselines.

mod cv;
mod lasso;

pub use cv::{cv_lambda, lasso_cv_fit, lasso_select, CvConfig, CvResult, LambdaRule};
pub use lasso::{lambda_max, lasso_fit, soft_threshold, LassoFit};

use crate::grouping::{GroupMap, GroupingError};
use crate::sphere::{SphereError, StandardizedDesign};
use crate::streams::replicate_rng;
use ndarray::Array2;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SelectorError {
    #[error("logistic labels must be -1 or +1: y[{index}] = {value}")]
    BadLabels { index: usize, value: f64 },
    #[error("coordinate descent did not converge within {passes} passes")]
    NonConvergence { passes: usize },
    #[error("cross-validation needs 2 <= k <= N with at least 3 training rows per fold split; got k = {k}, N = {n}")]
    TooFewObservations { n: usize, k: usize },
    #[error("response carries no signal (lambda_max = 0); the null model is optimal at any penalty")]
    DegenerateResponse,
    #[error("penalty must be a non-negative finite number, got {0}")]
    InvalidLambda(f64),
    #[error("stability threshold must lie in (0.5, 1], got {0}")]
    BadThreshold(f64),
    #[error("stability selection needs at least 2 replicates, got {0}")]
    TooFewReplicates(usize),
    #[error("response length {actual} does not match {expected} observations")]
    ResponseLength { expected: usize, actual: usize },
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Grouping(#[from] GroupingError),
}

/// Model family for the penalized fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    Logistic,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Family::Linear),
            "logistic" => Ok(Family::Logistic),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

/// 0/1 selection over the variables, with fitted coefficients when the
/// method produces them.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionMask {
    bits: Vec<bool>,
    coefficients: Option<Vec<f64>>,
}

impl SelectionMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits, coefficients: None }
    }

    /// Mask with bit p set exactly where the coefficient is nonzero.
    pub fn from_coefficients(coefficients: Vec<f64>) -> Self {
        let bits = coefficients.iter().map(|&b| b != 0.0).collect();
        Self { bits, coefficients: Some(coefficients) }
    }

    pub fn empty(p: usize) -> Self {
        Self { bits: vec![false; p], coefficients: None }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_selected(&self, p: usize) -> bool {
        self.bits[p]
    }

    pub fn coefficients(&self) -> Option<&[f64]> {
        self.coefficients.as_deref()
    }

    /// Number of selected variables.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Selected indices in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}

/// The extension point: anything mapping (design, response) to a mask can be
/// wrapped by the boost loop, stability selection, and the naive baseline.
pub trait SelectionMethod: Sync {
    fn select(
        &self,
        design: &StandardizedDesign,
        response: &[f64],
    ) -> Result<SelectionMask, SelectorError>;
}

/// Cross-validated Lasso as a [`SelectionMethod`].
#[derive(Debug, Clone)]
pub struct LassoSelector {
    pub family: Family,
    pub cv: CvConfig,
}

impl LassoSelector {
    pub fn new(family: Family, cv: CvConfig) -> Self {
        Self { family, cv }
    }
}

impl SelectionMethod for LassoSelector {
    fn select(
        &self,
        design: &StandardizedDesign,
        response: &[f64],
    ) -> Result<SelectionMask, SelectorError> {
        lasso_select(design, response, self.family, &self.cv)
    }
}

/// Applies the base method, then discards any selected variable whose
/// correlation group is non-singleton.
pub fn naive_selectboost(
    design: &StandardizedDesign,
    response: &[f64],
    base: &dyn SelectionMethod,
    groups: &GroupMap,
) -> Result<SelectionMask, SelectorError> {
    if groups.n_vars() != design.n_vars() {
        return Err(GroupingError::VariableCountMismatch {
            expected: design.n_vars(),
            actual: groups.n_vars(),
        }
        .into());
    }
    let base_mask = base.select(design, response)?;
    let bits: Vec<bool> = base_mask
        .bits()
        .iter()
        .enumerate()
        .map(|(p, &b)| b && groups.is_singleton(p))
        .collect();
    let coefficients = base_mask.coefficients().map(|c| {
        c.iter()
            .enumerate()
            .map(|(p, &v)| if groups.is_singleton(p) { v } else { 0.0 })
            .collect::<Vec<f64>>()
    });
    Ok(match coefficients {
        Some(c) => {
            let mut m = SelectionMask::from_coefficients(c);
            m.bits = bits;
            m
        }
        None => SelectionMask::new(bits),
    })
}

/// Stability selection: the base method on `b` half-size subsamples.
///
/// Returns the thresholded mask and the per-variable selection frequency.
/// Replicate `i` draws its subsample from an independent stream derived
/// from `(seed, i)`, so results do not depend on execution order.
pub fn stability_selection(
    design: &StandardizedDesign,
    response: &[f64],
    base: &(dyn SelectionMethod + Sync),
    b: usize,
    pi_threshold: f64,
    seed: u64,
) -> Result<(SelectionMask, Vec<f64>), SelectorError> {
    if b < 2 {
        return Err(SelectorError::TooFewReplicates(b));
    }
    if !(pi_threshold > 0.5 && pi_threshold <= 1.0) {
        return Err(SelectorError::BadThreshold(pi_threshold));
    }
    let n = design.n_obs();
    let p = design.n_vars();
    if response.len() != n {
        return Err(SelectorError::ResponseLength { expected: n, actual: response.len() });
    }
    let half = n / 2;

    let masks: Vec<Result<Vec<bool>, SelectorError>> = (0..b)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(seed, rep as u64);
            let mut rows = rand::seq::index::sample(&mut rng, n, half).into_vec();
            rows.sort_unstable();
            let mut sub = Array2::<f64>::zeros((half, p));
            let mut ysub = Vec::with_capacity(half);
            for (r, &i) in rows.iter().enumerate() {
                for j in 0..p {
                    sub[[r, j]] = design.values()[[i, j]];
                }
                ysub.push(response[i]);
            }
            let sub_design =
                crate::sphere::standardize(&sub, design.variable_names())?;
            Ok(base.select(&sub_design, &ysub)?.bits().to_vec())
        })
        .collect();

    let mut counts = vec![0usize; p];
    for m in masks {
        let bits = m?;
        for (c, bit) in counts.iter_mut().zip(bits) {
            if bit {
                *c += 1;
            }
        }
    }
    let frequency: Vec<f64> = counts.iter().map(|&c| c as f64 / b as f64).collect();
    let bits = frequency.iter().map(|&f| f >= pi_threshold).collect();
    Ok((SelectionMask::new(bits), frequency))
}
