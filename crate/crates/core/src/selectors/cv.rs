//! K-fold cross-validation over a geometric penalty grid.
//!
//! The grid is anchored at the full-data `lambda_max` and shared across
//! folds; each fold re-standardizes its training rows, fits the whole path
//! with warm starts, and scores held-out rows through the fold's own
//! standardization provenance. Folds are assigned by a seeded shuffle,
//! stratified by label for the logistic family, so a fixed seed reproduces
//! the result bit for bit.

use super::lasso::{fit_at, lambda_max, FitState, Problem};
use super::{Family, SelectionMask, SelectorError};
use crate::sphere::{standardize, StandardizedDesign};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// How the final penalty is read off the CV curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRule {
    /// The penalty minimizing mean CV loss (default).
    Min,
    /// The largest penalty within one standard error of the minimum.
    OneSe,
}

impl std::str::FromStr for LambdaRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(LambdaRule::Min),
            "1se" => Ok(LambdaRule::OneSe),
            other => Err(format!("unknown lambda rule {other:?} (expected min or 1se)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CvConfig {
    /// Fold count; leave-one-out when k = N.
    pub k: usize,
    /// Number of penalties on the geometric grid.
    pub grid_size: usize,
    /// Smallest grid penalty as a fraction of lambda_max.
    pub lambda_min_ratio: f64,
    pub rule: LambdaRule,
    /// Seed for the fold shuffle.
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self { k: 10, grid_size: 100, lambda_min_ratio: 1e-3, rule: LambdaRule::Min, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct CvResult {
    /// Decreasing penalties, starting at the full-data lambda_max.
    pub lambda_grid: Vec<f64>,
    pub mean_cv_loss: Vec<f64>,
    pub se_cv_loss: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_1se: f64,
    pub k: usize,
    pub fold_seed: u64,
}

impl CvResult {
    pub fn chosen(&self, rule: LambdaRule) -> f64 {
        match rule {
            LambdaRule::Min => self.lambda_min,
            LambdaRule::OneSe => self.lambda_1se,
        }
    }
}

fn lambda_grid(lmax: f64, size: usize, ratio: f64) -> Vec<f64> {
    debug_assert!(size >= 1 && lmax > 0.0 && ratio > 0.0 && ratio < 1.0);
    if size == 1 {
        return vec![lmax];
    }
    let log_max = lmax.ln();
    let log_min = (lmax * ratio).ln();
    (0..size)
        .map(|j| (log_max + (log_min - log_max) * j as f64 / (size - 1) as f64).exp())
        .collect()
}

/// Fold id per observation: seeded shuffle, stratified by label for the
/// logistic family.
fn fold_assignment(
    y: &[f64],
    family: Family,
    k: usize,
    seed: u64,
) -> Vec<usize> {
    let n = y.len();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut fold = vec![0usize; n];
    let mut counter = 0usize;
    match family {
        Family::Linear => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            for i in idx {
                fold[i] = counter % k;
                counter += 1;
            }
        }
        Family::Logistic => {
            for label in [1.0, -1.0] {
                let mut idx: Vec<usize> =
                    (0..n).filter(|&i| y[i] == label).collect();
                idx.shuffle(&mut rng);
                for i in idx {
                    fold[i] = counter % k;
                    counter += 1;
                }
            }
        }
    }
    fold
}

/// Selects the penalty by k-fold cross-validation.
pub fn cv_lambda(
    design: &StandardizedDesign,
    y: &[f64],
    family: Family,
    config: &CvConfig,
) -> Result<CvResult, SelectorError> {
    let n = design.n_obs();
    let p = design.n_vars();
    if y.len() != n {
        return Err(SelectorError::ResponseLength { expected: n, actual: y.len() });
    }
    let k = config.k;
    if k < 2 || k > n || n - n.div_ceil(k) < 3 {
        return Err(SelectorError::TooFewObservations { n, k });
    }
    let lmax = lambda_max(design, y, family)?;
    if lmax <= 0.0 || !lmax.is_finite() {
        return Err(SelectorError::DegenerateResponse);
    }
    let grid = lambda_grid(lmax, config.grid_size, config.lambda_min_ratio);
    let fold = fold_assignment(y, family, k, config.seed);

    // losses[f][j]: held-out loss of fold f at grid point j.
    let mut losses = vec![vec![0.0f64; grid.len()]; k];
    for f in 0..k {
        let train: Vec<usize> = (0..n).filter(|&i| fold[i] != f).collect();
        let val: Vec<usize> = (0..n).filter(|&i| fold[i] == f).collect();
        let mut xt = Array2::<f64>::zeros((train.len(), p));
        let mut yt = Vec::with_capacity(train.len());
        for (r, &i) in train.iter().enumerate() {
            for j in 0..p {
                xt[[r, j]] = design.values()[[i, j]];
            }
            yt.push(y[i]);
        }
        let fold_design = standardize(&xt, design.variable_names())?;
        let problem = Problem::new(&fold_design, &yt, family)?;
        let mut state = FitState::cold(&problem);
        for (j, &lambda) in grid.iter().enumerate() {
            fit_at(&problem, lambda, &mut state, None)?;
            losses[f][j] = holdout_loss(
                design,
                y,
                &val,
                &fold_design,
                &state,
                family,
            );
        }
    }

    let kf = k as f64;
    let mut mean = vec![0.0; grid.len()];
    let mut se = vec![0.0; grid.len()];
    for j in 0..grid.len() {
        let m: f64 = (0..k).map(|f| losses[f][j]).sum::<f64>() / kf;
        let var: f64 = if k > 1 {
            (0..k).map(|f| (losses[f][j] - m).powi(2)).sum::<f64>() / (kf - 1.0)
        } else {
            0.0
        };
        mean[j] = m;
        se[j] = (var / kf).sqrt();
    }

    let mut j_min = 0;
    for j in 1..grid.len() {
        if mean[j] < mean[j_min] {
            j_min = j;
        }
    }
    let cutoff = mean[j_min] + se[j_min];
    let j_1se = (0..grid.len()).find(|&j| mean[j] <= cutoff).unwrap_or(j_min);

    Ok(CvResult {
        lambda_min: grid[j_min],
        lambda_1se: grid[j_1se],
        lambda_grid: grid,
        mean_cv_loss: mean,
        se_cv_loss: se,
        k,
        fold_seed: config.seed,
    })
}

/// Held-out loss: mean squared error (linear) or mean negative
/// log-likelihood (logistic), with validation rows passed through the
/// fold's standardization provenance.
fn holdout_loss(
    design: &StandardizedDesign,
    y: &[f64],
    val: &[usize],
    fold_design: &StandardizedDesign,
    state: &FitState,
    family: Family,
) -> f64 {
    let means = fold_design.column_means();
    let scales = fold_design.column_scales();
    let mut total = 0.0;
    for &i in val {
        let mut eta = state.intercept;
        for (p, &b) in state.beta.iter().enumerate() {
            if b != 0.0 {
                eta += b * (design.values()[[i, p]] - means[p]) / scales[p];
            }
        }
        total += match family {
            Family::Linear => (y[i] - eta) * (y[i] - eta),
            Family::Logistic => super::lasso::ln_1p_exp(-y[i] * eta),
        };
    }
    total / val.len() as f64
}

/// Cross-validated Lasso selection: choose the penalty, refit on the full
/// data along the warm-started path, and report the nonzero coefficients.
pub fn lasso_select(
    design: &StandardizedDesign,
    y: &[f64],
    family: Family,
    config: &CvConfig,
) -> Result<SelectionMask, SelectorError> {
    let lmax = lambda_max(design, y, family)?;
    if lmax <= 0.0 || !lmax.is_finite() {
        // No coordinate ever enters: the null model is optimal at any
        // positive penalty (e.g. an all-zero response).
        return Ok(SelectionMask::from_coefficients(vec![0.0; design.n_vars()]));
    }
    let cv = cv_lambda(design, y, family, config)?;
    let chosen = cv.chosen(config.rule);
    Ok(refit_mask(design, y, family, &cv.lambda_grid, chosen)?.0)
}

/// Like [`lasso_select`] but also returns the CV curve and the refitted
/// model (coefficients on the standardized scale, intercept included).
pub fn lasso_cv_fit(
    design: &StandardizedDesign,
    y: &[f64],
    family: Family,
    config: &CvConfig,
) -> Result<(CvResult, super::LassoFit), SelectorError> {
    let cv = cv_lambda(design, y, family, config)?;
    let chosen = cv.chosen(config.rule);
    let problem = Problem::new(design, y, family)?;
    let mut state = FitState::cold(&problem);
    for &lambda in &cv.lambda_grid {
        fit_at(&problem, lambda, &mut state, None)?;
        if lambda <= chosen {
            break;
        }
    }
    let fit = state.into_fit(&problem, chosen);
    Ok((cv, fit))
}

/// Full-data path refit down to `chosen`; returns the mask and the fit state.
pub(crate) fn refit_mask(
    design: &StandardizedDesign,
    y: &[f64],
    family: Family,
    grid: &[f64],
    chosen: f64,
) -> Result<(SelectionMask, FitState), SelectorError> {
    let problem = Problem::new(design, y, family)?;
    let mut state = FitState::cold(&problem);
    for &lambda in grid {
        fit_at(&problem, lambda, &mut state, None)?;
        if lambda <= chosen {
            break;
        }
    }
    let mask = SelectionMask::from_coefficients(state.beta.clone());
    Ok((mask, state))
}
