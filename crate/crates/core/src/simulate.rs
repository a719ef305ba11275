//! The simulation benchmark: cluster-structured data, support-recovery
//! metrics, the repeated-study harness, and the irrepresentable-condition
//! diagnostic.
//!
//! Data come from a latent-factor scheme: each active variable is its
//! cluster's factor plus noise, the response is the sum of the factors, and
//! the remaining variables are independent standard normals. The response is
//! kept both continuous and binarized by sign.

use crate::boost::{boost, select_at_threshold, BoostError};
use crate::grouping::GroupingStrategy;
use crate::selectors::{
    naive_selectboost, stability_selection, CvConfig, Family, LassoSelector, SelectionMask,
    SelectionMethod, SelectorError,
};
use crate::sphere::{default_names, standardize, SphereError, StandardizedDesign};
use crate::streams::{derive_seed, replicate_rng};
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("invalid simulation config: {0}")]
    BadConfig(String),
    #[error("support index {0} out of range or duplicated")]
    BadSupport(usize),
    #[error("signs must be +1 or -1 and match the support length")]
    BadSigns,
    #[error("support Gram matrix is numerically singular (condition number > 1e12)")]
    SingularGram,
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Selector(#[from] SelectorError),
    #[error(transparent)]
    Boost(#[from] BoostError),
    #[error(transparent)]
    Grouping(#[from] crate::grouping::GroupingError),
}

/// Parameters of the cluster-simulation generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_obs: usize,
    pub n_vars: usize,
    /// Number of truly informative variables (the first `n_active`).
    pub n_active: usize,
    /// Latent factors shared among the active variables.
    pub n_clusters: usize,
    pub within_cluster_noise: f64,
    pub response_noise: f64,
    pub repetitions: usize,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), SimulateError> {
        if self.n_obs < 3 || self.n_vars == 0 || self.n_active == 0 || self.repetitions == 0 {
            return Err(SimulateError::BadConfig(
                "counts must be positive (and n_obs >= 3)".into(),
            ));
        }
        if self.n_active > self.n_vars {
            return Err(SimulateError::BadConfig(format!(
                "n_active ({}) exceeds n_vars ({})",
                self.n_active, self.n_vars
            )));
        }
        if self.n_clusters == 0 || self.n_clusters > self.n_active {
            return Err(SimulateError::BadConfig(format!(
                "n_clusters ({}) must lie in 1..=n_active ({})",
                self.n_clusters, self.n_active
            )));
        }
        if self.within_cluster_noise < 0.0 || self.response_noise < 0.0 {
            return Err(SimulateError::BadConfig("noise scales must be non-negative".into()));
        }
        Ok(())
    }
}

/// One simulated dataset with its ground truth.
#[derive(Debug, Clone)]
pub struct GroundTruthDataset {
    pub x: Array2<f64>,
    pub y_continuous: Vec<f64>,
    /// Sign-binarized response in {-1, +1}.
    pub y_binary: Vec<f64>,
    /// Indices of the truly informative variables.
    pub support: Vec<usize>,
    pub beta_true: Vec<f64>,
}

/// Draws one dataset; `(seed, repetition_index)` fully determines it.
pub fn generate_cluster_data(
    config: &SimulationConfig,
    repetition_index: usize,
) -> Result<GroundTruthDataset, SimulateError> {
    config.validate()?;
    let n = config.n_obs;
    let p = config.n_vars;
    let q = config.n_active;
    let l = config.n_clusters;
    let mut rng = replicate_rng(config.seed, repetition_index as u64);

    // Latent factors, one row per cluster.
    let mut factors = vec![vec![0.0f64; n]; l];
    for f in factors.iter_mut() {
        for v in f.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
    }

    let mut x = Array2::<f64>::zeros((n, p));
    for j in 0..q {
        let cluster = j * l / q;
        for i in 0..n {
            let eps: f64 = rng.sample(StandardNormal);
            x[[i, j]] = factors[cluster][i] + config.within_cluster_noise * eps;
        }
    }
    for j in q..p {
        for i in 0..n {
            x[[i, j]] = rng.sample(StandardNormal);
        }
    }

    let mut y_continuous = vec![0.0f64; n];
    for (i, y) in y_continuous.iter_mut().enumerate() {
        let eps: f64 = rng.sample(StandardNormal);
        *y = factors.iter().map(|f| f[i]).sum::<f64>() + config.response_noise * eps;
    }
    let y_binary = y_continuous.iter().map(|&v| if v > 0.0 { 1.0 } else { -1.0 }).collect();

    let mut beta_true = vec![0.0; p];
    for b in beta_true.iter_mut().take(q) {
        *b = 1.0;
    }
    Ok(GroundTruthDataset {
        x,
        y_continuous,
        y_binary,
        support: (0..q).collect(),
        beta_true,
    })
}

/// Recall, precision, F-score, and selection count for one mask.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsSample {
    pub recall: f64,
    pub precision: f64,
    pub fscore: f64,
    pub selection: f64,
}

/// Support-recovery metrics of a selection against the true support.
///
/// An empty selection has precision 0 (not NaN) so averages over many
/// repetitions stay well-defined.
pub fn metrics(mask: &SelectionMask, support: &[usize]) -> MetricsSample {
    let selected = mask.indices();
    let true_positives = selected.iter().filter(|i| support.contains(i)).count() as f64;
    let n_selected = selected.len() as f64;
    let n_true = support.len() as f64;
    let recall = if n_true > 0.0 { true_positives / n_true } else { 0.0 };
    let precision = if n_selected > 0.0 { true_positives / n_selected } else { 0.0 };
    let fscore = if recall + precision > 0.0 {
        2.0 * recall * precision / (recall + precision)
    } else {
        0.0
    };
    MetricsSample { recall, precision, fscore, selection: n_selected }
}

/// Checks the irrepresentable condition
/// `| X'_noise X_S (X'_S X_S)^{-1} sign(beta_S) | < 1` componentwise.
///
/// Returns the flag and the per-noise-variable values in ascending index
/// order. Components within floating-point resolution of the bound (1e-12)
/// count as violations: the condition is not credibly satisfied there.
pub fn irrepresentable_check(
    design: &StandardizedDesign,
    support: &[usize],
    beta_signs: &[i8],
) -> Result<(bool, Vec<f64>), SimulateError> {
    let p = design.n_vars();
    let s = support.len();
    if s == 0 {
        return Err(SimulateError::BadConfig("support is empty".into()));
    }
    let mut seen = vec![false; p];
    for &j in support {
        if j >= p || seen[j] {
            return Err(SimulateError::BadSupport(j));
        }
        seen[j] = true;
    }
    if beta_signs.len() != s || beta_signs.iter().any(|&v| v != 1 && v != -1) {
        return Err(SimulateError::BadSigns);
    }

    // Gram matrix of the support columns.
    let mut gram = vec![vec![0.0f64; s]; s];
    for a in 0..s {
        for b in a..s {
            let v = dot(design.column(support[a]), design.column(support[b]));
            gram[a][b] = v;
            gram[b][a] = v;
        }
    }
    let (eigvals, eigvecs) = jacobi_eigh(&gram);
    let min = eigvals.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eigvals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min <= 0.0 || max / min > 1e12 {
        return Err(SimulateError::SingularGram);
    }

    // a = G^{-1} sign, via the eigendecomposition.
    let sign: Vec<f64> = beta_signs.iter().map(|&v| v as f64).collect();
    let mut coeffs = vec![0.0f64; s];
    for k in 0..s {
        let proj: f64 = (0..s).map(|i| eigvecs[i][k] * sign[i]).sum();
        let scaled = proj / eigvals[k];
        for i in 0..s {
            coeffs[i] += eigvecs[i][k] * scaled;
        }
    }

    // u = X_S a, then one dot product per non-support column.
    let n = design.n_obs();
    let mut u = vec![0.0f64; n];
    for (a, &j) in support.iter().enumerate() {
        for (ui, xi) in u.iter_mut().zip(design.column(j)) {
            *ui += coeffs[a] * xi;
        }
    }
    let mut values = Vec::with_capacity(p - s);
    for j in 0..p {
        if !seen[j] {
            values.push(dot(design.column(j), &u).abs());
        }
    }
    let holds = values.iter().all(|&v| v < 1.0 - 1e-12);
    Ok((holds, values))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
/// Returns (eigenvalues, eigenvectors as columns).
fn jacobi_eigh(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0f64; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for piv_i in 0..n {
            for piv_j in piv_i + 1..n {
                let apq = a[piv_i][piv_j];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[piv_i][piv_i];
                let aqq = a[piv_j][piv_j];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let aik = a[k][piv_i];
                    let ajk = a[k][piv_j];
                    a[k][piv_i] = c * aik - s * ajk;
                    a[k][piv_j] = s * aik + c * ajk;
                }
                for k in 0..n {
                    let aik = a[piv_i][k];
                    let ajk = a[piv_j][k];
                    a[piv_i][k] = c * aik - s * ajk;
                    a[piv_j][k] = s * aik + c * ajk;
                }
                for row in v.iter_mut() {
                    let vik = row[piv_i];
                    let vjk = row[piv_j];
                    row[piv_i] = c * vik - s * vjk;
                    row[piv_j] = s * vik + c * vjk;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Methods compared by the study harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    BaseLasso,
    SelectBoost,
    NaiveSelectBoost,
    StabilitySelection {
        /// Frequency threshold over the subsample replicates.
        pi_threshold: f64,
    },
}

/// Shared settings for one study run.
#[derive(Debug, Clone)]
pub struct StudySettings {
    pub family: Family,
    pub cv: CvConfig,
    pub strategy: GroupingStrategy,
    /// Grid for the grouped methods, strictly decreasing from 1.
    pub c0_grid: Vec<f64>,
    /// Perturbation (and stability subsample) replicates.
    pub b: usize,
    /// Frequency threshold for counting a variable as selected.
    pub threshold: f64,
}

/// Aggregated metrics of one method (at one grid point where applicable).
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub method: String,
    pub c0: Option<f64>,
    /// Means over the completed repetitions.
    pub recall: f64,
    pub precision: f64,
    pub fscore: f64,
    pub selection: f64,
    pub per_repetition: Vec<MetricsSample>,
}

// Seed-derivation tags keeping the independent randomness lanes apart.
const TAG_CV: u64 = 0x11;
const TAG_BOOST: u64 = 0x22;
const TAG_STABILITY: u64 = 0x33;

/// Runs the repeated study: per repetition, generate data, standardize, run
/// every method, and score against the true support.
///
/// Repetitions are independent (seeded by repetition index) and run in
/// parallel; a failed repetition is logged and skipped, not fatal. Rows come
/// back in method order, grid points expanded in grid order.
pub fn run_study(
    config: &SimulationConfig,
    methods: &[MethodSpec],
    settings: &StudySettings,
) -> Result<Vec<MetricsReport>, SimulateError> {
    config.validate()?;
    let labels = row_labels(methods, &settings.c0_grid);

    let per_rep: Vec<Result<Vec<MetricsSample>, SimulateError>> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| run_repetition(config, methods, settings, rep))
        .collect();

    let mut completed: Vec<Vec<MetricsSample>> = Vec::new();
    for (rep, outcome) in per_rep.into_iter().enumerate() {
        match outcome {
            Ok(samples) => completed.push(samples),
            Err(e) => log::warn!("repetition {rep} failed and was skipped: {e}"),
        }
    }
    if completed.is_empty() {
        return Err(SimulateError::BadConfig("every repetition failed".into()));
    }

    let reps = completed.len() as f64;
    let reports = labels
        .into_iter()
        .enumerate()
        .map(|(row, (method, c0))| {
            let per_repetition: Vec<MetricsSample> =
                completed.iter().map(|samples| samples[row]).collect();
            MetricsReport {
                method,
                c0,
                recall: per_repetition.iter().map(|m| m.recall).sum::<f64>() / reps,
                precision: per_repetition.iter().map(|m| m.precision).sum::<f64>() / reps,
                fscore: per_repetition.iter().map(|m| m.fscore).sum::<f64>() / reps,
                selection: per_repetition.iter().map(|m| m.selection).sum::<f64>() / reps,
                per_repetition,
            }
        })
        .collect();
    Ok(reports)
}

/// Row labels in output order: methods as given, grid points expanded.
fn row_labels(methods: &[MethodSpec], grid: &[f64]) -> Vec<(String, Option<f64>)> {
    let mut labels = Vec::new();
    for m in methods {
        match m {
            MethodSpec::BaseLasso => labels.push(("lasso".to_string(), None)),
            MethodSpec::SelectBoost => {
                for &c0 in grid {
                    labels.push(("selectboost".to_string(), Some(c0)));
                }
            }
            MethodSpec::NaiveSelectBoost => {
                for &c0 in grid {
                    labels.push(("naive_selectboost".to_string(), Some(c0)));
                }
            }
            MethodSpec::StabilitySelection { .. } => {
                labels.push(("stability_selection".to_string(), None));
            }
        }
    }
    labels
}

fn run_repetition(
    config: &SimulationConfig,
    methods: &[MethodSpec],
    settings: &StudySettings,
    rep: usize,
) -> Result<Vec<MetricsSample>, SimulateError> {
    let data = generate_cluster_data(config, rep)?;
    let design = standardize(&data.x, &default_names(config.n_vars))?;
    let y = match settings.family {
        Family::Linear => &data.y_continuous,
        Family::Logistic => &data.y_binary,
    };
    let selector = LassoSelector::new(
        settings.family,
        CvConfig {
            seed: derive_seed(derive_seed(config.seed, TAG_CV), rep as u64),
            ..settings.cv.clone()
        },
    );

    // The base mask is shared by the base row and the naive rows.
    let needs_base = methods.iter().any(|m| {
        matches!(m, MethodSpec::BaseLasso | MethodSpec::NaiveSelectBoost)
    });
    let base_mask = if needs_base {
        Some(selector.select(&design, y)?)
    } else {
        None
    };

    let mut out = Vec::new();
    for method in methods {
        match method {
            MethodSpec::BaseLasso => {
                out.push(metrics(base_mask.as_ref().unwrap(), &data.support));
            }
            MethodSpec::SelectBoost => {
                for (g, &c0) in settings.c0_grid.iter().enumerate() {
                    let groups = settings.strategy.groups(&design, c0)?;
                    let boost_seed = derive_seed(
                        derive_seed(derive_seed(config.seed, TAG_BOOST), rep as u64),
                        g as u64,
                    );
                    let fv = boost(&design, y, &selector, &groups, settings.b, boost_seed)?
                        .with_threshold(settings.threshold);
                    out.push(metrics(&select_at_threshold(&fv), &data.support));
                }
            }
            MethodSpec::NaiveSelectBoost => {
                for &c0 in &settings.c0_grid {
                    let groups = settings.strategy.groups(&design, c0)?;
                    let mask = naive_selectboost(&design, y, &selector, &groups)?;
                    out.push(metrics(&mask, &data.support));
                }
            }
            MethodSpec::StabilitySelection { pi_threshold } => {
                let seed = derive_seed(derive_seed(config.seed, TAG_STABILITY), rep as u64);
                let (mask, _freq) =
                    stability_selection(&design, y, &selector, settings.b, *pi_threshold, seed)?;
                out.push(metrics(&mask, &data.support));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::test_support::design_with_correlations;
    use proptest::prelude::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn small_config() -> SimulationConfig {
        SimulationConfig {
            n_obs: 30,
            n_vars: 20,
            n_active: 6,
            n_clusters: 3,
            within_cluster_noise: 0.3,
            response_noise: 1.0,
            repetitions: 3,
            seed: 5,
        }
    }

    #[test]
    fn generator_support_is_the_first_q_variables() {
        let cfg = SimulationConfig {
            n_obs: 20,
            n_vars: 50,
            n_active: 10,
            n_clusters: 5,
            ..small_config()
        };
        let d = generate_cluster_data(&cfg, 0).unwrap();
        assert_eq!(d.support, (0..10).collect::<Vec<_>>());
        for (j, &b) in d.beta_true.iter().enumerate() {
            assert_eq!(b != 0.0, j < 10);
        }
        for (i, &yb) in d.y_binary.iter().enumerate() {
            assert_eq!(yb, if d.y_continuous[i] > 0.0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = small_config();
        let a = generate_cluster_data(&cfg, 2).unwrap();
        let b = generate_cluster_data(&cfg, 2).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.y_continuous, b.y_continuous);
        let c = generate_cluster_data(&cfg, 3).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn zero_within_noise_makes_clusters_collinear() {
        let cfg = SimulationConfig { within_cluster_noise: 0.0, ..small_config() };
        let d = generate_cluster_data(&cfg, 0).unwrap();
        // 6 actives in 3 clusters: variables (0,1), (2,3), (4,5) coincide.
        for pair in [(0usize, 1usize), (2, 3), (4, 5)] {
            for i in 0..cfg.n_obs {
                assert_eq!(d.x[[i, pair.0]], d.x[[i, pair.1]]);
            }
        }
    }

    #[test]
    fn same_cluster_actives_correlate_more() {
        let mut same_total = 0.0;
        let mut diff_total = 0.0;
        for seed in 0..50u64 {
            let cfg = SimulationConfig { seed, ..small_config() };
            let d = generate_cluster_data(&cfg, 0).unwrap();
            let design = standardize(&d.x, &default_names(cfg.n_vars)).unwrap();
            let corr = |a: usize, b: usize| dot(design.column(a), design.column(b));
            same_total += corr(0, 1) + corr(2, 3) + corr(4, 5);
            diff_total += corr(0, 2) + corr(1, 4) + corr(3, 5);
        }
        assert!(
            same_total / 150.0 > diff_total / 150.0 + 0.3,
            "same-cluster correlation should dominate: {} vs {}",
            same_total / 150.0,
            diff_total / 150.0
        );
    }

    #[test]
    fn config_validation_catches_bad_counts() {
        let mut cfg = small_config();
        cfg.n_active = 25;
        assert!(matches!(generate_cluster_data(&cfg, 0), Err(SimulateError::BadConfig(_))));
        let mut cfg = small_config();
        cfg.n_clusters = 7;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn metrics_examples() {
        // Selected {0,1,2} against support {1,2,3}.
        let mask = SelectionMask::new(vec![true, true, true, false, false]);
        let m = metrics(&mask, &[1, 2, 3]);
        assert!((m.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.fscore - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.selection, 3.0);

        // Perfect recovery.
        let mask = SelectionMask::new(vec![false, true, true, true, false]);
        let m = metrics(&mask, &[1, 2, 3]);
        assert_eq!((m.recall, m.precision, m.fscore, m.selection), (1.0, 1.0, 1.0, 3.0));

        // Empty selection.
        let mask = SelectionMask::new(vec![false; 5]);
        let m = metrics(&mask, &[1, 2, 3]);
        assert_eq!((m.recall, m.precision, m.fscore, m.selection), (0.0, 0.0, 0.0, 0.0));
    }

    proptest! {
        #[test]
        fn metrics_match_brute_force_set_arithmetic(
            bits in prop::collection::vec(prop::bool::ANY, 1..60),
            support_bits in prop::collection::vec(prop::bool::ANY, 1..60),
        ) {
            let p = bits.len().min(support_bits.len());
            let bits = &bits[..p];
            let support: Vec<usize> =
                (0..p).filter(|&i| support_bits[i]).collect();
            prop_assume!(!support.is_empty());
            let mask = SelectionMask::new(bits.to_vec());
            let m = metrics(&mask, &support);
            let sel: std::collections::BTreeSet<usize> = mask.indices().into_iter().collect();
            let sup: std::collections::BTreeSet<usize> = support.iter().cloned().collect();
            let tp = sel.intersection(&sup).count() as f64;
            let recall = tp / sup.len() as f64;
            let precision = if sel.is_empty() { 0.0 } else { tp / sel.len() as f64 };
            prop_assert_eq!(m.recall, recall);
            prop_assert_eq!(m.precision, precision);
            prop_assert!(m.fscore <= 2.0 * m.recall.min(m.precision) + 1e-15);
            prop_assert_eq!(m.selection, sel.len() as f64);
        }
    }

    #[test]
    fn irrepresentable_holds_on_orthogonal_design() {
        let corr = vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ];
        let d = design_with_correlations(&corr, 12);
        let (holds, values) = irrepresentable_check(&d, &[0, 1], &[1, 1]).unwrap();
        assert!(holds);
        for v in values {
            assert!(v < 1e-10, "cross products should vanish, got {v}");
        }
    }

    #[test]
    fn irrepresentable_fails_on_duplicated_active() {
        // Noise variable bit-identical to the active one.
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let n = 15;
        let mut x = Array2::<f64>::zeros((n, 3));
        for i in 0..n {
            let v: f64 = rng.sample(StandardNormal);
            x[[i, 0]] = v;
            x[[i, 1]] = v;
            x[[i, 2]] = rng.sample(StandardNormal);
        }
        let d = standardize(&x, &default_names(3)).unwrap();
        let (holds, values) = irrepresentable_check(&d, &[0], &[1]).unwrap();
        assert!(!holds);
        assert!((values[0] - 1.0).abs() < 1e-10, "duplicate saturates the bound: {}", values[0]);
    }

    #[test]
    fn irrepresentable_matches_dense_solve_oracle() {
        let corr = vec![
            vec![1.0, 0.5, 0.3, -0.2],
            vec![0.5, 1.0, 0.1, 0.25],
            vec![0.3, 0.1, 1.0, 0.0],
            vec![-0.2, 0.25, 0.0, 1.0],
        ];
        let d = design_with_correlations(&corr, 16);
        let support = [0usize, 1];
        let signs = [1i8, -1];
        let (_, values) = irrepresentable_check(&d, &support, &signs).unwrap();

        // Oracle: direct 2x2 solve by Gaussian elimination on the Gram
        // matrix, then explicit dot products.
        let g00 = dot(d.column(0), d.column(0));
        let g01 = dot(d.column(0), d.column(1));
        let g11 = dot(d.column(1), d.column(1));
        let det = g00 * g11 - g01 * g01;
        let s = [1.0, -1.0];
        let a0 = (g11 * s[0] - g01 * s[1]) / det;
        let a1 = (-g01 * s[0] + g00 * s[1]) / det;
        for (idx, &j) in [2usize, 3].iter().enumerate() {
            let want =
                (a0 * dot(d.column(j), d.column(0)) + a1 * dot(d.column(j), d.column(1))).abs();
            assert!(
                (values[idx] - want).abs() < 1e-10,
                "value[{idx}] = {} vs oracle {want}",
                values[idx]
            );
        }
    }

    #[test]
    fn irrepresentable_is_invariant_to_noise_permutation() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let n = 14;
        let p = 6;
        let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
        let d = standardize(&x, &default_names(p)).unwrap();
        let (_, values) = irrepresentable_check(&d, &[0, 1], &[1, 1]).unwrap();

        // Permute the noise columns and rerun.
        let perm = [0usize, 1, 4, 5, 2, 3]; // support fixed, noise shuffled
        let mut xp = Array2::<f64>::zeros((n, p));
        for (to, &from) in perm.iter().enumerate() {
            for i in 0..n {
                xp[[i, to]] = x[[i, from]];
            }
        }
        let dp = standardize(&xp, &default_names(p)).unwrap();
        let (_, values_p) = irrepresentable_check(&dp, &[0, 1], &[1, 1]).unwrap();
        let mut a = values.clone();
        let mut b = values_p.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b, "multiset of values must be permutation-invariant");
    }

    #[test]
    fn irrepresentable_rejects_singular_support() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let n = 12;
        let mut x = Array2::<f64>::zeros((n, 3));
        for i in 0..n {
            let v: f64 = rng.sample(StandardNormal);
            x[[i, 0]] = v;
            x[[i, 1]] = v; // duplicate inside the support
            x[[i, 2]] = rng.sample(StandardNormal);
        }
        let d = standardize(&x, &default_names(3)).unwrap();
        assert!(matches!(
            irrepresentable_check(&d, &[0, 1], &[1, 1]),
            Err(SimulateError::SingularGram)
        ));
    }

    #[test]
    fn jacobi_recovers_known_eigenvalues() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let (vals, vecs) = jacobi_eigh(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - 1.0).abs() < 1e-12);
        assert!((sorted[1] - 3.0).abs() < 1e-12);
        // Reconstruction A = V diag V'.
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += vecs[i][k] * vals[k] * vecs[j][k];
                }
                let want = if i == j { 2.0 } else { 1.0 };
                assert!((acc - want).abs() < 1e-12);
            }
        }
    }

    fn tiny_settings(grid: Vec<f64>) -> StudySettings {
        StudySettings {
            family: Family::Linear,
            cv: CvConfig { k: 4, grid_size: 25, ..CvConfig::default() },
            strategy: GroupingStrategy::Correlation,
            c0_grid: grid,
            b: 3,
            threshold: 1.0,
        }
    }

    #[test]
    fn study_rows_follow_methods_and_grid() {
        let cfg = SimulationConfig { repetitions: 2, ..small_config() };
        let methods = [
            MethodSpec::BaseLasso,
            MethodSpec::SelectBoost,
            MethodSpec::NaiveSelectBoost,
            MethodSpec::StabilitySelection { pi_threshold: 0.9 },
        ];
        let settings = tiny_settings(vec![1.0, 0.8]);
        let reports = run_study(&cfg, &methods, &settings).unwrap();
        let labels: Vec<(String, Option<f64>)> =
            reports.iter().map(|r| (r.method.clone(), r.c0)).collect();
        assert_eq!(
            labels,
            vec![
                ("lasso".into(), None),
                ("selectboost".into(), Some(1.0)),
                ("selectboost".into(), Some(0.8)),
                ("naive_selectboost".into(), Some(1.0)),
                ("naive_selectboost".into(), Some(0.8)),
                ("stability_selection".into(), None),
            ]
        );
        for r in &reports {
            assert_eq!(r.per_repetition.len(), 2);
        }
    }

    #[test]
    fn selectboost_at_unit_grid_equals_base_rows() {
        let cfg = SimulationConfig { repetitions: 2, ..small_config() };
        let methods = [MethodSpec::BaseLasso, MethodSpec::SelectBoost];
        let settings = tiny_settings(vec![1.0]);
        let reports = run_study(&cfg, &methods, &settings).unwrap();
        assert_eq!(reports[0].per_repetition, reports[1].per_repetition);
        assert_eq!(reports[0].precision, reports[1].precision);
    }

    #[test]
    fn study_totals_ignore_method_order() {
        let cfg = SimulationConfig { repetitions: 2, ..small_config() };
        let settings = tiny_settings(vec![1.0, 0.8]);
        let a = run_study(
            &cfg,
            &[MethodSpec::BaseLasso, MethodSpec::SelectBoost],
            &settings,
        )
        .unwrap();
        let b = run_study(
            &cfg,
            &[MethodSpec::SelectBoost, MethodSpec::BaseLasso],
            &settings,
        )
        .unwrap();
        let find = |rs: &[MetricsReport], m: &str, c0: Option<f64>| -> MetricsSample {
            let r = rs.iter().find(|r| r.method == m && r.c0 == c0).unwrap();
            r.per_repetition[0]
        };
        for (m, c0) in [("lasso", None), ("selectboost", Some(1.0)), ("selectboost", Some(0.8))] {
            assert_eq!(find(&a, m, c0), find(&b, m, c0), "{m} {c0:?}");
        }
    }
}
