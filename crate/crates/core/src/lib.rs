//! Correlation-aware resampling for variable selection.
//!
//! Given a design matrix with strongly correlated columns, sparse selectors
//! such as the Lasso pick one variable out of each correlated group more or
//! less at random, which hurts precision. This crate wraps any selection
//! method in a perturb-and-reselect loop: columns are standardized onto the
//! unit sphere of the centering hyperplane, each correlation group is
//! replaced by fresh draws from a von Mises-Fisher law fitted to the group,
//! and the wrapped selector is rerun on every perturbed design. Variables
//! that survive the perturbations earn a selection frequency and, across a
//! grid of grouping strengths, a confidence index.
//!
//! Module layout:
//!
//! - [`sphere`]: standardization and the isometry between the centering
//!   hyperplane and `R^(N-1)`.
//! - [`vmf`]: von Mises-Fisher fitting, sampling, and log-density.
//! - [`grouping`]: correlation-threshold and graph-community grouping.
//! - [`selectors`]: coordinate-descent Lasso (linear and logistic),
//!   cross-validation, stability selection, and the naive baseline.
//! - [`boost`]: the perturb-and-select loop, the `c0` sweep, and the
//!   confidence index.
//! - [`simulate`]: the cluster-simulation benchmark, support-recovery
//!   metrics, and the irrepresentable-condition diagnostic.
//! - [`report`]: CSV/JSON emission for the artifacts above.

pub mod boost;
pub mod grouping;
pub mod report;
pub mod selectors;
pub mod simulate;
pub mod sphere;
pub mod streams;
pub mod vmf;

pub use boost::{boost, perturbed_design, select_at_threshold, sweep, ConfidencePath, FrequencyVector, SweepConfig};
pub use grouping::{community_groups, correlation_groups, GroupMap, GroupingStrategy};
pub use selectors::{
    cv_lambda, lasso_fit, lasso_select, naive_selectboost, soft_threshold, stability_selection,
    CvConfig, CvResult, Family, LambdaRule, LassoFit, LassoSelector, SelectionMask, SelectionMethod,
};
pub use simulate::{
    generate_cluster_data, irrepresentable_check, metrics, run_study, GroundTruthDataset,
    MethodSpec, MetricsReport, MetricsSample, SimulationConfig, StudySettings,
};
pub use sphere::{helmert_basis, phi, phi_inverse, standardize, HyperplaneBasis, StandardizedDesign};
pub use vmf::{fit as vmf_fit, log_density as vmf_log_density, sample as vmf_sample, VmfModel};
