//! The perturb-and-select loop, the `c0` sweep, and the confidence index.
//!
//! One replicate perturbs the design column by column: the columns of each
//! variable's correlation group are sign-aligned, mapped into `R^(N-1)`,
//! summarized by a fitted von Mises-Fisher law, and the variable's column is
//! replaced by a fresh draw mapped back into the centering hyperplane.
//! Singleton groups are left bit-identical, which is what reduces the whole
//! loop to the base selector at `c0 = 1`. The wrapped selector is rerun on
//! every perturbed design and the per-variable selection frequency is the
//! output.

use crate::grouping::{GroupMap, GroupingError, GroupingStrategy};
use crate::selectors::{SelectionMask, SelectionMethod, SelectorError};
use crate::sphere::{phi, phi_inverse, HyperplaneBasis, SphereError, StandardizedDesign};
use crate::streams::{derive_seed, replicate_rng};
use crate::vmf::{self, VmfError};
use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoostError {
    #[error("boost needs at least one replicate")]
    NoReplicates,
    #[error("invalid c0 grid: {0}")]
    BadGrid(String),
    #[error("selection threshold must lie in (0, 1], got {0}")]
    BadThreshold(f64),
    #[error("group map covers {expected} variables, design has {actual}")]
    GroupMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Selector(#[from] SelectorError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Vmf(#[from] VmfError),
    #[error(transparent)]
    Grouping(#[from] GroupingError),
}

/// Per-variable selection frequency over `b` perturbed replicates.
///
/// Every entry is an exact multiple of `1/b`. The threshold (default 1.0,
/// the strictest rule) drives [`select_at_threshold`].
#[derive(Debug, Clone)]
pub struct FrequencyVector {
    zeta: Vec<f64>,
    b: usize,
    c0: f64,
    threshold: f64,
}

impl FrequencyVector {
    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn replicates(&self) -> usize {
        self.b
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Replaces the selection threshold; must lie in (0, 1].
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        assert!(
            threshold > 0.0 && threshold <= 1.0,
            "threshold must lie in (0, 1], got {threshold}"
        );
        self.threshold = threshold;
        self
    }
}

/// One perturbed design: the column of every variable with a non-singleton
/// group is replaced by a vMF draw around the group's mean direction;
/// singleton columns are copied bit for bit.
pub fn perturbed_design<R: Rng + ?Sized>(
    design: &StandardizedDesign,
    groups: &GroupMap,
    basis: &HyperplaneBasis,
    rng: &mut R,
) -> Result<Array2<f64>, BoostError> {
    let n = design.n_obs();
    let p = design.n_vars();
    if groups.n_vars() != p {
        return Err(BoostError::GroupMismatch { expected: p, actual: groups.n_vars() });
    }
    if basis.dimension() != n {
        return Err(SphereError::DimensionMismatch { expected: n, actual: basis.dimension() }.into());
    }

    let mut out = design.values().clone();
    // phi images are shared across overlapping groups.
    let mut images: Vec<Option<Vec<f64>>> = vec![None; p];
    for var in 0..p {
        let members = groups.members(var);
        if members.len() == 1 {
            continue;
        }
        let mut samples = Vec::with_capacity(members.len());
        for (&q, &sign) in members.iter().zip(groups.signs(var)) {
            if images[q].is_none() {
                images[q] = Some(phi(design.column(q), basis)?);
            }
            let img = images[q].as_ref().unwrap();
            samples.push(if sign >= 0 {
                img.clone()
            } else {
                img.iter().map(|v| -v).collect()
            });
        }
        let model = match vmf::fit(&samples) {
            Ok(m) => m,
            Err(VmfError::ZeroResultant) => {
                // Antipodal cancellation within the group (measure-zero
                // configuration): keep the original column.
                log::warn!(
                    "group of variable {var} has zero resultant; column left unperturbed"
                );
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let draw = vmf::sample(&model, rng);
        let column = phi_inverse(&draw, basis)?;
        for (o, v) in out.column_mut(var).iter_mut().zip(column) {
            *o = v;
        }
    }
    Ok(out)
}

/// Runs the perturb-and-select loop: `zeta[p]` is the fraction of `b`
/// perturbed replicates in which the selector kept variable `p`.
///
/// Replicate `i` uses a random stream derived from `(seed, i)`, so the
/// result is independent of execution order and thread count.
pub fn boost<S>(
    design: &StandardizedDesign,
    response: &[f64],
    select: &S,
    groups: &GroupMap,
    b: usize,
    seed: u64,
) -> Result<FrequencyVector, BoostError>
where
    S: SelectionMethod + ?Sized,
{
    if b == 0 {
        return Err(BoostError::NoReplicates);
    }
    let p = design.n_vars();
    if groups.n_vars() != p {
        return Err(BoostError::GroupMismatch { expected: p, actual: groups.n_vars() });
    }
    let basis = HyperplaneBasis::cached(design.n_obs())?;

    let replicate_masks: Vec<Result<Vec<bool>, BoostError>> = (0..b)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(seed, rep as u64);
            let values = perturbed_design(design, groups, &basis, &mut rng)?;
            let perturbed = StandardizedDesign::from_parts_unchecked(
                values,
                design.column_means().to_vec(),
                design.column_scales().to_vec(),
                design.variable_names().to_vec(),
            );
            Ok(select.select(&perturbed, response)?.bits().to_vec())
        })
        .collect();

    let mut counts = vec![0usize; p];
    for mask in replicate_masks {
        for (c, bit) in counts.iter_mut().zip(mask?) {
            if bit {
                *c += 1;
            }
        }
    }
    Ok(FrequencyVector {
        zeta: counts.iter().map(|&c| c as f64 / b as f64).collect(),
        b,
        c0: groups.c0(),
        threshold: 1.0,
    })
}

/// Thresholded selection from a frequency vector.
pub fn select_at_threshold(fv: &FrequencyVector) -> SelectionMask {
    SelectionMask::new(fv.zeta.iter().map(|&z| z >= fv.threshold).collect())
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Strictly decreasing grid starting at 1.
    pub c0_grid: Vec<f64>,
    /// Replicates per grid point.
    pub b: usize,
    /// Frequency threshold for counting a variable as selected.
    pub threshold: f64,
    pub seed: u64,
    pub strategy: GroupingStrategy,
}

/// Selection frequencies per variable per `c0` grid point, with the derived
/// confidence indices.
///
/// `gamma` follows the raw rule (one minus the smallest grid `c0` at which
/// the variable meets the threshold). `gamma_band` is the contiguous
/// variant: one minus the smallest `c0` of the unbroken run of grid points
/// from `c0 = 1` over which the variable stays above the threshold. The two
/// differ only for variables whose selection pattern has gaps.
#[derive(Debug, Clone)]
pub struct ConfidencePath {
    c0_grid: Vec<f64>,
    /// `zeta_by_c0[g][p]`: frequency of variable `p` at grid point `g`.
    zeta_by_c0: Vec<Vec<f64>>,
    threshold: f64,
    b: usize,
    gamma: Vec<f64>,
    gamma_band: Vec<f64>,
    variable_names: Vec<String>,
}

impl ConfidencePath {
    pub fn c0_grid(&self) -> &[f64] {
        &self.c0_grid
    }

    pub fn zeta_by_c0(&self) -> &[Vec<f64>] {
        &self.zeta_by_c0
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn replicates(&self) -> usize {
        self.b
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn gamma_band(&self) -> &[f64] {
        &self.gamma_band
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn n_vars(&self) -> usize {
        self.gamma.len()
    }
}

/// Runs boost at every grid point (groups recomputed per point) and derives
/// the confidence indices.
pub fn sweep<S>(
    design: &StandardizedDesign,
    response: &[f64],
    select: &S,
    config: &SweepConfig,
) -> Result<ConfidencePath, BoostError>
where
    S: SelectionMethod + ?Sized,
{
    let grid = &config.c0_grid;
    if grid.is_empty() {
        return Err(BoostError::BadGrid("grid is empty".into()));
    }
    if grid[0] != 1.0 {
        return Err(BoostError::BadGrid(format!("grid must start at 1, starts at {}", grid[0])));
    }
    for w in grid.windows(2) {
        if !(w[1] < w[0]) {
            return Err(BoostError::BadGrid(format!(
                "grid must be strictly decreasing, saw {} then {}",
                w[0], w[1]
            )));
        }
    }
    if grid[grid.len() - 1] < 0.0 {
        return Err(BoostError::BadGrid("grid values must lie in [0, 1]".into()));
    }
    if !(config.threshold > 0.0 && config.threshold <= 1.0) {
        return Err(BoostError::BadThreshold(config.threshold));
    }

    let mut zeta_by_c0 = Vec::with_capacity(grid.len());
    for (g, &c0) in grid.iter().enumerate() {
        let groups = config.strategy.groups(design, c0)?;
        let fv = boost(
            design,
            response,
            select,
            &groups,
            config.b,
            derive_seed(config.seed, g as u64),
        )?;
        zeta_by_c0.push(fv.zeta);
    }

    let (gamma, gamma_band) = compute_confidence(grid, &zeta_by_c0, config.threshold);
    Ok(ConfidencePath {
        c0_grid: grid.clone(),
        zeta_by_c0,
        threshold: config.threshold,
        b: config.b,
        gamma,
        gamma_band,
        variable_names: design.variable_names().to_vec(),
    })
}

/// Raw and contiguous confidence indices from a frequency matrix.
pub(crate) fn compute_confidence(
    grid: &[f64],
    zeta_by_c0: &[Vec<f64>],
    threshold: f64,
) -> (Vec<f64>, Vec<f64>) {
    let p = zeta_by_c0.first().map_or(0, Vec::len);
    let mut gamma = vec![0.0; p];
    let mut band = vec![0.0; p];
    for var in 0..p {
        // Raw: smallest grid c0 meeting the threshold anywhere.
        let mut last_hit = None;
        for (g, zs) in zeta_by_c0.iter().enumerate() {
            if zs[var] >= threshold {
                last_hit = Some(g);
            }
        }
        if let Some(g) = last_hit {
            gamma[var] = 1.0 - grid[g];
        }
        // Contiguous: unbroken run from c0 = 1 downward.
        let mut run = 0;
        for zs in zeta_by_c0 {
            if zs[var] >= threshold {
                run += 1;
            } else {
                break;
            }
        }
        if run > 0 {
            band[var] = 1.0 - grid[run - 1];
        }
    }
    (gamma, band)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::{correlation_groups, test_support::design_with_correlations};
    use crate::selectors::{CvConfig, Family, LassoSelector};
    use crate::sphere::{default_names, helmert_basis, standardize};
    use ndarray::Array2;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand::Rng as _;
    use rand_distr::StandardNormal;

    /// Deterministic mock: selects exactly the best-correlated variable.
    struct ArgmaxSelector;

    impl SelectionMethod for ArgmaxSelector {
        fn select(
            &self,
            design: &StandardizedDesign,
            response: &[f64],
        ) -> Result<SelectionMask, SelectorError> {
            let mut best = 0;
            let mut best_val = f64::NEG_INFINITY;
            for p in 0..design.n_vars() {
                let v: f64 = design
                    .column(p)
                    .iter()
                    .zip(response)
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    .abs();
                if v > best_val {
                    best_val = v;
                    best = p;
                }
            }
            let mut bits = vec![false; design.n_vars()];
            bits[best] = true;
            Ok(SelectionMask::new(bits))
        }
    }

    fn random_design(seed: u64, n: usize, p: usize) -> StandardizedDesign {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
        standardize(&x, &default_names(p)).unwrap()
    }

    #[test]
    fn boost_at_c0_one_equals_base_selector_exactly() {
        let d = random_design(42, 20, 8);
        let mut rng = ChaCha12Rng::seed_from_u64(420);
        let y: Vec<f64> = d
            .column(1)
            .iter()
            .map(|x| 3.0 * x + 0.4 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let selector = LassoSelector::new(
            Family::Linear,
            CvConfig { k: 4, grid_size: 30, ..CvConfig::default() },
        );
        use crate::selectors::SelectionMethod as _;
        let base = selector.select(&d, &y).unwrap();
        let groups = correlation_groups(&d, 1.0).unwrap();
        for b in [1usize, 3] {
            let fv = boost(&d, &y, &selector, &groups, b, 7).unwrap();
            let boosted = select_at_threshold(&fv);
            assert_eq!(boosted.bits(), base.bits(), "b = {b}");
            for &z in fv.zeta() {
                assert!(z == 0.0 || z == 1.0);
            }
        }
    }

    #[test]
    fn single_replicate_gives_binary_zeta() {
        let d = random_design(1, 15, 5);
        let y: Vec<f64> = d.column(0).to_vec();
        let groups = correlation_groups(&d, 0.2).unwrap();
        let fv = boost(&d, &y, &ArgmaxSelector, &groups, 1, 3).unwrap();
        for &z in fv.zeta() {
            assert!(z == 0.0 || z == 1.0);
        }
    }

    #[test]
    fn zeta_entries_are_multiples_of_one_over_b() {
        let d = random_design(2, 18, 6);
        let y: Vec<f64> = d.column(0).to_vec();
        let groups = correlation_groups(&d, 0.25).unwrap();
        for b in [3usize, 7, 40] {
            let fv = boost(&d, &y, &ArgmaxSelector, &groups, b, 9).unwrap();
            for &z in fv.zeta() {
                let k = (z * b as f64).round();
                assert_eq!(z, k / b as f64, "zeta {z} is not a multiple of 1/{b}");
                assert!((0.0..=1.0).contains(&z));
            }
        }
    }

    #[test]
    fn interchangeable_pair_splits_the_frequency() {
        // Two strongly correlated informative columns plus orthogonal noise;
        // the mock picks exactly one variable per replicate.
        let corr = vec![
            vec![1.0, 0.95, 0.0, 0.0],
            vec![0.95, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ];
        let d = design_with_correlations(&corr, 24);
        // Response along the shared direction of the pair.
        let y: Vec<f64> = d
            .column(0)
            .iter()
            .zip(d.column(1))
            .map(|(a, b)| a + b)
            .collect();
        let groups = correlation_groups(&d, 0.9).unwrap();
        assert_eq!(groups.members(0), &[0, 1]);
        let b = 400;
        let fv = boost(&d, &y, &ArgmaxSelector, &groups, b, 11).unwrap();

        // Brute-force oracle: replay every replicate with the same streams
        // and tally the mock's picks directly.
        let basis = helmert_basis(24).unwrap();
        let mut counts = vec![0usize; 4];
        for rep in 0..b {
            let mut rng = crate::streams::replicate_rng(11, rep as u64);
            let values = perturbed_design(&d, &groups, &basis, &mut rng).unwrap();
            let pd = StandardizedDesign::from_parts_unchecked(
                values,
                d.column_means().to_vec(),
                d.column_scales().to_vec(),
                d.variable_names().to_vec(),
            );
            let m = ArgmaxSelector.select(&pd, &y).unwrap();
            for (c, &bit) in counts.iter_mut().zip(m.bits()) {
                if bit {
                    *c += 1;
                }
            }
        }
        for p in 0..4 {
            assert_eq!(fv.zeta()[p], counts[p] as f64 / b as f64, "variable {p}");
        }
        // The mock picks exactly one variable, and at this correlation the
        // pair dominates: their frequencies sum to one.
        assert_eq!(fv.zeta()[0] + fv.zeta()[1], 1.0);
        assert!(fv.zeta()[0] > 0.15 && fv.zeta()[1] > 0.15, "both of the pair win sometimes");
    }

    #[test]
    fn perturbed_columns_stay_centered_and_unit() {
        let d = random_design(5, 25, 10);
        let groups = correlation_groups(&d, 0.1).unwrap();
        let basis = helmert_basis(25).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        let values = perturbed_design(&d, &groups, &basis, &mut rng).unwrap();
        for p in 0..10 {
            let col = values.column(p);
            let sum: f64 = col.sum();
            let norm: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(sum.abs() < 1e-8, "column {p} sum {sum}");
            assert!((norm - 1.0).abs() < 1e-8, "column {p} norm {norm}");
        }
    }

    #[test]
    fn singleton_columns_are_bit_identical() {
        let d = random_design(6, 20, 6);
        // Mid-range threshold: random columns stay singletons.
        let groups = correlation_groups(&d, 0.95).unwrap();
        let basis = helmert_basis(20).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(66);
        let values = perturbed_design(&d, &groups, &basis, &mut rng).unwrap();
        for p in 0..6 {
            if groups.is_singleton(p) {
                assert_eq!(values.column(p).to_vec(), d.column(p).to_vec());
            }
        }
    }

    #[test]
    fn perfectly_correlated_pair_reproduces_direction() {
        // Exact duplicates: the fitted model is degenerate and every draw
        // returns the shared direction (up to the phi round trip).
        let n = 16;
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let col: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mut x = Array2::<f64>::zeros((n, 3));
        for i in 0..n {
            x[[i, 0]] = col[i];
            x[[i, 1]] = col[i];
            x[[i, 2]] = rng.sample::<f64, _>(StandardNormal);
        }
        let d = standardize(&x, &default_names(3)).unwrap();
        let groups = correlation_groups(&d, 0.9).unwrap();
        let basis = helmert_basis(n).unwrap();
        let values = perturbed_design(&d, &groups, &basis, &mut rng).unwrap();
        for p in [0usize, 1] {
            let dot: f64 = values
                .column(p)
                .iter()
                .zip(d.column(p))
                .map(|(a, b)| a * b)
                .sum();
            assert!((dot - 1.0).abs() < 1e-10, "column {p} moved: <new, old> = {dot}");
        }
    }

    #[test]
    fn correlated_pair_draws_center_on_shared_direction() {
        let corr = vec![
            vec![1.0, 0.95, 0.0],
            vec![0.95, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let n = 20;
        let d = design_with_correlations(&corr, n);
        let groups = correlation_groups(&d, 0.9).unwrap();
        let basis = helmert_basis(n).unwrap();
        // Shared direction: normalized mean of the aligned pair.
        let mut shared: Vec<f64> = d
            .column(0)
            .iter()
            .zip(d.column(1))
            .map(|(a, b)| a + b)
            .collect();
        let snorm = shared.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in shared.iter_mut() {
            *v /= snorm;
        }
        let mut mean = vec![0.0; n];
        let reps = 1000;
        for rep in 0..reps {
            let mut rng = crate::streams::replicate_rng(99, rep);
            let values = perturbed_design(&d, &groups, &basis, &mut rng).unwrap();
            for (m, v) in mean.iter_mut().zip(values.column(0)) {
                *m += v / reps as f64;
            }
        }
        let mnorm = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cos: f64 = mean.iter().zip(&shared).map(|(a, b)| a * b).sum::<f64>() / mnorm;
        let angle = cos.clamp(-1.0, 1.0).acos();
        assert!(angle < 0.05, "mean replacement direction off by {angle} rad");
    }

    #[test]
    fn boost_is_deterministic_across_pool_sizes() {
        let d = random_design(8, 20, 6);
        let y: Vec<f64> = d.column(2).to_vec();
        let groups = correlation_groups(&d, 0.2).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| boost(&d, &y, &ArgmaxSelector, &groups, 64, 123).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.zeta(), b.zeta());
    }

    #[test]
    fn confidence_index_banding() {
        // Grid 1 -> 0.7 by 0.05; threshold 0.95.
        let grid = vec![1.0, 0.95, 0.90, 0.85, 0.80, 0.75, 0.70];
        let thr = 0.95;
        let pattern = |hits: &[bool]| -> Vec<Vec<f64>> {
            hits.iter().map(|&h| vec![if h { 1.0 } else { 0.0 }]).collect()
        };

        // Above threshold everywhere: gamma = band = 0.3.
        let (g, b) = compute_confidence(&grid, &pattern(&[true; 7]), thr);
        assert!((g[0] - 0.3).abs() < 1e-12);
        assert!((b[0] - 0.3).abs() < 1e-12);

        // Never above: both zero.
        let (g, b) = compute_confidence(&grid, &pattern(&[false; 7]), thr);
        assert_eq!((g[0], b[0]), (0.0, 0.0));

        // Above only at {1, 0.95, 0.90, 0.85}: gamma = band = 0.15.
        let (g, b) =
            compute_confidence(&grid, &pattern(&[true, true, true, true, false, false, false]), thr);
        assert!((g[0] - 0.15).abs() < 1e-12);
        assert!((b[0] - 0.15).abs() < 1e-12);

        // Gap pattern {1, _, 0.9}: raw sees the dip at 0.9, band stops at 1.
        let (g, b) =
            compute_confidence(&grid, &pattern(&[true, false, true, false, false, false, false]), thr);
        assert!((g[0] - 0.1).abs() < 1e-12);
        assert_eq!(b[0], 0.0);

        // Selected at c0 = 1 only: zero confidence.
        let (g, b) =
            compute_confidence(&grid, &pattern(&[true, false, false, false, false, false, false]), thr);
        assert_eq!((g[0], b[0]), (0.0, 0.0));
    }

    #[test]
    fn sweep_with_unit_grid_reduces_to_base_selection() {
        let d = random_design(9, 20, 6);
        let y: Vec<f64> = d.column(3).to_vec();
        let config = SweepConfig {
            c0_grid: vec![1.0],
            b: 5,
            threshold: 0.95,
            seed: 31,
            strategy: GroupingStrategy::Correlation,
        };
        let path = sweep(&d, &y, &ArgmaxSelector, &config).unwrap();
        let base = ArgmaxSelector.select(&d, &y).unwrap();
        for p in 0..6 {
            let expect = if base.is_selected(p) { 1.0 } else { 0.0 };
            assert_eq!(path.zeta_by_c0()[0][p], expect);
            assert_eq!(path.gamma()[p], 0.0);
            assert_eq!(path.gamma_band()[p], 0.0);
        }
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let d = random_design(10, 15, 4);
        let y: Vec<f64> = d.column(0).to_vec();
        let mk = |grid: Vec<f64>| SweepConfig {
            c0_grid: grid,
            b: 2,
            threshold: 0.95,
            seed: 0,
            strategy: GroupingStrategy::Correlation,
        };
        for grid in [vec![], vec![0.9, 0.8], vec![1.0, 0.8, 0.8], vec![1.0, 0.5, -0.1]] {
            assert!(matches!(
                sweep(&d, &y, &ArgmaxSelector, &mk(grid)),
                Err(BoostError::BadGrid(_))
            ));
        }
        let mut cfg = mk(vec![1.0, 0.8]);
        cfg.threshold = 0.0;
        assert!(matches!(
            sweep(&d, &y, &ArgmaxSelector, &cfg),
            Err(BoostError::BadThreshold(_))
        ));
    }

    #[test]
    fn threshold_monotonicity_of_selection() {
        let zeta = vec![1.0, 0.995, 0.95, 0.2, 0.0];
        let fv = FrequencyVector { zeta, b: 200, c0: 0.8, threshold: 1.0 };
        let strict = select_at_threshold(&fv);
        assert_eq!(strict.indices(), vec![0]);
        let fv = fv.with_threshold(0.95);
        let loose = select_at_threshold(&fv);
        assert_eq!(loose.indices(), vec![0, 1, 2]);
        for p in strict.indices() {
            assert!(loose.is_selected(p), "lowering the threshold never drops variables");
        }
    }
}
