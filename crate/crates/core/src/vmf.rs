//! Von Mises-Fisher distributions on the unit sphere of `R^d`.
//!
//! Fitting uses the normalized resultant for the mean direction and the
//! closed-form concentration estimate `kappa = rbar (d - rbar^2) / (1 - rbar^2)`
//! (Banerjee et al.); sampling uses the Wood/Ulrich tangent-normal rejection
//! construction. The log-density carries the full Bessel-function
//! normalization constant, evaluated in log scale so concentrations up to
//! 1e6 stay finite.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use thiserror::Error;

/// Fitted concentrations above this are treated as degenerate: rejection
/// sampling efficiency and the Bessel evaluation both degrade, and at that
/// concentration draws are indistinguishable from the mean direction anyway.
pub const KAPPA_CAP: f64 = 1e5;

/// Resultant lengths this close to 1 mean the samples are (numerically)
/// identical up to sign alignment.
const DEGENERATE_RBAR_TOL: f64 = 1e-9;

const REJECTION_LIMIT: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum VmfError {
    #[error("sample {index} is not unit-norm: |x| = {norm}")]
    NotUnitNorm { index: usize, norm: f64 },
    #[error("resultant vector is numerically zero; mean direction is undefined")]
    ZeroResultant,
    #[error("no samples provided")]
    EmptySample,
    #[error("model is degenerate (point mass); log-density is undefined")]
    DegenerateModel,
    #[error("dimension mismatch: model dimension {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("mean direction must be unit-norm and kappa non-negative")]
    InvalidParameters,
}

/// Mean direction and concentration of a von Mises-Fisher law.
#[derive(Debug, Clone)]
pub struct VmfModel {
    mu: Vec<f64>,
    kappa: f64,
    degenerate: bool,
}

impl VmfModel {
    /// Builds a non-degenerate model from explicit parameters.
    pub fn new(mu: Vec<f64>, kappa: f64) -> Result<Self, VmfError> {
        let norm = l2_norm(&mu);
        if (norm - 1.0).abs() > 1e-10 || !kappa.is_finite() || kappa < 0.0 {
            return Err(VmfError::InvalidParameters);
        }
        Ok(Self { mu, kappa, degenerate: false })
    }

    /// A point mass at `mu`: sampling returns `mu` exactly.
    pub fn degenerate(mu: Vec<f64>) -> Result<Self, VmfError> {
        let norm = l2_norm(&mu);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(VmfError::InvalidParameters);
        }
        Ok(Self { mu, kappa: f64::INFINITY, degenerate: true })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dimension(&self) -> usize {
        self.mu.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }
}

/// Fits a vMF model to unit vectors.
///
/// A single sample, a resultant length within 1e-9 of 1, or a fitted
/// concentration above [`KAPPA_CAP`] all yield a degenerate model that
/// reproduces the mean direction exactly; this is what makes singleton
/// groups a no-op in the perturbation loop.
pub fn fit(samples: &[Vec<f64>]) -> Result<VmfModel, VmfError> {
    let m = samples.len();
    if m == 0 {
        return Err(VmfError::EmptySample);
    }
    let d = samples[0].len();
    for (i, s) in samples.iter().enumerate() {
        if s.len() != d {
            return Err(VmfError::DimensionMismatch { expected: d, actual: s.len() });
        }
        let norm = l2_norm(s);
        if (norm - 1.0).abs() > 1e-8 {
            return Err(VmfError::NotUnitNorm { index: i, norm });
        }
    }
    let mut resultant = vec![0.0; d];
    for s in samples {
        for (r, x) in resultant.iter_mut().zip(s) {
            *r += x;
        }
    }
    let rnorm = l2_norm(&resultant);
    if rnorm < 1e-12 {
        return Err(VmfError::ZeroResultant);
    }
    let mu: Vec<f64> = resultant.iter().map(|r| r / rnorm).collect();
    let rbar = rnorm / m as f64;
    if m == 1 || rbar > 1.0 - DEGENERATE_RBAR_TOL {
        return VmfModel::degenerate(mu);
    }
    let kappa = rbar * (d as f64 - rbar * rbar) / (1.0 - rbar * rbar);
    if kappa > KAPPA_CAP {
        return VmfModel::degenerate(mu);
    }
    VmfModel::new(mu, kappa)
}

/// Draws one unit vector from the model.
///
/// Degenerate models return `mu` exactly. Otherwise the Wood/Ulrich scheme:
/// the cosine `t` of the angle to `mu` is drawn by rejection with density
/// proportional to `exp(kappa t) (1 - t^2)^((d-3)/2)`, combined with a
/// uniform direction in the tangent space of `mu`.
pub fn sample<R: Rng + ?Sized>(model: &VmfModel, rng: &mut R) -> Vec<f64> {
    if model.degenerate {
        return model.mu.clone();
    }
    let d = model.dimension();
    let kappa = model.kappa;
    if d == 1 {
        // S^0 = {-1, +1}: a two-point distribution.
        let p_mu = 1.0 / (1.0 + (-2.0 * kappa).exp());
        let keep: f64 = rng.random();
        return if keep < p_mu { model.mu.clone() } else { vec![-model.mu[0]] };
    }

    let dm1 = (d - 1) as f64;
    let b = dm1 / (2.0 * kappa + (4.0 * kappa * kappa + dm1 * dm1).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + dm1 * (1.0 - x0 * x0).ln();
    let beta = Beta::new(dm1 / 2.0, dm1 / 2.0).expect("valid beta parameters");

    let mut t = 0.0;
    let mut accepted = false;
    for _ in 0..REJECTION_LIMIT {
        let z: f64 = beta.sample(rng);
        let u: f64 = rng.random();
        let cand = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        if kappa * cand + dm1 * (1.0 - x0 * cand).ln() - c >= u.ln() {
            t = cand;
            accepted = true;
            break;
        }
    }
    assert!(accepted, "vMF rejection sampler exceeded {REJECTION_LIMIT} iterations");

    // Uniform direction in the tangent space of mu.
    let mut v = vec![0.0; d];
    loop {
        for vi in v.iter_mut() {
            *vi = rng.sample::<f64, _>(StandardNormal);
        }
        let along = dot(&v, &model.mu);
        for (vi, mi) in v.iter_mut().zip(&model.mu) {
            *vi -= along * mi;
        }
        let norm = l2_norm(&v);
        if norm > 1e-12 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            break;
        }
    }

    let sin_part = (1.0 - t * t).max(0.0).sqrt();
    let mut out: Vec<f64> = model
        .mu
        .iter()
        .zip(&v)
        .map(|(m, w)| t * m + sin_part * w)
        .collect();
    let norm = l2_norm(&out);
    for o in out.iter_mut() {
        *o /= norm;
    }
    out
}

/// Log-density at a unit vector `x`.
///
/// `log K(kappa) + kappa <mu, x>` with
/// `log K(kappa) = (d/2 - 1) log kappa - (d/2) log 2pi - log I_{d/2-1}(kappa)`.
pub fn log_density(model: &VmfModel, x: &[f64]) -> Result<f64, VmfError> {
    if model.degenerate {
        return Err(VmfError::DegenerateModel);
    }
    let d = model.dimension();
    if x.len() != d {
        return Err(VmfError::DimensionMismatch { expected: d, actual: x.len() });
    }
    let norm = l2_norm(x);
    if (norm - 1.0).abs() > 1e-8 {
        return Err(VmfError::NotUnitNorm { index: 0, norm });
    }
    let df = d as f64;
    let kappa = model.kappa;
    let log_norm_const = if kappa == 0.0 {
        // kappa -> 0 limit: minus the log surface area of S^(d-1).
        special::ln_gamma(df / 2.0) + (df / 2.0 - 1.0) * std::f64::consts::LN_2
            - (df / 2.0) * (2.0 * std::f64::consts::PI).ln()
    } else {
        (df / 2.0 - 1.0) * kappa.ln()
            - (df / 2.0) * (2.0 * std::f64::consts::PI).ln()
            - special::log_bessel_i(df / 2.0 - 1.0, kappa)
    };
    Ok(log_norm_const + kappa * dot(&model.mu, x))
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Log-scale special functions for the normalization constant.
pub(crate) mod special {
    /// Log-gamma for positive arguments (Lanczos, g = 7, n = 9).
    pub fn ln_gamma(x: f64) -> f64 {
        const COEF: [f64; 9] = [
            0.999_999_999_999_809_93,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_13,
            -176.615_029_162_140_59,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_571_6e-6,
            1.505_632_735_149_311_6e-7,
        ];
        debug_assert!(x > 0.0);
        if x < 0.5 {
            // Reflection keeps accuracy near zero.
            return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln()
                - ln_gamma(1.0 - x);
        }
        let x = x - 1.0;
        let mut acc = COEF[0];
        for (i, c) in COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + 7.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }

    /// `log I_v(x)` for `v >= 0`, `x >= 0`, stable for `x` up to 1e6.
    ///
    /// Power series in log scale with periodic renormalization for small and
    /// moderate arguments; Hankel's large-argument expansion once
    /// `x >= max(1e4, v^2)`, where it converges rapidly.
    pub fn log_bessel_i(v: f64, x: f64) -> f64 {
        debug_assert!(v >= 0.0 && x >= 0.0);
        if x == 0.0 {
            return if v == 0.0 { 0.0 } else { f64::NEG_INFINITY };
        }
        if x >= 1e4 && x >= v * v {
            return log_bessel_i_hankel(v, x);
        }
        log_bessel_i_series(v, x)
    }

    fn log_bessel_i_series(v: f64, x: f64) -> f64 {
        // I_v(x) = (x/2)^v / Gamma(v+1) * sum_k prod_{j<=k} r_j,
        // r_j = (x^2/4) / (j (j + v)). All terms positive: no cancellation.
        let log_first = v * (x / 2.0).ln() - ln_gamma(v + 1.0);
        let ratio_num = x * x / 4.0;
        let mut sum = 1.0f64;
        let mut term = 1.0f64;
        let mut log_offset = 0.0f64;
        const RESCALE: f64 = 1e280;
        for k in 1..200_000u64 {
            let kf = k as f64;
            term *= ratio_num / (kf * (kf + v));
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            if sum > RESCALE {
                log_offset += RESCALE.ln();
                sum /= RESCALE;
                term /= RESCALE;
            }
        }
        log_first + log_offset + sum.ln()
    }

    fn log_bessel_i_hankel(v: f64, x: f64) -> f64 {
        // I_v(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(v) / (8x)^k,
        // truncated at the smallest term.
        let mu4 = 4.0 * v * v;
        let mut sum = 1.0f64;
        let mut term = 1.0f64;
        for k in 1..=30u64 {
            let kf = k as f64;
            let next = term * -(mu4 - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln()
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        // Reference values computed independently with mpmath (40 digits).
        #[test]
        fn ln_gamma_reference_values() {
            let cases = [
                (0.5, 0.572_364_942_924_700_1),
                (1.0, 0.0),
                (1.5, -0.120_782_237_635_245_22),
                (5.0, 3.178_053_830_347_945_6),
                (25.5, 56.389_167_643_719_95),
                (51.0, 148.477_766_951_773_03),
            ];
            for (x, want) in cases {
                let got = ln_gamma(x);
                assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "lnGamma({x}) = {got}, want {want}");
            }
        }

        #[test]
        fn log_bessel_series_reference_values() {
            let cases: [(f64, f64, f64); 12] = [
                (0.0, 0.1, 0.002_498_439_233_876_243_7),
                (0.0, 1.0, 0.235_914_358_507_178_65),
                (0.0, 2.0, 0.823_993_541_482_956_3),
                (0.5, 2.0, 0.716_002_429_689_468),
                (1.0, 5.0, 3.191_942_030_545_675_5),
                (4.5, 3.7, -0.594_100_217_370_827_3),
                (24.0, 1.0, -71.410_263_653_678_9),
                (24.0, 30.0, 18.092_607_937_372_57),
                (49.0, 200.0, 190.444_878_776_948_15),
                (0.5, 700.0, 695.805_521_299_273_6),
                (12.0, 50.0, 45.680_071_708_787_276),
                (49.5, 100.0, 84.706_735_075_631_24),
            ];
            for (v, x, want) in cases {
                let got = log_bessel_i(v, x);
                let tol = 1e-11 * want.abs().max(1.0);
                assert!((got - want).abs() < tol, "logI({v},{x}) = {got}, want {want}");
            }
        }

        #[test]
        fn log_bessel_large_argument_reference_values() {
            let cases = [
                (2.0, 1e4, 9_994.475_703_771_432),
                (24.5, 1e5, 99_993.321_598_719_33),
                (49.5, 1e6, 999_992.172_081_187_2),
            ];
            for (v, x, want) in cases {
                let got = log_bessel_i(v, x);
                assert!(
                    (got - want).abs() < 1e-9 * want.abs(),
                    "logI({v},{x}) = {got}, want {want}"
                );
            }
        }

        #[test]
        fn series_and_hankel_agree_at_the_switch() {
            // Just below / just above the x >= 1e4 branch point.
            for v in [0.0, 0.5, 3.0, 20.5] {
                let below = log_bessel_i(v, 9_999.0);
                let series_above = log_bessel_i_series(v, 10_001.0);
                let hankel_above = log_bessel_i_hankel(v, 10_001.0);
                assert!((series_above - hankel_above).abs() < 1e-9 * series_above.abs());
                assert!(below < series_above);
            }
        }

        #[test]
        fn log_bessel_at_zero() {
            assert_eq!(log_bessel_i(0.0, 0.0), 0.0);
            assert_eq!(log_bessel_i(2.5, 0.0), f64::NEG_INFINITY);
        }
    }
}
