//! L1-penalized regression by cyclic coordinate descent.
//!
//! Linear: `(1/2N) ||y - b0 - X b||^2 + lambda ||b||_1`.
//! Logistic: `(1/N) sum log(1 + exp(-y_i eta_i)) + lambda ||b||_1` with
//! labels in {-1, +1}, solved by iteratively reweighted least squares with a
//! weighted coordinate-descent inner loop and objective step-halving, so the
//! loss is non-increasing across outer iterations.
//!
//! The intercept is never penalized. A fit is converged when no coefficient
//! (intercept included) moves by more than `COORD_TOL` in a full pass.

use super::{Family, SelectorError};
use crate::sphere::StandardizedDesign;

/// Convergence threshold on the largest coefficient change in one pass.
pub(crate) const COORD_TOL: f64 = 1e-7;
/// Hard cap on coordinate passes before giving up.
const MAX_PASSES: usize = 100_000;
/// Probability clamp for the logistic weights.
const P_CLAMP: f64 = 1e-10;

/// `sign(z) * max(|z| - t, 0)`.
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// A converged penalized fit.
#[derive(Debug, Clone)]
pub struct LassoFit {
    pub lambda: f64,
    pub beta: Vec<f64>,
    pub intercept: f64,
    pub objective_value: f64,
    pub family: Family,
}

impl LassoFit {
    /// Indices with nonzero coefficients.
    pub fn active_set(&self) -> Vec<usize> {
        self.beta
            .iter()
            .enumerate()
            .filter_map(|(p, &b)| (b != 0.0).then_some(p))
            .collect()
    }
}

/// Smallest penalty at which the all-zero coefficient vector is optimal
/// (with the intercept at its null-model value).
pub fn lambda_max(design: &StandardizedDesign, y: &[f64], family: Family) -> Result<f64, SelectorError> {
    let n = design.n_obs();
    if y.len() != n {
        return Err(SelectorError::ResponseLength { expected: n, actual: y.len() });
    }
    let nf = n as f64;
    let centered: Vec<f64> = match family {
        Family::Linear => {
            let mean = y.iter().sum::<f64>() / nf;
            y.iter().map(|v| v - mean).collect()
        }
        Family::Logistic => {
            let y01 = to_zero_one(y)?;
            let mean = y01.iter().sum::<f64>() / nf;
            y01.iter().map(|v| v - mean).collect()
        }
    };
    let mut best = 0.0f64;
    for p in 0..design.n_vars() {
        let g: f64 = dot(design.column(p), &centered).abs() / nf;
        best = best.max(g);
    }
    Ok(best)
}

/// Fits the penalized model at a single penalty from a cold start.
pub fn lasso_fit(
    design: &StandardizedDesign,
    y: &[f64],
    lambda: f64,
    family: Family,
) -> Result<LassoFit, SelectorError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(SelectorError::InvalidLambda(lambda));
    }
    let problem = Problem::new(design, y, family)?;
    let mut state = FitState::cold(&problem);
    fit_at(&problem, lambda, &mut state, None)?;
    Ok(state.into_fit(&problem, lambda))
}

// ---------------------------------------------------------------------------
// Internal solver shared with cross-validation (warm starts along a path).
// ---------------------------------------------------------------------------

pub(crate) struct Problem<'a> {
    pub(crate) cols: Vec<&'a [f64]>,
    pub(crate) y: &'a [f64],
    /// Labels remapped to {0, 1}; empty for the linear family.
    y01: Vec<f64>,
    pub(crate) n: usize,
    pub(crate) family: Family,
}

impl<'a> Problem<'a> {
    pub(crate) fn new(
        design: &'a StandardizedDesign,
        y: &'a [f64],
        family: Family,
    ) -> Result<Self, SelectorError> {
        let n = design.n_obs();
        if y.len() != n {
            return Err(SelectorError::ResponseLength { expected: n, actual: y.len() });
        }
        let y01 = match family {
            Family::Linear => Vec::new(),
            Family::Logistic => to_zero_one(y)?,
        };
        let cols = (0..design.n_vars()).map(|p| design.column(p)).collect();
        Ok(Self { cols, y, y01, n, family })
    }

    pub(crate) fn n_vars(&self) -> usize {
        self.cols.len()
    }

    /// Penalized objective at the given coefficients.
    pub(crate) fn objective(&self, beta: &[f64], intercept: f64, lambda: f64) -> f64 {
        let eta = self.linear_predictor(beta, intercept);
        self.loss(&eta) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
    }

    fn loss(&self, eta: &[f64]) -> f64 {
        let nf = self.n as f64;
        match self.family {
            Family::Linear => {
                self.y
                    .iter()
                    .zip(eta)
                    .map(|(yi, e)| (yi - e) * (yi - e))
                    .sum::<f64>()
                    / (2.0 * nf)
            }
            Family::Logistic => {
                self.y
                    .iter()
                    .zip(eta)
                    .map(|(yi, e)| ln_1p_exp(-yi * e))
                    .sum::<f64>()
                    / nf
            }
        }
    }

    fn linear_predictor(&self, beta: &[f64], intercept: f64) -> Vec<f64> {
        let mut eta = vec![intercept; self.n];
        for (p, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                for (e, x) in eta.iter_mut().zip(self.cols[p]) {
                    *e += b * x;
                }
            }
        }
        eta
    }

    fn null_intercept(&self) -> f64 {
        let nf = self.n as f64;
        match self.family {
            Family::Linear => self.y.iter().sum::<f64>() / nf,
            Family::Logistic => {
                let pbar = (self.y01.iter().sum::<f64>() / nf).clamp(1e-12, 1.0 - 1e-12);
                (pbar / (1.0 - pbar)).ln()
            }
        }
    }
}

pub(crate) struct FitState {
    pub(crate) beta: Vec<f64>,
    pub(crate) intercept: f64,
    /// Coordinate passes used by the current `fit_at` call; the
    /// non-convergence cap applies per fit, not per warm-started path.
    passes: usize,
}

impl FitState {
    pub(crate) fn cold(problem: &Problem) -> Self {
        Self {
            beta: vec![0.0; problem.n_vars()],
            intercept: problem.null_intercept(),
            passes: 0,
        }
    }

    pub(crate) fn into_fit(self, problem: &Problem, lambda: f64) -> LassoFit {
        let objective_value = problem.objective(&self.beta, self.intercept, lambda);
        LassoFit {
            lambda,
            beta: self.beta,
            intercept: self.intercept,
            objective_value,
            family: problem.family,
        }
    }
}

/// Solves at one penalty, warm-starting from whatever `state` holds.
///
/// `trace`, when given, records the logistic objective after each outer
/// reweighting step.
pub(crate) fn fit_at(
    problem: &Problem,
    lambda: f64,
    state: &mut FitState,
    trace: Option<&mut Vec<f64>>,
) -> Result<(), SelectorError> {
    state.passes = 0;
    match problem.family {
        Family::Linear => fit_linear(problem, lambda, state)?,
        Family::Logistic => fit_logistic(problem, lambda, state, trace)?,
    }
    // Coefficients at ulp scale come from soft-threshold ties (e.g. an exact
    // duplicate column whose gradient sits exactly at lambda); they are
    // numerically zero and must not count as selections.
    let snap = 1e-12 * state.beta.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    for b in state.beta.iter_mut() {
        if b.abs() < snap {
            *b = 0.0;
        }
    }
    Ok(())
}

fn fit_linear(problem: &Problem, lambda: f64, state: &mut FitState) -> Result<(), SelectorError> {
    let n = problem.n;
    let weights = vec![1.0; n];
    let denom: Vec<f64> = problem
        .cols
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>() / n as f64)
        .collect();
    // Residual y - b0 - X beta.
    let mut m: Vec<f64> = {
        let eta = problem.linear_predictor(&state.beta, state.intercept);
        problem.y.iter().zip(eta).map(|(yi, e)| yi - e).collect()
    };
    solve_weighted(
        problem,
        lambda,
        COORD_TOL,
        &weights,
        n as f64,
        &denom,
        &mut m,
        &mut state.beta,
        &mut state.intercept,
        &mut state.passes,
    )
}

fn fit_logistic(
    problem: &Problem,
    lambda: f64,
    state: &mut FitState,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<(), SelectorError> {
    let n = problem.n;
    let nf = n as f64;
    let p = problem.n_vars();
    let mut eta = problem.linear_predictor(&state.beta, state.intercept);
    let mut prev_obj = problem.objective(&state.beta, state.intercept, lambda);
    let mut weights = vec![0.0; n];
    let mut m = vec![0.0; n];
    let mut denom = vec![0.0; p];
    // The inner quadratic need not be solved tightly while the linearization
    // is still moving; the tolerance tracks the outer step size and the
    // convergence check below only fires after a tight inner solve.
    let mut inner_tol = 1e-4;

    loop {
        // Linearize around the current predictor.
        let mut wsum = 0.0;
        for i in 0..n {
            let prob = sigmoid(eta[i]).clamp(P_CLAMP, 1.0 - P_CLAMP);
            let w = (prob * (1.0 - prob)).max(P_CLAMP);
            weights[i] = w;
            wsum += w;
            m[i] = problem.y01[i] - prob;
        }
        for (dp, col) in denom.iter_mut().zip(&problem.cols) {
            *dp = col.iter().zip(&weights).map(|(x, w)| w * x * x).sum::<f64>() / nf;
        }

        let beta_before = state.beta.clone();
        let b0_before = state.intercept;
        let tight = inner_tol <= COORD_TOL;
        solve_weighted(
            problem,
            lambda,
            inner_tol,
            &weights,
            wsum,
            &denom,
            &mut m,
            &mut state.beta,
            &mut state.intercept,
            &mut state.passes,
        )?;

        // Step-halving on the true objective keeps the loss non-increasing.
        let beta_after = state.beta.clone();
        let b0_after = state.intercept;
        let mut step = 1.0;
        let mut obj;
        loop {
            if step < 1.0 {
                for (b, (before, after)) in state
                    .beta
                    .iter_mut()
                    .zip(beta_before.iter().zip(&beta_after))
                {
                    *b = before + step * (after - before);
                }
                state.intercept = b0_before + step * (b0_after - b0_before);
            }
            eta = problem.linear_predictor(&state.beta, state.intercept);
            obj = problem.objective(&state.beta, state.intercept, lambda);
            if obj <= prev_obj + 1e-14 * prev_obj.abs().max(1.0) || step < 1e-4 {
                break;
            }
            step *= 0.5;
        }
        prev_obj = obj;
        if let Some(t) = trace.as_deref_mut() {
            t.push(obj);
        }

        let mut outer_change = (state.intercept - b0_before).abs();
        for (b, before) in state.beta.iter().zip(&beta_before) {
            outer_change = outer_change.max((b - before).abs());
        }
        if tight && outer_change < COORD_TOL {
            return Ok(());
        }
        inner_tol = (0.02 * outer_change).clamp(COORD_TOL, 1e-4);
        if state.passes > MAX_PASSES {
            return Err(SelectorError::NonConvergence { passes: state.passes });
        }
    }
}

/// Weighted penalized least squares by coordinate descent:
/// `(1/2N) sum w_i (z_i - b0 - x_i b)^2 + lambda ||b||_1`, where the caller
/// supplies `m_i = w_i (z_i - b0 - x_i b)` for the incoming coefficients.
#[allow(clippy::too_many_arguments)]
fn solve_weighted(
    problem: &Problem,
    lambda: f64,
    tol: f64,
    weights: &[f64],
    wsum: f64,
    denom: &[f64],
    m: &mut [f64],
    beta: &mut [f64],
    intercept: &mut f64,
    passes: &mut usize,
) -> Result<(), SelectorError> {
    let p = problem.n_vars();
    let all: Vec<usize> = (0..p).collect();
    loop {
        let full_change = cd_pass(problem, lambda, &all, weights, wsum, denom, m, beta, intercept);
        *passes += 1;
        if *passes > MAX_PASSES {
            return Err(SelectorError::NonConvergence { passes: *passes });
        }
        if full_change < tol {
            return Ok(());
        }
        // Jump to the exact optimum of the current active face; plain
        // coordinate cycling crawls when active columns are strongly
        // correlated. Falls back to cycling if the face system is singular.
        if face_step(problem, lambda, weights, wsum, m, beta, intercept, passes) {
            if *passes > MAX_PASSES {
                return Err(SelectorError::NonConvergence { passes: *passes });
            }
            continue;
        }
        loop {
            let active: Vec<usize> = (0..p).filter(|&q| beta[q] != 0.0).collect();
            let change =
                cd_pass(problem, lambda, &active, weights, wsum, denom, m, beta, intercept);
            *passes += 1;
            if *passes > MAX_PASSES {
                return Err(SelectorError::NonConvergence { passes: *passes });
            }
            if change < tol {
                break;
            }
        }
    }
}

/// Exact minimizer of the weighted penalized quadratic restricted to the
/// current active face (nonzero coordinates with their signs, plus the
/// intercept). Steps that would flip a sign are clipped at zero and the
/// shrunken face is re-solved. Returns false when the face system is not
/// positive definite, leaving the state unchanged for the cycling fallback.
#[allow(clippy::too_many_arguments)]
fn face_step(
    problem: &Problem,
    lambda: f64,
    weights: &[f64],
    wsum: f64,
    m: &mut [f64],
    beta: &mut [f64],
    intercept: &mut f64,
    passes: &mut usize,
) -> bool {
    let nf = problem.n as f64;
    let mut active: Vec<usize> = (0..problem.n_vars()).filter(|&q| beta[q] != 0.0).collect();
    for _kink in 0..active.len() + 2 {
        *passes += 1;
        let a = active.len();
        // Augmented system over [intercept, active coords]:
        //   H [d0, d] = [sum(m), X_A' m - N lambda s]
        // with H = [[sum w, (w'x_j)], [(w'x_i), (x_i' W x_j)]].
        let dim = a + 1;
        let mut h = vec![0.0f64; dim * dim];
        let mut rhs = vec![0.0f64; dim];
        h[0] = wsum;
        rhs[0] = m.iter().sum();
        let wx: Vec<Vec<f64>> = active
            .iter()
            .map(|&j| {
                problem.cols[j]
                    .iter()
                    .zip(weights)
                    .map(|(x, w)| w * x)
                    .collect()
            })
            .collect();
        for (r, &j) in active.iter().enumerate() {
            let col = problem.cols[j];
            h[(r + 1) * dim] = wx[r].iter().sum::<f64>();
            h[r + 1] = h[(r + 1) * dim];
            for (c, wxc) in wx.iter().enumerate().take(r + 1) {
                let v = dot(col, wxc);
                h[(r + 1) * dim + c + 1] = v;
                h[(c + 1) * dim + r + 1] = v;
            }
            rhs[r + 1] = dot(col, m) - nf * lambda * beta[j].signum();
        }
        let Some(delta) = cholesky_solve(&mut h, &rhs, dim) else {
            return false;
        };

        // Clip the step at the first sign flip.
        let mut t = 1.0f64;
        let mut clipped = None;
        for (r, &j) in active.iter().enumerate() {
            let d = delta[r + 1];
            if d != 0.0 && (beta[j] + d) * beta[j].signum() < 0.0 {
                let tj = -beta[j] / d;
                if tj < t {
                    t = tj.max(0.0);
                    clipped = Some(r);
                }
            }
        }
        let d0 = t * delta[0];
        *intercept += d0;
        for (i, mi) in m.iter_mut().enumerate() {
            *mi -= weights[i] * d0;
        }
        for (r, &j) in active.iter().enumerate() {
            let dj = t * delta[r + 1];
            if dj != 0.0 {
                beta[j] += dj;
                for (mi, wxi) in m.iter_mut().zip(&wx[r]) {
                    *mi -= wxi * dj;
                }
            }
        }
        match clipped {
            Some(r) => {
                beta[active[r]] = 0.0;
                active.remove(r);
                if active.is_empty() {
                    return true;
                }
            }
            None => return true,
        }
    }
    true
}

/// In-place Cholesky solve of a dense symmetric system (row-major).
/// Returns None when the matrix is not numerically positive definite.
fn cholesky_solve(h: &mut [f64], rhs: &[f64], dim: usize) -> Option<Vec<f64>> {
    for i in 0..dim {
        for j in 0..=i {
            let mut s = h[i * dim + j];
            for k in 0..j {
                s -= h[i * dim + k] * h[j * dim + k];
            }
            if i == j {
                if s <= 1e-12 * h[i * dim + i].abs().max(1e-300) {
                    return None;
                }
                h[i * dim + i] = s.sqrt();
            } else {
                h[i * dim + j] = s / h[j * dim + j];
            }
        }
    }
    let mut x = rhs.to_vec();
    for i in 0..dim {
        for k in 0..i {
            x[i] -= h[i * dim + k] * x[k];
        }
        x[i] /= h[i * dim + i];
    }
    for i in (0..dim).rev() {
        for k in i + 1..dim {
            x[i] -= h[k * dim + i] * x[k];
        }
        x[i] /= h[i * dim + i];
    }
    Some(x)
}

#[allow(clippy::too_many_arguments)]
fn cd_pass(
    problem: &Problem,
    lambda: f64,
    indices: &[usize],
    weights: &[f64],
    wsum: f64,
    denom: &[f64],
    m: &mut [f64],
    beta: &mut [f64],
    intercept: &mut f64,
) -> f64 {
    let nf = problem.n as f64;
    let mut max_change = 0.0f64;
    for &p in indices {
        if denom[p] <= 0.0 {
            continue;
        }
        let col = problem.cols[p];
        let g = dot(col, m) / nf;
        let u = g + denom[p] * beta[p];
        let new = soft_threshold(u, lambda) / denom[p];
        let delta = new - beta[p];
        if delta != 0.0 {
            for ((mi, &xi), &wi) in m.iter_mut().zip(col).zip(weights) {
                *mi -= wi * xi * delta;
            }
            beta[p] = new;
            max_change = max_change.max(delta.abs());
        }
    }
    if wsum > 0.0 {
        let d0 = m.iter().sum::<f64>() / wsum;
        if d0 != 0.0 {
            *intercept += d0;
            for (mi, &wi) in m.iter_mut().zip(weights) {
                *mi -= wi * d0;
            }
            max_change = max_change.max(d0.abs());
        }
    }
    max_change
}

fn to_zero_one(y: &[f64]) -> Result<Vec<f64>, SelectorError> {
    y.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v == 1.0 {
                Ok(1.0)
            } else if v == -1.0 {
                Ok(0.0)
            } else {
                Err(SelectorError::BadLabels { index: i, value: v })
            }
        })
        .collect()
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(t))` without overflow.
pub(crate) fn ln_1p_exp(t: f64) -> f64 {
    if t <= -37.0 {
        t.exp()
    } else if t <= 18.0 {
        t.exp().ln_1p()
    } else if t <= 33.3 {
        t + (-t).exp()
    } else {
        t
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
