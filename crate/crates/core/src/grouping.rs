//! Grouping functions over the correlation structure of a design.
//!
//! Both strategies honor the boundary constraints: `c0 = 1` always yields
//! singletons (even for duplicate columns, where the threshold rule alone
//! would not), and `c0 = 0` puts every variable in one group.
//!
//! Thresholds follow the defining rules as written: the correlation strategy
//! includes ties (`|r| >= c0`), graph-community edges are strict
//! (`|r| > c0`).

use crate::sphere::StandardizedDesign;
use ndarray::Array2;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupingError {
    #[error("c0 must lie in [0, 1], got {0}")]
    C0OutOfRange(f64),
    #[error("group map covers {expected} variables, design has {actual}")]
    VariableCountMismatch { expected: usize, actual: usize },
}

/// Per-variable correlation groups with sign alignment.
///
/// `groups[p]` always contains `p` itself (sign +1). Signs record the sign
/// of the inner product between standardized columns, with sign(0) = +1;
/// they let the perturbation step align antipodal group members before
/// fitting a directional distribution.
#[derive(Debug, Clone, Serialize)]
pub struct GroupMap {
    c0: f64,
    /// Sorted member indices per variable.
    groups: Vec<Vec<usize>>,
    /// Signs aligned with `groups`, entries in {-1, +1}.
    signs: Vec<Vec<i8>>,
}

impl GroupMap {
    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn n_vars(&self) -> usize {
        self.groups.len()
    }

    pub fn members(&self, p: usize) -> &[usize] {
        &self.groups[p]
    }

    pub fn signs(&self, p: usize) -> &[i8] {
        &self.signs[p]
    }

    pub fn is_singleton(&self, p: usize) -> bool {
        self.groups[p].len() == 1
    }

    pub fn sign_of(&self, p: usize, q: usize) -> Option<i8> {
        let pos = self.groups[p].binary_search(&q).ok()?;
        Some(self.signs[p][pos])
    }
}

/// Which grouping rule drives a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingStrategy {
    /// Threshold on pairwise correlation (the default).
    Correlation,
    /// Connected components of the thresholded correlation graph.
    Community,
}

impl GroupingStrategy {
    pub fn groups(
        &self,
        design: &StandardizedDesign,
        c0: f64,
    ) -> Result<GroupMap, GroupingError> {
        match self {
            GroupingStrategy::Correlation => correlation_groups(design, c0),
            GroupingStrategy::Community => community_groups(design, c0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GroupingStrategy::Correlation => "correlation",
            GroupingStrategy::Community => "community",
        }
    }
}

impl std::str::FromStr for GroupingStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "correlation" => Ok(GroupingStrategy::Correlation),
            "community" => Ok(GroupingStrategy::Community),
            other => Err(format!("unknown grouping strategy {other:?}")),
        }
    }
}

fn sign_of_corr(r: f64) -> i8 {
    if r < 0.0 {
        -1
    } else {
        1
    }
}

/// Inner products of standardized columns, i.e. the correlation matrix.
fn correlation_matrix(design: &StandardizedDesign) -> Array2<f64> {
    let x = design.values();
    x.t().dot(x)
}

fn singleton_map(p: usize, c0: f64) -> GroupMap {
    GroupMap {
        c0,
        groups: (0..p).map(|j| vec![j]).collect(),
        signs: (0..p).map(|_| vec![1]).collect(),
    }
}

fn check_c0(c0: f64) -> Result<(), GroupingError> {
    if !(0.0..=1.0).contains(&c0) || c0.is_nan() {
        return Err(GroupingError::C0OutOfRange(c0));
    }
    Ok(())
}

/// Group of `p` = all variables with `|corr(p, q)| >= c0`.
pub fn correlation_groups(
    design: &StandardizedDesign,
    c0: f64,
) -> Result<GroupMap, GroupingError> {
    check_c0(c0)?;
    let p = design.n_vars();
    if c0 == 1.0 {
        // Singletons are axiomatic at c0 = 1, duplicates included.
        return Ok(singleton_map(p, c0));
    }
    let corr = correlation_matrix(design);
    let mut groups = Vec::with_capacity(p);
    let mut signs = Vec::with_capacity(p);
    for i in 0..p {
        let mut members = Vec::new();
        let mut ss = Vec::new();
        for j in 0..p {
            let r = if i == j { 1.0 } else { corr[[i, j]] };
            if r.abs() >= c0 {
                members.push(j);
                ss.push(sign_of_corr(r));
            }
        }
        groups.push(members);
        signs.push(ss);
    }
    Ok(GroupMap { c0, groups, signs })
}

/// Group of `p` = connected component of `p` in the graph with an edge
/// wherever `|corr| > c0`.
pub fn community_groups(
    design: &StandardizedDesign,
    c0: f64,
) -> Result<GroupMap, GroupingError> {
    check_c0(c0)?;
    let p = design.n_vars();
    if c0 == 1.0 {
        return Ok(singleton_map(p, c0));
    }
    let corr = correlation_matrix(design);
    let mut component = vec![usize::MAX; p];
    if c0 == 0.0 {
        // Boundary rule: one universal group.
        component.fill(0);
    } else {
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..p {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = next;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for u in 0..p {
                    if u != v && component[u] == usize::MAX && corr[[v, u]].abs() > c0 {
                        component[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
    }

    let mut by_component: Vec<Vec<usize>> = Vec::new();
    for (v, &c) in component.iter().enumerate() {
        if c >= by_component.len() {
            by_component.resize(c + 1, Vec::new());
        }
        by_component[c].push(v);
    }
    let mut groups = Vec::with_capacity(p);
    let mut signs = Vec::with_capacity(p);
    for i in 0..p {
        let members = by_component[component[i]].clone();
        let ss = members
            .iter()
            .map(|&j| {
                if i == j {
                    1
                } else {
                    sign_of_corr(corr[[i, j]])
                }
            })
            .collect();
        groups.push(members);
        signs.push(ss);
    }
    Ok(GroupMap { c0, groups, signs })
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::sphere::{default_names, helmert_basis, standardize, StandardizedDesign};
    use ndarray::Array2;

    /// Builds a design whose standardized columns have exactly the given
    /// correlation matrix, via its Cholesky factor applied to orthonormal
    /// centered columns (Helmert rows).
    pub fn design_with_correlations(corr: &[Vec<f64>], n: usize) -> StandardizedDesign {
        let p = corr.len();
        assert!(n >= p + 1);
        let chol = cholesky(corr);
        let basis = helmert_basis(n).unwrap();
        let mut x = Array2::<f64>::zeros((n, p));
        for j in 0..p {
            for k in 0..=j {
                let l = chol[j][k];
                for i in 0..n {
                    x[[i, j]] += l * basis.vectors()[[k, i]];
                }
            }
        }
        standardize(&x, &default_names(p)).unwrap()
    }

    fn cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if i == j {
                    assert!(s > 0.0, "matrix not positive definite");
                    l[i][j] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        l
    }
}
