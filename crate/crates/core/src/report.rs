//! Report emission: CSV and JSON renderings of study metrics, confidence
//! paths, and group maps.
//!
//! All floating-point CSV output uses 17 significant digits so identical
//! runs produce byte-identical files; JSON goes through serde_json's
//! shortest-round-trip formatting, which is likewise exact.

use crate::boost::ConfidencePath;
use crate::grouping::GroupMap;
use crate::simulate::{MetricsReport, SimulationConfig};
use serde::Serialize;

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// One row per repetition x method x grid point.
pub fn metrics_csv(reports: &[MetricsReport]) -> String {
    let mut out = String::from("repetition,method,c0,recall,precision,fscore,selection\n");
    for report in reports {
        for (rep, m) in report.per_repetition.iter().enumerate() {
            let c0 = report.c0.map(fmt_f64).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                rep,
                csv_quote(&report.method),
                c0,
                fmt_f64(m.recall),
                fmt_f64(m.precision),
                fmt_f64(m.fscore),
                fmt_f64(m.selection),
            ));
        }
    }
    out
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    method: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    c0: Option<f64>,
    recall_mean: f64,
    recall_se: f64,
    precision_mean: f64,
    precision_se: f64,
    fscore_mean: f64,
    fscore_se: f64,
    selection_mean: f64,
    selection_se: f64,
    repetitions: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a SimulationConfig,
    rows: Vec<SummaryRow<'a>>,
}

fn standard_error(values: impl Iterator<Item = f64> + Clone, mean: f64) -> f64 {
    let n = values.clone().count() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// JSON summary: per-method means with standard errors, plus the config.
pub fn metrics_summary_json(
    config: &SimulationConfig,
    reports: &[MetricsReport],
) -> String {
    let rows = reports
        .iter()
        .map(|r| SummaryRow {
            method: &r.method,
            c0: r.c0,
            recall_mean: r.recall,
            recall_se: standard_error(r.per_repetition.iter().map(|m| m.recall), r.recall),
            precision_mean: r.precision,
            precision_se: standard_error(
                r.per_repetition.iter().map(|m| m.precision),
                r.precision,
            ),
            fscore_mean: r.fscore,
            fscore_se: standard_error(r.per_repetition.iter().map(|m| m.fscore), r.fscore),
            selection_mean: r.selection,
            selection_se: standard_error(
                r.per_repetition.iter().map(|m| m.selection),
                r.selection,
            ),
            repetitions: r.per_repetition.len(),
        })
        .collect();
    let summary = Summary { config, rows };
    serde_json::to_string_pretty(&summary).expect("summary serialization cannot fail") + "\n"
}

#[derive(Serialize)]
struct ConfidenceVariable<'a> {
    variable: usize,
    name: &'a str,
    gamma: f64,
    gamma_band: f64,
    zeta: &'a [f64],
}

#[derive(Serialize)]
struct ConfidenceDoc<'a> {
    c0_grid: &'a [f64],
    threshold: f64,
    replicates: usize,
    variables: Vec<ConfidenceVariable<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base_fit: Option<BaseFitDoc>,
}

/// Base-selector coefficients expressed on the original data scale.
#[derive(Serialize, Clone)]
pub struct BaseFitDoc {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

/// Full confidence-path JSON: grid, per-variable frequencies, and both
/// confidence indices (`gamma` raw, `gamma_band` contiguous).
pub fn confidence_json(path: &ConfidencePath, base_fit: Option<BaseFitDoc>) -> String {
    // zeta per variable across the grid.
    let per_var: Vec<Vec<f64>> = (0..path.n_vars())
        .map(|p| path.zeta_by_c0().iter().map(|row| row[p]).collect())
        .collect();
    let variables = (0..path.n_vars())
        .map(|p| ConfidenceVariable {
            variable: p + 1,
            name: &path.variable_names()[p],
            gamma: path.gamma()[p],
            gamma_band: path.gamma_band()[p],
            zeta: &per_var[p],
        })
        .collect();
    let doc = ConfidenceDoc {
        c0_grid: path.c0_grid(),
        threshold: path.threshold(),
        replicates: path.replicates(),
        variables,
        base_fit,
    };
    serde_json::to_string_pretty(&doc).expect("confidence serialization cannot fail") + "\n"
}

/// Long-format frequencies for plotting: one row per (c0, variable).
pub fn zeta_long_csv(path: &ConfidencePath) -> String {
    let mut out = String::from("c0,variable,name,zeta\n");
    for (g, &c0) in path.c0_grid().iter().enumerate() {
        for p in 0..path.n_vars() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(c0),
                p + 1,
                csv_quote(&path.variable_names()[p]),
                fmt_f64(path.zeta_by_c0()[g][p]),
            ));
        }
    }
    out
}

/// Per-variable confidence classification: both indices, one row per
/// variable, selected variables (positive band) first by decreasing band.
pub fn confidence_bands_csv(path: &ConfidencePath) -> String {
    let mut order: Vec<usize> = (0..path.n_vars()).collect();
    order.sort_by(|&a, &b| {
        path.gamma_band()[b]
            .total_cmp(&path.gamma_band()[a])
            .then(a.cmp(&b))
    });
    let mut out = String::from("variable,name,gamma,gamma_band\n");
    for p in order {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p + 1,
            csv_quote(&path.variable_names()[p]),
            fmt_f64(path.gamma()[p]),
            fmt_f64(path.gamma_band()[p]),
        ));
    }
    out
}

#[derive(Serialize)]
struct GroupEntry<'a> {
    variable: usize,
    name: &'a str,
    members: Vec<usize>,
    signs: &'a [i8],
}

#[derive(Serialize)]
struct GroupsDoc<'a> {
    c0: f64,
    strategy: &'a str,
    groups: Vec<GroupEntry<'a>>,
}

/// Per-variable member lists and signs (variables reported 1-based).
pub fn groups_json(map: &GroupMap, names: &[String], strategy: &str) -> String {
    let groups = (0..map.n_vars())
        .map(|p| GroupEntry {
            variable: p + 1,
            name: &names[p],
            members: map.members(p).iter().map(|&q| q + 1).collect(),
            signs: map.signs(p),
        })
        .collect();
    let doc = GroupsDoc { c0: map.c0(), strategy, groups };
    serde_json::to_string_pretty(&doc).expect("groups serialization cannot fail") + "\n"
}

#[derive(Serialize)]
struct DiagnoseDoc<'a> {
    support: Vec<usize>,
    holds: bool,
    max_value: f64,
    values: &'a [f64],
}

/// Irrepresentable-condition report (support reported 1-based).
pub fn diagnose_json(support: &[usize], holds: bool, values: &[f64]) -> String {
    let doc = DiagnoseDoc {
        support: support.iter().map(|&j| j + 1).collect(),
        holds,
        max_value: values.iter().cloned().fold(0.0, f64::max),
        values,
    };
    serde_json::to_string_pretty(&doc).expect("diagnose serialization cannot fail") + "\n"
}
