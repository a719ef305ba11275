//! Command-line interface: the simulation benchmark, the confidence-index
//! sweep, grouping reports, and the irrepresentable-condition diagnostic.
//!
//! Every command is deterministic under a fixed `--seed`, regardless of
//! `--threads`. Data go to files (or stdout for the report commands);
//! progress notes go to stderr.

mod io;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use selectboost::boost::{sweep, SweepConfig};
use selectboost::grouping::GroupingStrategy;
use selectboost::report;
use selectboost::selectors::{
    lambda_max, lasso_cv_fit, CvConfig, Family, LambdaRule, LassoSelector,
};
use selectboost::simulate::{irrepresentable_check, run_study, MethodSpec, SimulationConfig, StudySettings};
use selectboost::sphere::standardize;
use serde::Deserialize;
use std::path::PathBuf;

/// The default sweep grid: 1 down to 0.7 in steps of 0.05.
const DEFAULT_GRID: [f64; 7] = [1.0, 0.95, 0.90, 0.85, 0.80, 0.75, 0.70];

#[derive(Parser)]
#[command(
    name = "selectboost",
    version,
    about = "Correlation-aware resampling for precise variable selection"
)]
struct Cli {
    /// Worker thread cap (0 = automatic). Results never depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the cluster-simulation benchmark and write metrics.
    Simulate(SimulateArgs),
    /// Sweep c0 on a dataset and report confidence indices.
    Sweep(SweepArgs),
    /// Report the correlation groups of a design at one c0.
    Groups(GroupsArgs),
    /// Check the irrepresentable condition for a given support.
    Diagnose(DiagnoseArgs),
}

/// Options shared by `simulate` and `sweep`; a JSON config file may supply
/// any of them, with explicit flags taking precedence.
#[derive(Args, Default)]
struct CommonArgs {
    /// JSON config file; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model family: linear | logistic.
    #[arg(long)]
    family: Option<String>,
    /// Grouping strategy: correlation | community.
    #[arg(long)]
    grouping: Option<String>,
    /// Comma-separated decreasing c0 grid starting at 1.
    #[arg(long, value_name = "GRID")]
    c0_grid: Option<String>,
    /// Perturbation replicates per grid point.
    #[arg(long = "B", value_name = "B")]
    b: Option<usize>,
    /// Selection-frequency threshold in (0, 1].
    #[arg(long)]
    threshold: Option<f64>,
    /// Cross-validation fold count.
    #[arg(long)]
    cv_k: Option<usize>,
    /// Number of penalties on the CV grid.
    #[arg(long)]
    cv_grid_size: Option<usize>,
    /// Penalty rule: min | 1se.
    #[arg(long)]
    lambda_rule: Option<String>,
    /// Base seed for all randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    n_obs: Option<usize>,
    #[arg(long)]
    n_vars: Option<usize>,
    /// Number of truly informative variables.
    #[arg(long)]
    active: Option<usize>,
    /// Latent clusters among the active variables.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    within_noise: Option<f64>,
    #[arg(long)]
    response_noise: Option<f64>,
    #[arg(long)]
    repetitions: Option<usize>,
    /// Methods to run: any of lasso, selectboost, naive, stability.
    #[arg(long, value_name = "LIST")]
    methods: Option<String>,
    /// Stability-selection frequency threshold.
    #[arg(long)]
    pi_threshold: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Design matrix CSV (header row of variable names).
    #[arg(long)]
    design: Option<PathBuf>,
    /// Response CSV (single column).
    #[arg(long)]
    response: Option<PathBuf>,
}

#[derive(Args)]
struct GroupsArgs {
    /// Design matrix CSV (header row of variable names).
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    c0: f64,
    /// Grouping strategy: correlation | community.
    #[arg(long, default_value = "correlation")]
    grouping: String,
    /// Output directory (omit to print JSON to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Design matrix CSV (header row of variable names).
    #[arg(long)]
    design: PathBuf,
    /// Comma-separated 1-based indices of the assumed support.
    #[arg(long)]
    support: String,
    /// Comma-separated signs (+1/-1) per support member; defaults to +1.
    #[arg(long)]
    signs: Option<String>,
    /// Output directory (omit to print JSON to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Fields a JSON config file may supply.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<String>,
    grouping: Option<String>,
    c0_grid: Option<Vec<f64>>,
    b: Option<usize>,
    threshold: Option<f64>,
    cv_k: Option<usize>,
    cv_grid_size: Option<usize>,
    lambda_rule: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    design: Option<PathBuf>,
    response: Option<PathBuf>,
    n_obs: Option<usize>,
    n_vars: Option<usize>,
    active: Option<usize>,
    clusters: Option<usize>,
    within_noise: Option<f64>,
    response_noise: Option<f64>,
    repetitions: Option<usize>,
    methods: Option<Vec<String>>,
    pi_threshold: Option<f64>,
}

impl FileConfig {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config {}", p.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("invalid config {}", p.display()))
            }
        }
    }
}

/// Settings shared by the two study-like commands after merging flags,
/// config file, and defaults.
struct Resolved {
    family: Family,
    strategy: GroupingStrategy,
    c0_grid: Vec<f64>,
    b: usize,
    threshold: f64,
    cv: CvConfig,
    seed: u64,
    out: Option<PathBuf>,
}

fn resolve(common: &CommonArgs, file: &FileConfig, default_threshold: f64) -> Result<Resolved> {
    let family: Family = common
        .family
        .clone()
        .or_else(|| file.family.clone())
        .unwrap_or_else(|| "logistic".into())
        .parse()
        .map_err(|e: String| anyhow!(e))?;
    let strategy: GroupingStrategy = common
        .grouping
        .clone()
        .or_else(|| file.grouping.clone())
        .unwrap_or_else(|| "correlation".into())
        .parse()
        .map_err(|e: String| anyhow!(e))?;
    let c0_grid = match (&common.c0_grid, &file.c0_grid) {
        (Some(text), _) => parse_grid(text)?,
        (None, Some(grid)) => grid.clone(),
        (None, None) => DEFAULT_GRID.to_vec(),
    };
    let rule: LambdaRule = common
        .lambda_rule
        .clone()
        .or_else(|| file.lambda_rule.clone())
        .unwrap_or_else(|| "min".into())
        .parse()
        .map_err(|e: String| anyhow!(e))?;
    let seed = common.seed.or(file.seed).unwrap_or(42);
    Ok(Resolved {
        family,
        strategy,
        c0_grid,
        b: common.b.or(file.b).unwrap_or(200),
        threshold: common.threshold.or(file.threshold).unwrap_or(default_threshold),
        cv: CvConfig {
            k: common.cv_k.or(file.cv_k).unwrap_or(10),
            grid_size: common.cv_grid_size.or(file.cv_grid_size).unwrap_or(100),
            rule,
            seed,
            ..CvConfig::default()
        },
        seed,
        out: common.out.clone().or_else(|| file.out.clone()),
    })
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("invalid c0 grid value {:?}", tok.trim()))
        })
        .collect()
}

fn parse_methods(text: &str, pi_threshold: f64) -> Result<Vec<MethodSpec>> {
    text.split(',')
        .map(|tok| match tok.trim() {
            "lasso" => Ok(MethodSpec::BaseLasso),
            "selectboost" => Ok(MethodSpec::SelectBoost),
            "naive" | "naive_selectboost" => Ok(MethodSpec::NaiveSelectBoost),
            "stability" | "stability_selection" => {
                Ok(MethodSpec::StabilitySelection { pi_threshold })
            }
            other => bail!("unknown method {other:?}"),
        })
        .collect()
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if cli.threads > 0 {
        // The cap only limits parallelism; results are schedule-independent.
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Groups(args) => cmd_groups(args),
        Command::Diagnose(args) => cmd_diagnose(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let file = FileConfig::load(args.common.config.as_ref())?;
    let resolved = resolve(&args.common, &file, 1.0)?;
    let out = resolved.out.clone().ok_or_else(|| anyhow!("--out is required for simulate"))?;
    let pi_threshold = args.pi_threshold.or(file.pi_threshold).unwrap_or(0.9);
    let methods_text = args
        .methods
        .or_else(|| file.methods.as_ref().map(|m| m.join(",")))
        .unwrap_or_else(|| "lasso,selectboost,naive,stability".into());
    let methods = parse_methods(&methods_text, pi_threshold)?;

    let config = SimulationConfig {
        n_obs: args.n_obs.or(file.n_obs).unwrap_or(100),
        n_vars: args.n_vars.or(file.n_vars).unwrap_or(1000),
        n_active: args.active.or(file.active).unwrap_or(50),
        n_clusters: args.clusters.or(file.clusters).unwrap_or(5),
        within_cluster_noise: args.within_noise.or(file.within_noise).unwrap_or(0.3),
        response_noise: args.response_noise.or(file.response_noise).unwrap_or(1.0),
        repetitions: args.repetitions.or(file.repetitions).unwrap_or(100),
        seed: resolved.seed,
    };
    let settings = StudySettings {
        family: resolved.family,
        cv: resolved.cv,
        strategy: resolved.strategy,
        c0_grid: resolved.c0_grid,
        b: resolved.b,
        threshold: resolved.threshold,
    };

    eprintln!(
        "study: N={} P={} q={} reps={} B={} grid={:?}",
        config.n_obs, config.n_vars, config.n_active, config.repetitions, settings.b, settings.c0_grid
    );
    let reports = run_study(&config, &methods, &settings)?;

    io::write_output(&out, "metrics.csv", &report::metrics_csv(&reports))?;
    io::write_output(&out, "summary.json", &report::metrics_summary_json(&config, &reports))?;
    for r in &reports {
        let c0 = r.c0.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        println!(
            "method={} c0={} recall={:.4} precision={:.4} fscore={:.4} selection={:.2}",
            r.method, c0, r.recall, r.precision, r.fscore, r.selection
        );
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let file = FileConfig::load(args.common.config.as_ref())?;
    let resolved = resolve(&args.common, &file, 0.95)?;
    let out = resolved.out.clone().ok_or_else(|| anyhow!("--out is required for sweep"))?;
    let design_path = args
        .design
        .or_else(|| file.design.clone())
        .ok_or_else(|| anyhow!("--design is required for sweep"))?;
    let response_path = args
        .response
        .or_else(|| file.response.clone())
        .ok_or_else(|| anyhow!("--response is required for sweep"))?;

    let raw = io::read_design(&design_path)?;
    let y = io::read_response(&response_path)?;
    if y.len() != raw.values.nrows() {
        bail!(
            "response has {} rows but the design has {} observations",
            y.len(),
            raw.values.nrows()
        );
    }
    let y = match resolved.family {
        Family::Logistic => io::coerce_labels(&y)?,
        Family::Linear => y,
    };
    let design = standardize(&raw.values, &raw.names)?;

    let selector = LassoSelector::new(resolved.family, resolved.cv.clone());
    let config = SweepConfig {
        c0_grid: resolved.c0_grid.clone(),
        b: resolved.b,
        threshold: resolved.threshold,
        seed: resolved.seed,
        strategy: resolved.strategy,
    };
    eprintln!(
        "sweep: N={} P={} B={} threshold={} grid={:?}",
        design.n_obs(),
        design.n_vars(),
        config.b,
        config.threshold,
        config.c0_grid
    );
    let path = sweep(&design, &y, &selector, &config)?;

    // Base-selector fit reported on the original data scale via the
    // standardization provenance.
    let base_fit = if lambda_max(&design, &y, resolved.family)? > 0.0 {
        let (_cv, fit) = lasso_cv_fit(&design, &y, resolved.family, &resolved.cv)?;
        let coefficients: Vec<f64> = fit
            .beta
            .iter()
            .zip(design.column_scales())
            .map(|(b, s)| b / s)
            .collect();
        let intercept = fit.intercept
            - fit
                .beta
                .iter()
                .zip(design.column_means())
                .zip(design.column_scales())
                .map(|((b, m), s)| b * m / s)
                .sum::<f64>();
        Some(report::BaseFitDoc { intercept, coefficients })
    } else {
        None
    };

    io::write_output(&out, "confidence.json", &report::confidence_json(&path, base_fit))?;
    io::write_output(&out, "zeta_long.csv", &report::zeta_long_csv(&path))?;
    io::write_output(&out, "confidence_bands.csv", &report::confidence_bands_csv(&path))?;
    Ok(())
}

fn cmd_groups(args: GroupsArgs) -> Result<()> {
    let strategy: GroupingStrategy = args.grouping.parse().map_err(|e: String| anyhow!(e))?;
    let raw = io::read_design(&args.design)?;
    let design = standardize(&raw.values, &raw.names)?;
    let map = strategy.groups(&design, args.c0)?;
    let json = report::groups_json(&map, design.variable_names(), strategy.name());
    match args.out {
        Some(dir) => {
            io::write_output(&dir, "groups.json", &json)?;
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<()> {
    let raw = io::read_design(&args.design)?;
    let design = standardize(&raw.values, &raw.names)?;
    let support = io::parse_index_list(&args.support)?;
    let signs: Vec<i8> = match args.signs {
        None => vec![1; support.len()],
        Some(text) => text
            .split(',')
            .map(|tok| match tok.trim() {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => bail!("invalid sign {other:?} (expected +1 or -1)"),
            })
            .collect::<Result<_>>()?,
    };
    let (holds, values) = irrepresentable_check(&design, &support, &signs)?;
    let json = report::diagnose_json(&support, holds, &values);
    match args.out {
        Some(dir) => {
            io::write_output(&dir, "diagnose.json", &json)?;
        }
        None => print!("{json}"),
    }
    Ok(())
}
