//! Command-line surface: run identity suites on a metric file or catalog
//! entry, print curvature tensors at a point, and list or emit the built-in
//! catalog.
//!
//! Exit codes: 0 all non-skipped checks pass; 1 a check failed; 2 input
//! error; 3 numerical (domain) error while evaluating.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use curvcheck::catalog::{self, Fixture};
use curvcheck::checks::{self, CheckStatus, Suite};
use curvcheck::curvature::{CurvaturePack, PointCtx};
use curvcheck::files;
use curvcheck::report;

#[derive(Parser)]
#[command(
    name = "curvcheck",
    version,
    about = "Pointwise numerical verification of curvature-tensor identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity suites on a metric and report residuals.
    Check(CheckArgs),
    /// Print curvature tensors of a metric at a chart point.
    Tensors(TensorsArgs),
    /// List or emit the built-in metric and fixture catalog.
    Catalog(CatalogArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Metric file (JSON), or a catalog entry name.
    metric: String,
    /// Symmetric subject field b (JSON); defaults to a seeded random field.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Comma-separated suites (bianchi, compat, decomp, abc, purity,
    /// geodesic, gr) or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Sample points per check.
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// Seed for sampling and random subjects.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Global tolerance floor override (checks keep their own noise floors;
    /// larger values loosen every check).
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    /// Write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Catalog parameter overrides, `name=value` (catalog metrics only).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Args)]
struct TensorsArgs {
    /// Metric file (JSON), or a catalog entry name.
    metric: String,
    /// Chart point, comma-separated coordinates.
    #[arg(long)]
    at: String,
    /// Comma-separated tensors: christoffel, riemann, ricci, scalar, weyl.
    #[arg(long, default_value = "riemann,ricci,scalar")]
    what: String,
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Args)]
struct CatalogArgs {
    #[command(subcommand)]
    action: CatalogAction,
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List catalog entries.
    List,
    /// Emit a catalog entry as a metric file (stdout or --out).
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
}

enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => m,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| input_err(format!("bad --param `{item}`, expected name=value")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| input_err(format!("bad numeric value in --param `{item}`")))?;
        out.insert(name.to_string(), value);
    }
    Ok(out)
}

/// Resolve a metric argument: an existing file wins, otherwise a catalog
/// entry name.
fn load_fixture(spec: &str, params: &BTreeMap<String, f64>) -> Result<Fixture, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input_err(format!("cannot read `{spec}`: {e}")))?;
        let file: files::MetricFile = serde_json::from_str(&text)
            .map_err(|e| input_err(format!("cannot parse `{spec}`: {e}")))?;
        if !params.is_empty() && file.kind == "metric" {
            return Err(CliError::Input(
                "--param applies to catalog entries, not metric files".into(),
            ));
        }
        return files::fixture_from_file(&file).map_err(input_err);
    }
    if catalog::entries().iter().any(|e| e.name == spec) {
        return catalog::build(spec, params).map_err(input_err);
    }
    Err(input_err(format!(
        "`{spec}` is neither a readable file nor a catalog entry"
    )))
}

fn validate_fixture(fixture: &Fixture, seed: u64) -> Result<(), CliError> {
    if let Some(metric) = &fixture.metric {
        metric.validate(6, seed ^ 0x7a1d).map_err(|e| {
            let text = e.to_string();
            if text.contains("domain error") {
                CliError::Numerical(text)
            } else {
                CliError::Input(text)
            }
        })?;
    }
    Ok(())
}

fn run_check(args: &CheckArgs) -> Result<ExitCode, CliError> {
    let params = parse_params(&args.params)?;
    let fixture = load_fixture(&args.metric, &params)?;
    validate_fixture(&fixture, args.seed)?;
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::all()
    } else {
        args.suite
            .split(',')
            .map(|s| s.trim().parse::<Suite>())
            .collect::<Result<_, _>>()
            .map_err(input_err)?
    };
    let b_override = match &args.field {
        Some(path) => {
            let metric = fixture
                .metric
                .as_ref()
                .ok_or_else(|| input_err("--field requires a metric-backed fixture"))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_err(format!("cannot read field file: {e}")))?;
            let file: files::FieldFile = serde_json::from_str(&text)
                .map_err(|e| input_err(format!("cannot parse field file: {e}")))?;
            Some(files::field_from_file(metric, &file).map_err(input_err)?)
        }
        None => None,
    };
    let report = checks::run_suite(
        &fixture,
        &suites,
        args.points,
        args.seed,
        args.tol,
        b_override,
    );
    print!("{}", report::render_text(&report));
    if let Some(path) = &args.json {
        std::fs::write(path, report::to_json(&report))
            .map_err(|e| input_err(format!("cannot write report: {e}")))?;
    }
    if report
        .checks
        .iter()
        .any(|c| c.status == CheckStatus::Errored)
    {
        let detail = report
            .checks
            .iter()
            .find(|c| c.status == CheckStatus::Errored)
            .and_then(|c| c.reason.clone())
            .unwrap_or_default();
        return Err(CliError::Numerical(format!(
            "a check errored during evaluation: {detail}"
        )));
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn fmt17(x: f64) -> String {
    report::fmt_f64(x)
}

fn run_tensors(args: &TensorsArgs) -> Result<ExitCode, CliError> {
    let params = parse_params(&args.params)?;
    let fixture = load_fixture(&args.metric, &params)?;
    let metric = fixture
        .metric
        .as_ref()
        .ok_or_else(|| input_err("point fixtures have no chart to evaluate on"))?;
    let point: Vec<f64> = args
        .at
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| input_err("bad --at point"))?;
    if point.len() != metric.dim {
        return Err(input_err(format!(
            "--at needs {} coordinates for this chart",
            metric.dim
        )));
    }
    let names = &metric.coords;
    let pack = CurvaturePack::at(metric, &point)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    for what in args.what.split(',').map(|s| s.trim()) {
        match what {
            "christoffel" => {
                println!("christoffel Gamma^m_jk at ({}):", args.at);
                let n = metric.dim;
                for m in 0..n {
                    for j in 0..n {
                        for k in j..n {
                            let v = *pack.gamma.get(&[m, j, k]);
                            if v != 0.0 {
                                println!(
                                    "  Gamma[^{}, {}, {}] = {}",
                                    names[m],
                                    names[j],
                                    names[k],
                                    fmt17(v)
                                );
                            }
                        }
                    }
                }
            }
            "riemann" => {
                println!("riemann R_jkl^m at ({}):", args.at);
                let n = metric.dim;
                curvcheck::tensor::each_index(n, 4, |idx| {
                    let v = *pack.riemann.get(idx);
                    if v.abs() > 1e-14 * pack.riemann.max_abs().max(1.0) && idx[0] < idx[1] {
                        println!(
                            "  R[{}, {}, {}, ^{}] = {}",
                            names[idx[0]],
                            names[idx[1]],
                            names[idx[2]],
                            names[idx[3]],
                            fmt17(v)
                        );
                    }
                });
            }
            "ricci" => {
                println!("ricci R_kl at ({}):", args.at);
                let n = metric.dim;
                for k in 0..n {
                    for l in k..n {
                        let v = *pack.ricci.get(&[k, l]);
                        if v.abs() > 1e-14 * pack.ricci.max_abs().max(1.0) {
                            println!("  Ric[{}, {}] = {}", names[k], names[l], fmt17(v));
                        }
                    }
                }
                if pack.ricci.max_abs() == 0.0 {
                    println!("  (all components zero)");
                }
            }
            "scalar" => {
                println!("scalar curvature at ({}): {}", args.at, fmt17(pack.scalar));
            }
            "weyl" => {
                if metric.dim < 3 {
                    return Err(input_err("weyl needs dimension >= 3"));
                }
                let ctx = PointCtx::new(metric, &point);
                let spec = curvcheck::abc::AbcSpec::preset(
                    curvcheck::abc::Preset::Conformal,
                    metric.dim,
                )
                .map_err(|e| CliError::Numerical(e.to_string()))?;
                let (c, _) = curvcheck::abc::abc_tensor_values(&ctx, &spec)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                println!("weyl C_jkl^m at ({}):", args.at);
                let n = metric.dim;
                let mut any = false;
                curvcheck::tensor::each_index(n, 4, |idx| {
                    let v = *c.get(idx);
                    if v.abs() > 1e-12 * c.max_abs().max(1.0) && idx[0] < idx[1] {
                        any = true;
                        println!(
                            "  C[{}, {}, {}, ^{}] = {}",
                            names[idx[0]],
                            names[idx[1]],
                            names[idx[2]],
                            names[idx[3]],
                            fmt17(v)
                        );
                    }
                });
                if !any {
                    println!("  (all components zero)");
                }
            }
            other => return Err(input_err(format!("unknown tensor `{other}`"))),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_catalog(args: &CatalogArgs) -> Result<ExitCode, CliError> {
    match &args.action {
        CatalogAction::List => {
            for entry in catalog::entries() {
                println!("{:<24} {}", entry.name, entry.summary);
            }
            Ok(ExitCode::SUCCESS)
        }
        CatalogAction::Emit { name, out, params } => {
            let params = parse_params(params)?;
            let fixture = catalog::build(name, &params).map_err(input_err)?;
            let file = files::fixture_to_file(&fixture);
            let json = serde_json::to_string_pretty(&file)
                .map_err(|e| input_err(format!("serialization failed: {e}")))?;
            match out {
                Some(path) => std::fs::write(path, json + "\n")
                    .map_err(|e| input_err(format!("cannot write `{}`: {e}", path.display())))?,
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(args) => run_check(args),
        Command::Tensors(args) => run_tensors(args),
        Command::Catalog(args) => run_catalog(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
