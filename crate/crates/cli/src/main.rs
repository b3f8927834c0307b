use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use freeboundary::ck::{ck_expand, convergence_diagnostics, instantiate_model, system_residual, CauchyData};
use freeboundary::degenerate::{Axis, GridField, TensorGrid};
use freeboundary::exact::{ModelConstants, QuadratureSpec};
use freeboundary::harness::{
    deglin_report, diffeo_report, direct_halfspace_report, emit_plot_data, halfspace_report, metric_report,
    ode_report, plot_csv, run_pipeline, weiss_report, CheckRecord, ReportDocument, ScenarioConfig,
};
use freeboundary::hodograph::{legendre_from_solution, residual_original, residual_system, LegendreState};
use freeboundary::series::text::{parse_series, write_series};
use freeboundary::series::NormParams;
use freeboundary::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "freeboundary", version, about = "Constructive checks for the sublinear free boundary system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Common {
    /// Directory for the report and plot files
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone, Copy)]
struct Model {
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
}

impl Model {
    fn constants(&self) -> anyhow::Result<ModelConstants> {
        if self.n != 2 && self.n != 3 {
            bail!("n must be 2 or 3, got {}", self.n);
        }
        Ok(ModelConstants::new(self.q, self.n, self.m)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ResidualMode {
    System,
    Original,
}

#[derive(Subcommand)]
enum Command {
    /// Residual and Weiss checks of a random half-space solution
    Halfspace {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Weiss energy of the half-space solution, one row per radius
    Weiss {
        #[command(flatten)]
        model: Model,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5,1")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 12)]
        radial_points: usize,
        #[arg(long, default_value_t = 8)]
        angular_points: usize,
        #[arg(long, default_value_t = 14)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Cauchy-Kowalevski series for series-format boundary data
    CkSolve {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Boundary data, one series block per component
        #[arg(long, value_name = "FILE")]
        data: PathBuf,
        /// JSON report path
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        #[arg(long, default_value_t = 0.5)]
        big_r: f64,
        #[arg(long, default_value_t = 0.1)]
        small_r: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-difference solve of the original system on a box
    DirectSolve {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 65)]
        count: usize,
        #[arg(long, default_value_t = 1.0)]
        half_width: f64,
        /// Use the series reconstruction of this scenario as boundary data
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Degenerate linear solver: convergence and the weighted estimate
    DeglinSolve {
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Partial hodograph-Legendre transform of a grid file
    Transform {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        q: f64,
        /// Output grid file
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Height of the transformed box; defaults to half the largest height in the input
        #[arg(long)]
        height: Option<f64>,
        #[arg(long)]
        vcount: Option<usize>,
        /// Values of the first component below this count as zero
        #[arg(long, default_value_t = 1e-12)]
        floor: f64,
    },
    /// Residual of a Legendre state or of a field in original coordinates
    Residual {
        #[arg(long, value_enum)]
        mode: ResidualMode,
        /// Grid file, or a series file in system mode
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// JSON report path
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// One-dimensional degenerate ODE: closed forms, bounds, Green's function
    OdeCheck {
        #[arg(long, default_value_t = 2.5)]
        gamma: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Intrinsic metric comparability and doubling
    MetricCheck {
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Properties of the translation diffeomorphisms
    DiffeoCheck {
        /// Tangential vector, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.1,0.1")]
        a: Vec<f64>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Full scenario: series solve, reconstruction and every configured check
    Pipeline {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn render(doc: &ReportDocument, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => doc.to_json()?,
        Format::Csv => doc.checks_csv()?,
    })
}

/// Prints the report, writes it and its plot data under `--out`, and
/// returns whether every check passed.
fn emit(doc: &ReportDocument, common: &Common, plots: &[String]) -> anyhow::Result<bool> {
    let text = render(doc, common.format)?;
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let ext = if common.format == Format::Json { "json" } else { "csv" };
        fs::write(dir.join(format!("{}.{ext}", doc.scenario)), &text)?;
        for sel in plots {
            emit_plot_data(doc, sel, dir)?;
        }
    }
    for c in doc.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: measured {:e}, bound {:e}", c.name, c.measured, c.bound);
    }
    Ok(doc.all_pass())
}

fn nonempty_plots(doc: &ReportDocument) -> Vec<String> {
    let p = &doc.plots;
    [("fb", p.fb.is_empty()), ("weiss", p.weiss.is_empty()), ("norms", p.norms.is_empty()), ("residual", p.residual.is_empty())]
        .iter()
        .filter(|(_, empty)| !empty)
        .map(|(s, _)| s.to_string())
        .collect()
}

fn write_grid(g: &GridField, path: &Path) -> anyhow::Result<()> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    g.write_to(std::io::BufWriter::new(f))?;
    Ok(())
}

fn read_grid(path: &Path) -> anyhow::Result<GridField> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(GridField::read_from(f)?)
}

fn ck_solve(
    model: Model,
    order: usize,
    data: &Path,
    threshold: f64,
    params: (f64, f64),
) -> anyhow::Result<(ReportDocument, serde_json::Value)> {
    let cn = model.constants()?;
    let text = fs::read_to_string(data).with_context(|| format!("reading {}", data.display()))?;
    let v0: Vec<_> = parse_series::<f64>(&text)?.iter().map(|s| s.with_order(order)).collect();
    if v0.len() != cn.m || v0.iter().any(|s| s.dim() != cn.n) {
        bail!("data has {} components, expected {} series in {} variables", v0.len(), cn.m, cn.n);
    }
    let data = CauchyData::new(v0, threshold)?;
    let sys = instantiate_model(cn);
    let sol = ck_expand(&sys, &data, order)?;
    let residual = if order >= 2 {
        system_residual(&sys, &sol.v)?.iter().map(|s| s.max_abs_in_orders(0, s.order())).fold(0.0, f64::max)
    } else {
        0.0
    };
    let recovery =
        sol.v.iter().zip(&data.v0).map(|(v, d)| (&v.trace() - d).max_abs_in_orders(0, order)).fold(0.0, f64::max);
    let params = NormParams::new(params.0, params.1, order)?;
    let diag = convergence_diagnostics(&sol.v, &params, None);
    let mut doc = ReportDocument::new("ck_solve");
    doc.push(CheckRecord::at_most("smallness", "epsilon0", data.epsilon0, threshold));
    doc.push(CheckRecord::at_most("series_residual", "through order s-2", residual, 1e-10));
    doc.push(CheckRecord::at_most("data_recovery", "v(y', 0) = v0", recovery, 1e-12));
    doc.plots.norms = diag.order_norms.iter().enumerate().map(|(o, &x)| [o as f64, x]).collect();
    let extra = json!({
        "coefficients": write_series(&sol.v),
        "normal_derivative": sol.p,
        "order_norms": diag.order_norms,
        "theta": diag.theta,
        "radius_estimate": if diag.radius.is_finite() { json!(diag.radius) } else { json!(null) },
        "residual_max": residual,
    });
    Ok((doc, extra))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Halfspace { model, samples, common } => {
            let doc = halfspace_report(model.constants()?, samples, common.seed)?;
            emit(&doc, &common, &nonempty_plots(&doc))
        }
        Command::Weiss { model, radii, radial_points, angular_points, depth, common } => {
            let spec = QuadratureSpec { radial_points, angular_points, depth };
            let doc = weiss_report(model.constants()?, &radii, &spec)?;
            if common.format == Format::Csv {
                print!("{}", plot_csv(&doc, "weiss")?);
                if let Some(dir) = &common.out {
                    emit_plot_data(&doc, "weiss", dir)?;
                }
                return Ok(doc.all_pass());
            }
            emit(&doc, &common, &nonempty_plots(&doc))
        }
        Command::CkSolve { model, order, data, report, threshold, big_r, small_r, common } => {
            let (doc, extra) = ck_solve(model, order, &data, threshold, (big_r, small_r))?;
            let ok = emit(&doc, &common, &nonempty_plots(&doc))?;
            if let Some(path) = report {
                let mut v = serde_json::to_value(&doc)?;
                if let (Some(obj), Some(more)) = (v.as_object_mut(), extra.as_object()) {
                    obj.extend(more.clone());
                }
                fs::write(&path, serde_json::to_string_pretty(&v)?)?;
            }
            Ok(ok)
        }
        Command::DirectSolve { model, count, half_width, config, common } => {
            if let Some(path) = config {
                let mut cfg = ScenarioConfig::load(&path)?;
                cfg.checks.residual = false;
                cfg.checks.weiss = false;
                cfg.checks.norms = false;
                cfg.checks.free_boundary = false;
                cfg.checks.direct = true;
                let doc = pipeline_doc(run_pipeline(&cfg))?;
                return emit(&doc, &common, &[]);
            }
            let (doc, u) = direct_halfspace_report(model.constants()?, count, half_width)?;
            if let Some(dir) = &common.out {
                fs::create_dir_all(dir)?;
                write_grid(&u, &dir.join("direct.grid"))?;
            }
            emit(&doc, &common, &[])
        }
        Command::DeglinSolve { gamma, n, common } => {
            if n != 2 && n != 3 {
                bail!("n must be 2 or 3, got {n}");
            }
            emit(&deglin_report(gamma, n, common.seed)?, &common, &[])
        }
        Command::Transform { input, q, out, height, vcount, floor } => {
            let mut u = read_grid(&input)?;
            for k in 0..u.grid.len() {
                if u.values[k * u.m] < floor {
                    u.values[k * u.m..(k + 1) * u.m].iter_mut().for_each(|v| *v = 0.0);
                }
            }
            let (n, m) = (u.grid.dim(), u.m);
            let cn = ModelConstants::new(q, n, m)?;
            let top = (0..u.grid.len())
                .map(|k| (u.get(k, 0).max(0.0) / cn.alpha).powf(1.0 / cn.kappa))
                .fold(0.0, f64::max);
            let height = height.unwrap_or(0.5 * top);
            if !(height > 0.0) {
                bail!("input has no positive first component; nothing to transform");
            }
            let mut axes = u.grid.axes[..n - 1].to_vec();
            axes.push(Axis::graded(0.0, height, vcount.unwrap_or(u.grid.axes[n - 1].count)));
            let state = legendre_from_solution(&u, &cn, TensorGrid::new(axes)?)?;
            let grid = state.grid().context("transform produced a non-grid state")?;
            write_grid(grid, &out)?;
            println!("wrote {}", out.display());
            Ok(true)
        }
        Command::Residual { mode, input, q, tol, report, common } => {
            let bytes = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let mut doc = ReportDocument::new("residual");
            let measured = match mode {
                ResidualMode::System => {
                    let state = if bytes.starts_with(b"FBGRID") {
                        let g = GridField::read_from(&bytes[..])?;
                        LegendreState::from_grid(ModelConstants::new(q, g.grid.dim(), g.m)?, g)?
                    } else {
                        let v = parse_series::<f64>(std::str::from_utf8(&bytes)?)?;
                        let Some(first) = v.first() else { bail!("no series in {}", input.display()) };
                        LegendreState::from_series(ModelConstants::new(q, first.dim(), v.len())?, v)?
                    };
                    residual_system(&state)?.max_abs()
                }
                ResidualMode::Original => {
                    let u = GridField::read_from(&bytes[..])?;
                    let points: Vec<Vec<f64>> = (0..u.grid.len())
                        .map(|k| u.grid.unflat(k))
                        .filter(|idx| !u.grid.is_boundary(idx))
                        .map(|idx| u.grid.point(&idx))
                        .collect();
                    residual_original(&u, q, &points).iter().flatten().fold(0.0, |a: f64, v| a.max(v.abs()))
                }
            };
            doc.push(CheckRecord::at_most("max_residual", format!("{mode:?} mode"), measured, tol));
            if let Some(path) = report {
                fs::write(path, doc.to_json()?)?;
            }
            emit(&doc, &common, &[])
        }
        Command::OdeCheck { gamma, trials, common } => emit(&ode_report(gamma, trials, common.seed)?, &common, &[]),
        Command::MetricCheck { samples, common } => emit(&metric_report(samples, common.seed)?, &common, &[]),
        Command::DiffeoCheck { a, tol, common } => emit(&diffeo_report(&a, tol, common.seed)?, &common, &[]),
        Command::Pipeline { config, common } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = ScenarioConfig::parse(&text)?;
            let doc = pipeline_doc(run_pipeline(&cfg))?;
            let plots = if cfg.output.plots.is_empty() { nonempty_plots(&doc) } else { cfg.output.plots.clone() };
            let common = Common { out: common.out.or(cfg.output.dir.map(PathBuf::from)), ..common };
            emit(&doc, &common, &plots)
        }
    }
}

/// The report of a pipeline run, including the partial one carried by a
/// failure (which is printed to stderr).
fn pipeline_doc(r: freeboundary::Result<ReportDocument>) -> anyhow::Result<ReportDocument> {
    match r {
        Ok(d) => Ok(d),
        Err(Error::Pipeline { source, report }) => {
            eprintln!("error: {source}");
            Ok(*report)
        }
        Err(e) => Err(e.into()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
