use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use convex_width::harness::{
    self, sup_delta_estimate, verify_bounds, Kind, Metric, Tolerances, DEFAULT_STAGES, REPORT_VERSION, TOOL_VERSION,
};
use convex_width::metrics::{self, body_stats, BodyStats, DirectionalSample};
use convex_width::point_diameter::{self, boundary_samples, continuity_check, ContinuityVerdict};
use convex_width::sphere::sample_directions;
use convex_width::{csv_number, parse_body, Body, GeometryError};

#[derive(Parser)]
#[command(name = "cwidth", version, about = "Width, diameter and point-diameter analysis of convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Sampled directions for `profile`.
    #[arg(long, global = true, default_value_t = 4096)]
    samples: usize,
    /// Direction pairs for `verify`.
    #[arg(long, global = true, default_value_t = 100_000)]
    pairs: usize,
    /// Denominator of the pair ratios.
    #[arg(long, global = true, value_enum, default_value_t = MetricArg::Rho)]
    metric: MetricArg,
    /// Tolerance override, e.g. `--tol bound=1e-8`. Repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Write to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Diameter, thickness and the Lipschitz constants of a body.
    Analyze { body: PathBuf },
    /// w, d, s, p, r, q at seeded random directions.
    Profile { body: PathBuf },
    /// Randomized check of the Lipschitz bounds plus sup estimates.
    Verify { body: PathBuf },
    /// Grid of point-diameter values over a planar window.
    Ekmap {
        body: PathBuf,
        /// Window `x_min,x_max,y_min,y_max`; defaults to the bounding box
        /// padded by half its size.
        #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
        bounds: Option<[f64; 4]>,
        #[arg(long, default_value_t = 201)]
        nx: usize,
        #[arg(long, default_value_t = 201)]
        ny: usize,
    },
    /// Classifies boundary points by continuity of the point-diameter field.
    Continuity {
        body: PathBuf,
        #[arg(long, default_value_t = 300)]
        boundary_samples: usize,
    },
    /// Recomputes the triangle, box and ellipse examples against their formulas.
    WorkedExamples,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Rho,
    EuclidMin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value: f64 = value.parse().map_err(|e| format!("bad value {value:?}: {e}"))?;
    if !Tolerances::NAMES.contains(&name) {
        return Err(format!("unknown tolerance {name:?}; expected one of {}", Tolerances::NAMES.join(", ")));
    }
    Ok((name.to_string(), value))
}

fn parse_bounds(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| "expected four numbers x_min,x_max,y_min,y_max".to_string())
}

/// Failure modes mapped to exit codes.
enum Failure {
    /// Bad input: exit 2.
    Input(String),
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        Failure::Input(e.to_string())
    }
}

/// What a command produced and whether a checked bound failed.
struct Output {
    text: String,
    violated: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, violated: false }
    }
}

#[derive(Serialize)]
struct Header {
    version: &'static str,
    tool_version: &'static str,
    seed: u64,
    tolerances: Tolerances,
}

impl Header {
    fn new(run: &RunArgs, tol: Tolerances) -> Self {
        Self { version: REPORT_VERSION, tool_version: TOOL_VERSION, seed: run.seed, tolerances: tol }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn read_body(path: &Path) -> Result<Body, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_body(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn require_dim2(body: &Body, what: &str) -> Result<(), Failure> {
    if body.dim() != 2 {
        return Err(Failure::Input(format!("{what} needs a planar body, got dimension {}", body.dim())));
    }
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeDoc {
    #[serde(flatten)]
    header: Header,
    body: &'static str,
    dim: usize,
    #[serde(flatten)]
    stats: BodyStats,
    #[serde(rename = "M_hat")]
    m_hat: f64,
    #[serde(rename = "N_hat")]
    n_hat: f64,
    /// True when M̂, N̂ are exact rather than sampled estimates.
    hat_exact: bool,
}

fn analyze(body: &Body, run: &RunArgs, tol: Tolerances) -> Result<Output, Failure> {
    let stats = body_stats(body);
    let (m_hat, n_hat, hat_exact) = harness::hat_bounds(body)?;
    let doc = AnalyzeDoc { header: Header::new(run, tol), body: body.kind(), dim: body.dim(), stats, m_hat, n_hat, hat_exact };
    Ok(Output::ok(match run.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&doc),
        Format::Csv => {
            let mut out = String::from("quantity,value\n");
            for (k, v) in [
                ("delta", doc.stats.delta),
                ("omega", doc.stats.omega),
                ("M", doc.stats.m),
                ("N", doc.stats.n),
                ("M_hat", m_hat),
                ("N_hat", n_hat),
            ] {
                writeln!(out, "{k},{}", csv_number(v)).unwrap();
            }
            writeln!(out, "hat_exact,{hat_exact}").unwrap();
            out
        }
    }))
}

#[derive(Serialize)]
struct ProfileDoc<'a> {
    #[serde(flatten)]
    header: Header,
    body: &'static str,
    samples: usize,
    rows: &'a [DirectionalSample],
}

fn profile(body: &Body, run: &RunArgs, tol: Tolerances) -> Result<Output, Failure> {
    if run.samples == 0 {
        return Err(Failure::Input("--samples must be at least 1".into()));
    }
    let dirs = sample_directions(body.dim(), run.samples, run.seed);
    let rows = metrics::profile(body, &dirs)?;
    Ok(Output::ok(match run.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&ProfileDoc { header: Header::new(run, tol), body: body.kind(), samples: rows.len(), rows: &rows }),
        Format::Csv => {
            let mut out = String::new();
            let cols: Vec<String> = (1..=body.dim()).map(|i| format!("u_{i}")).collect();
            writeln!(out, "{},w,d,s,p,r,q", cols.join(",")).unwrap();
            for r in &rows {
                let nums: Vec<String> = r.u.iter().chain([&r.w, &r.d, &r.s, &r.p, &r.r, &r.q]).map(|x| csv_number(*x)).collect();
                writeln!(out, "{}", nums.join(",")).unwrap();
            }
            out
        }
    }))
}

fn verify(body: &Body, run: &RunArgs, tol: Tolerances) -> Result<Output, Failure> {
    if run.format == Some(Format::Csv) {
        return Err(Failure::Input("verify writes a JSON report only".into()));
    }
    let metric = match run.metric {
        MetricArg::Rho => Metric::Projective,
        MetricArg::EuclidMin => Metric::EuclidMin,
    };
    let mut report = verify_bounds(body, run.pairs, run.seed, tol, metric)?;
    for kind in [Kind::Width, Kind::Diameter] {
        report.add_sup_estimate(sup_delta_estimate(body, kind, DEFAULT_STAGES, run.seed)?);
    }
    let mut text = report.to_json();
    text.push('\n');
    Ok(Output { text, violated: report.failed() })
}

fn ekmap(body: &Body, run: &RunArgs, bounds: Option<[f64; 4]>, nx: usize, ny: usize) -> Result<Output, Failure> {
    require_dim2(body, "ekmap")?;
    let bounds = bounds.unwrap_or_else(|| {
        let lo = |i: usize| -body.support_value(&convex_width::UnitDirection::axis(2, i).neg());
        let hi = |i: usize| body.support_value(&convex_width::UnitDirection::axis(2, i));
        let (px, py) = ((hi(0) - lo(0)) / 2.0, (hi(1) - lo(1)) / 2.0);
        [lo(0) - px, hi(0) + px, lo(1) - py, hi(1) + py]
    });
    let grid = point_diameter::ek_grid(body, bounds, nx, ny)?;
    Ok(Output::ok(match run.format.unwrap_or(Format::Csv) {
        Format::Csv => grid.to_csv(),
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                header: Header,
                bounds: [f64; 4],
                #[serde(flatten)]
                grid: &'a point_diameter::EkGrid,
            }
            to_json(&Doc { header: Header::new(run, Tolerances::default()), bounds, grid: &grid })
        }
    }))
}

fn continuity(body: &Body, run: &RunArgs, tol: Tolerances, count: usize) -> Result<Output, Failure> {
    match body {
        Body::Polytope(_) | Body::Ball(_) if body.dim() == 2 => {}
        _ => return Err(Failure::Input("continuity needs a planar polygon or disc".into())),
    }
    if count == 0 {
        return Err(Failure::Input("--boundary-samples must be at least 1".into()));
    }
    let abs_tol = tol.continuity * body_stats(body).delta;
    let verdicts: Vec<ContinuityVerdict> = boundary_samples(body, count)?
        .iter()
        .map(|o| continuity_check(body, o, abs_tol))
        .collect::<Result<_, _>>()?;
    Ok(Output::ok(match run.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                header: Header,
                body: &'static str,
                continuous_count: usize,
                verdicts: &'a [ContinuityVerdict],
            }
            let continuous_count = verdicts.iter().filter(|v| v.continuous).count();
            to_json(&Doc { header: Header::new(run, tol), body: body.kind(), continuous_count, verdicts: &verdicts })
        }
        Format::Csv => {
            let mut out = String::from("x,y,e,farthest,gap,continuous\n");
            for v in &verdicts {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    csv_number(v.o[0]),
                    csv_number(v.o[1]),
                    csv_number(v.e_value),
                    csv_number(v.farthest_value),
                    csv_number(v.gap),
                    v.continuous
                )
                .unwrap();
            }
            out
        }
    }))
}

fn worked_examples(run: &RunArgs, tol: Tolerances) -> Result<Output, Failure> {
    let rows = harness::worked_examples(run.seed)?;
    let violated = rows.iter().any(|r| !r.pass);
    let text = match run.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                header: Header,
                all_pass: bool,
                rows: &'a [harness::ExampleRow],
            }
            to_json(&Doc { header: Header::new(run, tol), all_pass: !violated, rows: &rows })
        }
        Format::Csv => {
            let mut out = String::from("example,quantity,computed,expected,tolerance,relative,pass\n");
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    csv_field(&r.example),
                    csv_field(&r.quantity),
                    csv_number(r.computed),
                    csv_number(r.expected),
                    csv_number(r.tolerance),
                    r.relative,
                    r.pass
                )
                .unwrap();
            }
            out
        }
    };
    Ok(Output { text, violated })
}

/// Quotes a text field if it holds a comma or a quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let mut tol = Tolerances::default();
    for (name, value) in &cli.run.tol {
        tol.set(name, *value)?;
    }
    let run = &cli.run;
    match &cli.command {
        Command::Analyze { body } => analyze(&read_body(body)?, run, tol),
        Command::Profile { body } => profile(&read_body(body)?, run, tol),
        Command::Verify { body } => verify(&read_body(body)?, run, tol),
        Command::Ekmap { body, bounds, nx, ny } => ekmap(&read_body(body)?, run, *bounds, *nx, *ny),
        Command::Continuity { body, boundary_samples } => continuity(&read_body(body)?, run, tol, *boundary_samples),
        Command::WorkedExamples => worked_examples(run, tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let result = run(&cli);
    eprintln!("runtime: {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(out) => {
            let written = match &cli.run.output {
                Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            if out.violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
