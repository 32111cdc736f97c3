//! `monodimer`: reproducible monomer-dimer experiments.
//!
//! Every command writes CSV (default) or JSON; the full configuration,
//! seed included, is embedded in the output. Exit status is 0 on success,
//! 1 when `validate` finds a failure and 2 on usage or input errors.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use monodimer::exact::{marginals_weighted, partition_function_weighted, ActivityWeights};
use monodimer::fixed_point::{
    bounds_curve, grid, default_curve_grid, pressure_er, pressure_general, root_density, solve_fixed_point, CURVE_POPULATION,
    DEFAULT_POPULATION,
};
use monodimer::graph::io::{read_path, write_path};
use monodimer::graph::{
    edge_vertex_ratio, empirical_degree_distribution, sample_erdos_renyi, total_variation, tree_ball_fraction,
    GaltonWatsonSampler,
};
use monodimer::offspring::OffspringKind;
use monodimer::tree::{
    empirical_density_bracket, forest_log_partition_function, tree_log_partition_function, tree_root_probability,
    truncated_sequence, VertexSample,
};
use monodimer::validation::{self, ValidationOptions};
use monodimer::{Graph, OffspringDistribution, RootedTree};

use output::{emit, Format, RunConfig};

pub type CliResult<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

#[derive(Parser, Debug)]
#[command(name = "monodimer", version, about = "Monomer-dimer model: exact values, tree recursions and population dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Z, monomer and dimer probabilities, density and pressure of a small graph.
    Exact(ExactArgs),
    /// Truncated-tree root probabilities R(T(r), o) for r = 0..depth.
    Tree(TreeArgs),
    /// Sample Galton-Watson trees.
    Gw(GwArgs),
    /// Sample an Erdős–Rényi graph and bracket its monomer density by ball bounds.
    Er(ErArgs),
    /// Solve the cavity fixed point by population dynamics.
    Fixpoint(FixpointArgs),
    /// Limiting pressure from the fixed-point pool.
    Pressure(PressureArgs),
    /// Even/odd depth bounds on the limiting density over an activity grid.
    Curve(CurveArgs),
    /// Run the self-check suites.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Serialize)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct Activity {
    /// Activity values (comma separated or repeated).
    #[arg(long = "x", value_delimiter = ',', allow_negative_numbers = true)]
    x: Vec<f64>,
    /// Activity grid `start:stop:step`, added to `--x`.
    #[arg(long)]
    x_grid: Option<String>,
}

impl Activity {
    fn values(&self, default: &[f64]) -> CliResult<Vec<f64>> {
        let mut xs = self.x.clone();
        if let Some(spec) = &self.x_grid {
            let parts: Vec<&str> = spec.split(':').collect();
            let [a, b, c] = parts.as_slice() else {
                return Err(format!("--x-grid expects start:stop:step, got {spec:?}").into());
            };
            xs.extend(grid(a.trim().parse()?, b.trim().parse()?, c.trim().parse()?)?);
        }
        if xs.is_empty() {
            xs = default.to_vec();
        }
        if let Some(bad) = xs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(format!("activities must be positive, got {bad}").into());
        }
        Ok(xs)
    }
}

#[derive(Args, Debug, Serialize)]
struct ExactArgs {
    /// Graph file (`.json`, otherwise edge-list CSV).
    #[arg(long)]
    graph: PathBuf,
    /// Monomer weights are `x` times the per-vertex weights of the file (1 when absent).
    #[command(flatten)]
    activity: Activity,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct TreeArgs {
    /// Tree file (`.json`, otherwise edge-list CSV).
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    root: usize,
    /// Largest truncation depth (defaults to the depth of the tree).
    #[arg(long)]
    depth: Option<usize>,
    #[command(flatten)]
    activity: Activity,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct Laws {
    /// Offspring law rho: poisson:c | fixed:k | geom:p | pmf:FILE.
    #[arg(long, default_value = "poisson:2")]
    offspring: String,
    /// Root law P (defaults to the offspring law).
    #[arg(long)]
    root_dist: Option<String>,
}

impl Laws {
    fn parse(&self) -> CliResult<(OffspringDistribution, OffspringDistribution)> {
        let rho: OffspringDistribution = self.offspring.parse()?;
        let p = match &self.root_dist {
            Some(s) => s.parse()?,
            None => rho.clone(),
        };
        Ok((p, rho))
    }
}

#[derive(Args, Debug, Serialize)]
struct GwArgs {
    #[command(flatten)]
    laws: Laws,
    /// Generations kept.
    #[arg(long, default_value_t = 5)]
    depth: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Write the first tree as a graph file.
    #[arg(long)]
    save: Option<PathBuf>,
    #[command(flatten)]
    activity: Activity,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct ErArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: f64,
    /// Localisation radius r (balls of radius 2r and 2r+1).
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Number of sampled vertices (all when absent).
    #[arg(long)]
    sample: Option<usize>,
    /// Write the sampled graph.
    #[arg(long)]
    save: Option<PathBuf>,
    #[command(flatten)]
    activity: Activity,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct FixpointArgs {
    #[command(flatten)]
    laws: Laws,
    #[arg(long, default_value_t = DEFAULT_POPULATION)]
    pop_size: usize,
    /// Largest depth r_max.
    #[arg(long, default_value_t = 60)]
    depth: usize,
    /// Stop once the even/odd gap is below this.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Root draws for the density (defaults to the pool size).
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    activity: Activity,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FormulaChoice {
    General,
    Er,
    Both,
}

#[derive(Args, Debug, Serialize)]
struct PressureArgs {
    #[command(flatten)]
    laws: Laws,
    #[arg(long, value_enum, default_value_t = FormulaChoice::General)]
    formula: FormulaChoice,
    #[arg(long, default_value_t = DEFAULT_POPULATION)]
    pop_size: usize,
    #[arg(long, default_value_t = 60)]
    depth: usize,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Monte-Carlo draws (defaults to the pool size).
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    activity: Activity,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct CurveArgs {
    #[command(flatten)]
    laws: Laws,
    /// Depths r (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![3usize, 4, 5, 6])]
    r_list: Vec<usize>,
    #[arg(long, default_value_t = CURVE_POPULATION)]
    pop_size: usize,
    /// Root draws per entry (defaults to the pool size).
    #[arg(long)]
    samples: Option<usize>,
    /// Defaults to 0.01, 0.1, 0.2, .., 2.
    #[command(flatten)]
    activity: Activity,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct ValidateArgs {
    /// Suites to run (all when absent).
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<String>,
    /// Negate covariances before the sign checks; the appendix suite must fail.
    #[arg(long)]
    inject_sign_flip: bool,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn set_threads(common: &Common) -> CliResult<()> {
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn config<'a, A: Serialize>(command: &'static str, seed: u64, x_grid: &'a [f64], args: &'a A) -> RunConfig<'a, A> {
    RunConfig { command, seed, x_grid, version: env!("CARGO_PKG_VERSION"), args }
}

fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Exact(a) => cmd_exact(&a),
        Command::Tree(a) => cmd_tree(&a),
        Command::Gw(a) => cmd_gw(&a),
        Command::Er(a) => cmd_er(&a),
        Command::Fixpoint(a) => cmd_fixpoint(&a),
        Command::Pressure(a) => cmd_pressure(&a),
        Command::Curve(a) => cmd_curve(&a),
        Command::Validate(a) => cmd_validate(&a),
    }
    .map(|passed| if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct ExactRow {
    quantity: &'static str,
    object_id: String,
    x: f64,
    value: f64,
}

fn cmd_exact(a: &ExactArgs) -> CliResult<bool> {
    set_threads(&a.common)?;
    let g = read_path(&a.graph)?;
    let xs = a.activity.values(&[1.0])?;
    let base = ActivityWeights::from_graph(&g);
    let mut rows = Vec::new();
    for &x in &xs {
        let w = ActivityWeights { vertex: base.vertex.iter().map(|v| v * x).collect(), edge: base.edge.clone() };
        let log_z = if g.is_forest() {
            forest_log_partition_function(&g, &w)
        } else {
            partition_function_weighted(&g, &w)?.ln()
        };
        let m = marginals_weighted(&g, &w)?;
        let n = g.vertex_count();
        rows.push(ExactRow { quantity: "Z", object_id: String::new(), x, value: log_z.exp() });
        rows.push(ExactRow { quantity: "log_Z", object_id: String::new(), x, value: log_z });
        for (v, r) in m.monomer.iter().enumerate() {
            rows.push(ExactRow { quantity: "R", object_id: v.to_string(), x, value: *r });
        }
        for (&(u, v), e) in g.edges().iter().zip(&m.dimer) {
            rows.push(ExactRow { quantity: "E", object_id: format!("{u}-{v}"), x, value: *e });
        }
        if n > 0 {
            let density = m.monomer.iter().sum::<f64>() / n as f64;
            rows.push(ExactRow { quantity: "density", object_id: String::new(), x, value: density });
            rows.push(ExactRow { quantity: "pressure", object_id: String::new(), x, value: log_z / n as f64 });
        }
    }
    emit(&config("exact", a.common.seed, &xs, a), &rows, a.common.format, a.common.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct TreeRow {
    x: f64,
    depth: usize,
    value: f64,
}

fn cmd_tree(a: &TreeArgs) -> CliResult<bool> {
    set_threads(&a.common)?;
    let t = RootedTree::new(read_path(&a.graph)?, a.root)?;
    let xs = a.activity.values(&[1.0])?;
    let r_max = a.depth.unwrap_or_else(|| t.depth());
    let mut rows = Vec::new();
    for &x in &xs {
        let seq = truncated_sequence(&t, x, r_max)?;
        rows.extend(seq.root_probabilities.iter().enumerate().map(|(depth, &value)| TreeRow { x, depth, value }));
    }
    emit(&config("tree", a.common.seed, &xs, a), &rows, a.common.format, a.common.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct GwRow {
    tree: usize,
    x: f64,
    vertices: usize,
    depth: usize,
    root_degree: usize,
    root_probability: f64,
    log_z: f64,
}

fn cmd_gw(a: &GwArgs) -> CliResult<bool> {
    set_threads(&a.common)?;
    let (p, rho) = a.laws.parse()?;
    let xs = a.activity.values(&[1.0])?;
    let trees = GaltonWatsonSampler::new(&p, &rho, a.depth).sample_many(a.common.seed, a.count)?;
    if let (Some(path), Some(first)) = (&a.save, trees.first()) {
        write_path(first.graph(), path)?;
    }
    let mut rows = Vec::new();
    for (i, t) in trees.iter().enumerate() {
        for &x in &xs {
            rows.push(GwRow {
                tree: i,
                x,
                vertices: t.vertex_count(),
                depth: t.depth(),
                root_degree: t.children(t.root()).len(),
                root_probability: tree_root_probability(t, x)?,
                log_z: tree_log_partition_function(t, x)?,
            });
        }
    }
    emit(&config("gw", a.common.seed, &xs, a), &rows, a.common.format, a.common.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct ErRow {
    x: f64,
    r: usize,
    n: usize,
    c: f64,
    edges: usize,
    edge_vertex_ratio: f64,
    degree_tv_poisson: f64,
    tree_ball_fraction: f64,
    lower: f64,
    upper: f64,
    lower_se: f64,
    upper_se: f64,
    covered_fraction: f64,
}

fn cmd_er(a: &ErArgs) -> CliResult<bool> {
    set_threads(&a.common)?;
    let xs = a.activity.values(&[1.0])?;
    let g: Graph = sample_erdos_renyi(a.n, a.c, a.common.seed)?;
    if let Some(path) = &a.save {
        write_path(&g, path)?;
    }
    let degrees = empirical_degree_distribution(&g)?;
    let tv = total_variation(degrees.pmf(), OffspringDistribution::poisson(a.c)?.pmf());
    let ratio = edge_vertex_ratio(&g)?;
    let balls = tree_ball_fraction(&g, 2 * a.radius + 1);
    let sample = a.sample.map_or(VertexSample::All, VertexSample::Count);
    let mut rows = Vec::new();
    for &x in &xs {
        let b = empirical_density_bracket(&g, a.radius, x, sample, a.common.seed)?;
        rows.push(ErRow {
            x,
            r: a.radius,
            n: a.n,
            c: a.c,
            edges: g.edge_count(),
            edge_vertex_ratio: ratio,
            degree_tv_poisson: tv,
            tree_ball_fraction: balls,
            lower: b.lower,
            upper: b.upper,
            lower_se: b.lower_se,
            upper_se: b.upper_se,
            covered_fraction: b.covered_fraction,
        });
    }
    emit(&config("er", a.common.seed, &xs, a), &rows, a.common.format, a.common.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct FixpointRow {
    x: f64,
    mean_even: f64,
    mean_odd: f64,
    estimate: f64,
    gap: f64,
    uncertainty: f64,
    #[serde(rename = "N")]
    population_size: usize,
    depth: usize,
    seed: u64,
    status: String,
    density: f64,
    density_stderr: f64,
}

fn cmd_fixpoint(a: &FixpointArgs) -> CliResult<bool> {
    set_threads(&a.common)?;
    let (p, rho) = a.laws.parse()?;
    let xs = a.activity.values(&[1.0])?;
    let seed = a.common.seed;
    let mut rows = Vec::new();
    for &x in &xs {
        let run = solve_fixed_point::<f64>(&rho, x, a.pop_size, a.depth, a.tol, seed)?;
        let d = root_density(&p, run.last(), a.samples.unwrap_or(a.pop_size), seed);
        let r = run.result;
        rows.push(FixpointRow {
            x,
            mean_even: r.mean_even,
            mean_odd: r.mean_odd,
            estimate: r.estimate,
            gap: r.gap,
            uncertainty: r.uncertainty,
            population_size: r.population_size,
            depth: r.depth,
            seed,
            status: serde_json::to_value(r.status)?.as_str().unwrap_or_default().to_string(),
            density: d.mean,
            density_stderr: d.standard_error,
        });
    }
    emit(&config("fixpoint", seed, &xs, a), &rows, a.common.format, a.common.out.as_deref())?;
    Ok(true)
}

fn cmd_pressure(a: &PressureArgs) -> CliResult<bool> {
    set_threads(&a.common)?;
    let (p, rho) = a.laws.parse()?;
    let xs = a.activity.values(&[1.0])?;
    let seed = a.common.seed;
    let m = a.samples.unwrap_or(a.pop_size);
    let er_mean = match (a.formula, rho.kind()) {
        (FormulaChoice::General, _) => None,
        (_, OffspringKind::Poisson { mean }) if p == rho => Some(*mean),
        _ => return Err("the Erdős–Rényi formula needs --offspring poisson:c with the same root law".into()),
    };
    let mut rows = Vec::new();
    for &x in &xs {
        let run = solve_fixed_point::<f64>(&rho, x, a.pop_size, a.depth, a.tol, seed)?;
        let pool = run.last();
        if a.formula != FormulaChoice::Er {
            rows.push(pressure_general(&p, &rho, pool, m, seed)?);
        }
        if let Some(c) = er_mean {
            rows.push(pressure_er(c, pool, m, seed)?);
        }
    }
    emit(&config("pressure", seed, &xs, a), &rows, a.common.format, a.common.out.as_deref())?;
    Ok(true)
}

fn cmd_curve(a: &CurveArgs) -> CliResult<bool> {
    set_threads(&a.common)?;
    let (p, rho) = a.laws.parse()?;
    let xs = a.activity.values(&default_curve_grid())?;
    let m = a.samples.unwrap_or(a.pop_size);
    let rows = bounds_curve(&p, &rho, &xs, &a.r_list, a.pop_size, m, a.common.seed)?;
    emit(&config("curve", a.common.seed, &xs, a), &rows, a.common.format, a.common.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct SuiteRow {
    suite: String,
    cases: usize,
    minimum_cases: usize,
    failures: usize,
    passed: bool,
    first_failure: String,
    reproduction_seed: u64,
}

fn cmd_validate(a: &ValidateArgs) -> CliResult<bool> {
    set_threads(&a.common)?;
    let options = ValidationOptions {
        seed: a.common.seed,
        suites: a.suites.clone(),
        inject_sign_flip: a.inject_sign_flip,
    };
    let report = validation::run(&options)?;
    let cfg = config("validate", a.common.seed, &[], a);
    match a.common.format {
        Format::Json => emit(&cfg, &report.suites, Format::Json, a.common.out.as_deref())?,
        Format::Csv => {
            let rows: Vec<SuiteRow> = report
                .suites
                .iter()
                .map(|s| SuiteRow {
                    suite: s.name.clone(),
                    cases: s.cases,
                    minimum_cases: s.minimum_cases,
                    failures: s.failures.len(),
                    passed: s.passed,
                    first_failure: s.failures.first().map(|f| format!("{}: {}", f.case, f.detail)).unwrap_or_default(),
                    reproduction_seed: report.seed,
                })
                .collect();
            emit(&cfg, &rows, Format::Csv, a.common.out.as_deref())?;
        }
    }
    for s in &report.suites {
        eprintln!(
            "{:<13} {:>6} cases (min {:>5})  {}",
            s.name,
            s.cases,
            s.minimum_cases,
            if s.passed { "PASS".to_string() } else { format!("FAIL ({} failures)", s.failures.len()) }
        );
    }
    Ok(report.passed)
}
