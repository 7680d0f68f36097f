use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use svi_core::config::{InitialSpec, ProblemFile};
use svi_core::experiments::{
    run_bench, trace_file_name, write_path_csv, write_trace_csv, Case, Experiment, DEFAULT_DIM,
};
use svi_core::hilbert::{check_adjoint_consistency, DEFAULT_SEED};
use svi_core::operators::check_firmly_nonexpansive_sampled;
use svi_core::oracle::ism_constant_sampled;
use svi_core::problem::{lambda_upper_bound, DEFAULT_RHO};
use svi_core::solver::{regularization_path, run, validate_schedule, CheckKind, Schedule, SolverConfig, Variant};
use svi_core::{Error, SviProblem, Vector};

const EXIT_USAGE: u8 = 1;
const EXIT_HARD_FAIL: u8 = 2;

const DEFAULT_ALPHAS: [f64; 5] = [0.1, 0.05, 0.01, 0.001, 0.0001];
const PROPERTY_SAMPLES: usize = 1000;

#[derive(Parser, Debug)]
#[command(name = "svi", version, about = "Solve split variational inclusion problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem and write the iteration trace as CSV.
    Run(RunArgs),
    /// Run every starting point under every scheme for a built-in example.
    Bench(BenchArgs),
    /// Solve the regularized problem along a decreasing list of alphas.
    Path(PathArgs),
    /// Check the schedule conditions and the operator properties.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    /// `example1`, `example2` or the path of a TOML problem file.
    #[arg(long, default_value = "example1")]
    problem: String,
    /// Truncation dimension for example1.
    #[arg(long)]
    dim: Option<usize>,
    /// Override the schedule's rho (must exceed 2).
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Starting point: a case name (Ia..Id, IIa..IId) or a comma list.
    #[arg(long)]
    init: Option<String>,
    /// Trace CSV path.
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
    /// Fill the elapsed_ms column.
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Directory for the table and the per-run traces.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct PathArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    alphas: Option<Vec<f64>>,
    /// Step size for the inner solves; defaults to the schedule's upper bound.
    #[arg(long)]
    lambda: Option<f64>,
    /// Stopping tolerance for the inner solves.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value = "path.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 1000)]
    horizon: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Everything a subcommand needs about the selected problem.
struct Loaded {
    problem: SviProblem,
    schedule: Schedule,
    experiment: Option<Experiment>,
    file: Option<ProblemFile>,
}

impl Loaded {
    fn solver_config(&self, variant: Option<Variant>) -> CliResult<SolverConfig> {
        let mut cfg = match &self.file {
            Some(f) => f.build_solver_config()?,
            None => self
                .experiment
                .unwrap_or(Experiment::One)
                .solver_config(Variant::Regularized),
        };
        if let Some(v) = variant {
            cfg.variant = v;
        }
        Ok(cfg)
    }

    fn initial_point(&self, init: Option<&str>) -> CliResult<Vector> {
        let spec = match init {
            Some(s) => Some(parse_init(s)?),
            None => self.file.as_ref().and_then(|f| f.solver.initial.clone()),
        };
        let spec = match spec {
            Some(s) => s,
            None => match self.experiment {
                Some(e) => InitialSpec::Preset(e.cases()[0].name().to_string()),
                None => return Err(CliError::Usage("no initial point given; use --init".into())),
            },
        };
        if let InitialSpec::Preset(name) = &spec {
            let case: Case = name.parse()?;
            if self.experiment != Some(case.experiment()) {
                return Err(CliError::Usage(format!(
                    "starting point {name} belongs to example{}",
                    case.experiment().number()
                )));
            }
        }
        let z = spec.resolve(self.problem.n1())?;
        if z.dim() != self.problem.n1() {
            return Err(CliError::Usage(format!(
                "initial point has {} entries, problem dimension is {}",
                z.dim(),
                self.problem.n1()
            )));
        }
        Ok(z)
    }
}

fn parse_init(s: &str) -> CliResult<InitialSpec> {
    if s.contains(',') || s.parse::<f64>().is_ok() {
        let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
        v.map(InitialSpec::Point)
            .map_err(|e| CliError::Usage(format!("bad --init vector '{s}': {e}")))
    } else {
        Ok(InitialSpec::Preset(s.to_string()))
    }
}

fn load(args: &ProblemArgs) -> CliResult<Loaded> {
    let dim = args.dim.unwrap_or(DEFAULT_DIM);
    let mut loaded = match args.problem.as_str() {
        "example1" | "example2" => {
            let exp = if args.problem == "example1" {
                Experiment::One
            } else {
                Experiment::Two
            };
            if exp == Experiment::Two && args.dim.is_some_and(|d| d != 3) {
                return Err(CliError::Usage("example2 is three-dimensional; drop --dim".into()));
            }
            Loaded {
                problem: exp.problem(dim)?,
                schedule: exp.schedule(),
                experiment: Some(exp),
                file: None,
            }
        }
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read problem file '{path}': {e}")))?;
            let mut file = ProblemFile::from_toml_str(&text)?;
            if let Some(d) = args.dim {
                file.problem.dim = Some(d);
            }
            Loaded {
                problem: file.build_problem()?,
                schedule: file.build_schedule()?,
                experiment: file.experiment(),
                file: Some(file),
            }
        }
    };
    if let Some(rho) = args.rho {
        loaded.schedule.rho = rho;
    }
    Ok(loaded)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_run(args: RunArgs) -> CliResult<u8> {
    let loaded = load(&args.problem)?;
    let mut cfg = loaded.solver_config(args.variant)?;
    if let Some(t) = args.tol {
        cfg.tol = t;
    }
    if let Some(m) = args.max_iter {
        cfg.max_iter = m;
    }
    let z1 = loaded.initial_point(args.init.as_deref())?;
    let res = run(&loaded.problem, &loaded.schedule, &cfg, &z1)?;
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    let mut out = create(&args.out)?;
    write_trace_csv(&mut out, &res.trace, args.timing)?;
    out.flush()?;
    println!(
        "iterations={} converged={} final_tol={:e}",
        res.iterations, res.converged, res.final_tol
    );
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> CliResult<u8> {
    let exp = match args.problem.problem.as_str() {
        "example1" => Experiment::One,
        "example2" => Experiment::Two,
        other => {
            return Err(CliError::Usage(format!(
                "bench needs example1 or example2, got '{other}'"
            )))
        }
    };
    if args.problem.rho.is_some() {
        return Err(CliError::Usage(
            "bench uses the built-in schedules; --rho is not accepted".into(),
        ));
    }
    let dim = match exp {
        Experiment::One => args.problem.dim.unwrap_or(DEFAULT_DIM),
        Experiment::Two => 3,
    };
    let report = run_bench(exp, dim)?;
    let table = report.render();
    print!("{table}");
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("table{}.txt", exp.number())), &table)?;
        for cell in &report.cells {
            let mut out = create(&dir.join(trace_file_name(cell, exp)))?;
            write_trace_csv(&mut out, &cell.result.trace, args.timing)?;
            out.flush()?;
        }
    }
    Ok(0)
}

fn cmd_path(args: PathArgs) -> CliResult<u8> {
    let loaded = load(&args.problem)?;
    let alphas = args.alphas.unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    let lambda = match args.lambda {
        Some(l) => l,
        None => lambda_upper_bound(&loaded.problem, args.problem.rho.unwrap_or(DEFAULT_RHO))?,
    };
    let report = regularization_path(&loaded.problem, &alphas, lambda, args.tol)?;
    let mut out = create(&args.out)?;
    write_path_csv(&mut out, &report)?;
    out.flush()?;
    println!(
        "points={} lambda={:e} all_converged={} max_norm={:e}",
        report.points.len(),
        report.lambda,
        report.all_converged,
        report.max_norm
    );
    Ok(0)
}

struct Listing {
    hard_failed: bool,
}

impl Listing {
    fn line(&mut self, kind: CheckKind, name: &str, passed: bool, detail: &str) {
        let status = match (passed, kind) {
            (true, _) => "PASS",
            (false, CheckKind::Hard) => "FAIL",
            (false, CheckKind::Advisory) => "WARN",
        };
        let tag = match kind {
            CheckKind::Hard => "hard",
            CheckKind::Advisory => "advisory",
        };
        if !passed && kind == CheckKind::Hard {
            self.hard_failed = true;
        }
        println!("{status} [{tag}] {name}: {detail}");
    }
}

fn cmd_validate(args: ValidateArgs) -> CliResult<u8> {
    let loaded = load(&args.problem)?;
    let p = &loaded.problem;
    let sched = &loaded.schedule;
    let mut listing = Listing { hard_failed: false };
    println!(
        "validating {} with schedule {} (horizon {})",
        p.label(),
        sched.label,
        args.horizon
    );

    if sched.rho > 2.0 {
        let report = validate_schedule(sched, p, args.horizon)?;
        for c in &report.checks {
            listing.line(c.kind, c.name, c.passed, &c.detail);
        }
    } else {
        listing.line(
            CheckKind::Hard,
            "rho",
            false,
            &format!("rho = {} must exceed 2", sched.rho),
        );
    }

    let adj = check_adjoint_consistency(p.operator(), PROPERTY_SAMPLES, args.seed);
    listing.line(
        CheckKind::Hard,
        "adjoint",
        adj.passed,
        &format!("max |<Ax,y> - <x,A*y>| = {:e} (tol {:e})", adj.max_error, adj.tolerance),
    );

    let lambdas = [sched.lambda_at(1), sched.lambda_at(args.horizon)];
    for (name, b) in [("b1_firmly_nonexpansive", p.b1()), ("b2_firmly_nonexpansive", p.b2())] {
        let mut worst = f64::INFINITY;
        let mut passed = true;
        for (i, &l) in lambdas.iter().enumerate() {
            let r = check_firmly_nonexpansive_sampled(b, l, PROPERTY_SAMPLES, args.seed + i as u64)?;
            worst = worst.min(r.worst);
            passed &= r.passed;
        }
        listing.line(CheckKind::Hard, name, passed, &format!("worst margin {worst:e}"));
    }

    for (name, f) in [("f1_ism", p.f1()), ("f2_ism", p.f2())] {
        if f.tau().is_infinite() {
            listing.line(CheckKind::Hard, name, true, "zero map");
            continue;
        }
        let g = |x: &Vector| f.apply(x).expect("dimension checked");
        let r = ism_constant_sampled(&g, f.dim(), f.tau(), PROPERTY_SAMPLES, args.seed)?;
        listing.line(
            CheckKind::Hard,
            name,
            r.passed,
            &format!("smallest ratio {:e}, claimed {:e}", r.worst, f.tau()),
        );
    }

    let claimed = 1.0 / (2.0 * p.norm_sq());
    let mut worst = f64::INFINITY;
    let mut passed = true;
    for (i, &l) in lambdas.iter().enumerate() {
        if !(l > 0.0 && l < 2.0 * p.f2().tau()) {
            continue;
        }
        let s = |z: &Vector| p.split_term(l, z).expect("dimension checked");
        let r = ism_constant_sampled(&s, p.n1(), claimed, PROPERTY_SAMPLES, args.seed + i as u64)?;
        worst = worst.min(r.worst);
        passed &= r.passed;
    }
    listing.line(
        CheckKind::Hard,
        "split_term_ism",
        passed,
        &format!("smallest ratio {worst:e}, claimed {claimed:e}"),
    );

    if listing.hard_failed {
        println!("result: hard failure");
        Ok(EXIT_HARD_FAIL)
    } else {
        println!("result: ok");
        Ok(0)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Path(a) => cmd_path(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
