use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use unilip::bench::{self, BenchConfig, Reliability, ReportFormat};
use unilip::oracle::{self, DEFAULT_GRID};
use unilip::testbed::{load_fixture, load_fixture_dir, pinter_problem, pinter_suite};
use unilip::{make_method, Exhausted, MethodConfig, MethodId, Problem, RunStatus, SolveError};

const USAGE: u8 = 2;
const RUN: u8 = 1;

#[derive(Parser)]
#[command(
    name = "unilip",
    version,
    about = "Univariate Lipschitz global optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize one problem with one method.
    Solve(SolveArgs),
    /// Run a method x problem matrix and print a report.
    Bench(BenchArgs),
    /// Grid minimum and sampled Lipschitz constants of a problem.
    Oracle(OracleArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Fixture file.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Member of the [-5, 5] test class with this minimizer.
    #[arg(long, allow_negative_numbers = true)]
    pinter: Option<f64>,
}

impl Accuracy {
    fn exhausted(&self) -> Exhausted {
        if self.li_fallback {
            Exhausted::MinCharacteristic
        } else {
            Exhausted::Adjacent
        }
    }
}

impl Source {
    fn load(&self) -> Result<Problem, String> {
        match (&self.problem, self.pinter) {
            (Some(path), _) => load_fixture(path).map_err(|e| e.to_string()),
            (None, Some(x_star)) => pinter_problem(x_star).map_err(|e| e.to_string()),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Args)]
struct Accuracy {
    /// Stopping accuracy, scaled by b - a unless --eps-absolute.
    #[arg(long, default_value_t = unilip::problem::DEFAULT_EPS)]
    eps: f64,
    #[arg(long)]
    eps_absolute: bool,
    /// Local-improvement width (defaults to the effective eps).
    #[arg(long)]
    delta: Option<f64>,
    /// When both neighbours of the incumbent are narrower than delta, use the
    /// minimal-characteristic rule instead of selecting a neighbour.
    #[arg(long)]
    li_fallback: bool,
    #[arg(long, default_value_t = unilip::problem::DEFAULT_XI)]
    xi: f64,
    #[arg(long, default_value_t = unilip::problem::DEFAULT_MAX_TRIALS)]
    max_trials: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    method: MethodId,
    #[arg(long, default_value_t = 1.1)]
    r: f64,
    #[command(flatten)]
    accuracy: Accuracy,
    /// Write the ordered trials as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Pinter,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(
        long,
        value_enum,
        default_value = "pinter",
        conflicts_with = "fixtures"
    )]
    suite: Suite,
    #[arg(long, default_value_t = 2009)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Use every *.fixture file in this directory as the suite.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Comma-separated method labels.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "PKC,GE,LT,PKC_LI,GE_LI,LT_LI"
    )]
    methods: Vec<MethodId>,
    #[command(flatten)]
    accuracy: Accuracy,
    #[arg(long, conflicts_with = "r_auto")]
    r: Option<f64>,
    /// Start at r = 1.1 and raise r by 0.1 for failing problems.
    #[arg(long)]
    r_auto: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    /// Grid size for oracle constants of known-constant methods.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    oracle_grid: usize,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn solve(args: SolveArgs) -> ExitCode {
    let problem = match args.source.load() {
        Ok(p) => p,
        Err(e) => return fail(USAGE, e),
    };
    let acc = &args.accuracy;
    let mut config = MethodConfig::new(
        args.method.scheme,
        args.method.estimator,
        args.method.selector,
    )
    .with_r(args.r)
    .with_eps(acc.eps, !acc.eps_absolute)
    .with_xi(acc.xi)
    .with_exhausted(acc.exhausted())
    .with_max_trials(acc.max_trials);
    config.delta = acc.delta;
    let method = match make_method(config) {
        Ok(m) => m,
        Err(e) => return fail(USAGE, e),
    };
    let result = match method.run(&problem) {
        Ok(r) => r,
        Err(SolveError::Rejected(e)) => return fail(USAGE, e),
        Err(SolveError::Run(e)) => return fail(RUN, e),
    };
    println!("problem  {}", problem.name());
    println!("method   {}", result.method_label);
    println!("n_trials {}", result.n_trials);
    println!("best_x   {}", result.best_x);
    println!("best_f   {}", result.best_f);
    println!("status   {}", result.status.as_str());
    if let Some(path) = &args.trace {
        if let Err(e) = std::fs::write(path, result.trace_csv()) {
            return fail(RUN, format!("writing {}: {e}", path.display()));
        }
    }
    if result.status == RunStatus::Converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(RUN)
    }
}

fn bench(args: BenchArgs) -> ExitCode {
    let problems: Vec<Problem> = match &args.fixtures {
        Some(dir) => {
            let loaded = load_fixture_dir(dir).and_then(|fs| {
                fs.iter()
                    .map(|f| f.to_problem())
                    .collect::<Result<Vec<_>, _>>()
            });
            match loaded {
                Ok(ps) => ps,
                Err(e) => return fail(USAGE, e),
            }
        }
        None => match args.suite {
            Suite::Pinter => pinter_suite(args.seed, args.count)
                .into_iter()
                .map(|i| i.problem)
                .collect(),
        },
    };
    let acc = &args.accuracy;
    let config = BenchConfig {
        methods: args.methods,
        eps: acc.eps,
        eps_relative: !acc.eps_absolute,
        delta: acc.delta,
        exhausted: acc.exhausted(),
        xi: acc.xi,
        reliability: if args.r_auto {
            Reliability::PROTOCOL
        } else {
            Reliability::Fixed(args.r.unwrap_or(1.1))
        },
        max_trials: acc.max_trials,
        parallel: args.parallel,
        oracle_grid: args.oracle_grid,
    };
    let report = match bench::prepare_problems(&problems, &config)
        .and_then(|ps| bench::run_bench(&ps, &config))
    {
        Ok(r) => r,
        Err(e) => return fail(USAGE, e),
    };
    let format = match args.format {
        Format::Csv => ReportFormat::Csv,
        Format::Md => ReportFormat::Markdown,
    };
    let text = report.render(format);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                return fail(RUN, format!("writing {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    for m in &report.methods {
        let avg = report
            .average(*m)
            .map_or_else(|| "n/a".to_string(), |a| format!("{a:.2}"));
        let failed = report.rows_for(*m).filter(|r| !r.success).count();
        eprintln!("{:<7} average {avg:>10}  failures {failed}", m.label());
    }
    if report.all_success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(RUN)
    }
}

fn run_oracle(args: OracleArgs) -> ExitCode {
    let problem = match args.source.load() {
        Ok(p) => p,
        Err(e) => return fail(USAGE, e),
    };
    match oracle::report(&problem, args.grid) {
        Ok(r) => {
            println!("grid_n {}", r.grid_n);
            println!("x_min  {}", r.x_min);
            println!("f_min  {}", r.f_min);
            println!("l_hat  {}", r.l_hat);
            match r.m_hat {
                Some(m) => println!("m_hat  {m}"),
                None => println!("m_hat  n/a"),
            }
            ExitCode::SUCCESS
        }
        Err(e @ oracle::OracleError::GridTooSmall(_)) => fail(USAGE, e),
        Err(e) => fail(RUN, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
        Command::Oracle(args) => run_oracle(args),
    }
}
