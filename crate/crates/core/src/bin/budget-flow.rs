use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use budget_flow::bench::{generated_jobs, parse_gen_plan, run_bench, text_table};
use budget_flow::bts::solve;
use budget_flow::certify::certify;
use budget_flow::instance::{diagnostics, generate, parse, serialize, GenSpec, Kind, NumericMode, ProblemInstance, SolverConfig};
use budget_flow::numeric::{fmt_fraction, parse_fraction, Rational};
use budget_flow::oracle::{exact_opt, LpOutcome};
use budget_flow::reductions::{
    gflow_to_btp, map_flow_back, mincost_to_maxprofit, normalize, parse_gflow, parse_piecewise, parse_rational, random_gflow,
    random_piecewise, reassemble, serialize_gflow, serialize_piecewise, serialize_rational, split_piecewise, Objective,
};
use budget_flow::solution::{self, parse_for, serialize_optimum, write_certificate};

#[derive(Parser)]
#[command(name = "budget-flow", version, about = "Approximate budgeted transportation solver with exact certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the solution with its certificate.
    Solve(SolveArgs),
    /// Re-check a solution file against an instance.
    Verify(VerifyArgs),
    /// Exact LP optimum of a small instance.
    Oracle(OracleArgs),
    /// Write a random instance.
    Generate(GenerateArgs),
    /// Transform piecewise or generalized-flow inputs.
    Reduce(ReduceArgs),
    /// Solve many instances and check the complexity counters.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "1/4", value_parser = fraction)]
    epsilon: Rational,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Comparison tolerance in float mode.
    #[arg(long, default_value_t = 1e-9)]
    eta: f64,
    /// Print instance diagnostics and run counters to stderr.
    #[arg(long)]
    seed_stats: bool,
    #[arg(long)]
    max_phases: Option<u64>,
    /// Write the solution here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// Defaults to the epsilon recorded in the solution file.
    #[arg(long, value_parser = fraction)]
    epsilon: Option<Rational>,
}

#[derive(Args)]
struct OracleArgs {
    /// A btp/bts instance or a `p mcbtp`/`p mpbtp` rational instance.
    instance: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    Btp,
    Bts,
    Piecewise,
    Gflow,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "btp")]
    format: GenFormat,
    #[arg(short, default_value_t = 4)]
    n: usize,
    #[arg(short, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 0.6)]
    density: f64,
    /// Probability of a finite capacity on a bts edge.
    #[arg(long, default_value_t = 0.5)]
    cap_prob: f64,
    #[arg(long)]
    max_edges: Option<usize>,
    /// Maximum segments per edge for piecewise output.
    #[arg(long, default_value_t = 3)]
    segments: usize,
    /// Maximum node count for gflow output.
    #[arg(long, default_value_t = 5)]
    nodes: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[group(id = "kind", required = true, multiple = false)]
struct ReduceKind {
    /// Piecewise-profit instance to capacitated BTS.
    #[arg(long)]
    piecewise: bool,
    /// Generalized flow to the min-cost equality BTP.
    #[arg(long)]
    gflow: bool,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    kind: ReduceKind,
    input: PathBuf,
    output: PathBuf,
    /// Map a solution of the reduced instance back and report it on stdout.
    #[arg(long)]
    map_back: Option<PathBuf>,
    /// With --gflow, write the max-profit instance with profits M − c instead.
    #[arg(long, value_parser = fraction)]
    shift: Option<Rational>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchFormat {
    Text,
    Kv,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files to include.
    paths: Vec<PathBuf>,
    /// Generator plan, e.g. `seeds=0..10,n=20,m=20,density=0.3,kind=bts,cap=0.5`.
    #[arg(long)]
    gen: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1/2,1/4,1/8", value_parser = fraction)]
    epsilons: Vec<Rational>,
    #[arg(long, default_value_t = 1)]
    repeat: u32,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "kv")]
    format: BenchFormat,
}

fn fraction(s: &str) -> Result<Rational, String> {
    parse_fraction(s).ok_or_else(|| format!("'{s}' is not a rational number"))
}

/// Exit 2 with a message.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fatal> {
    fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Fatal> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Fatal(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<ProblemInstance, Fatal> {
    parse(&read(path)?).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn pass(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn cmd_solve(a: SolveArgs) -> Result<u8, Fatal> {
    let inst = load_instance(&a.instance)?;
    let mut cfg = SolverConfig::new(a.epsilon.clone());
    cfg.max_phases = a.max_phases;
    if let Mode::Float = a.mode {
        cfg.numeric_mode = NumericMode::Float64 { eta: a.eta };
        eprintln!("warning: float mode; the certificate is checked with tolerance {:e} and is not rigorous", a.eta);
    }
    let sol = solve(&inst, &cfg)?;
    if a.seed_stats {
        match diagnostics(&inst, &a.epsilon) {
            Ok(d) => eprintln!("U={} beta_rise_bound={}", fmt_fraction(&d.u), d.beta_rise_bound),
            Err(e) => eprintln!("U=undefined ({e})"),
        }
        for (k, v) in sol.stats.to_map() {
            eprintln!("{k}={v}");
        }
    }
    emit(&solution::serialize(&inst, &sol), a.output.as_deref())?;
    Ok(pass(sol.certificate.passed))
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, Fatal> {
    let inst = load_instance(&a.instance)?;
    let parsed = solution::parse(&read(&a.solution)?, &inst)?;
    let eps = a.epsilon.or(parsed.epsilon).ok_or_else(|| Fatal("no epsilon given and none recorded in the solution".into()))?;
    let duals = parsed.duals.ok_or_else(|| Fatal("solution carries no duals to verify".into()))?;
    let cert = certify(&inst, &parsed.flows, &duals, &eps)?;
    let mut out = String::new();
    out.push_str(&format!("epsilon {}\nprimal {}\ndual {}\ngap {}\n", fmt_fraction(&eps), fmt_fraction(&cert.primal_value), fmt_fraction(&cert.dual_value), cert.gap_ratio));
    write_certificate(&mut out, &cert);
    print!("{out}");
    Ok(pass(cert.passed))
}

fn cmd_oracle(a: OracleArgs) -> Result<u8, Fatal> {
    let text = read(&a.instance)?;
    let rational_header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).is_some_and(|l| l.contains("mcbtp") || l.contains("mpbtp"));
    let out = if rational_header {
        let btp = parse_rational(&text)?;
        let ends: Vec<_> = btp.edges.iter().map(|e| (e.src, e.dst)).collect();
        let kind = if btp.objective == Objective::MinCostEquality { "mcbtp" } else { "mpbtp" };
        match btp.exact_optimum() {
            LpOutcome::Optimal { value, x } => serialize_optimum(kind, &value, &ends, &x),
            LpOutcome::Infeasible => return Err(Fatal("instance is infeasible".into())),
            LpOutcome::Unbounded => return Err(Fatal("instance is unbounded".into())),
        }
    } else {
        let inst = parse(&text)?;
        let opt = exact_opt(&inst)?;
        let ends: Vec<_> = inst.edges.iter().map(|e| (e.src, e.dst)).collect();
        serialize_optimum(inst.kind.tag(), &opt.value, &ends, &opt.flow)
    };
    emit(&out, a.output.as_deref())?;
    Ok(0)
}

fn cmd_generate(a: GenerateArgs) -> Result<u8, Fatal> {
    let text = match a.format {
        GenFormat::Btp | GenFormat::Bts => {
            let mut spec = GenSpec { capacity_prob: a.cap_prob, max_edges: a.max_edges, ..GenSpec::new(a.seed, a.n, a.m, a.density) };
            if let GenFormat::Bts = a.format {
                spec.kind = Kind::Bts;
            }
            serialize(&generate(&spec)?)
        }
        GenFormat::Piecewise => serialize_piecewise(&random_piecewise(a.seed, a.n, a.m, a.segments)),
        GenFormat::Gflow => serialize_gflow(&random_gflow(a.seed, a.nodes).0),
    };
    emit(&text, a.output.as_deref())?;
    Ok(0)
}

fn cmd_reduce(a: ReduceArgs) -> Result<u8, Fatal> {
    let text = read(&a.input)?;
    if a.kind.piecewise {
        let pw = parse_piecewise(&text)?;
        let (inst, map) = split_piecewise(&pw)?;
        emit(&serialize(&inst), Some(&a.output))?;
        let Some(sol_path) = a.map_back else { return Ok(0) };
        let parsed = solution::parse(&read(&sol_path)?, &inst)?;
        let norm = normalize(&parsed.flows, &map);
        let flows = reassemble(&norm, &map)?;
        let objective = pw.objective(&flows).ok_or_else(|| Fatal("flow outside a profile's domain".into()))?;
        let mut out = format!("split_profit {}\nnormalized_profit {}\n", fmt_fraction(&inst.profit_of(&parsed.flows)), fmt_fraction(&inst.profit_of(&norm)));
        for (k, (e, f)) in pw.edges.iter().zip(&flows).enumerate() {
            out.push_str(&format!("flow {} {} {} {}\n", k + 1, e.src + 1, e.dst + 1, fmt_fraction(f)));
        }
        out.push_str(&format!("objective {}\n", fmt_fraction(&objective)));
        print!("{out}");
        return Ok(pass(objective == inst.profit_of(&norm)));
    }
    let g = parse_gflow(&text)?;
    let (btp, mapper) = gflow_to_btp(&g)?;
    let written = match &a.shift {
        Some(m) => mincost_to_maxprofit(&btp, m)?,
        None => btp.clone(),
    };
    emit(&serialize_rational(&written), Some(&a.output))?;
    let Some(sol_path) = a.map_back else { return Ok(0) };
    let ends: Vec<_> = btp.edges.iter().map(|e| (e.src, e.dst)).collect();
    let parsed = parse_for(&read(&sol_path)?, btp.n(), btp.m(), &ends)?;
    let flow = match map_flow_back(&btp, &parsed.flows, &mapper) {
        Ok(f) => f,
        Err(e) => {
            println!("map_back failed: {e}");
            return Ok(1);
        }
    };
    let violations = g.violations(&flow);
    let mut out = String::new();
    for (k, (arc, f)) in g.arcs.iter().zip(&flow).enumerate() {
        out.push_str(&format!("arc {} {} {} {}\n", k + 1, arc.from + 1, arc.to + 1, fmt_fraction(f)));
    }
    let (cost, reduced) = (g.cost(&flow), btp.value(&parsed.flows));
    out.push_str(&format!("cost {}\nreduced_cost {}\n", fmt_fraction(&cost), fmt_fraction(&reduced)));
    out.push_str(&format!("conserved {}\n", if violations.is_empty() { "yes" } else { "no" }));
    for v in &violations {
        out.push_str(&format!("violation {v}\n"));
    }
    print!("{out}");
    Ok(pass(violations.is_empty() && cost == reduced))
}

fn cmd_bench(a: BenchArgs) -> Result<u8, Fatal> {
    let mut jobs = Vec::new();
    for path in &a.paths {
        jobs.push((path.display().to_string(), load_instance(path)?));
    }
    for plan in &a.gen {
        jobs.extend(generated_jobs(&parse_gen_plan(plan)?).map_err(Fatal)?);
    }
    if jobs.is_empty() {
        jobs = generated_jobs(&parse_gen_plan("seeds=0..5,n=10,m=10,density=0.4")?).map_err(Fatal)?;
    }
    let mode = match a.mode {
        Mode::Exact => NumericMode::ExactRational,
        Mode::Float => NumericMode::Float64 { eta: 1e-9 },
    };
    let rows = run_bench(&jobs, &a.epsilons, a.repeat, mode);
    match a.format {
        BenchFormat::Text => print!("{}", text_table(&rows)),
        BenchFormat::Kv => rows.iter().for_each(|r| println!("{}", r.record())),
    }
    let soft = rows.iter().filter(|r| !r.ops_ok()).count();
    if soft > 0 {
        eprintln!("note: {soft} rows exceed the soft operations-per-phase bound");
    }
    Ok(pass(rows.iter().all(|r| r.hard_ok())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
