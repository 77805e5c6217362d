//! Subcommands. Each composes one library operation with file I/O and
//! returns the text for standard output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mwcut_core::{
    exact_min_dirmc, exact_min_nodemc, gen_fractionality_family, gen_gap_family, gen_random_instance, lp_cost,
    node_split_reduction, parse_cut, parse_fractional, parse_instance, reduce_4terminal_to_stbicut,
    round_deterministic, round_node_deterministic, serialize_cut, serialize_fractional, serialize_instance,
    solve_lp_mwu, solve_node_lp, verify_cut, verify_feasible, verify_node_cut, CutSolution, DirectedRounder,
    Error, FractionalSolution, Instance, LpResult, Mode, NodeRounder, RandomSpec, TerminalPath, FEASIBILITY_TOL,
};

use crate::report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Guard(String),
    /// A completed check that failed; carries the report to print.
    #[error("check failed")]
    Rejected(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Rejected(_) => 1,
            CliError::Guard(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::IterationCap { .. } | Error::GuardExceeded { .. } => CliError::Guard(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "mwcut", version, about = "Approximate multiway cuts via the distance LP")]
pub struct Cli {
    /// Print the report as a JSON object.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the LP and round it.
    Solve(SolveArgs),
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Solve the LP and write the fractional solution.
    Lp(LpArgs),
    /// Round a given fractional solution.
    Round(RoundArgs),
    /// Exact minimum cut of a small instance.
    Oracle(OracleArgs),
    /// Check a cut or a fractional solution.
    Verify(VerifyArgs),
    /// Rewrite an instance through a reduction.
    Reduce(ReduceArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Dirmc,
    Nodemc,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Instance file (`-` for standard input).
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// LP accuracy: the primal is within 1 + epsilon of the optimum.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Seed for randomized rounding (default 0).
    #[arg(long, conflicts_with = "deterministic")]
    seed: Option<u64>,
    /// Use the derandomized sweep.
    #[arg(long)]
    deterministic: bool,
    /// Instance kind; `auto` follows the file header.
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Cut file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenFamily {
    /// Recursive integrality-gap family.
    Gap {
        /// Recursion depth (0 is the base gadget).
        #[arg(long)]
        level: usize,
        /// Instance file to write instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fractionality family with parameter h.
    Frac {
        /// Number of terminals, at least 2.
        #[arg(long)]
        h: usize,
        /// Instance file to write instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random instance.
    Random(RandomArgs),
}

#[derive(Debug, Args)]
struct RandomArgs {
    /// Number of nodes.
    #[arg(long)]
    n: usize,
    /// Probability of each arc (or edge).
    #[arg(long)]
    density: f64,
    /// Number of terminals.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "dirmc")]
    mode: ModeArg,
    /// Fraction of members given infinite weight.
    #[arg(long, default_value_t = 0.0)]
    infinite_fraction: f64,
    /// Resample until at most this many members have finite weight.
    #[arg(long)]
    max_finite: Option<usize>,
    /// Finite weights are uniform in [min-weight, max-weight], rounded to 3 decimals.
    #[arg(long, default_value_t = 1.0)]
    min_weight: f64,
    #[arg(long, default_value_t = 10.0)]
    max_weight: f64,
    /// Instance file to write instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LpArgs {
    /// Instance file (`-` for standard input).
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// LP accuracy: the primal is within 1 + epsilon of the optimum.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Fractional solution file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RoundArgs {
    /// Instance file (`-` for standard input).
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// Fractional solution file.
    #[arg(long)]
    x: PathBuf,
    /// Fixed threshold, in (0, 1) for directed and (0, 1/2) for node instances.
    #[arg(long, conflicts_with_all = ["deterministic", "seed", "trials"])]
    theta: Option<f64>,
    /// Skipped terminal for node instances with `--theta` (1-based index).
    #[arg(long, requires = "theta")]
    ell: Option<usize>,
    /// Use the derandomized sweep.
    #[arg(long, conflicts_with_all = ["seed", "trials"])]
    deterministic: bool,
    /// Seed for randomized rounding (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of randomized trials (Monte Carlo mode).
    #[arg(long)]
    trials: Option<u64>,
    /// Per-trial log for Monte Carlo mode, in trial order.
    #[arg(long, requires = "trials")]
    trace: Option<PathBuf>,
    /// Cut file to write (the cheapest trial in Monte Carlo mode).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Instance file (`-` for standard input).
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// Cut file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Instance file (`-` for standard input).
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// Cut file to check for separation.
    #[arg(long, required_unless_present = "x", conflicts_with = "x")]
    cut: Option<PathBuf>,
    /// Fractional solution file to check for feasibility.
    #[arg(long)]
    x: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReduceKind {
    Nodesplit,
    Stbicut4,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    /// Instance file (`-` for standard input).
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// `nodesplit` for node instances, `stbicut4` for node instances with 4 terminals.
    #[arg(long, value_enum)]
    kind: ReduceKind,
    /// Instance file to write instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<String> {
    let json = cli.json;
    let report = match cli.command {
        Command::Solve(a) => solve(a)?,
        Command::Gen { family } => return gen(family, json),
        Command::Lp(a) => lp(a)?,
        Command::Round(a) => round(a)?,
        Command::Oracle(a) => oracle(a)?,
        Command::Verify(a) => {
            let (ok, report) = verify(a)?;
            if !ok {
                return Err(CliError::Rejected(report.render(json)));
            }
            report
        }
        Command::Reduce(a) => return reduce(a, json),
    };
    Ok(report.render(json))
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Input(format!("standard input: {e}")))
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn with_file<T>(path: &Path, r: std::result::Result<T, Error>) -> Result<T> {
    r.map_err(|e| match CliError::from(e) {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn load_instance(path: &Path, mode: ModeArg) -> Result<Instance> {
    let inst = with_file(path, parse_instance(&read_text(path)?))?;
    match (mode, &inst) {
        (ModeArg::Dirmc, Instance::Node(_)) => Err(CliError::Input("expected a dirmc instance".into())),
        (ModeArg::Nodemc, Instance::Directed(_)) => Err(CliError::Input("expected a nodemc instance".into())),
        _ => Ok(inst),
    }
}

fn mode_name(inst: &Instance) -> &'static str {
    match inst {
        Instance::Directed(_) => "dirmc",
        Instance::Node(_) => "nodemc",
    }
}

fn describe(report: &mut Report, inst: &Instance) {
    let (n, m, k) = match inst {
        Instance::Directed(g) => (g.n(), g.m(), g.k()),
        Instance::Node(g) => (g.n(), g.m(), g.k()),
    };
    report.push("mode", mode_name(inst)).push("n", n).push("m", m).push("k", k);
}

fn ms(since: Instant) -> f64 {
    (since.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn ratio(cut: f64, lp: f64) -> Option<f64> {
    (lp > 0.0).then(|| cut / lp)
}

fn solve_lp(inst: &Instance, epsilon: f64) -> Result<LpResult> {
    Ok(match inst {
        Instance::Directed(g) => solve_lp_mwu(g, epsilon)?,
        Instance::Node(g) => solve_node_lp(g, epsilon)?,
    })
}

fn cut_fields(report: &mut Report, cut: &CutSolution, lp: f64) {
    report
        .push("cut_cost", cut.cost)
        .push("cut_size", cut.len())
        .push("ratio_cut_over_lp", ratio(cut.cost, lp))
        .push("theta", cut.meta.theta)
        .push("ell", cut.meta.ell.map(|l| l + 1))
        .push("seed", cut.meta.seed);
}

fn round_once(inst: &Instance, x: &FractionalSolution, deterministic: bool, seed: u64) -> Result<CutSolution> {
    Ok(match (inst, deterministic) {
        (Instance::Directed(g), true) => round_deterministic(g, x)?,
        (Instance::Directed(g), false) => DirectedRounder::new(g, x)?.trial(seed, 0)?,
        (Instance::Node(g), true) => round_node_deterministic(g, x)?,
        (Instance::Node(g), false) => NodeRounder::new(g, x)?.trial(seed, 0)?,
    })
}

fn solve(a: SolveArgs) -> Result<Report> {
    let start = Instant::now();
    let inst = load_instance(&a.input, a.mode)?;
    let t = Instant::now();
    let lp = solve_lp(&inst, a.epsilon)?;
    let time_lp = ms(t);
    let t = Instant::now();
    let cut = round_once(&inst, &lp.solution, a.deterministic, a.seed.unwrap_or(0))?;
    let time_round = ms(t);
    if let Some(out) = &a.out {
        write_text(out, &serialize_cut(&inst, &cut))?;
    }
    let mut r = Report::new();
    describe(&mut r, &inst);
    r.push("epsilon", a.epsilon)
        .push("iterations", lp.iterations)
        .push("lp_cost", lp.primal_cost)
        .push("dual_flow_value", lp.dual_flow_value)
        .push("rounding", if a.deterministic { "deterministic" } else { "randomized" });
    cut_fields(&mut r, &cut, lp.primal_cost);
    r.push("time_lp_ms", time_lp).push("time_round_ms", time_round).push("time_total_ms", ms(start));
    Ok(r)
}

fn emit_instance(inst: &Instance, out: Option<&Path>, json: bool) -> Result<String> {
    let text = serialize_instance(inst);
    match out {
        None => Ok(text),
        Some(path) => {
            write_text(path, &text)?;
            let mut r = Report::new();
            describe(&mut r, inst);
            r.push("out", path.display().to_string());
            Ok(r.render(json))
        }
    }
}

fn gen(family: GenFamily, json: bool) -> Result<String> {
    match family {
        GenFamily::Gap { level, out } => {
            emit_instance(&Instance::Directed(gen_gap_family(level)?), out.as_deref(), json)
        }
        GenFamily::Frac { h, out } => {
            emit_instance(&Instance::Directed(gen_fractionality_family(h)?), out.as_deref(), json)
        }
        GenFamily::Random(a) => {
            let mode = match a.mode {
                ModeArg::Auto | ModeArg::Dirmc => Mode::Edge,
                ModeArg::Nodemc => Mode::Node,
            };
            let mut spec = RandomSpec::new(a.n, a.density, a.k, a.seed, mode);
            spec.infinite_fraction = a.infinite_fraction;
            spec.max_finite = a.max_finite;
            spec.weight_range = (a.min_weight, a.max_weight);
            emit_instance(&gen_random_instance(&spec)?, a.out.as_deref(), json)
        }
    }
}

fn lp(a: LpArgs) -> Result<Report> {
    let inst = load_instance(&a.input, ModeArg::Auto)?;
    let t = Instant::now();
    let res = solve_lp(&inst, a.epsilon)?;
    let time_lp = ms(t);
    if let Some(out) = &a.out {
        write_text(out, &serialize_fractional(&inst, &res.solution)?)?;
    }
    let mut r = Report::new();
    describe(&mut r, &inst);
    r.push("epsilon", a.epsilon)
        .push("iterations", res.iterations)
        .push("lp_cost", res.primal_cost)
        .push("dual_flow_value", res.dual_flow_value)
        .push("gap", ratio(res.primal_cost, res.dual_flow_value).map(|q| q - 1.0))
        .push("time_lp_ms", time_lp);
    Ok(r)
}

fn load_fractional(path: &Path, inst: &Instance) -> Result<FractionalSolution> {
    with_file(path, parse_fractional(&read_text(path)?, inst))
}

fn instance_lp_cost(inst: &Instance, x: &FractionalSolution) -> Result<f64> {
    Ok(match inst {
        Instance::Directed(g) => lp_cost(g, x)?,
        Instance::Node(g) => lp_cost(g, x)?,
    })
}

/// Worker count from `MWCUT_THREADS` (default 1).
fn thread_count() -> Result<usize> {
    match std::env::var("MWCUT_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(CliError::Input(format!("MWCUT_THREADS must be a positive integer, got `{v}`"))),
        },
    }
}

/// Run `trials` independent trials on `threads` workers; results come back
/// in trial order.
fn run_trials<T: Send>(
    trials: u64,
    threads: usize,
    f: impl Fn(u64) -> std::result::Result<T, Error> + Sync,
) -> Result<Vec<T>> {
    let threads = threads.min(trials.max(1) as usize);
    let chunks: Vec<std::result::Result<Vec<(u64, T)>, Error>> = std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                s.spawn(move || {
                    (w as u64..trials).step_by(threads).map(|i| f(i).map(|v| (i, v))).collect::<std::result::Result<Vec<_>, _>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial worker panicked")).collect()
    });
    let mut all = Vec::with_capacity(trials as usize);
    for chunk in chunks {
        all.extend(chunk?);
    }
    all.sort_by_key(|(i, _)| *i);
    Ok(all.into_iter().map(|(_, v)| v).collect())
}

fn round(a: RoundArgs) -> Result<Report> {
    let inst = load_instance(&a.input, ModeArg::Auto)?;
    let x = load_fractional(&a.x, &inst)?;
    let lp = instance_lp_cost(&inst, &x)?;
    let mut r = Report::new();
    describe(&mut r, &inst);
    r.push("lp_cost", lp);
    let t = Instant::now();
    if let Some(trials) = a.trials {
        if trials == 0 {
            return Err(CliError::Input("--trials must be positive".into()));
        }
        let seed = a.seed.unwrap_or(0);
        let threads = thread_count()?;
        let cuts = match &inst {
            Instance::Directed(g) => {
                let rounder = DirectedRounder::new(g, &x)?;
                run_trials(trials, threads, |i| rounder.trial(seed, i))?
            }
            Instance::Node(g) => {
                let rounder = NodeRounder::new(g, &x)?;
                run_trials(trials, threads, |i| rounder.trial(seed, i))?
            }
        };
        let time_round = ms(t);
        let costs: Vec<f64> = cuts.iter().map(|c| c.cost).collect();
        let mean = costs.iter().sum::<f64>() / trials as f64;
        let best = (0..cuts.len()).min_by(|&i, &j| costs[i].total_cmp(&costs[j])).unwrap_or(0);
        if let Some(trace) = &a.trace {
            let mut text = String::new();
            for (i, c) in cuts.iter().enumerate() {
                text.push_str(&format!("trial {i} cost {} theta {}", c.cost, c.meta.theta.unwrap_or(f64::NAN)));
                if let Some(ell) = c.meta.ell {
                    text.push_str(&format!(" ell {}", ell + 1));
                }
                text.push('\n');
            }
            write_text(trace, &text)?;
        }
        if let Some(out) = &a.out {
            write_text(out, &serialize_cut(&inst, &cuts[best]))?;
        }
        r.push("rounding", "randomized")
            .push("trials", trials)
            .push("threads", threads)
            .push("seed", seed)
            .push("cost_mean", mean)
            .push("cost_min", costs[best])
            .push("cost_max", costs.iter().copied().fold(0.0, f64::max))
            .push("ratio_mean_over_lp", ratio(mean, lp))
            .push("best_trial", best)
            .push("time_round_ms", time_round);
        return Ok(r);
    }
    let (cut, kind) = match (&inst, a.theta) {
        (Instance::Directed(g), Some(theta)) => (DirectedRounder::new(g, &x)?.at(theta)?, "fixed"),
        (Instance::Node(g), Some(theta)) => {
            let ell = a.ell.ok_or_else(|| CliError::Input("node instances need --ell with --theta".into()))?;
            if ell == 0 {
                return Err(CliError::Input("--ell is 1-based".into()));
            }
            (NodeRounder::new(g, &x)?.at(ell - 1, theta)?, "fixed")
        }
        (_, None) if a.deterministic => (round_once(&inst, &x, true, 0)?, "deterministic"),
        (_, None) => (round_once(&inst, &x, false, a.seed.unwrap_or(0))?, "randomized"),
    };
    let time_round = ms(t);
    if let Some(out) = &a.out {
        write_text(out, &serialize_cut(&inst, &cut))?;
    }
    r.push("rounding", kind);
    cut_fields(&mut r, &cut, lp);
    r.push("time_round_ms", time_round);
    Ok(r)
}

fn oracle(a: OracleArgs) -> Result<Report> {
    let inst = load_instance(&a.input, ModeArg::Auto)?;
    let t = Instant::now();
    let cut = match &inst {
        Instance::Directed(g) => exact_min_dirmc(g)?,
        Instance::Node(g) => exact_min_nodemc(g)?,
    };
    let time = ms(t);
    if let Some(out) = &a.out {
        write_text(out, &serialize_cut(&inst, &cut))?;
    }
    let mut r = Report::new();
    describe(&mut r, &inst);
    r.push("cost", cut.cost).push("size", cut.len()).push("time_oracle_ms", time);
    Ok(r)
}

fn witness_fields(r: &mut Report, inst: &Instance, w: Option<&TerminalPath>) {
    let terminals = match inst {
        Instance::Directed(g) => g.terminals(),
        Instance::Node(g) => g.terminals(),
    };
    r.push("witness_from", w.map(|p| terminals[p.from] + 1)).push("witness_to", w.map(|p| terminals[p.to] + 1));
}

fn verify(a: VerifyArgs) -> Result<(bool, Report)> {
    let inst = load_instance(&a.input, ModeArg::Auto)?;
    let mut r = Report::new();
    describe(&mut r, &inst);
    if let Some(path) = &a.cut {
        let cut = with_file(path, parse_cut(&read_text(path)?, &inst))?;
        let check = match &inst {
            Instance::Directed(g) => verify_cut(g, &cut)?,
            Instance::Node(g) => verify_node_cut(g, &cut)?,
        };
        r.push("valid", check.ok).push("cost", cut.cost).push("size", cut.len());
        witness_fields(&mut r, &inst, check.witness.as_ref());
        return Ok((check.ok, r));
    }
    let path = a.x.as_deref().expect("clap requires --cut or --x");
    let x = load_fractional(path, &inst)?;
    let f = match &inst {
        Instance::Directed(g) => verify_feasible(g, &x, FEASIBILITY_TOL)?,
        Instance::Node(g) => verify_feasible(g, &x, FEASIBILITY_TOL)?,
    };
    r.push("feasible", f.feasible)
        .push("min_distance", f.min_distance)
        .push("lp_cost", instance_lp_cost(&inst, &x)?)
        .push("tolerance", FEASIBILITY_TOL);
    witness_fields(&mut r, &inst, f.witness.as_ref());
    Ok((f.feasible, r))
}

fn reduce(a: ReduceArgs, json: bool) -> Result<String> {
    let Instance::Node(g) = load_instance(&a.input, ModeArg::Nodemc)? else { unreachable!() };
    let out = match a.kind {
        ReduceKind::Nodesplit => node_split_reduction(&g)?.instance,
        ReduceKind::Stbicut4 => reduce_4terminal_to_stbicut(&g)?.to_directed()?,
    };
    emit_instance(&Instance::Directed(out), a.out.as_deref(), json)
}
