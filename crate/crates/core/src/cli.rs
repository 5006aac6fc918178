//! The `commca` command-line front end.
//!
//! Exit codes: 0 pass, 1 predicate or property failure, 2 input error,
//! 3 enumeration cap exceeded.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{rac_verdict, HullBasis, RacParams};
use crate::graph::{parse_communities, parse_graph, AgentId, Graph};
use crate::protocol::{run, SimulationConfig};
use crate::robustness::{
    is_community, is_r_excess_robust, is_rs_excess_robust, verify_reachability_preservation,
    EnumerationLimit, PreservationMode, RobustnessError, RobustnessWitness,
};
use crate::scenarios::{example, load_scenario, to_document};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Environment variable overriding the exhaustive-enumeration cap.
pub const CAP_ENV: &str = "COMMCA_CAP";

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "commca",
    version,
    about = "Community consensus under median-based updates with Byzantine agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check robustness or community predicates on a graph file.
    Check(CheckArgs),
    /// Simulate a scenario and write the trace CSV and verdict.
    Run(RunArgs),
    /// Print the resolved scenario document.
    Scenario(ScenarioArgs),
    /// Check reachability preservation and runtime isolation for certified communities.
    #[command(name = "verify-prop1")]
    VerifyProp1(VerifyArgs),
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Graph file: `n <count>` then one `u v` edge per line.
    graph: PathBuf,
    /// Community file: `community <i>: <ids>` lines and `malicious: <ids>`.
    #[arg(long)]
    communities: Option<PathBuf>,
    /// Check (r, s)-excess robustness (of each community's induced subgraph
    /// when a community file is given).
    #[arg(long, num_args = 2, value_names = ["R", "S"])]
    rs: Option<Vec<usize>>,
    /// Check r-excess robustness.
    #[arg(long, value_name = "R")]
    r: Option<usize>,
    /// Evaluate the community predicate, with `f` malicious agents per
    /// community or, without a value, the malicious count from the community file.
    #[arg(long, value_name = "F", num_args = 0..=1)]
    community: Option<Option<usize>>,
    /// Lift the enumeration cap.
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Reference experiment 1, 2 or 3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    example: Option<u8>,
    /// Scenario document (TOML).
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Overrides {
    /// Seed for initial values (and example cross edges). Defaults to 42 for examples.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    #[arg(long, default_value_t = 50)]
    window: usize,
    /// Bound safety by all members' initial values instead of legitimate ones.
    #[arg(long)]
    all_members_hull: bool,
    /// Output directory for trace.csv, verdict.txt and scenario.toml.
    #[arg(long, default_value = "commca-out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    overrides: Overrides,
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long, value_enum, default_value_t = Mode::Sampled)]
    mode: Mode,
    /// Subsets drawn per community in sampled mode.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long)]
    force: bool,
}

/// Error carrying the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<RobustnessError> for Failure {
    fn from(e: RobustnessError) -> Self {
        let code = match e {
            RobustnessError::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command. `cap_env` is the
/// value of [`CAP_ENV`], if set.
pub fn run_cli<I, T>(
    args: I,
    cap_env: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Check(args) => cap(cap_env, args.force).and_then(|lim| cmd_check(&args, lim, out)),
        Command::Run(args) => cmd_run(&args, out),
        Command::Scenario(args) => cmd_scenario(&args, out),
        Command::VerifyProp1(args) => {
            cap(cap_env, args.force).and_then(|lim| cmd_verify_prop1(&args, lim, out))
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn cap(cap_env: Option<&str>, force: bool) -> Result<EnumerationLimit, Failure> {
    let cap = match cap_env {
        None => EnumerationLimit::DEFAULT_CAP,
        Some(v) => v.trim().parse().map_err(|_| {
            Failure::input(format!(
                "{CAP_ENV} must be a non-negative integer, got `{v}`"
            ))
        })?,
    };
    Ok(EnumerationLimit { cap, force })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn cmd_check(
    args: &CheckArgs,
    limit: EnumerationLimit,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let g = parse_graph(&read(&args.graph)?)
        .map_err(|e| Failure::input(format!("{}: {e}", args.graph.display())))?;
    let file = match &args.communities {
        Some(path) => Some(
            parse_communities(&read(path)?)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let (targets, malicious): (Vec<Vec<AgentId>>, Vec<AgentId>) = match file {
        Some(f) => (f.communities, f.malicious),
        None => (vec![(0..g.n()).collect()], Vec::new()),
    };
    for t in &targets {
        g.membership(t).map_err(|e| Failure::input(e.to_string()))?;
    }
    if let Some(&u) = malicious.iter().find(|&&u| u >= g.n()) {
        return Err(Failure::input(format!(
            "malicious agent {u} is out of range"
        )));
    }

    writeln!(out, "graph: {} agents, {} edges", g.n(), g.edge_count())?;
    let mut ok = true;
    for (i, members) in targets.iter().enumerate() {
        let induced = g
            .induced_subgraph(members)
            .map_err(|e| Failure::input(e.to_string()))?;
        writeln!(
            out,
            "[community {}] {} agents, kappa = {}, internal min degree = {}",
            i + 1,
            members.len(),
            g.kappa(members)
                .map_err(|e| Failure::input(e.to_string()))?,
            induced.graph.min_degree().unwrap_or(0)
        )?;
        let mut report = |w: RobustnessWitness, out: &mut dyn Write| -> Result<(), Failure> {
            ok &= w.verdict();
            write!(out, "{}", w.relabel(&induced.members))?;
            Ok(())
        };
        if let Some(rs) = &args.rs {
            report(
                is_rs_excess_robust(&induced.graph, rs[0], rs[1], limit)?,
                out,
            )?;
        }
        if let Some(r) = args.r {
            report(is_r_excess_robust(&induced.graph, r, limit)?, out)?;
        }
        if let Some(f) = args.community {
            let f = f.unwrap_or_else(|| members.iter().filter(|u| malicious.contains(u)).count());
            let check = is_community(&g, members, f, limit)?;
            ok &= check.holds();
            write!(out, "{check}")?;
        }
    }
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn resolve(source: &Source, overrides: &Overrides) -> Result<(SimulationConfig, String), Failure> {
    let (mut config, origin) = match (source.example, &source.scenario) {
        (Some(n), _) => {
            let seed = overrides.seed.unwrap_or(DEFAULT_SEED);
            (
                example(n, seed).expect("clap restricts the example number"),
                format!("example {n}"),
            )
        }
        (None, Some(path)) => {
            let config = load_scenario(&read(path)?)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            (config, format!("scenario {}", path.display()))
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(rounds) = overrides.rounds {
        config.rounds = rounds;
    }
    if let Some(alpha) = overrides.alpha {
        config.alpha = alpha;
    }
    config
        .validate()
        .map_err(|e| Failure::input(e.to_string()))?;
    Ok((config, origin))
}

fn document(config: &SimulationConfig) -> Result<String, Failure> {
    to_document(config).map_err(|e| Failure::input(e.to_string()))
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (config, origin) = resolve(&args.source, &args.overrides)?;
    let params = RacParams {
        eps: args.eps,
        delta: args.delta,
        window: args.window,
        hull: if args.all_members_hull {
            HullBasis::AllMembers
        } else {
            HullBasis::Legitimate
        },
        ..RacParams::default()
    };
    let trace = run(&config).map_err(|e| Failure::input(e.to_string()))?;
    let verdict = rac_verdict(&trace, &params).map_err(|e| Failure::input(e.to_string()))?;

    fs::create_dir_all(&args.out)?;
    let csv = args.out.join("trace.csv");
    trace.write_csv(std::io::BufWriter::new(fs::File::create(&csv)?))?;
    let mut text = String::new();
    let _ = writeln!(text, "# source = {origin}");
    let _ = writeln!(
        text,
        "# seed = {}, alpha = {}, rounds = {}, agents = {}",
        config.seed,
        config.alpha,
        config.rounds,
        config.graph.n()
    );
    let _ = writeln!(text, "# full configuration: scenario.toml");
    text.push_str(&verdict.to_string());
    fs::write(args.out.join("verdict.txt"), text)?;
    fs::write(args.out.join("scenario.toml"), document(&config)?)?;

    for c in &verdict.communities {
        writeln!(out, "{}", c.summary())?;
    }
    writeln!(out, "wrote {}", args.out.display())?;
    Ok(EXIT_PASS)
}

fn cmd_scenario(args: &ScenarioArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (config, _) = resolve(&args.source, &args.overrides)?;
    let text = document(&config)?;
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_PASS)
}

fn cmd_verify_prop1(
    args: &VerifyArgs,
    limit: EnumerationLimit,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let (config, origin) = resolve(&args.source, &args.overrides)?;
    let (g, layout): (&Graph, _) = (&config.graph, &config.layout);
    let mode = match args.mode {
        Mode::Exhaustive => PreservationMode::Exhaustive(limit),
        Mode::Sampled => PreservationMode::Sampled {
            samples: args.samples,
            seed: config.seed,
        },
    };
    writeln!(out, "source: {origin}")?;
    let mut ok = true;
    let mut certified = vec![false; layout.community_count()];
    for (i, flag) in certified.iter_mut().enumerate() {
        let members = layout.members(i);
        let check = is_community(g, members, layout.malicious_count(i), limit)?;
        *flag = check.holds();
        writeln!(
            out,
            "[community {}] certified = {} (kappa = {}, f = {})",
            i + 1,
            check.holds(),
            check.kappa,
            check.f
        )?;
        if !check.holds() {
            writeln!(out, "  not a community; preservation not asserted")?;
            continue;
        }
        let report = verify_reachability_preservation(g, members, mode)?;
        writeln!(
            out,
            "  preservation: subsets = {}, reachable agents = {}, extensions = {}",
            report.subsets_checked, report.reachable_agents, report.extensions_checked
        )?;
        if let Some(cx) = &report.counterexample {
            ok = false;
            writeln!(
                out,
                "  counterexample: agent {} in S = {:?} with N = {:?}: excess {} in community, {} in graph",
                cx.agent, cx.subset, cx.added, cx.internal_excess, cx.graph_excess
            )?;
        }
    }

    let trace = run(&config).map_err(|e| Failure::input(e.to_string()))?;
    for (i, &cert) in certified.iter().enumerate() {
        match trace.isolation_breach(i) {
            None => writeln!(
                out,
                "[community {}] isolation held for {} rounds",
                i + 1,
                config.rounds
            )?,
            Some(b) => {
                ok &= !cert;
                writeln!(
                    out,
                    "[community {}] isolation breach{}: round {}, agent {}, median {}",
                    i + 1,
                    if cert { "" } else { " (not certified)" },
                    b.round,
                    b.agent,
                    b.median
                )?;
            }
        }
    }
    writeln!(out, "result: {}", if ok { "pass" } else { "fail" })?;
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}
