//! Batch command-line front end.
//!
//! Reports go to stdout as JSON (traces as JSON lines) and, with `--out DIR`,
//! into files under `DIR`. Every report carries `format_version` and the
//! resolved configuration. Worker count and output paths are left out of the
//! configuration because they do not affect results.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 precondition violation,
//! 3 step limit reached, 4 asserted suite failure.

mod suites;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::arrowcheck::{replay_contradiction, verify_arrow};
use crate::dynamics::{iterate_phi, Termination};
use crate::error::Error;
use crate::measures::{Distribution, DistributionFile};
use crate::orders::LinearOrder;
use crate::ratio::{self, Rational};
use crate::rules::{RuleFile, VotingRule};

pub use suites::{run_suite, SuiteOutcome, SUITE_NAMES};

pub const CONFIG_FORMAT_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_STEP_LIMIT: i32 = 3;
pub const EXIT_SUITE_FAILURE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "arrowlab",
    version,
    about = "Exact-rational checks of Φ fixpoint dynamics on voting rules"
)]
pub struct Cli {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate every Pareto and IIA rule and check each is a dictatorship.
    VerifyArrow {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate Φ from a rule file and emit the trace.
    Iterate {
        #[arg(long)]
        rule: PathBuf,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites on seeded rule populations.
    Check {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the cylinder fixpoint argument for a Pareto rule on one voter fewer.
    Replay {
        /// Voters of the cylinder rule; the inner rule has one fewer.
        #[command(flatten)]
        shape: Shape,
        /// Inner rule file (defaults to majority with canonical tie-break).
        #[arg(long)]
        rule: Option<PathBuf>,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value_t = 0)]
        y_index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a rule file.
    MakeRule {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_enum)]
        kind: RuleKind,
        /// Voter for `dictator`.
        #[arg(long, default_value_t = 0)]
        voter: usize,
        /// Order index for `constant`.
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Build the rule on one voter fewer and extend it by ignoring the last ballot.
        #[arg(long)]
        cylinder: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a distribution file.
    MakeDist {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Shape {
    #[arg(long, default_value_t = 3)]
    pub voters: usize,
    #[arg(long, default_value_t = 3)]
    pub candidates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    Uniform,
    Star,
    LiftStar,
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    pub dist: DistKind,
    #[arg(long, default_value = "1/2")]
    pub epsilon: String,
    #[arg(long, default_value_t = 0)]
    pub y_index: usize,
    /// Load the distribution from a file instead.
    #[arg(long)]
    pub dist_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Dictator,
    Constant,
    Majority,
    Borda,
    RandomPareto,
}

/// Resolved distribution, as recorded in reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistSpec {
    Uniform,
    Star {
        #[serde(with = "ratio::serde_fraction")]
        epsilon: Rational,
        y_index: usize,
    },
    /// Star on all but the last voter, lifted at the last voter.
    LiftStar {
        #[serde(with = "ratio::serde_fraction")]
        epsilon: Rational,
        y_index: usize,
        lift_voter: usize,
    },
    File {
        path: String,
    },
}

impl DistSpec {
    pub fn resolve(args: &DistArgs, n: usize) -> Result<Self, Error> {
        if let Some(path) = &args.dist_file {
            return Ok(DistSpec::File {
                path: path.display().to_string(),
            });
        }
        let epsilon = ratio::parse_fraction(&args.epsilon)?;
        Ok(match args.dist {
            DistKind::Uniform => DistSpec::Uniform,
            DistKind::Star => DistSpec::Star {
                epsilon,
                y_index: args.y_index,
            },
            DistKind::LiftStar => DistSpec::LiftStar {
                epsilon,
                y_index: args.y_index,
                lift_voter: n.saturating_sub(1),
            },
        })
    }

    pub fn build(&self, n: usize, m: usize) -> Result<Distribution, CliError> {
        let star = |k, eps: &Rational, y: usize| {
            Distribution::check_epsilon(m, eps)?;
            Distribution::star(k, m, eps, &LinearOrder::from_index(m, y)?)
        };
        Ok(match self {
            DistSpec::Uniform => Distribution::uniform(n, m)?,
            DistSpec::Star { epsilon, y_index } => star(n, epsilon, *y_index)?,
            DistSpec::LiftStar {
                epsilon,
                y_index,
                lift_voter,
            } => {
                if n < 2 {
                    return Err(Error::TooFewVoters { min: 2, got: n }.into());
                }
                star(n - 1, epsilon, *y_index)?.lift(*lift_voter)?
            }
            DistSpec::File { path } => {
                let file: DistributionFile =
                    read_json(Path::new(path), Error::InvalidDistribution)?;
                let mu = Distribution::from_file(file)?;
                if mu.voters() != n || mu.candidates() != m {
                    return Err(crate::error::mismatch(
                        format!("{n} voters x {m} candidates"),
                        format!("{} voters x {} candidates", mu.voters(), mu.candidates()),
                    )
                    .into());
                }
                mu
            }
        })
    }
}

/// The result-affecting configuration of one run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub voters: usize,
    pub candidates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<DistSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleRef>,
}

impl RunConfig {
    fn new(command: &'static str, voters: usize, candidates: usize) -> Self {
        Self {
            command,
            voters,
            candidates,
            dist: None,
            seed: None,
            max_steps: None,
            suite: None,
            rule: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleRef {
    pub path: String,
    pub digest: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Precondition(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_json<T: serde::de::DeserializeOwned>(
    path: &Path,
    malformed: fn(String) -> Error,
) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())).into())
}

fn read_rule(path: &Path) -> Result<VotingRule, CliError> {
    let file: RuleFile = read_json(path, Error::InvalidTable)?;
    Ok(VotingRule::from_file(file)?)
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

/// Prints `contents` and, with an output directory, writes it to `dir/name`.
fn emit(out: Option<&Path>, name: &str, contents: &str) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(contents.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))?;
    if let Some(dir) = out {
        write_file(&dir.join(name), contents)?;
    }
    Ok(())
}

/// Parses arguments, runs the command, and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start {jobs} workers: {e}");
            return EXIT_IO;
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::VerifyArrow { shape, out } => cmd_verify_arrow(shape, out.as_deref()),
        Command::Iterate {
            rule,
            dist,
            max_steps,
            out,
        } => cmd_iterate(&rule, &dist, max_steps, out.as_deref()),
        Command::Check {
            shape,
            dist,
            suite,
            seed,
            out,
        } => cmd_check(shape, &dist, &suite, seed, out.as_deref()),
        Command::Replay {
            shape,
            rule,
            epsilon,
            y_index,
            out,
        } => cmd_replay(shape, rule.as_deref(), &epsilon, y_index, out.as_deref()),
        Command::MakeRule {
            shape,
            kind,
            voter,
            order,
            seed,
            cylinder,
            out,
        } => cmd_make_rule(shape, kind, voter, order, seed, cylinder, out.as_deref()),
        Command::MakeDist { shape, dist, out } => cmd_make_dist(shape, &dist, out.as_deref()),
    }
}

fn cmd_verify_arrow(shape: Shape, out: Option<&Path>) -> Result<i32, CliError> {
    let config = RunConfig::new("verify-arrow", shape.voters, shape.candidates);
    let started = Instant::now();
    let report = verify_arrow(shape.voters, shape.candidates)?;
    eprintln!("verify-arrow: {:.3} s", started.elapsed().as_secs_f64());
    let mut rule_files = Vec::new();
    for (k, rule) in report.rules.iter().enumerate() {
        let name = format!("rules/rule_{k}.json");
        if let Some(dir) = out {
            write_file(&dir.join(&name), &pretty(&rule.to_file()))?;
        }
        rule_files.push(name);
    }
    let doc = json!({
        "format_version": CONFIG_FORMAT_VERSION,
        "config": config,
        "report": report,
        "rule_files": rule_files,
    });
    emit(out, "report.json", &pretty(&doc))?;
    Ok(if report.all_dictators {
        EXIT_OK
    } else {
        EXIT_SUITE_FAILURE
    })
}

fn cmd_iterate(
    rule_path: &Path,
    dist: &DistArgs,
    max_steps: usize,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let f = read_rule(rule_path)?;
    let (n, m) = (f.voters(), f.candidates());
    let spec = DistSpec::resolve(dist, n)?;
    let mu = spec.build(n, m)?;
    let mut config = RunConfig::new("iterate", n, m);
    config.dist = Some(spec);
    config.max_steps = Some(max_steps);
    config.rule = Some(RuleRef {
        path: rule_path.display().to_string(),
        digest: f.digest(),
    });

    let trace = iterate_phi(&mu, &f, max_steps)?;
    let mut lines = String::new();
    let mut push = |v: &serde_json::Value| {
        lines.push_str(&serde_json::to_string(v).expect("trace serializes"));
        lines.push('\n');
    };
    push(&json!({ "format_version": CONFIG_FORMAT_VERSION, "config": config }));
    for record in trace.records() {
        push(&serde_json::to_value(record).expect("trace serializes"));
    }
    push(&json!({
        "terminated_by": trace.terminated_by,
        "fixpoint_step": trace.fixpoint_step(),
        "fixpoint_is_dictatorship": trace.fixpoint_is_dictatorship,
        "final_rule_digest": trace.last_rule().digest(),
    }));
    emit(out, "trace.jsonl", &lines)?;
    Ok(match trace.terminated_by {
        Termination::Fixpoint => EXIT_OK,
        Termination::StepLimit => EXIT_STEP_LIMIT,
    })
}

fn cmd_check(
    shape: Shape,
    dist: &DistArgs,
    suite: &str,
    seed: u64,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let names: Vec<&str> = match suite {
        "all" => SUITE_NAMES.to_vec(),
        name if SUITE_NAMES.contains(&name) => vec![name],
        other => {
            eprintln!(
                "error: unknown suite '{other}' (expected all or one of {})",
                SUITE_NAMES.join(", ")
            );
            return Ok(EXIT_PRECONDITION);
        }
    };
    let (n, m) = (shape.voters, shape.candidates);
    let spec = DistSpec::resolve(dist, n)?;
    let mu = spec.build(n, m)?;
    let mut config = RunConfig::new("check", n, m);
    config.dist = Some(spec);
    config.seed = Some(seed);
    config.suite = Some(suite.to_string());

    let eps = ratio::parse_fraction(&dist.epsilon)?;
    let params = suites::SuiteParams {
        n,
        m,
        seed,
        mu: &mu,
        epsilon: eps,
        y_index: dist.y_index,
    };
    let mut outcomes = Vec::new();
    for name in names {
        let started = Instant::now();
        let outcome = run_suite(name, &params)?;
        eprintln!(
            "suite {name}: {} in {:.3} s",
            if !outcome.asserted {
                "reported"
            } else if outcome.passed {
                "pass"
            } else {
                "FAIL"
            },
            started.elapsed().as_secs_f64()
        );
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().all(|o| o.passed || !o.asserted);
    let doc = json!({
        "format_version": CONFIG_FORMAT_VERSION,
        "config": config,
        "suites": outcomes,
        "passed": passed,
    });
    emit(out, "check.json", &pretty(&doc))?;
    Ok(if passed { EXIT_OK } else { EXIT_SUITE_FAILURE })
}

fn cmd_replay(
    shape: Shape,
    rule: Option<&Path>,
    epsilon: &str,
    y_index: usize,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let (n, m) = (shape.voters, shape.candidates);
    if n < 2 {
        return Err(Error::TooFewVoters { min: 2, got: n }.into());
    }
    let eps = ratio::parse_fraction(epsilon)?;
    Distribution::check_epsilon(m, &eps)?;
    let g = match rule {
        Some(path) => read_rule(path)?,
        None => VotingRule::majority_with_canonical_tiebreak(n - 1, m)?,
    };
    if g.voters() + 1 != n || g.candidates() != m {
        return Err(crate::error::mismatch(
            format!("{} voters x {m} candidates", n - 1),
            format!("{} voters x {} candidates", g.voters(), g.candidates()),
        )
        .into());
    }
    let mut config = RunConfig::new("replay", n, m);
    config.dist = Some(DistSpec::LiftStar {
        epsilon: eps.clone(),
        y_index,
        lift_voter: n - 1,
    });
    config.rule = Some(RuleRef {
        path: rule.map_or_else(
            || "builtin:majority".to_string(),
            |p| p.display().to_string(),
        ),
        digest: g.digest(),
    });
    let report = replay_contradiction(&g, &eps, &LinearOrder::from_index(m, y_index)?)?;
    let doc = json!({
        "format_version": CONFIG_FORMAT_VERSION,
        "config": config,
        "report": report,
    });
    emit(out, "replay.json", &pretty(&doc))?;
    Ok(EXIT_OK)
}

fn cmd_make_rule(
    shape: Shape,
    kind: RuleKind,
    voter: usize,
    order: usize,
    seed: u64,
    cylinder: bool,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let m = shape.candidates;
    let n = if cylinder {
        shape
            .voters
            .checked_sub(1)
            .filter(|&k| k >= 1)
            .ok_or(Error::TooFewVoters {
                min: 2,
                got: shape.voters,
            })?
    } else {
        shape.voters
    };
    let mut rule = match kind {
        RuleKind::Dictator => VotingRule::dictator(n, m, voter)?,
        RuleKind::Constant => VotingRule::constant(n, m, order)?,
        RuleKind::Majority => VotingRule::majority_with_canonical_tiebreak(n, m)?,
        RuleKind::Borda => VotingRule::borda_with_tiebreak(n, m)?,
        RuleKind::RandomPareto => VotingRule::random_pareto(n, m, seed)?,
    };
    if cylinder {
        rule = rule.cylinder_extend()?;
    }
    emit(out, "rule.json", &pretty(&rule.to_file()))?;
    Ok(EXIT_OK)
}

fn cmd_make_dist(shape: Shape, dist: &DistArgs, out: Option<&Path>) -> Result<i32, CliError> {
    let spec = DistSpec::resolve(dist, shape.voters)?;
    let mu = spec.build(shape.voters, shape.candidates)?;
    emit(out, "dist.json", &pretty(&mu.to_file()))?;
    Ok(EXIT_OK)
}
