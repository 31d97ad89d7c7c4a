//! Command-line front end. `run` is the whole program minus process setup so
//! that tests can drive it in-process.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::approx::{approx_schedule, approx_schedule_with_slack};
use crate::bounds::cost_lower_bound;
use crate::error::Error;
use crate::eval::{schedule_cost, schedule_delay, validate_schedule};
use crate::generators::{
    gen_figure1, gen_random_euclidean, gen_random_explicit, gen_steiner, gen_tight, DeadlinePolicy, GeneratorParams,
    RandomParams,
};
use crate::instance::Instance;
use crate::oracle::{brute_force_min_cost, brute_force_min_delay};
use crate::schedule::Schedule;
use crate::tolerance::{eq_rel, le_rel, ratio};
use crate::transforms::min_delay;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_GUARANTEE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "subtour", version, about = "Delivery schedules with hand-overs between vehicles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the deadline can be met.
    Check { instance: PathBuf },
    /// Compute an approximate schedule and certify its guarantees.
    Solve(SolveArgs),
    /// Validate and evaluate a schedule.
    Eval { instance: PathBuf, schedule: PathBuf },
    /// Print the lower bounds.
    Bounds { instance: PathBuf },
    /// Solve a small instance exactly.
    Oracle {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleKind::Delay)]
        kind: OracleKind,
    },
    /// Generate an instance.
    Gen(GenArgs),
    /// Run the solver over a corpus and tabulate the ratios.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    /// Accuracy parameter; the delay is within (1 + 4 eps) of the deadline.
    #[arg(long, allow_negative_numbers = true, required_unless_present = "slack", conflicts_with = "slack")]
    epsilon: Option<f64>,
    /// Target delay slack; runs with eps = slack / 4.
    #[arg(long, allow_negative_numbers = true)]
    slack: Option<f64>,
    /// Write the schedule JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a Graphviz rendering of the schedule here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OracleKind {
    Delay,
    Cost,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(subcommand)]
    family: GenFamily,
    /// Write the instance here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
struct DeadlineArgs {
    /// Deadline as a multiple of the minimum delay.
    #[arg(long, conflicts_with = "deadline")]
    slack: Option<f64>,
    /// Fixed deadline.
    #[arg(long)]
    deadline: Option<f64>,
}

impl DeadlineArgs {
    fn policy(self) -> DeadlinePolicy {
        match (self.slack, self.deadline) {
            (_, Some(d)) => DeadlinePolicy::Fixed(d),
            (Some(s), None) => DeadlinePolicy::Slack(s),
            (None, None) => DeadlinePolicy::default(),
        }
    }
}

#[derive(Subcommand, Debug)]
enum GenFamily {
    /// The seven-item example with its drawn schedule.
    Figure1 {
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Also write the drawn schedule here.
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Spider family where shallow trees are far longer than the MST.
    Tight {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[command(flatten)]
        deadline: DeadlineArgs,
    },
    /// Instance where hand-overs away from item locations pay off.
    Steiner {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: f64,
    },
    /// Uniform random points in a square.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "box", default_value_t = 100.0)]
        box_size: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[command(flatten)]
        deadline: DeadlineArgs,
        /// Store distances as an explicit matrix.
        #[arg(long)]
        explicit: bool,
        /// Extra non-item points for explicit instances.
        #[arg(long, default_value_t = 0, requires = "explicit")]
        extra: usize,
    },
    /// Generator parameters from a JSON file.
    Spec { file: PathBuf },
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Directory of instance or generator-spec JSON files.
    corpus: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0, 2.0])]
    epsilons: Vec<f64>,
    /// Seed for the random instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random Euclidean instances to add to the corpus.
    #[arg(long, default_value_t = 0)]
    random: usize,
    /// Write the table as CSV here (default: stdout).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write records and summary as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// One solver run in a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub epsilon: f64,
    pub n: usize,
    pub deadline: f64,
    pub status: String,
    pub delay: Option<f64>,
    pub travel: Option<f64>,
    pub mst: Option<f64>,
    pub vehicles: Option<usize>,
    pub vehicle_bound: Option<f64>,
    pub cost: Option<f64>,
    pub cost_lb: Option<f64>,
    pub delay_ratio: Option<f64>,
    pub length_ratio: Option<f64>,
    pub cost_ratio: Option<f64>,
    pub guarantees_ok: Option<bool>,
    pub wall_ms: f64,
}

impl RunRecord {
    /// Whether the stored ratios agree with the stored raw values.
    pub fn ratios_consistent(&self) -> bool {
        let check = |r: Option<f64>, num: Option<f64>, den: Option<f64>| match (r, num, den) {
            (Some(r), Some(a), Some(b)) => eq_rel(r, ratio(a, b)),
            (None, None, _) | (None, _, None) => true,
            _ => false,
        };
        check(self.delay_ratio, self.delay, Some(self.deadline))
            && check(self.length_ratio, self.travel, self.mst)
            && check(self.cost_ratio, self.cost, self.cost_lb)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub runs: usize,
    pub failures: usize,
    pub violations: usize,
    pub max_delay_ratio: Option<f64>,
    pub max_length_ratio: Option<f64>,
    pub max_cost_ratio: Option<f64>,
}

const CSV_HEADER: [&str; 17] = [
    "instance",
    "epsilon",
    "n",
    "deadline",
    "status",
    "delay",
    "travel",
    "mst",
    "vehicles",
    "vehicle_bound",
    "cost",
    "cost_lb",
    "delay_ratio",
    "length_ratio",
    "cost_ratio",
    "guarantees_ok",
    "wall_ms",
];

struct Failure {
    code: i32,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Infeasible { .. }) => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Runs the program on `args` (including the binary name) and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Check { instance } => cmd_check(&instance, out),
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Eval { instance, schedule } => cmd_eval(&instance, &schedule, out),
        Command::Bounds { instance } => cmd_bounds(&instance, out),
        Command::Oracle { instance, kind } => cmd_oracle(&instance, kind, out),
        Command::Gen(args) => cmd_gen(args, out),
        Command::Bench(args) => cmd_bench(&args, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error);
            f.code
        }
    }
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("loading instance {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_check(path: &Path, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(path)?;
    let md = min_delay(&instance);
    let feasible = le_rel(md, instance.deadline());
    emit(
        out,
        &json!({ "min_delay": md, "deadline": instance.deadline(), "feasible": feasible }),
    )?;
    Ok(if feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let report = match (args.epsilon, args.slack) {
        (Some(eps), _) => approx_schedule(&instance, eps),
        (None, Some(slack)) => approx_schedule_with_slack(&instance, slack),
        (None, None) => unreachable!("clap requires one of --epsilon and --slack"),
    };
    let report = match report {
        Err(Error::Infeasible { min_delay, deadline }) => {
            emit(out, &json!({ "feasible": false, "min_delay": min_delay, "deadline": deadline }))?;
            return Err(anyhow!(Error::Infeasible { min_delay, deadline }).into());
        }
        other => other?,
    };
    if let Some(path) = &args.out {
        write_file(path, &report.schedule.to_json())?;
    }
    if let Some(path) = &args.dot {
        write_file(path, &report.schedule.to_dot(&instance))?;
    }
    writeln!(out, "{}", report.to_json()).map_err(anyhow::Error::from)?;
    Ok(if report.guarantees_ok { EXIT_OK } else { EXIT_GUARANTEE })
}

fn cmd_eval(instance: &Path, schedule: &Path, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(instance)?;
    let text = fs::read_to_string(schedule).with_context(|| format!("reading {}", schedule.display()))?;
    let schedule = Schedule::from_json(&text).with_context(|| "loading schedule")?;
    let report = validate_schedule(&instance, &schedule);
    if !report.is_ok() {
        emit(out, &json!({ "valid": false, "violations": report.violations }))?;
        return Ok(EXIT_USAGE);
    }
    let delay = schedule_delay(&instance, &schedule);
    emit(
        out,
        &json!({
            "valid": true,
            "delay": delay,
            "deadline": instance.deadline(),
            "meets_deadline": le_rel(delay, instance.deadline()),
            "cost": schedule_cost(&instance, &schedule),
        }),
    )?;
    Ok(EXIT_OK)
}

fn cmd_bounds(path: &Path, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(path)?;
    emit(out, &cost_lower_bound(&instance))?;
    Ok(EXIT_OK)
}

fn cmd_oracle(path: &Path, kind: OracleKind, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(path)?;
    let result = match kind {
        OracleKind::Delay => brute_force_min_delay(&instance)?,
        OracleKind::Cost => brute_force_min_cost(&instance)?,
    };
    emit(out, &result)?;
    Ok(EXIT_OK)
}

fn cmd_gen(args: GenArgs, out: &mut dyn Write) -> CmdResult {
    let instance = match args.family {
        GenFamily::Figure1 { sigma, schedule } => {
            let (instance, drawn) = gen_figure1(sigma)?;
            if let Some(path) = schedule {
                write_file(&path, &drawn.to_json())?;
            }
            instance
        }
        GenFamily::Tight {
            k,
            epsilon,
            delta,
            sigma,
            deadline,
        } => gen_tight(k, epsilon, delta, sigma, deadline.policy())?,
        GenFamily::Steiner { n, epsilon } => gen_steiner(n, epsilon)?,
        GenFamily::Random {
            n,
            seed,
            box_size,
            delta,
            sigma,
            deadline,
            explicit,
            extra,
        } => {
            let params = RandomParams {
                n,
                seed,
                box_size,
                delta,
                sigma,
                deadline: deadline.policy(),
            };
            if explicit {
                gen_random_explicit(&params, extra)?
            } else {
                gen_random_euclidean(&params)?
            }
        }
        GenFamily::Spec { file } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let spec: GeneratorParams = serde_json::from_str(&text).context("parsing generator parameters")?;
            spec.generate()?
        }
    };
    match args.out {
        Some(path) => write_file(&path, &instance.to_json())?,
        None => writeln!(out, "{}", instance.to_json()).map_err(anyhow::Error::from)?,
    }
    Ok(EXIT_OK)
}

/// A corpus entry that failed to load is kept so it shows up in the table.
struct Entry {
    name: String,
    instance: anyhow::Result<Instance>,
}

fn load_corpus(dir: &Path) -> anyhow::Result<Vec<Entry>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading corpus {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| Entry {
            name: p.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
            instance: load_corpus_file(&p),
        })
        .collect())
}

fn load_corpus_file(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("family").is_some() {
        let spec: GeneratorParams = serde_json::from_value(value)?;
        Ok(spec.generate()?)
    } else {
        Ok(Instance::from_json(&text)?)
    }
}

/// Random Euclidean instances with 2 to 40 items and slack 1, 1.5 or 3.
fn random_corpus(count: usize, seed: u64) -> Vec<Entry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut params = RandomParams::new(rng.gen_range(2..=40), rng.gen());
            params.sigma = rng.gen_range(0.0..10.0);
            params.deadline = DeadlinePolicy::Slack([1.0, 1.5, 3.0][rng.gen_range(0..3)]);
            Entry {
                name: format!("random-{i:04}"),
                instance: gen_random_euclidean(&params).map_err(Into::into),
            }
        })
        .collect()
}

fn bench_one(name: &str, instance: &Instance, epsilon: f64) -> RunRecord {
    let start = Instant::now();
    let result = approx_schedule(instance, epsilon);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut rec = RunRecord {
        instance: name.to_string(),
        epsilon,
        n: instance.n(),
        deadline: instance.deadline(),
        status: String::new(),
        delay: None,
        travel: None,
        mst: None,
        vehicles: None,
        vehicle_bound: None,
        cost: None,
        cost_lb: None,
        delay_ratio: None,
        length_ratio: None,
        cost_ratio: None,
        guarantees_ok: None,
        wall_ms,
    };
    match result {
        Ok(r) => {
            rec.status = if r.guarantees_ok { "ok" } else { "violated" }.into();
            rec.delay = Some(r.delay);
            rec.travel = Some(r.cost.travel);
            rec.mst = Some(r.bounds.mst);
            rec.vehicles = Some(r.cost.vehicle_count);
            rec.vehicle_bound = Some(r.vehicle_bound);
            rec.cost = Some(r.cost.total);
            rec.cost_lb = Some(r.bounds.cost_lb);
            rec.delay_ratio = Some(r.delay_ratio);
            rec.length_ratio = Some(r.length_ratio);
            rec.cost_ratio = Some(r.cost_ratio);
            rec.guarantees_ok = Some(r.guarantees_ok);
        }
        Err(Error::Infeasible { .. }) => rec.status = "infeasible".into(),
        Err(e) => rec.status = format!("error: {e}"),
    }
    rec
}

fn summarize(records: &[RunRecord]) -> BenchSummary {
    let max = |f: fn(&RunRecord) -> Option<f64>| records.iter().filter_map(f).reduce(f64::max);
    BenchSummary {
        runs: records.len(),
        failures: records.iter().filter(|r| r.guarantees_ok.is_none()).count(),
        violations: records.iter().filter(|r| r.guarantees_ok == Some(false)).count(),
        max_delay_ratio: max(|r| r.delay_ratio),
        max_length_ratio: max(|r| r.length_ratio),
        max_cost_ratio: max(|r| r.cost_ratio),
    }
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_csv(sink: impl Write, records: &[RunRecord], summary: &BenchSummary) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.epsilon.to_string(),
            r.n.to_string(),
            r.deadline.to_string(),
            r.status.clone(),
            fmt_opt(r.delay),
            fmt_opt(r.travel),
            fmt_opt(r.mst),
            fmt_opt(r.vehicles),
            fmt_opt(r.vehicle_bound),
            fmt_opt(r.cost),
            fmt_opt(r.cost_lb),
            fmt_opt(r.delay_ratio),
            fmt_opt(r.length_ratio),
            fmt_opt(r.cost_ratio),
            fmt_opt(r.guarantees_ok),
            r.wall_ms.to_string(),
        ])?;
    }
    let mut row = vec![String::new(); CSV_HEADER.len()];
    row[0] = "summary".into();
    row[4] = format!("{} runs, {} failed, {} violated", summary.runs, summary.failures, summary.violations);
    row[12] = fmt_opt(summary.max_delay_ratio);
    row[13] = fmt_opt(summary.max_length_ratio);
    row[14] = fmt_opt(summary.max_cost_ratio);
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if let Some(&bad) = args.epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidEpsilon(bad).into());
    }
    let mut entries = match &args.corpus {
        Some(dir) => load_corpus(dir)?,
        None => Vec::new(),
    };
    entries.extend(random_corpus(args.random, args.seed));

    let mut records = Vec::new();
    for entry in &entries {
        match &entry.instance {
            Ok(instance) => {
                for &eps in &args.epsilons {
                    records.push(bench_one(&entry.name, instance, eps));
                }
            }
            Err(e) => {
                let _ = writeln!(err, "skipping {}: {e:#}", entry.name);
                for &eps in &args.epsilons {
                    records.push(RunRecord {
                        instance: entry.name.clone(),
                        epsilon: eps,
                        n: 0,
                        deadline: 0.0,
                        status: format!("error: {e:#}"),
                        delay: None,
                        travel: None,
                        mst: None,
                        vehicles: None,
                        vehicle_bound: None,
                        cost: None,
                        cost_lb: None,
                        delay_ratio: None,
                        length_ratio: None,
                        cost_ratio: None,
                        guarantees_ok: None,
                        wall_ms: 0.0,
                    });
                }
            }
        }
    }
    records.sort_by(|a, b| a.instance.cmp(&b.instance).then(a.epsilon.total_cmp(&b.epsilon)));
    let summary = summarize(&records);

    match &args.csv {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(file, &records, &summary)?;
        }
        None => write_csv(&mut *out, &records, &summary)?,
    }
    if let Some(path) = &args.json {
        let body = serde_json::to_string_pretty(&json!({ "records": records, "summary": summary }))
            .map_err(anyhow::Error::from)?;
        write_file(path, &body)?;
    }
    if summary.violations > 0 {
        bail_code(EXIT_GUARANTEE, anyhow!("{} runs violated their guarantees", summary.violations))
    } else {
        Ok(EXIT_OK)
    }
}

fn bail_code(code: i32, error: anyhow::Error) -> CmdResult {
    Err(Failure { code, error })
}
