//! Command-line front end: `gen`, `check`, `circ`, `verify` and `batch`.
//!
//! Exit codes: 0 success, 1 failure (bad input, failed claim, generation
//! error), 2 usage error, 3 time budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectivity::{nontrivial_cut, separating_triangles};
use crate::cycles::{circumference, longest_good_cycle, Budget, CycleError};
use crate::discharging::{verify_bound, DischargeError, VerificationReport, VerifyOptions};
use crate::embedding::{Embedding, EmbeddingError, Triangulation};
use crate::generators::{
    double_wheel, extremal_expand, random_4connected_triangulation, random_essentially_4connected_triangulation,
    GenError,
};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

pub const CSV_HEADER: &str = "n,k,bound,case,all_claims_pass,circ,runtime_ms,seed";
pub const CSV_VERSION: &str = "# tricirc-batch-csv v1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: EmbeddingError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Verify(#[from] DischargeError),
    #[error("manifest {path}: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Cycle(CycleError::Timeout) | CliError::Verify(DischargeError::Cycle(CycleError::Timeout)) => {
                EXIT_TIMEOUT
            }
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tricirc", version, about = "Long cycles in essentially 4-connected planar triangulations")]
pub struct Cli {
    /// Worker threads for batch runs (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Time budget per instance, in seconds.
    #[arg(long, global = true, default_value_t = 60.0)]
    pub budget_secs: f64,
    /// Seed for random families; the first seed of a batch.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a triangulation and write it in rot format.
    Gen(GenArgs),
    /// Report maximality, connectivity and separating triangles.
    Check {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Exact circumference, or the longest good cycle with --good.
    Circ {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        good: bool,
    },
    /// Check every step of the bound's proof on one instance.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        all_longest_good: bool,
        /// Write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Verify a corpus and emit one CSV row per instance.
    Batch(BatchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Doublewheel,
    Random4c,
    Randome4c,
    Extremal,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Vertex count; for `extremal` without --base, the base's vertex count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Base triangulation for `extremal`.
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Load the corpus from this directory (manifest.json plus rot files).
    #[arg(long, conflicts_with = "family")]
    pub corpus: Option<PathBuf>,
    /// Generate the corpus from this family instead.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long, default_value_t = 11)]
    pub n_min: usize,
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    /// Seeds per vertex count for random families.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Persist the generated corpus to this directory.
    #[arg(long)]
    pub save: Option<PathBuf>,
    #[arg(long)]
    pub all_longest_good: bool,
    /// CSV destination (default: standard output).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// One corpus instance as recorded in `manifest.json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub family: Family,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Vertex count of the base for `extremal`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_n: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub instances: Vec<ManifestEntry>,
}

pub fn generate(family: Family, n: usize, seed: u64) -> Result<Triangulation, GenError> {
    match family {
        Family::Doublewheel => double_wheel(n.saturating_sub(2)),
        Family::Random4c => random_4connected_triangulation(n, seed),
        Family::Randome4c => random_essentially_4connected_triangulation(n, seed),
        Family::Extremal => extremal_expand(&double_wheel(n.saturating_sub(2))?),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn load_embedding(path: &Path) -> Result<Embedding, CliError> {
    Embedding::parse_rot(&read(path)?).map_err(|source| CliError::Input { path: path.into(), source })
}

pub fn load_triangulation(path: &Path) -> Result<Triangulation, CliError> {
    Triangulation::parse_rot(&read(path)?).map_err(|source| CliError::Input { path: path.into(), source })
}

pub fn load_manifest(dir: &Path) -> Result<Manifest, CliError> {
    let path = dir.join("manifest.json");
    serde_json::from_str(&read(&path)?).map_err(|source| CliError::Manifest { path, source })
}

pub fn save_corpus(dir: &Path, items: &[(ManifestEntry, Triangulation)]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
    for (entry, t) in items {
        write(&dir.join(&entry.file), &t.to_rot_string())?;
    }
    let manifest = Manifest { instances: items.iter().map(|(e, _)| e.clone()).collect() };
    write(&dir.join("manifest.json"), &serde_json::to_string_pretty(&manifest).expect("manifest serializes"))
}

/// Parses `args` and runs the command, writing human output to `out`.
/// Returns the process exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if cli.budget_secs.is_nan() || cli.budget_secs <= 0.0 {
        return Err(CliError::Usage("--budget-secs must be positive".into()));
    }
    let budget = || Budget::seconds(cli.budget_secs);
    let io = |source| CliError::Io { path: "<stdout>".into(), source };
    match &cli.command {
        Command::Gen(args) => {
            let t = match (args.family, &args.base, args.n) {
                (Family::Extremal, Some(base), _) => extremal_expand(&load_triangulation(base)?)?,
                (_, Some(_), _) => return Err(CliError::Usage("--base only applies to --family extremal".into())),
                (family, None, Some(n)) => generate(family, n, cli.seed)?,
                (_, None, None) => return Err(CliError::Usage("--n is required".into())),
            };
            write(&args.output, &t.to_rot_string())?;
            writeln!(out, "wrote {} ({} vertices)", args.output.display(), t.n()).map_err(io)?;
            Ok(0)
        }
        Command::Check { input } => {
            check(&load_embedding(input)?, out).map_err(io)?;
            Ok(0)
        }
        Command::Circ { input, good } => {
            let g = load_embedding(input)?;
            if *good {
                let c = longest_good_cycle(&g, &budget())?;
                writeln!(out, "longest good cycle: {}", c.len()).map_err(io)?;
                writeln!(out, "cycle: {}", join(c.verts())).map_err(io)?;
                writeln!(out, "outside: {}", join(c.outside())).map_err(io)?;
            } else {
                let (len, c) = circumference(&g, &budget())?;
                writeln!(out, "circumference: {len}").map_err(io)?;
                writeln!(out, "cycle: {}", join(&c)).map_err(io)?;
            }
            Ok(0)
        }
        Command::Verify { input, all_longest_good, json } => {
            let g = load_triangulation(input)?;
            let opts = VerifyOptions { budget: budget(), all_longest_good: *all_longest_good };
            let rep = verify_bound(&g, &opts)?;
            if let Some(path) = json {
                write(path, &serde_json::to_string_pretty(&rep).expect("report serializes"))?;
            }
            summarize(&rep, out).map_err(io)?;
            Ok(if rep.passed() { 0 } else { EXIT_FAILURE })
        }
        Command::Batch(args) => batch(cli, args, out),
    }
}

fn join(vs: &[usize]) -> String {
    vs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn check(g: &Embedding, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "n={} m={} faces={}", g.n(), g.m(), g.faces().len())?;
    let Ok(t) = Triangulation::new(g.clone()) else {
        writeln!(out, "summary: not maximal planar")?;
        return Ok(());
    };
    let conn = if t.is_4_connected() {
        "4-connected"
    } else if t.is_3_connected() {
        "3-connected"
    } else {
        "not 3-connected"
    };
    let tri = separating_triangles(&t);
    let e4c = t.is_essentially_4_connected();
    writeln!(out, "maximal planar: yes")?;
    writeln!(out, "connectivity: {conn}")?;
    writeln!(out, "essentially 4-connected: {}", if e4c { "yes" } else { "no" })?;
    writeln!(out, "separating triangles: {}", tri.len())?;
    for c in &tri {
        writeln!(out, "  {:?} {}", c.vertices, if c.trivial { "trivial" } else { "non-trivial" })?;
    }
    let mut parts = Vec::new();
    if t.is_4_connected() {
        parts.push("4-connected".to_string());
    }
    parts.push(if e4c { "essentially 4-connected".into() } else { "NOT essentially 4-connected".into() });
    parts.push(format!("{} separating triangles", tri.len()));
    writeln!(out, "summary: {}", parts.join(", "))?;
    if let Some(cut) = nontrivial_cut(&t) {
        writeln!(out, "witness cut: {:?} components {:?}", cut.vertices, cut.components)?;
    }
    Ok(())
}

fn summarize(rep: &VerificationReport, out: &mut dyn Write) -> std::io::Result<()> {
    let case = match (rep.case, rep.side_i) {
        (Some(c), Some(i)) => format!("{c} (side {i})"),
        (Some(c), None) => c.to_string(),
        _ => "none (n <= 10)".into(),
    };
    writeln!(out, "n = {}, k = {}, bound = {}, circumference = {}", rep.n, rep.k, rep.bound, rep.circ)?;
    writeln!(out, "case: {case}")?;
    writeln!(out, "empty faces: {}, non-empty faces: {}", rep.empty_faces, rep.nonempty_faces)?;
    if rep.cycles_checked > 1 {
        writeln!(out, "longest good cycles checked: {}, failing: {}", rep.cycles_checked, rep.cycles_failing)?;
    }
    let name = |s| serde_json::to_value(s).unwrap().as_str().unwrap().to_string();
    for (claim, status) in &rep.claims {
        writeln!(out, "  {claim}: {}", name(status))?;
    }
    for (step, status) in &rep.proof_steps {
        writeln!(out, "  proof step {step}: {}", name(status))?;
    }
    for (claim, ws) in &rep.witnesses {
        for w in ws {
            writeln!(out, "  witness {claim}: {w}")?;
        }
    }
    if rep.passed() {
        writeln!(out, "verdict: pass")
    } else {
        writeln!(out, "verdict: potential-counterexample-or-bug ({})", rep.failures().join(", "))
    }
}

/// Outcome of one batch instance.
#[derive(Clone, Debug)]
pub enum RowStatus {
    Done(Box<VerificationReport>),
    Timeout,
    Error(String),
}

#[derive(Clone, Debug)]
pub struct BatchRow {
    pub entry: ManifestEntry,
    pub status: RowStatus,
    pub runtime_ms: u128,
}

impl BatchRow {
    pub fn to_csv(&self) -> String {
        let seed = self.entry.seed.map(|s| s.to_string()).unwrap_or_default();
        match &self.status {
            RowStatus::Done(r) => {
                let case = r.case.map(|c| c.to_string()).unwrap_or_else(|| "ham".into());
                format!("{},{},{},{},{},{},{},{}", r.n, r.k, r.bound, case, r.passed(), r.circ, self.runtime_ms, seed)
            }
            RowStatus::Timeout => format!("{},,,,timeout,,{},{}", self.entry.n, self.runtime_ms, seed),
            RowStatus::Error(_) => format!("{},,,,error,,{},{}", self.entry.n, self.runtime_ms, seed),
        }
    }
}

/// Verifies each instance in parallel; rows come back in input order.
pub fn run_batch(items: &[(ManifestEntry, Triangulation)], budget_secs: f64, all_longest_good: bool) -> Vec<BatchRow> {
    items
        .par_iter()
        .map(|(entry, t)| {
            let start = Instant::now();
            let opts = VerifyOptions { budget: Budget::seconds(budget_secs), all_longest_good };
            let status = match verify_bound(t, &opts) {
                Ok(r) => RowStatus::Done(Box::new(r)),
                Err(DischargeError::Cycle(CycleError::Timeout)) => RowStatus::Timeout,
                Err(e) => RowStatus::Error(e.to_string()),
            };
            BatchRow { entry: entry.clone(), status, runtime_ms: start.elapsed().as_millis() }
        })
        .collect()
}

/// Instances of a family for `n_min..=n_max` and `count` seeds each.
pub fn generate_corpus(
    family: Family,
    n_min: usize,
    n_max: usize,
    first_seed: u64,
    count: u64,
) -> Result<Vec<(ManifestEntry, Triangulation)>, GenError> {
    let random = matches!(family, Family::Random4c | Family::Randome4c);
    let mut jobs = Vec::new();
    for n in n_min..=n_max {
        for s in 0..if random { count } else { 1 } {
            jobs.push((n, first_seed + s));
        }
    }
    jobs.par_iter()
        .map(|&(n, seed)| {
            let t = generate(family, n, seed)?;
            let name = format!("{family:?}").to_lowercase();
            let id = if random { format!("{name}-n{n}-s{seed}") } else { format!("{name}-n{n}") };
            let entry = ManifestEntry {
                file: format!("{id}.rot"),
                id,
                family,
                n: t.n(),
                seed: random.then_some(seed),
                base_n: (family == Family::Extremal).then_some(n),
            };
            Ok((entry, t))
        })
        .collect()
}

fn batch(cli: &Cli, args: &BatchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Failed(e.to_string()))?;
    let items = match (&args.corpus, args.family) {
        (Some(dir), _) => {
            let manifest = load_manifest(dir)?;
            manifest
                .instances
                .into_iter()
                .map(|e| Ok((load_triangulation(&dir.join(&e.file))?, e)))
                .map(|r: Result<_, CliError>| r.map(|(t, e)| (e, t)))
                .collect::<Result<Vec<_>, _>>()?
        }
        (None, Some(family)) => {
            pool.install(|| generate_corpus(family, args.n_min, args.n_max, cli.seed, args.count))?
        }
        (None, None) => return Err(CliError::Usage("batch needs --corpus or --family".into())),
    };
    if let Some(dir) = &args.save {
        save_corpus(dir, &items)?;
    }
    let rows = pool.install(|| run_batch(&items, cli.budget_secs, args.all_longest_good));
    let mut csv = format!("{CSV_VERSION}\n{CSV_HEADER}\n");
    for row in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    match &args.output {
        Some(path) => write(path, &csv)?,
        None => out.write_all(csv.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
    }
    for row in &rows {
        match &row.status {
            RowStatus::Error(e) => eprintln!("{}: error: {e}", row.entry.id),
            RowStatus::Done(r) if !r.passed() => eprintln!("{}: failed {}", row.entry.id, r.failures().join(", ")),
            _ => {}
        }
    }
    let failed = rows.iter().any(|r| match &r.status {
        RowStatus::Done(rep) => !rep.passed(),
        RowStatus::Error(_) => true,
        RowStatus::Timeout => false,
    });
    let timed_out = rows.iter().any(|r| matches!(r.status, RowStatus::Timeout));
    Ok(if failed {
        EXIT_FAILURE
    } else if timed_out {
        EXIT_TIMEOUT
    } else {
        0
    })
}
