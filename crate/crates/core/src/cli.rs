//! Command-line front end: `gen`, `select`, `eval` and `report`.
//!
//! Exit codes: 0 on success, 2 for usage or configuration errors, 3 for
//! data errors (unreadable, malformed or inconsistent input files).
//! Diagnostics go to stderr; results go to files and stdout.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::datagen::{gen_benchmark, BenchmarkSpec};
use crate::dataset::EmbeddingSet;
use crate::error::{Error, Result};
use crate::eval::{run_experiment, DEFAULT_RUNS};
use crate::io::{
    read_embeddings, read_report, read_scores, write_atomic, write_embeddings, write_report,
    Manifest, ReportDoc, SelectionDoc,
};
use crate::objectives::ObjectiveWeights;
use crate::selection::{distill, Method, ScoreVector, SelectionConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;

/// Environment variable capping worker threads; 0 or unset means all cores.
pub const THREADS_ENV: &str = "DISTILL_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "distill",
    version,
    about = "Select small representative subsets of labeled embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic train/test benchmark.
    Gen(GenArgs),
    /// Select items from an embedding file.
    Select(SelectArgs),
    /// Run the repeated select-and-evaluate protocol.
    Eval(EvalArgs),
    /// Re-emit the CSV table of a report and print its aggregates.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// TOML benchmark spec; individual flags override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    classes: Option<u32>,
    #[arg(long)]
    per_class: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    modes_per_class: Option<usize>,
    #[arg(long)]
    class_separation: Option<f64>,
    #[arg(long)]
    mode_spread: Option<f64>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    test_per_class: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    test_seed: Option<u64>,
    /// Training pool output.
    #[arg(long)]
    out: PathBuf,
    /// Test split output [default: <out stem>.test.emb].
    #[arg(long)]
    test_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Hyper {
    #[arg(long)]
    method: String,
    #[arg(long)]
    vpc: usize,
    /// Per-item score file (required by top_score and knapsack).
    #[arg(long)]
    scores: Option<PathBuf>,
    #[arg(long)]
    lambda_div: Option<f64>,
    #[arg(long)]
    lambda_rep: Option<f64>,
    #[arg(long)]
    pca_dims: Option<usize>,
    #[arg(long)]
    birch_threshold_scale: Option<f64>,
    #[arg(long)]
    birch_branching: Option<usize>,
    #[arg(long)]
    local_search_max_sweeps: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Record wall-clock times (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct SelectArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    hyper: Hyper,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Training pool that selection draws from.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[command(flatten)]
    hyper: Hyper,
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also write the CSV table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    csv: PathBuf,
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn cli_main<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = thread_pool().and_then(|pool| pool.install(|| dispatch(cli.command)));
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error: configuration problems map to 2, the rest to 3.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_DATA,
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<usize>().map_err(|_| {
            Error::config(format!("{THREADS_ENV}={v:?} is not a non-negative integer"))
        })?,
        _ => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen(a) => cmd_gen(a),
        Command::Select(a) => cmd_select(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Default test path: `bench.emb` becomes `bench.test.emb`.
pub fn default_test_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_os_string())
        .unwrap_or_default();
    let mut name = stem;
    name.push(".test");
    if let Some(ext) = out.extension() {
        name.push(".");
        name.push(ext);
    }
    out.with_file_name(name)
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let mut spec = match &a.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
            toml::from_str::<BenchmarkSpec>(&text)
                .map_err(|e| Error::config(format!("{}: {e}", path.display())))?
        }
        None => BenchmarkSpec::default(),
    };
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = a.$f { spec.$f = v; } )* };
    }
    set!(
        classes,
        per_class,
        dim,
        modes_per_class,
        class_separation,
        mode_spread,
        noise_sigma,
        test_per_class,
        seed
    );
    if a.test_seed.is_some() {
        spec.test_seed = a.test_seed;
    }
    spec.validate().map_err(|e| Error::config(e.to_string()))?;
    let test_out = a.test_out.unwrap_or_else(|| default_test_path(&a.out));
    if test_out == a.out {
        return Err(Error::config("--test-out must differ from --out"));
    }

    let (train, test) = gen_benchmark::<f32>(&spec)?;
    let names: Vec<String> = (0..spec.classes).map(|c| format!("class_{c:03}")).collect();
    for (set, path, split) in [(&train, &a.out, "train"), (&test, &test_out, "test")] {
        write_embeddings(set, path)?;
        let mut m = Manifest::new(
            names.clone(),
            format!("synthetic gaussian-mixture benchmark, {split} split"),
        );
        m.seed_lineage.insert("seed".into(), spec.seed);
        m.seed_lineage
            .insert("test_seed".into(), spec.test_seed.unwrap_or(spec.seed));
        m.write(&Manifest::path_for(path))?;
    }
    Ok(())
}

impl Hyper {
    /// Builds and validates the configuration without touching any file.
    fn config(&self) -> Result<(SelectionConfig, Method)> {
        let method: Method = self.method.parse()?;
        let mut cfg = SelectionConfig::new(method, self.vpc, self.seed);
        if self.lambda_div.is_some() || self.lambda_rep.is_some() {
            cfg.weights = ObjectiveWeights::new(
                self.lambda_div.unwrap_or(cfg.weights.lambda_d),
                self.lambda_rep.unwrap_or(cfg.weights.lambda_r),
            )?;
        }
        if let Some(v) = self.pca_dims {
            cfg.pca_dims = v;
        }
        if let Some(v) = self.birch_threshold_scale {
            cfg.birch_threshold_scale = v;
        }
        if let Some(v) = self.birch_branching {
            cfg.birch_branching = v;
        }
        if let Some(v) = self.local_search_max_sweeps {
            cfg.local_search_max_sweeps = v;
        }
        cfg.validate()?;
        if method.needs_scores() && self.scores.is_none() {
            return Err(Error::config(format!("method {method} requires --scores")));
        }
        Ok((cfg, method))
    }
}

fn load(path: &Path) -> Result<EmbeddingSet<f64>> {
    let set = read_embeddings(path)?.cast::<f64>();
    let manifest = Manifest::path_for(path);
    if manifest.exists() {
        Manifest::read(&manifest)?
            .check_classes(set.num_classes())
            .map_err(|e| Error::Parse {
                path: manifest,
                message: e.to_string(),
            })?;
    }
    Ok(set)
}

fn load_scores(path: Option<&Path>, n: usize) -> Result<Option<ScoreVector>> {
    path.map(|p| read_scores(p, n)).transpose()
}

/// Data-dependent failures from the library come back as `Config` only when
/// flags are at fault; anything raised while processing loaded data is a
/// data error.
fn as_data_error(e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Eval(m),
        other => other,
    }
}

fn cmd_select(a: SelectArgs) -> Result<()> {
    let (cfg, _) = a.hyper.config()?;
    let data = load(&a.data)?;
    let scores = load_scores(a.hyper.scores.as_deref(), data.len())?;
    let res = distill(&data, &cfg, scores.as_ref()).map_err(as_data_error)?;
    SelectionDoc::from_result(&cfg, &res, a.hyper.timings).write(&a.out)
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let (cfg, _) = a.hyper.config()?;
    if a.runs < 1 {
        return Err(Error::config("--runs must be >= 1"));
    }
    let pool = load(&a.data)?;
    let test = load(&a.test)?;
    let scores = load_scores(a.hyper.scores.as_deref(), pool.len())?;
    let report =
        run_experiment(&pool, &test, &cfg, a.runs, scores.as_ref()).map_err(as_data_error)?;
    let doc = ReportDoc::from_eval(&report, a.hyper.timings);
    write_report(&doc, &a.out)?;
    if let Some(csv) = &a.csv {
        write_atomic(csv, doc.to_csv().as_bytes())?;
    }
    print_aggregates(&doc);
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let doc = read_report(&a.input)?;
    write_atomic(&a.csv, doc.to_csv().as_bytes())?;
    print_aggregates(&doc);
    Ok(())
}

fn print_aggregates(doc: &ReportDoc) {
    for (name, _) in doc.aggregates() {
        println!("{name}\t{}", doc.aggregate[name]);
    }
}
