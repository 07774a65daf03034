//! Command line for the retrieval skill: build indexes, produce and
//! score run files, compare methods, run the ablation table, route
//! single queries, and generate the synthetic benchmark.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use exprag_core::corpus::{load_corpus, load_qrels, load_queries};
use exprag_core::eval::{
    compare_methods, evaluate_run, load_run, produce_run, run_ablation, save_run,
};
use exprag_core::pool::store::{load_index, save_index};
use exprag_core::pool::vector::load_embeddings;
use exprag_core::pool::PoolConfig;
use exprag_core::synth::{generate_benchmark, BenchmarkSpec};
use exprag_core::{
    Config, Dataset, ExperienceMemory, QueryRecord, RetrieverPool, RoutingPolicy, RunMethod,
    Skill, SkillRequest,
};

#[derive(Parser)]
#[command(name = "exprag", version, about = "Experience-routed retrieval over a strategy pool")]
struct Cli {
    /// Configuration file; EXPRAG_CONFIG is consulted when absent.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index directory from a corpus file.
    Index(IndexArgs),
    /// Execute one method over queries and write a TREC-style run file.
    Run(RunArgs),
    /// Score a run file against relevance judgments.
    Eval(EvalArgs),
    /// Score several run files against one qrels file, side by side.
    Compare(CompareArgs),
    /// Evaluate rule routing against the fixed strategies.
    Ablation(AblationArgs),
    /// Route a single query and print the decision with its evidence.
    Route(RouteArgs),
    /// Generate the deterministic synthetic benchmark.
    Synth(SynthArgs),
}

#[derive(Args)]
struct IndexArgs {
    /// Corpus in JSON-Lines form.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    /// Directory to write the index into.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Precomputed document embeddings; omitted, the built-in trigram
    /// embedder is used.
    #[arg(long, value_name = "FILE")]
    embeddings: Option<PathBuf>,
    /// Precomputed query embeddings stored with the index.
    #[arg(long, value_name = "FILE")]
    query_embeddings: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Index directory produced by `exprag index`.
    #[arg(long, value_name = "DIR")]
    index: PathBuf,
    /// Queries in JSON-Lines form.
    #[arg(long, value_name = "FILE")]
    queries: PathBuf,
    /// `fixed:<strategy>` or `skill:<policy>`.
    #[arg(long, value_name = "METHOD")]
    method: RunMethod,
    /// Result depth per query.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Run file to write.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Experience log consulted by the learned policies.
    #[arg(long, value_name = "FILE")]
    memory: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Run file produced by `exprag run`.
    #[arg(long, value_name = "FILE")]
    run: PathBuf,
    /// Relevance judgments in TREC TSV form.
    #[arg(long, value_name = "FILE")]
    qrels: PathBuf,
    /// Evaluation cutoff.
    #[arg(long, default_value_t = 10)]
    k: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// Two or more run files.
    #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
    runs: Vec<PathBuf>,
    /// Relevance judgments shared by every run.
    #[arg(long, value_name = "FILE")]
    qrels: PathBuf,
    /// Evaluation cutoff.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Emit CSV instead of the aligned text table.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct AblationArgs {
    /// Index directory, repeatable once per dataset.
    #[arg(long, value_name = "DIR", required = true)]
    index: Vec<PathBuf>,
    /// Query file per dataset, in --index order.
    #[arg(long, value_name = "FILE", required = true)]
    queries: Vec<PathBuf>,
    /// Qrels file per dataset, in --index order.
    #[arg(long, value_name = "FILE", required = true)]
    qrels: Vec<PathBuf>,
    /// Dataset label per dataset; defaults to the index directory name.
    #[arg(long, value_name = "NAME")]
    tag: Vec<String>,
    /// Experience log to read, and to extend with --record.
    #[arg(long, value_name = "FILE")]
    memory: Option<PathBuf>,
    /// Append one experience record per judged query.
    #[arg(long)]
    record: bool,
    /// Evaluation cutoff.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Emit CSV instead of the aligned text table.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct RouteArgs {
    /// Query text.
    #[arg(long, value_name = "TEXT")]
    query: String,
    /// Index directory to retrieve from.
    #[arg(long, value_name = "DIR")]
    index: PathBuf,
    /// Task type hint (direct, multi_hop, scientific); inferred from
    /// the query text when absent.
    #[arg(long, value_name = "TYPE")]
    task_type: Option<String>,
    /// Routing policy.
    #[arg(long, default_value = "rule")]
    policy: RoutingPolicy,
    /// Experience log consulted by the learned policies.
    #[arg(long, value_name = "FILE")]
    memory: Option<PathBuf>,
    /// Result depth.
    #[arg(long, default_value_t = 10)]
    k: usize,
}

#[derive(Args)]
struct SynthArgs {
    /// Generation seed; the same seed reproduces every byte.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Directory to write the benchmark tree into.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Queries generated per task split.
    #[arg(long, value_name = "N")]
    queries_per_task: Option<usize>,
    /// Corpus size per task split.
    #[arg(long, value_name = "N")]
    docs_per_task: Option<usize>,
}

enum CliError {
    Usage(String),
    Data(exprag_core::Error),
}

impl From<exprag_core::Error> for CliError {
    fn from(err: exprag_core::Error) -> CliError {
        CliError::Data(err)
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> CliResult {
    let cfg = Config::resolve(cli.config.as_deref())?;
    match cli.command {
        Command::Index(args) => cmd_index(args, &cfg),
        Command::Run(args) => cmd_run(args, &cfg),
        Command::Eval(args) => cmd_eval(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Ablation(args) => cmd_ablation(args, &cfg),
        Command::Route(args) => cmd_route(args, &cfg),
        Command::Synth(args) => cmd_synth(args),
    }
}

fn require_k(k: usize) -> Result<(), CliError> {
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".to_string()));
    }
    Ok(())
}

fn open_memory(path: Option<&Path>) -> Result<ExperienceMemory, CliError> {
    match path {
        Some(path) => Ok(ExperienceMemory::open(path)?),
        None => Ok(ExperienceMemory::new()),
    }
}

fn report_qrels_warnings(warnings: &[String]) {
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
}

fn cmd_index(args: IndexArgs, cfg: &Config) -> CliResult {
    let docs = load_corpus(&args.corpus)?;
    let doc_count = docs.len();
    let mut pool = match &args.embeddings {
        Some(path) => {
            let external = load_embeddings(path)?;
            RetrieverPool::build_with_embeddings(docs, PoolConfig::from_config(cfg), &external)?
        }
        None => RetrieverPool::build(docs, PoolConfig::from_config(cfg))?,
    };
    if let Some(path) = &args.query_embeddings {
        pool.set_query_vectors(load_embeddings(path)?.vectors);
    }
    save_index(&pool, &args.out)?;
    println!(
        "indexed {doc_count} documents into {} (embedder: {})",
        args.out.display(),
        if args.embeddings.is_some() { "external" } else { "trigram" },
    );
    Ok(())
}

fn cmd_run(args: RunArgs, cfg: &Config) -> CliResult {
    require_k(args.k)?;
    let pool = load_index(&args.index)?;
    let queries = load_queries(&args.queries)?;
    let memory = open_memory(args.memory.as_deref())?;
    let rows = produce_run(args.method, &pool, &queries, cfg, &memory, args.k)?;
    save_run(&args.out, &rows)?;
    println!(
        "wrote {} rows for {} queries to {}",
        rows.len(),
        queries.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> CliResult {
    require_k(args.k)?;
    let rows = load_run(&args.run)?;
    let (qrels, warnings) = load_qrels(&args.qrels)?;
    report_qrels_warnings(&warnings);
    let result = evaluate_run(&rows, &qrels, args.k)?;
    print!("method:    {}\n{}", result.method, result.overall.text());
    if result.skipped > 0 {
        println!("skipped:   {} queries without judgments", result.skipped);
    }
    println!();
    print!("{}", result.overall.csv());
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> CliResult {
    require_k(args.k)?;
    let (qrels, warnings) = load_qrels(&args.qrels)?;
    report_qrels_warnings(&warnings);
    let mut results = Vec::with_capacity(args.runs.len());
    for path in &args.runs {
        let rows = load_run(path)?;
        results.push(evaluate_run(&rows, &qrels, args.k)?);
    }
    let table = compare_methods(&results)?;
    if args.csv {
        print!("{}", table.render_csv());
    } else {
        print!("{}", table.render_text());
    }
    Ok(())
}

fn cmd_ablation(args: AblationArgs, cfg: &Config) -> CliResult {
    require_k(args.k)?;
    if args.queries.len() != args.index.len() || args.qrels.len() != args.index.len() {
        return Err(CliError::Usage(format!(
            "--index, --queries and --qrels must repeat together ({} / {} / {} given)",
            args.index.len(),
            args.queries.len(),
            args.qrels.len()
        )));
    }
    if !args.tag.is_empty() && args.tag.len() != args.index.len() {
        return Err(CliError::Usage(format!(
            "--tag must appear once per --index ({} tags for {} indexes)",
            args.tag.len(),
            args.index.len()
        )));
    }

    let mut datasets = Vec::with_capacity(args.index.len());
    for (i, index_dir) in args.index.iter().enumerate() {
        let pool = load_index(index_dir)?;
        let queries = load_queries(&args.queries[i])?;
        let (qrels, warnings) = load_qrels(&args.qrels[i])?;
        report_qrels_warnings(&warnings);
        let name = args.tag.get(i).cloned().unwrap_or_else(|| {
            index_dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("ds{i}"))
        });
        datasets.push(Dataset {
            name,
            pool,
            queries,
            qrels,
        });
    }

    let mut memory = open_memory(args.memory.as_deref())?;
    let outcome = run_ablation(&datasets, cfg, &mut memory, args.record, args.k)?;
    if args.csv {
        print!("{}", outcome.table.render_csv());
    } else {
        print!("{}", outcome.table.render_text());
    }
    if args.record {
        println!("recorded {} experience records", outcome.recorded);
    }
    Ok(())
}

fn cmd_route(args: RouteArgs, cfg: &Config) -> CliResult {
    require_k(args.k)?;
    let pool = load_index(&args.index)?;
    let memory = open_memory(args.memory.as_deref())?;
    let skill = Skill::with_memory(pool, cfg, memory)?;

    let mut query = QueryRecord {
        query_id: "cli".to_string(),
        text: args.query,
        ..QueryRecord::default()
    };
    if let Some(task) = args.task_type {
        query.metadata.insert("task_type".to_string(), task);
    }
    let request = SkillRequest::from_query(query);
    let package = skill.invoke(&request, args.policy, args.k)?;

    let scene = &package.scene;
    println!("query:      {}", request.query.text);
    println!(
        "scene:      task={} style={} structure={} complexity={:.3} context={}",
        scene.task_type,
        scene.query_style,
        scene.document_structure,
        scene.question_complexity,
        scene.context_length
    );
    println!(
        "decision:   {} (policy {}, confidence {:.2})",
        package.decision.strategy, package.decision.policy, package.decision.confidence
    );
    println!("reason:     {}", package.decision.explanation);
    if package.evidence.is_empty() {
        println!("evidence:   none");
    } else {
        println!("evidence:");
        for item in &package.evidence {
            let title = if item.title.is_empty() {
                String::new()
            } else {
                format!("  [{}]", item.title)
            };
            println!("  {:>2}. {:.4}  {}{title}", item.rank, item.score, item.doc_id);
            if !item.snippet.is_empty() {
                println!("      {}", item.snippet);
            }
        }
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> CliResult {
    let mut spec = BenchmarkSpec::with_seed(args.seed);
    if let Some(n) = args.queries_per_task {
        spec.queries_per_task = n;
    }
    if let Some(n) = args.docs_per_task {
        spec.docs_per_task = n;
    }
    let generated = generate_benchmark(&spec, &args.out)?;
    println!(
        "generated {} task splits under {}",
        generated.task_dirs.len(),
        generated.root.display()
    );
    let manifest = std::fs::read_to_string(&generated.manifest).map_err(|source| {
        exprag_core::Error::Io {
            path: generated.manifest.clone(),
            source,
        }
    })?;
    print!("{manifest}");
    Ok(())
}
