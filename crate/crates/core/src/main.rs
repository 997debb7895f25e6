//! Command-line entry point: build graphs, produce recommendations and
//! predictions, and run the evaluation protocol.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rankwalk::data::{self, Dataset};
use rankwalk::eval::{self, EvalReport, Protocol, ProtocolMode};
use rankwalk::graph::{build_graph, transition_matrix, GraphConfig, NodeId};
use rankwalk::ranker::{solve_rank, PersonalizationVector, RankError, SolverConfig};
use rankwalk::recommend::{
    group_recommend, predict_item_based_from_rank, predict_user_based_from_rank,
    recommend_for_user, Prediction, RankedList,
};
use rankwalk::synth;

#[derive(Parser, Debug)]
#[command(name = "rankwalk", version, about = "Random-walk hybrid collaborative filtering")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for per-user parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Tsv)]
    format: OutputFormat,

    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DatasetKind {
    Movielens,
    Epinions,
    /// Canonical TSV dump produced by this tool.
    Dump,
    /// Built-in synthetic benchmark dataset.
    Synthetic,
}

#[derive(Args, Debug, Clone, Serialize)]
struct DatasetArgs {
    #[arg(long, value_enum, default_value_t = DatasetKind::Movielens)]
    dataset: DatasetKind,

    /// MovieLens layout directory (u.data, u.item, u.user).
    #[arg(long)]
    data_dir: Option<PathBuf>,

    /// Epinions ratings file (user item rating per line).
    #[arg(long)]
    ratings_file: Option<PathBuf>,

    /// Epinions trust file (truster trustee per line).
    #[arg(long)]
    trust_file: Option<PathBuf>,

    /// Canonical dataset dump file.
    #[arg(long)]
    dump_file: Option<PathBuf>,

    /// Subsample to at most this many users (with --subsample-items).
    #[arg(long)]
    subsample_users: Option<usize>,

    #[arg(long)]
    subsample_items: Option<usize>,

    #[arg(long, default_value_t = 17)]
    seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GraphArgs {
    /// key=value config file (enable_tags, enable_profiles, enable_social).
    #[arg(long)]
    graph_config: Option<PathBuf>,

    #[arg(long)]
    enable_tags: bool,

    #[arg(long)]
    enable_profiles: bool,

    #[arg(long)]
    enable_social: bool,

    /// Shorthand for enabling every edge family.
    #[arg(long)]
    hybrid: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SolverArgs {
    #[arg(long, default_value_t = 0.85)]
    beta: f64,

    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,

    #[arg(long, default_value_t = 200)]
    max_iter: usize,
}

impl SolverArgs {
    fn to_config(&self) -> SolverConfig {
        SolverConfig {
            beta: self.beta,
            epsilon: self.epsilon,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the recommendation graph and dump its edges as TSV.
    Build {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[command(flatten)]
        graph: GraphArgs,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Top-k recommendations for a user or a group.
    Recommend {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, conflicts_with = "group")]
        user: Option<u32>,
        /// Comma-separated user ids for a group recommendation.
        #[arg(long, value_delimiter = ',')]
        group: Vec<u32>,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Debug: write the full rank vector as TSV (node_kind node_id score).
        #[arg(long)]
        dump_ranks: Option<PathBuf>,
    },
    /// Rating prediction for one (user, item) pair.
    Predict {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        user: u32,
        #[arg(long)]
        item: u32,
        #[arg(long, value_enum, default_value_t = PredictKind::UserBased)]
        method: PredictKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the recall/percentile evaluation protocol.
    Evaluate {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma-separated method names.
        #[arg(long, value_delimiter = ',', default_value = "userrank-cf")]
        methods: Vec<String>,
        #[arg(long, value_enum, default_value_t = EvalMode::Warm)]
        mode: EvalMode,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0.1)]
        cold_fraction: f64,
        /// Number of seeded cold splits to average over.
        #[arg(long, default_value_t = 5)]
        cold_seeds: usize,
        #[arg(long, value_delimiter = ',', default_value = "10,20,50,100,200,500")]
        k_grid: Vec<usize>,
        /// Recall list length (default 900 MovieLens/synthetic, 500 Epinions).
        #[arg(long)]
        list_length: Option<usize>,
        /// Report output path; a TSV table is written next to it.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PredictKind {
    UserBased,
    ItemBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum EvalMode {
    Warm,
    Cold,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify_error(&err))
        }
    }
}

fn classify_error(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(RankError::NotConverged { .. }) = cause.downcast_ref::<RankError>() {
            return 3;
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("building thread pool")?;
    }
    let global = cli_global(&cli);
    match cli.command {
        Command::Build { dataset, graph, out } => cmd_build(&global, dataset, graph, out),
        Command::Recommend {
            dataset,
            graph,
            solver,
            user,
            group,
            k,
            out,
            dump_ranks,
        } => cmd_recommend(&global, dataset, graph, solver, user, group, k, out, dump_ranks),
        Command::Predict {
            dataset,
            graph,
            solver,
            user,
            item,
            method,
            out,
        } => cmd_predict(&global, dataset, graph, solver, user, item, method, out),
        Command::Evaluate {
            dataset,
            solver,
            methods,
            mode,
            folds,
            cold_fraction,
            cold_seeds,
            k_grid,
            list_length,
            out,
        } => cmd_evaluate(
            &global,
            dataset,
            solver,
            methods,
            mode,
            folds,
            cold_fraction,
            cold_seeds,
            k_grid,
            list_length,
            out,
        ),
    }
}

struct Global {
    format: OutputFormat,
    verbose: bool,
}

fn cli_global(cli: &Cli) -> Global {
    Global {
        format: cli.format,
        verbose: cli.verbose,
    }
}

fn load_dataset(args: &DatasetArgs, verbose: bool) -> Result<Dataset> {
    let mut dataset = match args.dataset {
        DatasetKind::Movielens => {
            let dir = args
                .data_dir
                .as_ref()
                .context("--data-dir is required for --dataset movielens")?;
            data::load_movielens(dir)?
        }
        DatasetKind::Epinions => {
            let ratings = args
                .ratings_file
                .as_ref()
                .context("--ratings-file is required for --dataset epinions")?;
            let trust = args
                .trust_file
                .as_ref()
                .context("--trust-file is required for --dataset epinions")?;
            let loaded = data::load_epinions(ratings, trust)?;
            if loaded.dropped_trust_edges > 0 {
                eprintln!(
                    "warning: dropped {} trust edges referencing unknown users",
                    loaded.dropped_trust_edges
                );
            }
            loaded.dataset
        }
        DatasetKind::Dump => {
            let path = args
                .dump_file
                .as_ref()
                .context("--dump-file is required for --dataset dump")?;
            Dataset::load_dump(path)?
        }
        DatasetKind::Synthetic => synth::generate(&synth::SynthConfig {
            seed: args.seed,
            ..Default::default()
        })?,
    };
    if let (Some(users), Some(items)) = (args.subsample_users, args.subsample_items) {
        dataset = data::subsample(&dataset, users, items, args.seed)?;
    }
    if verbose {
        eprintln!(
            "dataset: {} users, {} items, {} ratings, {} tags, {} profile categories, {} social edges",
            dataset.num_users(),
            dataset.num_items(),
            dataset.ratings().len(),
            dataset.num_tags(),
            dataset.num_profiles(),
            dataset.social().len()
        );
    }
    Ok(dataset)
}

fn graph_config(args: &GraphArgs) -> Result<GraphConfig> {
    if let Some(path) = &args.graph_config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        return Ok(GraphConfig::from_key_values(&text)?);
    }
    if args.hybrid {
        return Ok(GraphConfig::hybrid());
    }
    Ok(GraphConfig {
        enable_tags: args.enable_tags,
        enable_profiles: args.enable_profiles,
        enable_social: args.enable_social,
    })
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn cmd_build(
    _global: &Global,
    dataset: DatasetArgs,
    graph: GraphArgs,
    out: Option<PathBuf>,
) -> Result<()> {
    let ds = load_dataset(&dataset, _global.verbose)?;
    let config = graph_config(&graph)?;
    let g = build_graph(&ds, config)?;
    let mut writer = open_output(&out)?;
    g.dump_edges(&mut writer)?;
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ListEntry {
    rank: usize,
    item_id: u32,
    score: f64,
}

fn write_ranked_list(
    format: OutputFormat,
    list: &RankedList,
    writer: &mut dyn Write,
) -> Result<()> {
    match format {
        OutputFormat::Tsv => {
            for (rank, &(item, score)) in list.entries.iter().enumerate() {
                writeln!(writer, "{}\t{}\t{}", rank + 1, item, score)?;
            }
        }
        OutputFormat::Json => {
            let entries: Vec<ListEntry> = list
                .entries
                .iter()
                .enumerate()
                .map(|(rank, &(item_id, score))| ListEntry {
                    rank: rank + 1,
                    item_id,
                    score,
                })
                .collect();
            serde_json::to_writer_pretty(&mut *writer, &entries)?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_recommend(
    global: &Global,
    dataset: DatasetArgs,
    graph: GraphArgs,
    solver: SolverArgs,
    user: Option<u32>,
    group: Vec<u32>,
    k: usize,
    out: Option<PathBuf>,
    dump_ranks: Option<PathBuf>,
) -> Result<()> {
    let ds = load_dataset(&dataset, global.verbose)?;
    let config = graph_config(&graph)?;
    let g = build_graph(&ds, config)?;
    let w = transition_matrix(&g);
    let solver = solver.to_config();

    let list = match (user, group.as_slice()) {
        (Some(user), []) => recommend_for_user(&g, &w, &ds, user, k, &solver)?,
        (None, members) if !members.is_empty() => {
            group_recommend(&g, &w, &ds, members, k, &solver)?
        }
        _ => bail!("exactly one of --user or --group is required"),
    };

    if let Some(path) = dump_ranks {
        // re-solve for the same target to dump all node scores
        let nodes: Vec<NodeId> = match (user, group.as_slice()) {
            (Some(u), []) => vec![g.user_node(u).unwrap()],
            (None, members) => members.iter().map(|&u| g.user_node(u).unwrap()).collect(),
            _ => unreachable!(),
        };
        let theta = PersonalizationVector::for_group(&g, &nodes)?;
        let rank = solve_rank(&w, &theta, &solver)?;
        let mut writer = BufWriter::new(File::create(&path)?);
        for idx in 0..g.node_count() {
            let node = NodeId(idx);
            writeln!(
                writer,
                "{}\t{}\t{}",
                g.kind(node).as_str(),
                g.external_id(node),
                rank.score(node)
            )?;
        }
    }

    let mut writer = open_output(&out)?;
    write_ranked_list(global.format, &list, &mut writer)?;
    writer.flush()?;
    Ok(())
}

fn write_prediction(
    format: OutputFormat,
    prediction: &Prediction,
    writer: &mut dyn Write,
) -> Result<()> {
    match format {
        OutputFormat::Tsv => writeln!(
            writer,
            "{}\t{}\t{}\t{}\t{}",
            prediction.user,
            prediction.item,
            prediction.value,
            prediction.method.as_str(),
            prediction.fallback_used
        )?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *writer, prediction)?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_predict(
    global: &Global,
    dataset: DatasetArgs,
    graph: GraphArgs,
    solver: SolverArgs,
    user: u32,
    item: u32,
    method: PredictKind,
    out: Option<PathBuf>,
) -> Result<()> {
    let ds = load_dataset(&dataset, global.verbose)?;
    let config = graph_config(&graph)?;
    let g = build_graph(&ds, config)?;
    let w = transition_matrix(&g);
    let node = g
        .user_node(user)
        .with_context(|| format!("unknown user id {user}"))?;
    if g.item_node(item).is_none() {
        bail!("unknown item id {item}");
    }
    let theta = PersonalizationVector::for_user(&g, node)?;
    let rank = solve_rank(&w, &theta, &solver.to_config())?;
    let prediction = match method {
        PredictKind::UserBased => predict_user_based_from_rank(&g, &rank, &ds, user, item),
        PredictKind::ItemBased => predict_item_based_from_rank(&g, &rank, &ds, user, item),
    };
    let mut writer = open_output(&out)?;
    write_prediction(global.format, &prediction, &mut writer)?;
    writer.flush()?;
    Ok(())
}

/// Echoed into every evaluation report for reproducibility.
#[derive(Serialize)]
struct RunConfig {
    dataset: DatasetArgs,
    solver: SolverArgs,
    methods: Vec<String>,
    mode: EvalMode,
    folds: usize,
    cold_fraction: f64,
    cold_seeds: usize,
    k_grid: Vec<usize>,
    list_length: usize,
    format: OutputFormat,
}

#[derive(Serialize)]
struct ReportFile {
    config: RunConfig,
    reports: Vec<EvalReport>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    global: &Global,
    dataset: DatasetArgs,
    solver: SolverArgs,
    methods: Vec<String>,
    mode: EvalMode,
    folds: usize,
    cold_fraction: f64,
    cold_seeds: usize,
    k_grid: Vec<usize>,
    list_length: Option<usize>,
    out: PathBuf,
) -> Result<()> {
    let resolved: Vec<Box<dyn eval::Method>> = methods
        .iter()
        .map(|name| Ok(eval::method_by_name(name)?))
        .collect::<Result<_>>()?;
    let ds = load_dataset(&dataset, global.verbose)?;
    let list_length = list_length.unwrap_or(match dataset.dataset {
        DatasetKind::Epinions => 500,
        _ => 900,
    });
    let protocol = Protocol {
        mode: match mode {
            EvalMode::Warm => ProtocolMode::Warm { folds },
            EvalMode::Cold => ProtocolMode::Cold {
                fraction: cold_fraction,
                seeds: cold_seeds,
            },
        },
        k_grid: k_grid.clone(),
        list_length,
        seed: dataset.seed,
        solver: solver.to_config(),
    };
    if global.verbose {
        eprintln!("evaluating methods: {}", methods.join(", "));
    }
    let reports = eval::run_experiment(&ds, &resolved, &protocol)?;

    let file = ReportFile {
        config: RunConfig {
            dataset,
            solver,
            methods,
            mode,
            folds,
            cold_fraction,
            cold_seeds,
            k_grid,
            list_length,
            format: global.format,
        },
        reports,
    };
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(&out, json.as_bytes())
        .with_context(|| format!("writing {}", out.display()))?;

    let table_path = out.with_extension("tsv");
    let mut table = String::new();
    let ks: BTreeSet<usize> = file
        .reports
        .iter()
        .flat_map(|r| r.mean_recall_curve.iter().map(|&(k, _)| k))
        .collect();
    table.push_str("method\tmode\tmean_percentile");
    for k in &ks {
        table.push_str(&format!("\trecall@{k}"));
    }
    table.push('\n');
    for report in &file.reports {
        table.push_str(&format!(
            "{}\t{}\t{}",
            report.method,
            report.mode,
            report
                .mean_percentile
                .map_or_else(|| "-".to_string(), |p| format!("{p:.4}"))
        ));
        for k in &ks {
            let cell = report
                .mean_recall_curve
                .iter()
                .find(|&&(rk, _)| rk == *k)
                .map_or_else(|| "-".to_string(), |&(_, v)| format!("{v:.4}"));
            table.push_str(&format!("\t{cell}"));
        }
        table.push('\n');
    }
    std::fs::write(&table_path, &table)?;
    print!("{table}");
    Ok(())
}
