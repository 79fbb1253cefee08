use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use graphorder::apps::{self, compression_csv, GREEDY_SLACK};
use graphorder::checkpoint::{load_don, Checkpoint};
use graphorder::render::{render_pgm, PgmFormat};
use graphorder::train::{don_metrics_csv, rl_metrics_csv};
use graphorder::{
    brute_force_optimal, degree_order, don_order_graph, expand_permutation, f_score_graph, gen_erdos_renyi,
    gen_power_law, go_order, merge_degree_one, read_edge_list, train_don, train_don_rl, Config, Error, Graph,
    Permutation, Result, WindowSize,
};

#[derive(Parser)]
#[command(name = "graphorder", version, about = "Locality-preserving graph orderings")]
struct Cli {
    /// Seed for every random choice; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Window size; overrides the config file.
    #[arg(long, global = true)]
    w: Option<usize>,
    /// Flat TOML file with run settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Merge degree-1 fans before ordering and expand afterwards.
    #[arg(long, global = true)]
    merge: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random graph as an edge list.
    Generate(GenerateArgs),
    /// Compute an ordering and print its F score.
    Order(OrderArgs),
    /// Train a DON model (optionally with the sampling policy).
    Train(TrainArgs),
    /// Print the F score of a permutation file.
    Eval(EvalArgs),
    /// Block compression cost of the permuted adjacency matrix.
    CompressCost(CompressArgs),
    /// Partition edges and print the replication factor.
    Partition(PartitionArgs),
    /// Write the permuted adjacency matrix as a PGM image.
    RenderMatrix(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphModel {
    Er,
    PowerLaw,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: GraphModel,
    #[arg(long)]
    n: usize,
    /// Edge probability (er).
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Degree exponent (power-law).
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Go,
    Degree,
    Don,
    Brute,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "go")]
    algo: Algo,
    /// DON checkpoint (required for --algo don).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrainMode {
    Don,
    DonRl,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "don-rl")]
    mode: TrainMode,
    /// Where to write the DON checkpoint.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Per-step DON loss and evaluation RMSE.
    #[arg(long)]
    metrics: PathBuf,
    /// Per-action rewards (don-rl only).
    #[arg(long)]
    rl_metrics: Option<PathBuf>,
    /// Policy checkpoint (don-rl only).
    #[arg(long)]
    policy_checkpoint: Option<PathBuf>,
    /// Evaluation interval for bare DON training.
    #[arg(long, default_value_t = 100)]
    eval_every: usize,
    /// Add a wall-clock column to the metrics (breaks byte-identical reruns).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    perm: PathBuf,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    input: PathBuf,
    /// Identity when omitted.
    #[arg(long)]
    perm: Option<PathBuf>,
    /// Block widths; repeat or comma-separate.
    #[arg(long = "block", value_delimiter = ',', required = true)]
    blocks: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionMethod {
    OrderSweep,
    Random,
    Greedy,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: PartitionMethod,
    #[arg(long)]
    k: usize,
    /// Ordering for order-sweep; identity when omitted.
    #[arg(long)]
    perm: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Plain,
    Raw,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    perm: Option<PathBuf>,
    /// Downsample so each pixel covers a cell x cell block.
    #[arg(long, default_value_t = 1)]
    cell: usize,
    #[arg(long, value_enum, default_value = "raw")]
    format: Format,
    #[arg(long)]
    out: PathBuf,
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => Config::read(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.w {
        cfg.w = w;
    }
    Ok(cfg)
}

fn load_graph(path: &Path) -> Result<Graph> {
    let loaded = read_edge_list(path).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        Error::Range { line, id } => Error::Parse {
            line,
            msg: format!("{}: vertex id {id} out of range", path.display()),
        },
        other => other,
    })?;
    let d = loaded.dropped;
    if d.self_loops + d.duplicates > 0 {
        eprintln!(
            "note: dropped {} self-loops and {} duplicate arcs from {}",
            d.self_loops,
            d.duplicates,
            path.display()
        );
    }
    Ok(loaded.graph)
}

fn load_perm(path: Option<&Path>, n: usize) -> Result<Permutation> {
    let perm = match path {
        Some(p) => Permutation::read(p)?,
        None => Permutation::identity(n),
    };
    if perm.len() != n {
        return Err(Error::Contract(format!(
            "permutation has {} entries but the graph has {n} vertices",
            perm.len()
        )));
    }
    Ok(perm)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn order(cli: &Cli, cfg: &Config, a: &OrderArgs) -> Result<()> {
    let g = load_graph(&a.input)?;
    let w = WindowSize::new(cfg.w)?;
    let (work, groups) = if cli.merge {
        let (m, groups) = merge_degree_one(&g);
        (m, Some(groups))
    } else {
        (g.clone(), None)
    };
    let perm = match a.algo {
        Algo::Go => go_order(&work, w),
        Algo::Degree => degree_order(&work),
        Algo::Brute => brute_force_optimal(&work, w)?.0,
        Algo::Don => {
            let path = a
                .model
                .as_deref()
                .ok_or_else(|| Error::Contract("--algo don needs --model".into()))?;
            let model = load_don(path)?;
            if model.n() != work.n() {
                return Err(Error::Contract(format!(
                    "{}: model covers {} vertices, graph has {}",
                    path.display(),
                    model.n(),
                    work.n()
                )));
            }
            don_order_graph(&work, &model, w)?
        }
    };
    let perm = match groups {
        Some(groups) => expand_permutation(&perm, &groups, cfg.seed)?,
        None => perm,
    };
    if let Some(out) = &a.out {
        perm.write(out)?;
    }
    println!("F={}", f_score_graph(&g, &perm, w));
    Ok(())
}

fn train(cli: &Cli, cfg: &Config, a: &TrainArgs) -> Result<()> {
    let g = load_graph(&a.input)?;
    if cli.merge {
        return Err(Error::Contract("--merge does not apply to train; train on a merged graph file".into()));
    }
    let outcome = match a.mode {
        TrainMode::Don => train_don(&g, cfg, a.eval_every)?,
        TrainMode::DonRl => train_don_rl(&g, cfg)?,
    };
    Checkpoint::Don(outcome.don.clone()).save(&a.checkpoint)?;
    write_text(&a.metrics, &don_metrics_csv(&outcome.don_metrics, a.timing))?;
    if let Some(p) = &a.rl_metrics {
        write_text(p, &rl_metrics_csv(&outcome.rl_metrics))?;
    }
    if let (Some(p), Some(policy)) = (&a.policy_checkpoint, &outcome.policy) {
        Checkpoint::Policy(policy.clone()).save(p)?;
    }
    let last_rmse = outcome.don_metrics.iter().rev().find_map(|m| m.rmse);
    println!(
        "don_updates={} final_rmse={}",
        outcome.don_updates,
        last_rmse.map(|r| format!("{r:.6}")).unwrap_or_else(|| "n/a".into())
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Generate(a) => {
            let g = match a.model {
                GraphModel::Er => gen_erdos_renyi(a.n, a.p, cfg.seed)?,
                GraphModel::PowerLaw => gen_power_law(a.n, a.gamma, cfg.seed)?,
            };
            g.write_edge_list(&a.out)?;
            println!("n={} arcs={}", g.n(), g.arc_count());
        }
        Command::Order(a) => order(cli, &cfg, a)?,
        Command::Train(a) => train(cli, &cfg, a)?,
        Command::Eval(a) => {
            let g = load_graph(&a.input)?;
            let perm = load_perm(Some(&a.perm), g.n())?;
            println!("F={}", f_score_graph(&g, &perm, WindowSize::new(cfg.w)?));
        }
        Command::CompressCost(a) => {
            let g = load_graph(&a.input)?;
            let perm = load_perm(a.perm.as_deref(), g.n())?;
            let costs = a
                .blocks
                .iter()
                .map(|&b| apps::compression_cost(&g, &perm, b))
                .collect::<Result<Vec<_>>>()?;
            let csv = compression_csv(&costs);
            match &a.out {
                Some(p) => write_text(p, &csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Partition(a) => {
            let g = load_graph(&a.input)?;
            let part = match a.method {
                PartitionMethod::OrderSweep => {
                    let perm = load_perm(a.perm.as_deref(), g.n())?;
                    apps::partition_from_order(&g, &perm, a.k)?
                }
                PartitionMethod::Random => apps::random_partition(&g, a.k, cfg.seed)?,
                PartitionMethod::Greedy => apps::greedy_partition(&g, a.k, GREEDY_SLACK)?,
            };
            if let Some(p) = &a.out {
                write_text(p, &part.to_csv())?;
            }
            println!("RF={:.6}", apps::replication_factor(&g, &part));
        }
        Command::RenderMatrix(a) => {
            let g = load_graph(&a.input)?;
            let perm = load_perm(a.perm.as_deref(), g.n())?;
            let format = match a.format {
                Format::Plain => PgmFormat::Plain,
                Format::Raw => PgmFormat::Raw,
            };
            let img = render_pgm(&g, &perm, a.cell, format)?;
            std::fs::write(&a.out, img).map_err(|e| Error::io(&a.out, e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
