use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use edge_cover::cnf::{count_solutions, parse_cnf, to_graph};
use edge_cover::corpus::{cycle, random_sparse, star};
use edge_cover::counter::{estimate_count, Accuracy, ApproxCount};
use edge_cover::estimator::{estimate_marginal_traced, Depth, NodeCounter, TraceWriter};
use edge_cover::graph::{parse_graph, LabeledGraph};
use edge_cover::oracle::{Oracle, DEFAULT_EDGE_CAP};
use edge_cover::verify::{run_all, VerifyConfig};

#[derive(Parser, Debug)]
#[command(
    name = "edgecover",
    version,
    about = "Exact and approximate edge-cover counting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count edge covers exactly by enumeration.
    Exact {
        graph: PathBuf,
        /// Refuse graphs with more edges than this.
        #[arg(long, default_value_t = DEFAULT_EDGE_CAP)]
        cap: usize,
    },
    /// Approximate the number of edge covers within a factor 1 ± epsilon.
    Count {
        graph: PathBuf,
        #[arg(long)]
        epsilon: f64,
    },
    /// Estimate the probability that an edge is absent from a random cover.
    Marginal {
        graph: PathBuf,
        /// Edge id as written in the graph file.
        #[arg(long)]
        edge: u64,
        #[arg(long, default_value_t = 12, allow_negative_numbers = true)]
        depth: i64,
        /// Also report the exact rational marginal.
        #[arg(long)]
        exact: bool,
        /// Print one line per computation-tree node to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Count satisfying assignments of a read-twice monotone CNF.
    FromCnf {
        cnf: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Also report the exact count.
        #[arg(long)]
        exact: bool,
    },
    /// Check the estimator against the exact oracle and the analytic bounds.
    Verify {
        #[arg(long, default_value_t = 12)]
        max_edges: usize,
        #[arg(long, default_value_t = 7)]
        max_vertices: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.2, 0.1])]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        random_graphs: usize,
        #[arg(long, default_value_t = 14)]
        random_max_edges: usize,
        #[arg(long, default_value_t = 12)]
        max_depth: i64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 200)]
        identities: usize,
    },
    /// Time approximate counting on a family of graphs; writes CSV.
    Bench {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Cycle,
    Star,
    /// Random spanning tree plus n/2 chords.
    Random,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(err) = configure_threads() {
        eprintln!("edgecover: {err:#}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("edgecover: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("EC_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| anyhow!("EC_THREADS must be a non-negative integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<LabeledGraph> {
    parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn accuracy(epsilon: f64) -> Result<Accuracy> {
    Ok(Accuracy::new(epsilon)?)
}

fn counter_json(c: &ApproxCount) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("count".into(), json!(c.value));
    let log = if c.value > 0.0 {
        json!(c.log_value)
    } else {
        Value::Null
    };
    m.insert("log_count".into(), log);
    m.insert("epsilon".into(), json!(c.epsilon));
    m.insert("depth".into(), json!(c.depth_used.0));
    m.insert("m".into(), json!(c.edges));
    m.insert("n".into(), json!(c.vertices));
    m.insert("isolated".into(), json!(c.isolated));
    m
}

fn emit(value: Map<String, Value>) {
    println!("{}", Value::Object(value));
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Exact { graph, cap } => {
            let g = load_graph(&graph)?.graph;
            let count = Oracle::with_cap(cap).count(&g)?;
            let mut out = Map::new();
            out.insert("count".into(), json!(count.to_string()));
            emit(out);
        }
        Command::Count { graph, epsilon } => {
            let acc = accuracy(epsilon)?;
            let g = load_graph(&graph)?.graph;
            emit(counter_json(&estimate_count(&g, acc)?));
        }
        Command::Marginal {
            graph,
            edge,
            depth,
            exact,
            trace,
        } => {
            let labeled = load_graph(&graph)?;
            let e = labeled
                .edge_by_label(edge)
                .ok_or_else(|| anyhow!("no edge with id {edge} in {}", graph.display()))?;
            let g = &labeled.graph;
            // Compute the exact value first so that a too-large graph fails
            // before anything is traced.
            let exact = if exact {
                Some(Oracle::default().marginal(g, e)?)
            } else {
                None
            };
            let estimate = if trace {
                let stderr = std::io::stderr();
                let mut writer = TraceWriter(stderr.lock());
                estimate_marginal_traced(g, e, Depth(depth), &mut writer)?
            } else {
                estimate_marginal_traced(g, e, Depth(depth), &mut NodeCounter::default())?
            };
            let mut out = Map::new();
            out.insert("estimate".into(), json!(estimate.value()));
            out.insert("depth".into(), json!(depth));
            if let Some(p) = exact {
                out.insert("exact_num".into(), json!(p.numer().to_string()));
                out.insert("exact_den".into(), json!(p.denom().to_string()));
            }
            emit(out);
        }
        Command::FromCnf {
            cnf,
            epsilon,
            exact,
        } => {
            let acc = accuracy(epsilon)?;
            let phi =
                parse_cnf(&read(&cnf)?).with_context(|| format!("parsing {}", cnf.display()))?;
            let exact = if exact {
                Some(Oracle::default().count(&to_graph(&phi))?)
            } else {
                None
            };
            let mut out = counter_json(&count_solutions(&phi, acc)?);
            out.insert("vars".into(), json!(phi.num_vars()));
            out.insert("clauses".into(), json!(phi.clauses().len()));
            if let Some(c) = exact {
                out.insert("exact".into(), json!(c.to_string()));
            }
            emit(out);
        }
        Command::Verify {
            max_edges,
            max_vertices,
            epsilons,
            seed,
            random_graphs,
            random_max_edges,
            max_depth,
            trials,
            identities,
        } => {
            for &eps in &epsilons {
                accuracy(eps)?;
            }
            if max_edges > DEFAULT_EDGE_CAP || random_max_edges > DEFAULT_EDGE_CAP {
                bail!("edge limits above {DEFAULT_EDGE_CAP} are out of reach for the oracle");
            }
            let config = VerifyConfig {
                max_vertices,
                max_edges,
                random_graphs,
                random_max_edges,
                max_depth,
                epsilons,
                seed,
                sensitivity_trials: trials,
                identity_instances: identities,
            };
            let reports = run_all(&config);
            for r in &reports {
                println!("{r}");
            }
            if reports.iter().any(|r| !r.passed()) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Bench {
            family,
            sizes,
            epsilon,
            seed,
        } => {
            let acc = accuracy(epsilon)?;
            println!("n,m,L,nodes_expanded,wall_ms,estimate");
            for n in sizes {
                let g = match family {
                    Family::Cycle if n < 3 => bail!("cycles need at least 3 vertices, got {n}"),
                    Family::Cycle => cycle(n),
                    Family::Star => star(n),
                    Family::Random => random_sparse(n, n / 2, seed),
                };
                let start = Instant::now();
                let c = estimate_count(&g, acc)?;
                let wall = start.elapsed().as_secs_f64() * 1e3;
                println!(
                    "{},{},{},{},{:.3},{}",
                    c.vertices,
                    c.edges,
                    c.depth_used.0,
                    c.nodes_expanded(),
                    wall,
                    c.value
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
