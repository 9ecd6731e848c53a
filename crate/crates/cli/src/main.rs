//! `nodal`: samplers, spectra, nodal domains, bound constants and experiments.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on runtime errors.

mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nodal_core::bounds::{exceptional_bound_k, kp_formula, reference_k, ConstantsResult, GridSpec};
use nodal_core::experiments::{self, Experiment, ExperimentConfig, GraphModel, Tolerance};
use nodal_core::format::format_sig;
use nodal_core::graph::{graph_to_string, parse_graph, sample_gnp, sample_regular};
use nodal_core::matrix::{adjacency_matrix, laplacian_matrix};
use nodal_core::nodal::{nodal_domains, nodal_summary};
use nodal_core::spectral::eigendecompose;
use nodal_core::{DomainKind, Error, Graph, RngStream, SortOrder, VERSION};

#[derive(Parser, Debug)]
#[command(
    name = "nodal",
    version,
    about = "Nodal domains of eigenvectors of random graphs"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Does not change the output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Absolute zero threshold. Default: 1e-9 times the sup norm of each vector.
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// File of `key = value` lines; flags on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MatrixKind {
    Adjacency,
    Laplacian,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrderArg {
    Desc,
    Asc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Weak,
    Strong,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GridArg {
    Default,
    Coarse,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Gnp,
    Regular,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample G(n, p) and print its edge list.
    GenGnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
    /// Sample a uniform random d-regular graph.
    GenRegular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Eigenvalues and eigenvectors of a graph's adjacency or Laplacian matrix.
    Spectrum {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = MatrixKind::Adjacency)]
        matrix: MatrixKind,
        /// Default: descending for the adjacency matrix, ascending for the Laplacian.
        #[arg(long, value_enum)]
        order: Option<OrderArg>,
    },
    /// Nodal domains of a vertex function.
    Domains {
        #[arg(long)]
        graph: PathBuf,
        /// One value per line.
        #[arg(long)]
        vector: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Weak)]
        kind: KindArg,
    },
    /// Largest positive/negative domains, exceptional and zero sets.
    Summary {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vector: PathBuf,
    },
    /// Explicit constants and the exceptional-vertex bound k.
    Constants {
        /// One or more p, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, value_enum, default_value_t = GridArg::Default)]
        grid: GridArg,
    },
    /// floor(1 / log2(1 / (1 - p))).
    Kp {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
    },
    /// Domain counts per eigenvector of random d-regular graphs.
    ExpFig1(ExpArgs),
    /// Frequency of three domains in the top Laplacian eigenvector of G(n, p).
    ExpFig2(ExpArgs),
    /// Domain decomposition sizes across the adjacency spectrum of G(n, p).
    ExpGnp(ExpArgs),
    /// Tail frequencies of matrix norms and eigenvalues.
    ExpTails(ExpArgs),
    /// |<f, 1>| for non-first eigenvectors.
    ExpInner(ExpArgs),
    /// Sup norms of eigenvectors across n.
    ExpLinf(ExpArgs),
    /// Neighbourhood unions and intersections of random vertex tuples.
    ExpFact(ExpArgs),
    /// How often the k-th eigenvector has more than k weak domains.
    ExpCourant(ExpArgs),
}

#[derive(Args, Debug, Default)]
struct ExpArgs {
    #[arg(long, conflicts_with = "n_list")]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, conflicts_with = "d_list")]
    d: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    d_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    xi_list: Option<Vec<f64>>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    trials: Option<usize>,
    /// Include per-trial raw records (JSON output).
    #[arg(long)]
    records: bool,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let raw = match config::to_strings(std::env::args_os()) {
        Ok(a) => a,
        Err(e) => return usage(&e),
    };
    let args = match config::merge(raw) {
        Ok(a) => a,
        Err(e) => return usage(&e),
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.common.threads {
        if t == 0 {
            return usage("--threads must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("nodal: {e}");
            return ExitCode::from(2);
        }
    }
    let echo = config::echo(&args[1..]);
    match dispatch(&cli, &echo) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => usage(&m),
        Err(Failure::Runtime(m)) => {
            eprintln!("nodal: error: {m}");
            ExitCode::from(2)
        }
    }
}

fn usage(message: &str) -> ExitCode {
    eprintln!("nodal: {message}\nRun `nodal --help` for usage.");
    ExitCode::from(1)
}

fn dispatch(cli: &Cli, echo: &str) -> Outcome<()> {
    let c = &cli.common;
    let out = Output { common: c, echo };
    match &cli.command {
        Command::GenGnp { n, p } => {
            let g = sample_gnp(*n, *p, &RngStream::new(c.seed, "gen-gnp", 0))?;
            out.graph(&g)
        }
        Command::GenRegular { n, d } => {
            let g = sample_regular(*n, *d, &RngStream::new(c.seed, "gen-regular", 0))?;
            out.graph(&g)
        }
        Command::Spectrum {
            graph,
            matrix,
            order,
        } => {
            let g = read_graph(graph)?;
            let (m, default_order) = match matrix {
                MatrixKind::Adjacency => (adjacency_matrix(&g), SortOrder::Descending),
                MatrixKind::Laplacian => (laplacian_matrix(&g), SortOrder::Ascending),
            };
            let order = match order {
                Some(OrderArg::Desc) => SortOrder::Descending,
                Some(OrderArg::Asc) => SortOrder::Ascending,
                None => default_order,
            };
            let s = eigendecompose(&m, order)?;
            out.emit(
                || Ok(s.to_csv()),
                || serde_json::to_value(&s).map_err(runtime),
            )
        }
        Command::Domains {
            graph,
            vector,
            kind,
        } => {
            let g = read_graph(graph)?;
            let f = tolerance(c)?.signed(read_vector(vector, g.order())?)?;
            let kind = match kind {
                KindArg::Weak => DomainKind::Weak,
                KindArg::Strong => DomainKind::Strong,
            };
            let part = nodal_domains(&g, &f, kind)?;
            out.emit(
                || Ok(part.to_csv()),
                || {
                    let domains: Vec<Value> = part
                        .domains
                        .iter()
                        .map(|d| json!({"sign": d.sign.to_string(), "vertices": d.vertices}))
                        .collect();
                    Ok(json!({"kind": kind.to_string(), "count": part.count(), "domains": domains}))
                },
            )
        }
        Command::Summary { graph, vector } => {
            let g = read_graph(graph)?;
            let f = tolerance(c)?.signed(read_vector(vector, g.order())?)?;
            let s = nodal_summary(&g, &f)?;
            let z = s.sizes();
            out.emit(
                || {
                    Ok(format!(
                        "P,N,E,Z,weak_count,strong_count,EcapZ\n{},{},{},{},{},{},{}\n",
                        z.p, z.n, z.e, z.z, z.weak_count, z.strong_count, z.e_cap_z
                    ))
                },
                || Ok(json!({"sizes": z, "sets": s})),
            )
        }
        Command::Constants { p, grid } => {
            let grid = match grid {
                GridArg::Default => GridSpec::default(),
                GridArg::Coarse => GridSpec::coarse(),
            };
            let results = p
                .iter()
                .map(|&p| exceptional_bound_k(p, &grid))
                .collect::<Result<Vec<ConstantsResult>, Error>>()?;
            out.emit(
                || {
                    let mut s = String::new();
                    for r in &results {
                        if let Some(k) = reference_k(r.params.p) {
                            let agree = if r.k == Some(k) { "equal" } else { "differs" };
                            s.push_str(&format!(
                                "# p = {} reference k = {k} ({agree})\n",
                                format_sig(r.params.p, 10)
                            ));
                        }
                    }
                    s.push_str(ConstantsResult::CSV_HEADER);
                    s.push('\n');
                    for r in &results {
                        s.push_str(&r.csv_row());
                        s.push('\n');
                    }
                    Ok(s)
                },
                || {
                    let rows: Vec<Value> = results
                        .iter()
                        .map(|r| json!({"result": r, "reference_k": reference_k(r.params.p)}))
                        .collect();
                    Ok(Value::Array(rows))
                },
            )
        }
        Command::Kp { p } => {
            let ks = p
                .iter()
                .map(|&p| kp_formula(p))
                .collect::<Result<Vec<u64>, Error>>()?;
            out.emit(
                || {
                    let mut s = String::from("p,k_p\n");
                    for (p, k) in p.iter().zip(&ks) {
                        s.push_str(&format!("{},{k}\n", format_sig(*p, 10)));
                    }
                    Ok(s)
                },
                || {
                    Ok(json!(p
                        .iter()
                        .zip(&ks)
                        .map(|(p, k)| json!({"p": p, "k_p": k}))
                        .collect::<Vec<_>>()))
                },
            )
        }
        Command::ExpFig1(a) => experiment(Experiment::Fig1, a, &out),
        Command::ExpFig2(a) => experiment(Experiment::Fig2, a, &out),
        Command::ExpGnp(a) => experiment(Experiment::GnpScan, a, &out),
        Command::ExpTails(a) => experiment(Experiment::Tails, a, &out),
        Command::ExpInner(a) => experiment(Experiment::Inner, a, &out),
        Command::ExpLinf(a) => experiment(Experiment::Linf, a, &out),
        Command::ExpFact(a) => experiment(Experiment::Fact, a, &out),
        Command::ExpCourant(a) => experiment(Experiment::Courant, a, &out),
    }
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn tolerance(c: &Common) -> Outcome<Tolerance> {
    Ok(match c.tau {
        Some(t) if t >= 0.0 && t.is_finite() => Tolerance::Absolute(t),
        Some(t) => return Err(Failure::Usage(format!("--tau {t} must be finite and >= 0"))),
        None => Tolerance::default(),
    })
}

fn read_graph(path: &PathBuf) -> Outcome<Graph> {
    let text = fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

/// One value per line; blank lines and `#` lines are skipped.
fn read_vector(path: &PathBuf, expected: usize) -> Outcome<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim().trim_end_matches(',');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let x: f64 = line.parse().map_err(|_| {
            runtime(format!(
                "{}:{}: not a number: {line:?}",
                path.display(),
                i + 1
            ))
        })?;
        values.push(x);
    }
    if values.len() != expected {
        return Err(runtime(format!(
            "{}: {} values for a graph on {expected} vertices",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

/// Which experiment flags each experiment reads.
fn accepted(e: Experiment) -> &'static [&'static str] {
    match e {
        Experiment::Fig1 => &["n", "d-list"],
        Experiment::Fig2 => &["n-list", "p"],
        Experiment::GnpScan => &["n", "p"],
        Experiment::Tails => &["n-list", "p", "xi-list", "delta"],
        Experiment::Inner | Experiment::Courant => &["n", "p", "d-list", "model"],
        Experiment::Linf => &["n-list", "p"],
        Experiment::Fact => &["n", "p", "k-list"],
    }
}

fn experiment(e: Experiment, a: &ExpArgs, out: &Output) -> Outcome<()> {
    let given = [
        (
            "n",
            a.n.is_some() || a.n_list.as_ref().is_some_and(|v| v.len() == 1),
        ),
        ("n-list", a.n_list.is_some() || a.n.is_some()),
        ("p", a.p.is_some()),
        ("d-list", a.d.is_some() || a.d_list.is_some()),
        ("k-list", a.k_list.is_some()),
        ("xi-list", a.xi_list.is_some()),
        ("delta", a.delta.is_some()),
        ("model", a.model.is_some()),
    ];
    let ok = accepted(e);
    for (flag, present) in given {
        let covered = ok.contains(&flag)
            || (flag == "n-list" && ok.contains(&"n"))
            || (flag == "n" && ok.contains(&"n-list"));
        if present && !covered {
            return Err(Failure::Usage(format!(
                "--{flag} does not apply to exp-{}",
                cli_name(e)
            )));
        }
    }

    let mut cfg = ExperimentConfig::new(e);
    cfg.seed = out.common.seed;
    cfg.tau = tolerance(out.common)?;
    if let Some(n) = a.n {
        cfg.n = vec![n];
    }
    if let Some(ns) = &a.n_list {
        cfg.n = ns.clone();
    }
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if let Some(d) = a.d {
        cfg.d = vec![d];
    }
    if let Some(ds) = &a.d_list {
        cfg.d = ds.clone();
    }
    if let Some(k) = &a.k_list {
        cfg.k = k.clone();
    }
    if let Some(xi) = &a.xi_list {
        cfg.xi = xi.clone();
    }
    if let Some(delta) = a.delta {
        cfg.delta = delta;
    }
    if let Some(m) = a.model {
        cfg.model = match m {
            ModelArg::Gnp => GraphModel::Gnp,
            ModelArg::Regular => GraphModel::Regular,
        };
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    cfg.keep_records = a.records;
    cfg.validate()?;

    let report = experiments::run(&cfg)?;
    eprintln!(
        "nodal: {} finished in {:.2}s",
        e,
        report.wall_clock.as_secs_f64()
    );
    let config_json = serde_json::to_string(&cfg).map_err(runtime)?;
    out.emit(
        || Ok(format!("# config = {config_json}\n{}", report.to_csv())),
        || serde_json::to_value(&report).map_err(runtime),
    )
}

fn cli_name(e: Experiment) -> &'static str {
    match e {
        Experiment::GnpScan => "gnp",
        other => other.name(),
    }
}

struct Output<'a> {
    common: &'a Common,
    echo: &'a str,
}

impl Output<'_> {
    fn header(&self) -> String {
        format!(
            "# nodal {VERSION} argv={} seed={}\n",
            self.echo, self.common.seed
        )
    }

    fn graph(&self, g: &Graph) -> Outcome<()> {
        self.emit(
            || Ok(graph_to_string(g)),
            || Ok(json!({"n": g.order(), "m": g.edge_count(), "edges": g.edges()})),
        )
    }

    /// Writes CSV (after the header comment) or JSON (wrapped with the same
    /// header fields under `meta`).
    fn emit(
        &self,
        csv: impl FnOnce() -> Outcome<String>,
        json: impl FnOnce() -> Outcome<Value>,
    ) -> Outcome<()> {
        let text = match self.common.format {
            Format::Csv => format!("{}{}", self.header(), csv()?),
            Format::Json => {
                let doc = json!({
                    "meta": {"tool": "nodal", "version": VERSION, "argv": self.echo, "seed": self.common.seed},
                    "result": json()?,
                });
                let mut s = serde_json::to_string_pretty(&doc).map_err(runtime)?;
                s.push('\n');
                s
            }
        };
        match &self.common.out {
            Some(path) => {
                fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(runtime)
            }
        }
    }
}
