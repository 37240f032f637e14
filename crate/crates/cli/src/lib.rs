//! `structstab` command-line interface.
//!
//! Exit codes: 0 on success, 1 when the input or parameters are rejected by
//! the library (domain errors), 2 on usage errors.

pub mod graph_file;
pub mod sweep_csv;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use structstab::asymptotics::{
    model_a_asymptote, model_b_asymptote, Basis, EdgeRegime, LoopRegimeA, LoopRegimeB, RegimeA,
    RegimeB,
};
use structstab::models::{
    critical_edge_count, critical_p, sample_model_a, sample_model_b, ModelAParams, ModelBParams,
};
use structstab::montecarlo::{sweep, EdgeAxis, LoopAxis, ModelKind, SweepSpec};
use structstab::oracle::{find_hurwitz, structural_det_zero};
use structstab::stability::{
    check_digraph, check_symmetric_stability, classify_thin, Certificate, StabilityVerdict,
};
use structstab::Graph;

use graph_file::{parse_graph_file, write_graph, GraphFile};
use sweep_csv::{rows_to_string, sig6};

#[derive(Parser, Debug)]
#[command(name = "structstab", version, about = "Structural stability of sparse zero-patterns")]
struct Cli {
    /// Worker threads for parallel work (default: rayon's choice).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one graph from model A or B and print it as a graph file.
    Sample(SampleArgs),
    /// Decide stability of a graph file and print the certificates.
    Check(CheckArgs),
    /// Print the thin class F_k and its Hall certificate.
    Thin(FileArg),
    /// Monte Carlo sweep over a parameter grid, as CSV.
    Sweep(SweepArgs),
    /// Limit of P(stable) for a regime.
    Asymptote(AsymptoteArgs),
    /// Search for an explicit Hurwitz matrix in the pattern of a graph file.
    Oracle(OracleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModelArg {
    A,
    B,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::A => ModelKind::A,
            ModelArg::B => ModelKind::B,
        }
    }
}

#[derive(Args, Debug)]
struct FileArg {
    file: std::path::PathBuf,
}

#[derive(Args, Debug)]
struct CheckArgs {
    file: std::path::PathBuf,
    /// Use the digraph criteria even for an undirected file.
    #[arg(long)]
    digraph: bool,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Threshold offset: p = (ln n + c)/n or N = round(n(ln n + c)/2).
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "N")]
    edges: Option<usize>,
    #[arg(long = "M")]
    loops: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Threshold offsets (comma-separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    c: Vec<f64>,
    /// Edge probabilities (model A).
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Edge counts (model B).
    #[arg(long = "N", value_delimiter = ',')]
    edges: Vec<usize>,
    /// Loop axis for model A: values of q, `scaled:<mu>`, `constant:<mu>`,
    /// or a bare regime name taking its values from --mu.
    #[arg(long, value_delimiter = ',')]
    q: Vec<String>,
    /// Loop axis for model B: values of M, `constant:<mu>`, `linear:<mu>`,
    /// or a bare regime name taking its values from --mu.
    #[arg(long = "M", value_delimiter = ',')]
    loops: Vec<String>,
    /// Values for a bare loop regime name.
    #[arg(long, value_delimiter = ',')]
    mu: Vec<f64>,
}

#[derive(Args, Debug)]
struct AsymptoteArgs {
    #[arg(long)]
    model: ModelArg,
    /// Edge regime: `sparse`, `dense`, `critical:<c>`, or `critical` with --c.
    #[arg(long)]
    regime: String,
    /// Model A loop regime: `scaled:<mu>` or `constant:<mu>` (or bare with --mu).
    #[arg(long)]
    q: Option<String>,
    /// Model B loop regime: `constant:<mu>` or `linear:<mu>` (or bare with --mu).
    #[arg(long = "M")]
    loops: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    file: std::path::PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    restarts: u64,
}

enum Failure {
    Usage(String),
    Domain(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

type Outcome = Result<String, Failure>;

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Output goes to `stdout` unless `--out` is given.
pub fn run_command<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => usage("--threads must be at least 1"),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(e.into()),
        },
        None => execute(&cli.command),
    };
    let text = match result {
        Ok(text) => text,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return 1;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot write output: {e}");
            1
        }
    }
}

fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Sample(a) => cmd_sample(a),
        Command::Check(a) => cmd_check(a),
        Command::Thin(a) => cmd_thin(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Asymptote(a) => cmd_asymptote(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

fn read_graph_file(path: &std::path::Path) -> Result<GraphFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(parse_graph_file(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?)
}

fn cmd_sample(a: &SampleArgs) -> Outcome {
    let g: Graph = match a.model {
        ModelArg::A => {
            if a.edges.is_some() || a.loops.is_some() {
                return usage("--N and --M apply to model b");
            }
            let p = match (a.p, a.c) {
                (Some(p), None) => p,
                (None, Some(c)) => critical_p(a.n, c),
                _ => return usage("model a needs exactly one of --p or --c"),
            };
            let Some(q) = a.q else { return usage("model a needs --q") };
            sample_model_a(&ModelAParams { n: a.n, p, q, seed: a.seed })?
        }
        ModelArg::B => {
            if a.p.is_some() || a.q.is_some() {
                return usage("--p and --q apply to model a");
            }
            let edges = match (a.edges, a.c) {
                (Some(e), None) => e,
                (None, Some(c)) => critical_edge_count(a.n, c),
                _ => return usage("model b needs exactly one of --N or --c"),
            };
            let Some(loops) = a.loops else { return usage("model b needs --M") };
            sample_model_b(&ModelBParams { n: a.n, edges, loops, seed: a.seed })?
        }
    };
    Ok(write_graph(&g))
}

fn certificate_lines(c: &Certificate, out: &mut String) {
    let join = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    match c {
        Certificate::Decomposition { decomposition, loop_witnesses } => {
            let _ = writeln!(out, "decomposition={decomposition}");
            let _ = writeln!(out, "loop_witnesses={}", join(loop_witnesses));
        }
        Certificate::LooplessComponent { component, reason } => {
            let _ = writeln!(out, "loopless_component={component}");
            let _ = writeln!(out, "reason={reason}");
        }
        Certificate::Hall(h) => {
            let _ = writeln!(out, "hall={h}");
        }
        Certificate::NestedChain(chain) => {
            let sets: Vec<String> = chain.iter().map(|d| d.covered().to_string()).collect();
            let _ = writeln!(out, "nested_chain={}", sets.join(" < "));
            for (k, d) in chain.iter().enumerate() {
                let _ = writeln!(out, "decomposition_{}={d}", k + 1);
            }
        }
        Certificate::MissingK { k, within } => {
            let _ = writeln!(out, "missing_k={k}");
            let _ = writeln!(out, "within={within}");
        }
    }
}

fn verdict_text(kind: &str, n: usize, v: &StabilityVerdict) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind={kind}");
    let _ = writeln!(out, "n={n}");
    let _ = writeln!(out, "L={}", v.l_flag);
    let _ = writeln!(out, "H={}", v.h_flag);
    for c in &v.certificates {
        certificate_lines(c, &mut out);
    }
    let _ = writeln!(out, "{}", v.status);
    out
}

fn cmd_check(a: &CheckArgs) -> Outcome {
    let file = read_graph_file(&a.file)?;
    Ok(match (&file, a.digraph) {
        (GraphFile::Undirected(g), false) => {
            verdict_text("graph", g.n(), &check_symmetric_stability(g))
        }
        _ => verdict_text("digraph", file.n(), &check_digraph(&file.to_digraph())?),
    })
}

fn cmd_thin(a: &FileArg) -> Outcome {
    let GraphFile::Undirected(g) = read_graph_file(&a.file)? else {
        return Err(anyhow::anyhow!("thin needs an undirected ('e') graph file").into());
    };
    Ok(match classify_thin(&g) {
        Some(class) => format!("{class}\n"),
        None => {
            let d = structstab::matching::hamiltonian_decomposition(&g)
                .expect("graphs that are not thin have a decomposition");
            format!("decomposition={d}\nNOT_THIN\n")
        }
    })
}

fn parse_loop_a(item: &str, mu: &[f64]) -> Result<Vec<LoopAxis>, Failure> {
    match item {
        "scaled" | "constant" if mu.is_empty() => usage(format!("--q {item} needs --mu values")),
        "scaled" => Ok(mu.iter().map(|&m| LoopAxis::Scaled(m)).collect()),
        "constant" => Ok(mu.iter().map(|&m| LoopAxis::Constant(m)).collect()),
        _ if item.contains(':') => Ok(vec![match item.parse::<LoopRegimeA>()? {
            LoopRegimeA::Scaled(m) => LoopAxis::Scaled(m),
            LoopRegimeA::Constant(m) => LoopAxis::Constant(m),
        }]),
        _ => match item.parse::<f64>() {
            Ok(q) => Ok(vec![LoopAxis::Direct(q)]),
            Err(_) => usage(format!("--q: cannot parse '{item}'")),
        },
    }
}

fn parse_loop_b(item: &str, mu: &[f64]) -> Result<Vec<LoopAxis>, Failure> {
    match item {
        "constant" | "linear" if mu.is_empty() => usage(format!("--M {item} needs --mu values")),
        "constant" => Ok(mu.iter().map(|&m| LoopAxis::Constant(m)).collect()),
        "linear" => Ok(mu.iter().map(|&m| LoopAxis::Linear(m)).collect()),
        _ if item.contains(':') => Ok(vec![match item.parse::<LoopRegimeB>()? {
            LoopRegimeB::Constant(m) => LoopAxis::Constant(m),
            LoopRegimeB::Linear(m) => LoopAxis::Linear(m),
        }]),
        _ => match item.parse::<usize>() {
            Ok(m) => Ok(vec![LoopAxis::Direct(m as f64)]),
            Err(_) => usage(format!("--M: cannot parse '{item}'")),
        },
    }
}

fn cmd_sweep(a: &SweepArgs) -> Outcome {
    let direct: Vec<EdgeAxis> = match a.model {
        ModelArg::A => {
            if !a.edges.is_empty() || !a.loops.is_empty() {
                return usage("--N and --M apply to model b");
            }
            a.p.iter().map(|&p| EdgeAxis::Direct(p)).collect()
        }
        ModelArg::B => {
            if !a.p.is_empty() || !a.q.is_empty() {
                return usage("--p and --q apply to model a");
            }
            a.edges.iter().map(|&e| EdgeAxis::Direct(e as f64)).collect()
        }
    };
    let edges = match (a.c.is_empty(), direct.is_empty()) {
        (false, true) => a.c.iter().map(|&c| EdgeAxis::Critical(c)).collect(),
        (true, false) => direct,
        _ => return usage("give exactly one edge axis: --c, or --p (model a) / --N (model b)"),
    };
    let items = if a.model == ModelArg::A { &a.q } else { &a.loops };
    if items.is_empty() {
        return usage("missing loop axis: --q (model a) or --M (model b)");
    }
    let bare = items.iter().any(|i| !i.contains(':') && i.parse::<f64>().is_err());
    if !a.mu.is_empty() && !bare {
        return usage("--mu needs a bare loop regime name such as --q scaled");
    }
    let mut loops = Vec::new();
    for item in items {
        loops.extend(match a.model {
            ModelArg::A => parse_loop_a(item, &a.mu)?,
            ModelArg::B => parse_loop_b(item, &a.mu)?,
        });
    }
    let spec = SweepSpec {
        model: a.model.into(),
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        edges,
        loops,
    };
    Ok(rows_to_string(&sweep(&spec)?)?)
}

/// Appends `:<value>` to a bare regime name.
fn with_value(spec: &str, value: Option<f64>, flag: &str) -> Result<String, Failure> {
    match (spec.contains(':'), value) {
        (true, None) => Ok(spec.to_string()),
        (false, Some(v)) => Ok(format!("{spec}:{v}")),
        (true, Some(_)) => usage(format!("{spec} already has a value; drop {flag}")),
        (false, None) => Ok(spec.to_string()),
    }
}

fn cmd_asymptote(a: &AsymptoteArgs) -> Outcome {
    let edge_spec = match a.regime.as_str() {
        "sparse" | "dense" if a.c.is_some() => return usage("--c applies to the critical regime"),
        "sparse" | "dense" => a.regime.clone(),
        _ => with_value(&a.regime, a.c, "--c")?,
    };
    let edges: EdgeRegime = edge_spec.parse()?;
    let asymptote = match a.model {
        ModelArg::A => {
            let (Some(q), None) = (&a.q, &a.loops) else {
                return usage("model a needs --q (and not --M)");
            };
            let loops: LoopRegimeA = with_value(q, a.mu, "--mu")?.parse()?;
            model_a_asymptote(RegimeA { edges, loops })?
        }
        ModelArg::B => {
            let (None, Some(m)) = (&a.q, &a.loops) else {
                return usage("model b needs --M (and not --q)");
            };
            let loops: LoopRegimeB = with_value(m, a.mu, "--mu")?.parse()?;
            model_b_asymptote(RegimeB { edges, loops })?
        }
    };
    let mut out = format!("{}\n", sig6(asymptote.value));
    if asymptote.basis == Basis::AllLoops {
        out.push_str("basis=all-loops\n");
    }
    Ok(out)
}

fn cmd_oracle(a: &OracleArgs) -> Outcome {
    let file = read_graph_file(&a.file)?;
    let z = file.to_pattern();
    let witness = find_hurwitz(&z, a.restarts, a.seed)?;
    let det_zero = structural_det_zero(&z, 3, 1e-8, a.seed)?;
    let mut out = String::new();
    let _ = writeln!(out, "n={}", z.n());
    let _ = writeln!(out, "restarts={}", a.restarts);
    let _ = writeln!(out, "seed={}", a.seed);
    let _ = writeln!(out, "structural_det_zero={det_zero}");
    match witness {
        Some(m) => {
            for row in m.rows() {
                let cells: Vec<String> = row.iter().map(|&x| sig6(x)).collect();
                let _ = writeln!(out, "row={}", cells.join(" "));
            }
            out.push_str("HURWITZ\n");
        }
        None => out.push_str("NONE\n"),
    }
    Ok(out)
}
