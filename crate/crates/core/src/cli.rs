//! Command-line front end. Every subcommand parses its inputs, calls one
//! library routine and prints the result.
//!
//! Exit codes: 0 for success or a "yes" answer, 1 for a "no" answer, 2 for
//! usage and input errors, 3 when the budget runs out.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::duality::{graph_self_dual, mutual_duality, skeleton_graph, witness_embedding, DualityError};
use crate::format::{parse_graph, write_dot, write_faces, write_graph, GraphFile};
use crate::graph::{adhesion, dual_graph, trace_faces, Multigraph, RotationSystem};
use crate::hardness::{
    enumerate_assignments, gen_3partition_mpd, gen_self_dual_instance, solve_3partition, HardnessError,
    ThreePartitionInstance,
};
use crate::iso::canonical_form;
use crate::oracle::{biconnected_corpus, dual_set, planar_corpus, OracleError};
use crate::planarity::planar_embed;
use crate::spqr::{build_spqr, SpqrError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => 3,
            _ => 2,
        }
    }
}

impl From<DualityError> for CliError {
    fn from(e: DualityError) -> Self {
        match e {
            DualityError::Budget(b) => CliError::Budget(b),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Budget(b) => CliError::Budget(b),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<HardnessError> for CliError {
    fn from(e: HardnessError) -> Self {
        match e {
            HardnessError::Budget(b) => CliError::Budget(b),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SpqrError> for CliError {
    fn from(e: SpqrError) -> Self {
        match e {
            SpqrError::Budget(b) => CliError::Budget(b),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "dualis", version, about = "Planar duality of multigraphs via SPQR-trees")]
struct Cli {
    /// Step limit for enumerations.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,
    /// Seed for corpus sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dual graph of an embedded graph. Without a rotation in the file, a
    /// planar embedding is computed first.
    Dual {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Face boundaries of an embedded graph.
    Faces { graph: PathBuf },
    /// Planar embedding of a graph; exits 1 if there is none.
    Embed {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// SPQR-tree of a biconnected planar graph.
    Spqr { graph: PathBuf },
    /// Normalized dual SPQR-tree, built from the file's rotation or a
    /// computed one.
    DualSpqr { graph: PathBuf },
    /// Skeleton graph of the SPQR-tree.
    SkeletonGraph {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Whether the two graphs are mutually dual.
    TestDuality {
        g1: PathBuf,
        g2: PathBuf,
        /// Also print an embedding of the first graph whose dual is the second.
        #[arg(long)]
        witness: bool,
    },
    /// Whether a graph is isomorphic to one of its duals.
    SelfDual { graph: PathBuf },
    /// All duals up to isomorphism, by brute-force enumeration.
    EnumerateDuals { graph: PathBuf },
    /// Mutual-duality pair for a 3-Partition instance.
    #[command(name = "gen-3p")]
    Gen3p {
        instance: PathBuf,
        /// Replace loops and bridges by 4-wheels.
        #[arg(long)]
        simple: bool,
        #[arg(short, long, num_args = 2, value_names = ["G1", "G2"], required = true)]
        output: Vec<PathBuf>,
    },
    /// Decides the generated pair by enumerating star-to-face assignments.
    #[command(name = "verify-3p")]
    Verify3p {
        instance: PathBuf,
        /// Also print the number of assignments and a partition.
        #[arg(long)]
        verbose: bool,
    },
    /// Self-duality instance for a 3-Partition instance.
    GenSelfdual {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Glues a graph to its dual at a vertex and an incident face.
    Adhesion {
        graph: PathBuf,
        #[arg(long)]
        vertex: String,
        /// Face id as printed by `faces`.
        #[arg(long)]
        face: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Canonical corpus of small connected planar graphs.
    Corpus {
        #[arg(long)]
        max_edges: usize,
        /// Biconnected loopless graphs only.
        #[arg(long)]
        biconnected: bool,
        /// Keep a random sample of this size, drawn with `--seed`.
        #[arg(long)]
        sample: Option<usize>,
        /// Write one graph file per corpus member into this directory
        /// instead of printing canonical forms.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "dualis: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write_to(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn load_graph(path: &Path) -> Result<GraphFile, CliError> {
    parse_graph(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<ThreePartitionInstance, CliError> {
    ThreePartitionInstance::parse(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// The file's rotation, or a computed planar one.
fn embedded(file: GraphFile) -> Result<(Multigraph, RotationSystem), CliError> {
    let rotation = match file.rotation {
        Some(r) => r,
        None => planar_embed(&file.graph).map_err(|e| CliError::Input(e.to_string()))?,
    };
    Ok((file.graph, rotation))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

fn emit_or_write(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_to(p, text),
        None => emit(out, text),
    }
}

fn render(graph: &Multigraph, rotation: Option<&RotationSystem>, format: OutputFormat, name: &str) -> String {
    match format {
        OutputFormat::Text => write_graph(graph, rotation),
        OutputFormat::Dot => write_dot(graph, name),
    }
}

fn answer(out: &mut dyn Write, yes: bool) -> Result<i32, CliError> {
    emit(out, if yes { "YES\n" } else { "NO\n" })?;
    Ok(if yes { 0 } else { 1 })
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut budget = Budget::new(cli.budget);
    let format = cli.format;
    match &cli.command {
        Command::Dual { graph, output } => {
            let (g, rho) = embedded(load_graph(graph)?)?;
            let dual = dual_graph(&g, &rho).map_err(|e| CliError::Input(e.to_string()))?;
            emit_or_write(out, output.as_ref(), &render(&dual.graph, Some(&dual.rotation), format, "dual"))?;
        }
        Command::Faces { graph } => {
            let (g, rho) = embedded(load_graph(graph)?)?;
            let faces = trace_faces(&g, &rho).map_err(|e| CliError::Input(e.to_string()))?;
            emit(out, &write_faces(&g, &faces))?;
        }
        Command::Embed { graph, output } => {
            let file = load_graph(graph)?;
            match planar_embed(&file.graph) {
                Ok(rho) => emit_or_write(out, output.as_ref(), &render(&file.graph, Some(&rho), format, "G"))?,
                Err(crate::planarity::EmbedError::NonPlanar) => return answer(out, false),
                Err(e) => return Err(CliError::Input(e.to_string())),
            }
        }
        Command::Spqr { graph } => {
            let tree = build_spqr(&load_graph(graph)?.graph)?;
            emit(out, &if format == OutputFormat::Dot { tree.to_dot() } else { tree.dump() })?;
        }
        Command::DualSpqr { graph } => {
            let (g, rho) = embedded(load_graph(graph)?)?;
            let tree = build_spqr(&g)?.dualize(&rho)?.normalize();
            emit(out, &if format == OutputFormat::Dot { tree.to_dot() } else { tree.dump() })?;
        }
        Command::SkeletonGraph { graph, output } => {
            let tree = build_spqr(&load_graph(graph)?.graph)?;
            let sg = skeleton_graph(&tree)?;
            emit_or_write(out, output.as_ref(), &render(&sg.graph, None, format, "skeleton"))?;
        }
        Command::TestDuality { g1, g2, witness } => {
            let (a, b) = (load_graph(g1)?.graph, load_graph(g2)?.graph);
            let yes = mutual_duality(&a, &b)?;
            let code = answer(out, yes)?;
            if yes && *witness {
                let rho = witness_embedding(&a, &b, &mut budget)?
                    .ok_or_else(|| CliError::Input("no witness embedding found".into()))?;
                emit(out, &write_graph(&a, Some(&rho)))?;
            }
            return Ok(code);
        }
        Command::SelfDual { graph } => {
            return answer(out, graph_self_dual(&load_graph(graph)?.graph)?);
        }
        Command::EnumerateDuals { graph } => {
            let g = load_graph(graph)?.graph;
            let set = dual_set(&g, &mut budget)?;
            let mut text = format!("{} duals\n", set.len());
            for form in &set {
                text.push_str(form.as_str());
                text.push('\n');
            }
            emit(out, &text)?;
        }
        Command::Gen3p { instance, simple, output } => {
            let pair = gen_3partition_mpd(&load_instance(instance)?, *simple)?;
            write_to(&output[0], &render(&pair.g1, None, format, "G1"))?;
            write_to(&output[1], &render(&pair.g2, None, format, "G2"))?;
        }
        Command::Verify3p { instance, verbose } => {
            let inst = load_instance(instance)?;
            let v = enumerate_assignments(&inst, &mut budget)?;
            let code = answer(out, v.answer)?;
            if *verbose {
                let mut text = format!("assignments checked: {}\n", v.assignments_checked);
                if let Some(triples) = solve_3partition(&inst) {
                    for t in triples {
                        let vals: Vec<String> = t.iter().map(|&i| inst.a()[i].to_string()).collect();
                        text.push_str(&format!("triple {}\n", vals.join(" ")));
                    }
                }
                emit(out, &text)?;
            }
            return Ok(code);
        }
        Command::GenSelfdual { instance, output } => {
            let g = gen_self_dual_instance(&load_instance(instance)?)?;
            emit_or_write(out, output.as_ref(), &render(&g, None, format, "G"))?;
        }
        Command::Adhesion { graph, vertex, face, output } => {
            let (g, rho) = embedded(load_graph(graph)?)?;
            let v = g
                .vertex_by_name(vertex)
                .ok_or_else(|| CliError::Input(format!("unknown vertex `{vertex}`")))?;
            let f: usize = face
                .strip_prefix('f')
                .unwrap_or(face)
                .parse()
                .map_err(|_| CliError::Input(format!("bad face id `{face}`")))?;
            let glued = adhesion(&g, &rho, v, f).map_err(|e| CliError::Input(e.to_string()))?;
            emit_or_write(out, output.as_ref(), &render(&glued, None, format, "adhesion"))?;
        }
        Command::Corpus { max_edges, biconnected, sample, output } => {
            let mut corpus = if *biconnected { biconnected_corpus(*max_edges) } else { planar_corpus(*max_edges) };
            if let Some(k) = sample {
                let mut rng = StdRng::seed_from_u64(cli.seed);
                let mut idx: Vec<usize> = (0..corpus.len()).collect();
                idx.shuffle(&mut rng);
                idx.truncate(*k);
                idx.sort_unstable();
                corpus = idx.into_iter().map(|i| corpus[i].clone()).collect();
            }
            match output {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
                    for (i, g) in corpus.iter().enumerate() {
                        write_to(&dir.join(format!("g{i:04}.graph")), &write_graph(g, None))?;
                    }
                }
                None => {
                    let mut text = String::new();
                    for g in &corpus {
                        text.push_str(canonical_form(g).as_str());
                        text.push('\n');
                    }
                    emit(out, &text)?;
                }
            }
        }
    }
    Ok(0)
}
