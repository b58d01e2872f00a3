//! `msvp` — multiscale community detection from the command line.

mod error;
mod io;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use msvp::harness::{best_of_restarts, time_scan, Restarts, ScanRecord, TimeGrid};
use msvp::metrics::{
    nmi, sankey_links, uncertainty_coefficient, variation_of_information, MetricsError,
};
use msvp::spectral::{
    build_embedding, decompose_modularity_matrix, decompose_transition, EmbeddingMode,
};
use msvp::vp::VPConfig;
use serde::Serialize;

use crate::error::CliError;
use crate::report::{GraphDigest, PartitionRecord, RunReport, TOOL_VERSION};

#[derive(Parser)]
#[command(
    name = "msvp",
    version,
    about = "Markov Stability community detection by vector partitioning"
)]
#[command(
    after_help = "Exit codes: 0 success, 2 invalid arguments, 3 I/O failure, \
4 invalid graph or partition file, 5 node-count mismatch, 6 eigensolver or optimiser failure, \
7 report serialisation failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigendecompose the transition or modularity matrix; print eigenvalues, dump the basis as JSON.
    Decompose {
        /// 0-based edge list: `i j [w]` per line.
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Source::Transition)]
        source: Source,
        /// Where to write the basis (JSON).
        #[arg(long)]
        output: PathBuf,
    },
    /// Optimise a single partition.
    Partition {
        graph: PathBuf,
        #[command(flatten)]
        embed: EmbedArgs,
        /// Markov time (exponential) or resolution (linearised); ignored for modularity.
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Optimise over a geometric grid of Markov times.
    Scan {
        graph: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        tmin: f64,
        #[arg(long, default_value_t = 100.0)]
        tmax: f64,
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
        npoints: u64,
        #[command(flatten)]
        embed: EmbedArgs,
        /// Ground-truth partition file; adds NMI and uncertainty to each record.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare two partitions (A is treated as the truth).
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Write group-to-group flow counts (JSON) here.
        #[arg(long)]
        sankey: Option<PathBuf>,
    },
}

#[derive(Args, Serialize)]
struct EmbedArgs {
    #[arg(long, value_enum, default_value_t = Mode::Exponential)]
    mode: Mode,
    /// Embedding dimension; defaults to n − 1 (exact).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    dim: Option<u64>,
    /// Optimiser runs per point; the best objective is kept.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    restarts: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Source {
    Transition,
    Modularity,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Exponential,
    #[value(alias = "linearized")]
    Linearised,
    Modularity,
}

impl From<Mode> for EmbeddingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exponential => EmbeddingMode::Exponential,
            Mode::Linearised => EmbeddingMode::Linearised,
            Mode::Modularity => EmbeddingMode::Modularity,
        }
    }
}

impl EmbedArgs {
    fn dim_for(&self, n: usize) -> usize {
        self.dim.map_or(n.saturating_sub(1), |d| d as usize)
    }

    fn restarts(&self) -> Restarts {
        Restarts {
            count: self.restarts as usize,
            seed: self.seed,
        }
    }
}

#[derive(Serialize)]
struct PartitionParams<'a> {
    command: &'static str,
    graph: &'a Path,
    #[serde(flatten)]
    embed: &'a EmbedArgs,
    /// `None` when the mode does not use it.
    time: Option<f64>,
}

#[derive(Serialize)]
struct ScanParams<'a> {
    command: &'static str,
    graph: &'a Path,
    tmin: f64,
    tmax: f64,
    npoints: u64,
    #[serde(flatten)]
    embed: &'a EmbedArgs,
    truth: Option<&'a Path>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Decompose {
            graph,
            source,
            output,
        } => cmd_decompose(&graph, source, &output),
        Command::Partition {
            graph,
            embed,
            time,
            output,
        } => cmd_partition(&graph, &embed, time, output.as_deref()),
        Command::Scan {
            graph,
            tmin,
            tmax,
            npoints,
            embed,
            truth,
            output,
        } => cmd_scan(
            &graph,
            tmin,
            tmax,
            npoints,
            &embed,
            truth.as_deref(),
            output.as_deref(),
        ),
        Command::Compare { a, b, sankey } => cmd_compare(&a, &b, sankey.as_deref()),
    }
}

/// Six decimals, with negative zero printed as zero.
fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Writes one line to stdout, reporting a closed pipe as an error rather than
/// panicking.
fn say(line: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn emit(bytes: Vec<u8>, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => io::write_atomic(path, &bytes),
        None => say(&String::from_utf8_lossy(&bytes)),
    }
}

fn cmd_decompose(graph: &Path, source: Source, output: &Path) -> Result<(), CliError> {
    let g = io::read_graph(graph)?;
    let basis = match source {
        Source::Transition => decompose_transition(&g)?,
        Source::Modularity => decompose_modularity_matrix(&g)?,
    };
    io::write_atomic(output, &serde_json::to_vec_pretty(&basis)?)?;
    for &value in basis.eigenvalues() {
        say(&fmt6(value))?;
    }
    Ok(())
}

fn cmd_partition(
    graph: &Path,
    embed: &EmbedArgs,
    time: f64,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let start = Instant::now();
    let g = io::read_graph(graph)?;
    let mode = EmbeddingMode::from(embed.mode);
    let basis = match mode {
        EmbeddingMode::Modularity => decompose_modularity_matrix(&g)?,
        _ => decompose_transition(&g)?,
    };
    let emb = build_embedding(&basis, mode, time, embed.dim_for(g.node_count()))?;
    let outcome = best_of_restarts(&emb, &VPConfig::default(), embed.restarts())?;
    let record = PartitionRecord {
        record: ScanRecord {
            time: emb.time(),
            mode,
            dim: emb.dim(),
            num_communities: outcome.partition.num_groups(),
            partition: outcome.partition,
            objective: outcome.objective,
            nmi: None,
            uncertainty: None,
            vi_prev: None,
        },
        diagnostics: outcome.diagnostics,
    };
    let report = RunReport {
        version: TOOL_VERSION,
        graph: GraphDigest::of(&g),
        params: PartitionParams {
            command: "partition",
            graph,
            embed,
            time: (mode != EmbeddingMode::Modularity).then_some(time),
        },
        records: vec![record],
        timing_ms: start.elapsed().as_millis() as u64,
    };
    emit(serde_json::to_vec_pretty(&report)?, output)
}

fn cmd_scan(
    graph: &Path,
    tmin: f64,
    tmax: f64,
    npoints: u64,
    embed: &EmbedArgs,
    truth: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let start = Instant::now();
    let g = io::read_graph(graph)?;
    let truth_partition = truth.map(io::read_partition).transpose()?;
    if let Some(t) = &truth_partition {
        if t.len() != g.node_count() {
            return Err(MetricsError::SizeMismatch {
                left: t.len(),
                right: g.node_count(),
            }
            .into());
        }
    }
    let grid = TimeGrid::new(tmin, tmax, npoints as usize)?;
    let records = time_scan(
        &g,
        &grid,
        embed.mode.into(),
        embed.dim_for(g.node_count()),
        &VPConfig::default(),
        embed.restarts(),
        truth_partition.as_ref(),
    )?;
    let report = RunReport {
        version: TOOL_VERSION,
        graph: GraphDigest::of(&g),
        params: ScanParams {
            command: "scan",
            graph,
            tmin,
            tmax,
            npoints,
            embed,
            truth,
        },
        records,
        timing_ms: start.elapsed().as_millis() as u64,
    };
    emit(serde_json::to_vec_pretty(&report)?, output)
}

fn cmd_compare(a: &Path, b: &Path, sankey: Option<&Path>) -> Result<(), CliError> {
    let truth = io::read_partition(a)?;
    let computed = io::read_partition(b)?;
    say(&format!("nmi {}", fmt6(nmi(&truth, &computed)?)))?;
    say(&format!(
        "uncertainty {}",
        fmt6(uncertainty_coefficient(&truth, &computed)?)
    ))?;
    say(&format!(
        "vi {}",
        fmt6(variation_of_information(&truth, &computed)?)
    ))?;
    if let Some(path) = sankey {
        io::write_atomic(
            path,
            &serde_json::to_vec_pretty(&sankey_links(&truth, &computed)?)?,
        )?;
    }
    Ok(())
}
