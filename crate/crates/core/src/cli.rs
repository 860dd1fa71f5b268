//! Command-line front end.
//!
//! Every subcommand resolves a [`RunConfig`] from its flags, an optional
//! TOML file given with `--config`, and defaults, in that order of
//! precedence. The resolved config is echoed into the metadata header of
//! each file written. Outputs are computed in full before anything is
//! written, so a failing run leaves no output behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::annotations::{
    compute_edge_lengths, parse_annotations, parse_lengths, stats_to_lengths, AveragingMode,
};
use crate::document::{to_pretty_json, Metadata};
use crate::error::{Error, Result};
use crate::loss::{evaluate, parse_samples, LossReport, DEFAULT_GAMMA, DEFAULT_SCALE_SPREAD};
use crate::render::{emit_dot, emit_svg, Layout};
use crate::skeleton::{attach_lengths, parse_skeleton, Skeleton, WeightedPoseGraph};
use crate::weights::{build_weight_table, compare_schemes, Scheme, WeightTable, DEFAULT_RADIUS};

#[derive(Debug, Parser)]
#[command(
    name = "pose-weights",
    version,
    about = "Keypoint and connection training weights for pose skeletons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average connection lengths over an annotation corpus.
    Ingest(RunArgs),
    /// Compute the weight table of one scheme.
    Weights(RunArgs),
    /// Compute and summarize all four schemes.
    Compare(RunArgs),
    /// Write Graphviz and SVG renderings of a weight table.
    Render(RunArgs),
    /// Evaluate the weighted field losses on a sample file.
    LossDemo(RunArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Ingest(a) => ("ingest", a),
            Command::Weights(a) => ("weights", a),
            Command::Compare(a) => ("compare", a),
            Command::Render(a) => ("render", a),
            Command::LossDemo(a) => ("loss-demo", a),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with defaults for any of the options below.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Skeleton document.
    #[arg(long, value_name = "PATH")]
    pub skeleton: Option<PathBuf>,
    /// COCO-style keypoint annotations.
    #[arg(long, value_name = "PATH")]
    pub annotations: Option<PathBuf>,
    /// Edge-length document (ingest output or hand-written lengths).
    #[arg(long, value_name = "PATH")]
    pub lengths: Option<PathBuf>,
    /// local, global, equal or crafted.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Ego-graph radius in hops; 0 means global.
    #[arg(long)]
    pub radius: Option<usize>,
    /// raw or scale-normalized.
    #[arg(long)]
    pub mode: Option<String>,
    /// Length used for connections no annotation covers.
    #[arg(long)]
    pub fallback: Option<f64>,
    /// Output file; render writes `<out>.dot` and `<out>.svg`.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Template-pose layout for rendering.
    #[arg(long, value_name = "PATH")]
    pub layout: Option<PathBuf>,
    /// Existing weight table (render, loss-demo).
    #[arg(long, value_name = "PATH")]
    pub weights: Option<PathBuf>,
    /// Field samples (loss-demo).
    #[arg(long, value_name = "PATH")]
    pub samples: Option<PathBuf>,
    /// Focal exponent.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Fixed spread of the scale loss.
    #[arg(long)]
    pub scale_spread: Option<f64>,
    /// Seed of the force-directed fallback layout.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write renderings next to the weight table (weights).
    #[arg(long)]
    pub render: bool,
}

/// Optional fields of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub skeleton: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub lengths: Option<PathBuf>,
    pub scheme: Option<String>,
    pub radius: Option<usize>,
    pub mode: Option<String>,
    pub fallback: Option<f64>,
    pub out: Option<PathBuf>,
    pub layout: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub samples: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub scale_spread: Option<f64>,
    pub seed: Option<u64>,
    pub render: Option<bool>,
}

/// Effective configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub skeleton: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub lengths: Option<PathBuf>,
    pub scheme: String,
    pub radius: usize,
    pub mode: String,
    pub fallback: Option<f64>,
    pub out: Option<PathBuf>,
    pub layout: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub samples: Option<PathBuf>,
    pub gamma: f64,
    pub scale_spread: f64,
    pub seed: u64,
    pub render: bool,
}

impl RunConfig {
    /// Merges flags over the config file over defaults.
    pub fn resolve(command: &str, args: &RunArgs) -> Result<RunConfig> {
        let file = match &args.config {
            Some(path) => toml::from_str::<ConfigFile>(&read(path)?)
                .map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))?,
            None => ConfigFile::default(),
        };
        let config = RunConfig {
            command: command.to_owned(),
            skeleton: args.skeleton.clone().or(file.skeleton),
            annotations: args.annotations.clone().or(file.annotations),
            lengths: args.lengths.clone().or(file.lengths),
            scheme: args
                .scheme
                .clone()
                .or(file.scheme)
                .unwrap_or_else(|| "local".to_owned()),
            radius: args.radius.or(file.radius).unwrap_or(DEFAULT_RADIUS),
            mode: args
                .mode
                .clone()
                .or(file.mode)
                .unwrap_or_else(|| "raw".to_owned()),
            fallback: args.fallback.or(file.fallback),
            out: args.out.clone().or(file.out),
            layout: args.layout.clone().or(file.layout),
            weights: args.weights.clone().or(file.weights),
            samples: args.samples.clone().or(file.samples),
            gamma: args.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA),
            scale_spread: args
                .scale_spread
                .or(file.scale_spread)
                .unwrap_or(DEFAULT_SCALE_SPREAD),
            seed: args.seed.or(file.seed).unwrap_or(0),
            render: args.render || file.render.unwrap_or(false),
        };
        // surface bad values before any work is done
        config.scheme()?;
        config.mode()?;
        Ok(config)
    }

    /// The scheme after applying the radius (`local` with radius 0 is global).
    pub fn scheme(&self) -> Result<Scheme> {
        Ok(match self.scheme.parse::<Scheme>()? {
            Scheme::Local { .. } => Scheme::local_or_global(self.radius),
            other => other,
        })
    }

    pub fn mode(&self) -> Result<AveragingMode> {
        self.mode.parse()
    }

    fn metadata(&self) -> Metadata {
        Metadata::new(serde_json::to_value(self).expect("config serializes"))
    }

    fn required<'a>(&self, value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::Config(format!("`{}` requires --{flag}", self.command)))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_all(files: &[(PathBuf, String)]) -> Result<()> {
    for (path, contents) in files {
        fs::write(path, contents).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

fn load_skeleton(config: &RunConfig) -> Result<Skeleton> {
    parse_skeleton(&read(config.required(&config.skeleton, "skeleton")?)?)
}

/// Builds the length-weighted graph from exactly one of annotations or
/// a lengths document.
pub fn load_graph(config: &RunConfig, skeleton: Skeleton) -> Result<WeightedPoseGraph> {
    let lengths = match (&config.annotations, &config.lengths) {
        (Some(a), None) => {
            let corpus = parse_annotations(&read(a)?, &skeleton)?;
            let stats = compute_edge_lengths(&corpus, &skeleton, config.mode()?)?;
            stats_to_lengths(&stats, &skeleton, config.fallback)?
        }
        (None, Some(l)) => parse_lengths(&read(l)?, &skeleton, config.fallback)?,
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "give either --annotations or --lengths, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Config(format!(
                "`{}` requires --annotations or --lengths",
                config.command
            )))
        }
    };
    attach_lengths(skeleton, &lengths)
}

fn table_for(config: &RunConfig, graph: &WeightedPoseGraph) -> Result<WeightTable> {
    match &config.weights {
        Some(path) => {
            if config.annotations.is_some() || config.lengths.is_some() {
                return Err(Error::Config(
                    "--weights cannot be combined with --annotations or --lengths".into(),
                ));
            }
            WeightTable::from_document(&read(path)?, graph.skeleton())
        }
        None => build_weight_table(graph, config.scheme()?),
    }
}

/// Graph for commands that may take a precomputed table: lengths only
/// matter for the layout fallback, so unit lengths stand in.
fn graph_for(config: &RunConfig, skeleton: Skeleton) -> Result<WeightedPoseGraph> {
    if config.weights.is_some() && config.annotations.is_none() && config.lengths.is_none() {
        WeightedPoseGraph::uniform(skeleton, 1.0)
    } else {
        load_graph(config, skeleton)
    }
}

fn renderings(
    config: &RunConfig,
    graph: &WeightedPoseGraph,
    table: &WeightTable,
    out: &Path,
    metadata: &Metadata,
) -> Result<Vec<(PathBuf, String)>> {
    let (layout, metadata) = match &config.layout {
        Some(path) => (
            Layout::parse(&read(path)?, graph.skeleton())?,
            metadata.clone(),
        ),
        None => (
            Layout::force_directed(graph, config.seed),
            metadata
                .clone()
                .with_note(format!("force-directed layout, seed {}", config.seed)),
        ),
    };
    Ok(vec![
        (
            out.with_extension("dot"),
            emit_dot(graph, table, Some(&metadata))?,
        ),
        (
            out.with_extension("svg"),
            emit_svg(graph, table, &layout, Some(&metadata))?,
        ),
    ])
}

fn cmd_ingest(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let out = config.required(&config.out, "out")?;
    if config.lengths.is_some() {
        return Err(Error::Config(
            "`ingest` reads --annotations, not --lengths".into(),
        ));
    }
    let skeleton = load_skeleton(config)?;
    let corpus = parse_annotations(
        &read(config.required(&config.annotations, "annotations")?)?,
        &skeleton,
    )?;
    let stats = compute_edge_lengths(&corpus, &skeleton, config.mode()?)?;
    // applies the uncovered-edge policy
    stats_to_lengths(&stats, &skeleton, config.fallback)?;

    let mut metadata = config.metadata();
    let uncovered = stats.uncovered();
    if !uncovered.is_empty() {
        metadata = metadata.with_note(format!(
            "{} uncovered connections take the fallback length",
            uncovered.len()
        ));
    }
    let doc = stats.to_document(&skeleton, &metadata)?;
    write_all(&[(out.to_owned(), doc)])?;

    let _ = writeln!(
        stdout,
        "covered {}/{} connections from {} instances ({})",
        stats.covered_count(),
        stats.edges.len(),
        stats.instances,
        stats.mode
    );
    for i in uncovered {
        let (a, b) = skeleton.edge_names(i);
        let _ = writeln!(stdout, "uncovered: {a} - {b}");
    }
    Ok(())
}

fn cmd_weights(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let out = config.required(&config.out, "out")?;
    let graph = load_graph(config, load_skeleton(config)?)?;
    let table = build_weight_table(&graph, config.scheme()?)?;
    let metadata = config.metadata();
    let mut files = vec![(
        out.to_owned(),
        table.to_document(graph.skeleton(), &metadata)?,
    )];
    if config.render {
        files.extend(renderings(config, &graph, &table, out, &metadata)?);
    }
    write_all(&files)?;

    let s = table.vertex_summary();
    let _ = writeln!(
        stdout,
        "{}: keypoint weights {:.4} to {:.4} (ratio {:.3})",
        table.scheme, s.min, s.max, s.ratio
    );
    Ok(())
}

fn cmd_compare(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let out = config.required(&config.out, "out")?;
    let graph = load_graph(config, load_skeleton(config)?)?;
    let comparison = compare_schemes(&graph, config.radius)?;
    write_all(&[(
        out.to_owned(),
        comparison.to_document(graph.skeleton(), &config.metadata())?,
    )])?;
    let _ = write!(stdout, "{}", comparison.format_table());
    Ok(())
}

fn cmd_render(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let out = config.required(&config.out, "out")?;
    let graph = graph_for(config, load_skeleton(config)?)?;
    let table = table_for(config, &graph)?;
    let files = renderings(config, &graph, &table, out, &config.metadata())?;
    write_all(&files)?;
    for (path, _) in &files {
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct LossDocument<'a> {
    metadata: Metadata,
    skeleton: &'a str,
    scheme: String,
    report: &'a LossReport,
}

fn cmd_loss_demo(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let out = config.required(&config.out, "out")?;
    let samples_path = config.required(&config.samples, "samples")?;
    let graph = graph_for(config, load_skeleton(config)?)?;
    let table = table_for(config, &graph)?;
    let samples = parse_samples(&read(samples_path)?, graph.skeleton())?;
    let report = evaluate(&samples, &table, config.gamma, config.scale_spread)?;
    let doc = LossDocument {
        metadata: config
            .metadata()
            .with_note("reference loss forms: focal BCE, Laplace NLL without constants"),
        skeleton: graph.skeleton().name(),
        scheme: table.scheme.to_string(),
        report: &report,
    };
    write_all(&[(out.to_owned(), to_pretty_json(&doc))])?;
    let _ = writeln!(
        stdout,
        "intensity loss {:.6} (unweighted {:.6}); association loss {:.6} (unweighted {:.6})",
        report.intensity_total,
        report.intensity_unweighted,
        report.association_total,
        report.association_unweighted
    );
    Ok(())
}

/// Runs one parsed command line. Human-readable summaries go to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let (name, args) = cli.command.parts();
    let config = RunConfig::resolve(name, args)?;
    match cli.command {
        Command::Ingest(_) => cmd_ingest(&config, stdout),
        Command::Weights(_) => cmd_weights(&config, stdout),
        Command::Compare(_) => cmd_compare(&config, stdout),
        Command::Render(_) => cmd_render(&config, stdout),
        Command::LossDemo(_) => cmd_loss_demo(&config, stdout),
    }
}
