//! Argument parsing and the subcommands.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use codecarta_core::glyph::{edge_styles, ScalingMode};
use codecarta_core::layout::{run_layout, LayoutSnapshot};
use codecarta_core::serializer::{deserialize, serialize};
use codecarta_core::view::full_view;
use codecarta_core::EntityGraph;
use codecarta_miner::{mine, MinerConfig};
use serde_json::json;

use crate::bundle::{bundle, write_files, Assets, StyleDocument};
use crate::config::StyleConfig;
use crate::error::{exit, AtStep, CliError, StepError};
use crate::synth::{synth, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "codecarta", version, about = "Turn a Rust workspace into an interactive diagram")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract the entity graph of a workspace.
    Mine {
        root: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        mining: MiningArgs,
    },
    /// Compute node positions for a graph document.
    Layout {
        graph: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Build the web bundle from a graph document and optional layout.
    Render {
        graph: PathBuf,
        /// Layout snapshot; computed when omitted.
        layout: Option<PathBuf>,
        /// Directory, or the HTML file with --single-file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        render: RenderArgs,
    },
    /// Mine, lay out and render in one go.
    Pipeline {
        root: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        mining: MiningArgs,
        #[command(flatten)]
        render: RenderArgs,
    },
    /// Generate a synthetic workspace and its ground-truth ledger.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        projects: usize,
        #[arg(long = "target-nodes")]
        target_nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "error-rate", default_value_t = 0.02)]
        error_rate: f64,
        #[arg(long = "warning-rate", default_value_t = 0.05)]
        warning_rate: f64,
    },
}

#[derive(Debug, Args)]
struct MiningArgs {
    /// Glob of source files to skip; repeatable.
    #[arg(long)]
    exclude: Vec<String>,
    /// Newline-delimited JSON diagnostics to attach.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long = "single-file")]
    single_file: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Style and layout configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_scaling)]
    scaling: Option<ScalingMode>,
}

fn parse_scaling(s: &str) -> Result<ScalingMode, String> {
    ScalingMode::parse(s).ok_or_else(|| format!("unknown scaling {s:?}; expected linear, log or sqrt"))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{e}");
            return exit::OK;
        }
        Err(e) => {
            let err = StepError::from(CliError::Usage(e.to_string().trim_end().to_string()));
            let _ = writeln!(stderr, "{}", err.report());
            return exit::USAGE;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => exit::OK,
        Err(err) => {
            let _ = writeln!(stderr, "{}", err.report());
            err.error.exit_code()
        }
    }
}

fn load_style(path: Option<&Path>) -> Result<StyleConfig, CliError> {
    path.map_or_else(|| Ok(StyleConfig::default()), StyleConfig::load)
}

fn read_graph(path: &Path) -> Result<EntityGraph, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    deserialize(&bytes).map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })
}

fn read_layout(path: &Path) -> Result<LayoutSnapshot, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    LayoutSnapshot::from_bytes(&bytes).map_err(|message| CliError::Input { path: path.to_path_buf(), message })
}

fn write_out(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            fs::write(path, bytes).map_err(|e| CliError::io(path, e))
        }
        None => stdout.write_all(bytes).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn summary(stdout: &mut dyn Write, value: serde_json::Value) {
    let _ = writeln!(stdout, "{value}");
}

/// Mines `root` into a graph.
pub fn mine_step(root: &Path, exclude: &[String], diagnostics: Option<&Path>, threads: Option<u32>) -> Result<EntityGraph, CliError> {
    let mut cfg = MinerConfig::new(root);
    cfg.exclude = exclude.to_vec();
    cfg.diagnostics = diagnostics.map(Path::to_path_buf);
    if let Some(n) = threads {
        cfg.threads = n as usize;
    }
    Ok(mine(&cfg)?)
}

/// Positions for every entity, with the relations the style enables.
pub fn layout_step(g: &EntityGraph, style: &StyleConfig, seed: u64) -> Result<LayoutSnapshot, CliError> {
    let cfg = style.layout();
    cfg.check().map_err(|e| CliError::Layout(e.to_string()))?;
    let relations = edge_styles(&style.relation_styles)
        .map_err(|e| CliError::Config(e.to_string()))?
        .into_iter()
        .filter(|s| s.enabled)
        .map(|s| s.relation_id);
    let view = full_view(g, relations);
    Ok(run_layout(g, &view, &cfg, seed).snapshot())
}

fn mining_args(m: &MiningArgs) -> (&[String], Option<&Path>, Option<u32>) {
    (&m.exclude, m.diagnostics.as_deref(), m.threads)
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), StepError> {
    match command {
        Command::Mine { root, out, mining } => {
            let (exclude, diagnostics, threads) = mining_args(&mining);
            let g = mine_step(&root, exclude, diagnostics, threads)?;
            let bytes = serialize(&g).map_err(|e| CliError::Mine(codecarta_miner::MineError::Invalid(e.to_string())))?;
            write_out(out.as_deref(), &bytes, stdout)?;
            if out.is_some() {
                summary(stdout, json!({"command": "mine", "nodes": g.entities.len(), "edges": g.edge_count()}));
            }
        }
        Command::Layout { graph, out, seed, config } => {
            let style = load_style(config.as_deref())?;
            let g = read_graph(&graph)?;
            let snapshot = layout_step(&g, &style, seed)?;
            write_out(out.as_deref(), &snapshot.to_bytes(), stdout)?;
            if out.is_some() {
                summary(
                    stdout,
                    json!({"command": "layout", "nodes": snapshot.positions.len(), "iterations": snapshot.iteration, "converged": snapshot.converged}),
                );
            }
        }
        Command::Render { graph, layout, out, render } => {
            let style = load_style(render.config.as_deref())?;
            let g = read_graph(&graph)?;
            let snapshot = match layout {
                Some(path) => read_layout(&path)?,
                None => layout_step(&g, &style, render.seed)?,
            };
            let default_out = if render.single_file { "index.html" } else { "site" };
            let out = out.unwrap_or_else(|| PathBuf::from(default_out));
            let written = render_step(&g, &snapshot, &style, &render, &out)?;
            summary(stdout, json!({"command": "render", "files": written}));
        }
        Command::Pipeline { root, out, mining, render } => {
            let style = load_style(render.config.as_deref()).at("config")?;
            let (exclude, diagnostics, threads) = mining_args(&mining);
            let g = mine_step(&root, exclude, diagnostics, threads).at("mine")?;
            let snapshot = layout_step(&g, &style, render.seed).at("layout")?;
            let mut written = Vec::new();
            if render.single_file {
                let graph_bytes = serialize(&g).map_err(|e| CliError::Bundle(e.to_string())).at("render")?;
                write_files(
                    &out,
                    &[
                        crate::bundle::OutputFile { path: "graph.json".into(), bytes: graph_bytes },
                        crate::bundle::OutputFile { path: "layout.json".into(), bytes: snapshot.to_bytes() },
                    ],
                )
                .at("render")?;
                written.extend(["graph.json".to_string(), "layout.json".to_string()]);
                written.extend(render_step(&g, &snapshot, &style, &render, &out.join("index.html")).at("render")?);
            } else {
                written.extend(render_step(&g, &snapshot, &style, &render, &out).at("render")?);
            }
            summary(
                stdout,
                json!({
                    "command": "pipeline",
                    "nodes": g.entities.len(),
                    "edges": g.edge_count(),
                    "iterations": snapshot.iteration,
                    "converged": snapshot.converged,
                    "files": written,
                }),
            );
        }
        Command::Synth { out, projects, target_nodes, seed, error_rate, warning_rate } => {
            let cfg = SynthConfig { projects, target_nodes, seed, error_rate, warning_rate };
            let fixture = synth(&cfg)?;
            fixture.write(&out)?;
            summary(stdout, json!({"command": "synth", "files": fixture.files.len(), "ledger": fixture.ledger}));
        }
    }
    Ok(())
}

/// Bundles into `out`: a directory, or the single HTML file. Returns the
/// written file names.
fn render_step(
    g: &EntityGraph,
    snapshot: &LayoutSnapshot,
    style: &StyleConfig,
    render: &RenderArgs,
    out: &Path,
) -> Result<Vec<String>, CliError> {
    let doc = StyleDocument::new(g, &style.glyphs(render.scaling), &style.relation_styles)?;
    let files = bundle(g, snapshot, &doc, &Assets::prebuilt(), render.single_file)?;
    if render.single_file {
        let page = &files[0];
        write_out(Some(out), &page.bytes, &mut std::io::sink())?;
        return Ok(vec![out.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())]);
    }
    write_files(out, &files)?;
    Ok(files.iter().map(|f| f.path.to_string_lossy().into_owned()).collect())
}
