//! `chartseam`: deconstruct SVG charts, link them, and replay interaction scripts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chartseam::data::DataTable;
use chartseam::deconstruct::SCHEMA;
use chartseam::interact::{parse_script, Session, SessionOptions};
use chartseam::link::{build_link_graph, EXTERNAL};
use chartseam::query::INDEX_FIELD;
use chartseam::session::{load_manifest, ChartView, SessionManifest};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

#[derive(Parser)]
#[command(name = "chartseam", version, about = "Recover data from static SVG charts, link views, and replay interactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chart metadata JSON per chart.
    Deconstruct(Inputs),
    /// Link graph JSON across all charts and the external table.
    Link(Inputs),
    /// Recovered data table per chart.
    ExportData {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Replays an interaction script and writes edited SVGs, selections, and tooltips.
    Replay {
        #[command(flatten)]
        inputs: Inputs,
        /// JSON array of interaction events.
        #[arg(long)]
        script: PathBuf,
        /// Also write a snapshot of every view after each event.
        #[arg(long)]
        every_step: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Inputs {
    /// A session manifest (.json) or one or more SVG files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// External data table (CSV or JSON).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Matching tolerance as a fraction of each field's range.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Maximum number of transform candidates tried per pair.
    #[arg(long)]
    budget: Option<usize>,
    /// Opacity of unselected marks.
    #[arg(long)]
    dim_opacity: Option<f64>,
    /// Output directory; stdout when omitted (replay requires it).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Inputs {
    fn manifest(&self) -> Result<SessionManifest> {
        let is_manifest = self.inputs.len() == 1 && self.inputs[0].extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut m = if is_manifest {
            SessionManifest::load(&self.inputs[0])?
        } else {
            SessionManifest {
                charts: self.inputs.clone(),
                data: None,
                options: Default::default(),
            }
        };
        if self.data.is_some() {
            m.data = self.data.clone();
        }
        if self.epsilon.is_some() {
            m.options.epsilon = self.epsilon;
        }
        if self.budget.is_some() {
            m.options.budget = self.budget;
        }
        if self.dim_opacity.is_some() {
            m.options.dim_opacity = self.dim_opacity;
        }
        m.validate()?;
        Ok(m)
    }
}

/// Whether any chart fell back to a degraded inference.
struct Degraded(bool);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Degraded(false)) => ExitCode::SUCCESS,
        Ok(Degraded(true)) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {}", message(&e));
            ExitCode::from(1)
        }
    }
}

/// The error chain, skipping causes already quoted by their parent.
fn message(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn run(command: Command) -> Result<Degraded> {
    match command {
        Command::Deconstruct(inputs) => deconstruct(&inputs),
        Command::Link(inputs) => link(&inputs),
        Command::ExportData { inputs, format } => export_data(&inputs, format),
        Command::Replay { inputs, script, every_step } => replay(&inputs, &script, every_step),
    }
}

fn load(inputs: &Inputs) -> Result<(SessionManifest, Vec<ChartView>, Option<DataTable>)> {
    let m = inputs.manifest()?;
    let (views, external) = load_manifest(&m)?;
    Ok((m, views, external))
}

fn degraded(views: &[ChartView]) -> Degraded {
    Degraded(views.iter().any(|v| v.meta.degraded))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn pretty(v: &Json) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn deconstruct(inputs: &Inputs) -> Result<Degraded> {
    let (_, views, _) = load(inputs)?;
    let docs: Vec<(String, Json)> = views
        .iter()
        .map(|v| {
            (
                v.id.clone(),
                json!({
                    "schema": SCHEMA,
                    "view": v.id,
                    "metadata": v.meta.to_json(),
                    "diagnostics": v.meta.diagnostics,
                }),
            )
        })
        .collect();
    match &inputs.out {
        Some(dir) => {
            for (id, doc) in &docs {
                write(&dir.join(format!("{id}.metadata.json")), pretty(doc).as_bytes())?;
            }
        }
        None if docs.len() == 1 => print!("{}", pretty(&docs[0].1)),
        None => print!("{}", pretty(&Json::Array(docs.into_iter().map(|d| d.1).collect()))),
    }
    Ok(degraded(&views))
}

fn link(inputs: &Inputs) -> Result<Degraded> {
    let (m, views, external) = load(inputs)?;
    let tables: Vec<DataTable> = views.iter().map(|v| v.table.clone()).collect();
    let ext: Vec<DataTable> = external.into_iter().collect();
    let graph = build_link_graph(&tables, &ext, &m.link_options());
    let doc = pretty(&graph.to_json());
    match &inputs.out {
        Some(dir) => write(&dir.join("link_graph.json"), doc.as_bytes())?,
        None => print!("{doc}"),
    }
    Ok(degraded(&views))
}

fn export_data(inputs: &Inputs, format: Format) -> Result<Degraded> {
    let (_, views, _) = load(inputs)?;
    let mut outputs = Vec::new();
    for v in &views {
        let body = match format {
            Format::Csv => v.table.to_csv()?,
            Format::Json => pretty(&v.table.to_json()),
        };
        let ext = match format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        outputs.push((format!("{}.{ext}", v.id), body));
    }
    match &inputs.out {
        Some(dir) => {
            for (name, body) in &outputs {
                write(&dir.join(name), body.as_bytes())?;
            }
        }
        None if outputs.len() == 1 => print!("{}", outputs[0].1),
        None => bail!("export-data with several charts needs --out"),
    }
    Ok(degraded(&views))
}

/// Selected live rows of a table with their row index.
fn selection_csv(t: &DataTable) -> Result<String> {
    let mut out = DataTable::new(
        t.name.clone(),
        std::iter::once(chartseam::data::Field::new(INDEX_FIELD, chartseam::value::FieldType::Number))
            .chain(t.fields.iter().cloned())
            .collect(),
    );
    for r in t.selected_rows() {
        let mut row = vec![chartseam::value::Value::Number(r as f64)];
        row.extend(t.row(r));
        out.push_row(row, None)?;
    }
    Ok(out.to_csv()?)
}

fn replay(inputs: &Inputs, script: &Path, every_step: bool) -> Result<Degraded> {
    let Some(dir) = &inputs.out else { bail!("replay needs --out DIR") };
    let (m, views, external) = load(inputs)?;
    let flag = degraded(&views);
    let src = fs::read_to_string(script).with_context(|| format!("reading {}", script.display()))?;
    let events = parse_script(&src).with_context(|| format!("{}", script.display()))?;
    let defaults = SessionOptions::default();
    let options = SessionOptions {
        dim_opacity: m.options.dim_opacity.unwrap_or(defaults.dim_opacity),
        link: m.link_options(),
    };
    let mut session = Session::new(views, external, options);
    let ids: Vec<String> = session.views.iter().map(|v| v.id().to_string()).collect();
    let mut log = Vec::new();
    for (i, e) in events.iter().enumerate() {
        let out = session.apply(e).with_context(|| format!("event {i}"))?;
        log.push(json!({
            "event": i,
            "chart": e.chart,
            "branch": out.branch,
            "tooltips": out.tooltips,
        }));
        if every_step {
            for id in &ids {
                let path = dir.join("steps").join(format!("{i:03}")).join(format!("{id}.svg"));
                write(&path, &session.render(id)?)?;
            }
        }
    }
    for id in &ids {
        write(&dir.join(format!("{id}.svg")), &session.render(id)?)?;
        let t = &session.view(id).expect("listed view").chart.table;
        write(&dir.join("selections").join(format!("{id}.csv")), selection_csv(t)?.as_bytes())?;
    }
    if let Some(t) = &session.external {
        write(&dir.join("selections").join(format!("{EXTERNAL}.csv")), selection_csv(t)?.as_bytes())?;
    }
    let tooltips = json!({ "schema": SCHEMA, "events": log });
    write(&dir.join("tooltips.json"), pretty(&tooltips).as_bytes())?;
    Ok(flag)
}
