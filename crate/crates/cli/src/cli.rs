//! Command-line front end.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use greenflops_core::analysis::{
    self, render, render_json, AnalysisRequest, CompareRequest, CountRange, CurveRequest, Format,
    HardwareRef, NetworkRef, SortKey,
};
use greenflops_core::error::ErrorBody;
use greenflops_core::hardware::{DataType, ProfileDb};
use greenflops_core::spec_io::parse_profiles;
use greenflops_core::{parse_spec, Error};

use crate::service::{self, AppState};

#[derive(Debug, Parser)]
#[command(name = "greenflops", version, about = "Static FLOPs, energy and carbon analysis of neural networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-layer cost, training energy and carbon footprint of one network.
    Analyze {
        /// `.nnspec` file, `zoo:<id>`, or `-` for standard input.
        spec: Option<String>,
        /// Comma-separated prediction counts for a CO2 curve in the report.
        #[arg(long, value_delimiter = ',')]
        predictions: Option<Vec<u64>>,
        #[arg(long)]
        include_training: bool,
        #[command(flatten)]
        common: Common,
    },
    /// One row per network: weights, FLOPs, training energy and CO2.
    Compare {
        specs: Vec<String>,
        #[arg(long, value_parser = parse_sort_key)]
        sort_by: Option<SortKey>,
        #[arg(long)]
        descending: bool,
        #[arg(long)]
        fail_fast: bool,
        #[command(flatten)]
        common: Common,
    },
    /// CO2 against number of predictions.
    Curve {
        spec: Option<String>,
        /// Explicit comma-separated counts.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to", "per_decade"])]
        counts: Option<Vec<u64>>,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
        #[arg(long)]
        per_decade: Option<u32>,
        /// Add the one-off training footprint to every point.
        #[arg(long)]
        include_training: bool,
        #[command(flatten)]
        common: Common,
    },
    /// The hardware profile database.
    Hardware {
        #[command(subcommand)]
        action: ListOrShow,
        #[command(flatten)]
        out: OutputArgs,
        /// Extra `.hwspec` files; profiles with an existing id replace it.
        #[arg(long = "profiles", value_name = "FILE", global = true)]
        profiles: Vec<PathBuf>,
    },
    /// The bundled example networks.
    Zoo {
        #[command(subcommand)]
        action: ListOrShow,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the JSON HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        #[arg(long = "profiles", value_name = "FILE")]
        profiles: Vec<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ListOrShow {
    List,
    Show { id: String },
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, global = true, default_value = "table", value_parser = parse_format)]
    pub format: Format,
    /// Write data here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

/// Flags shared by analyze, compare and curve. Each one that is given
/// replaces the corresponding field of the request.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// A JSON request body, as accepted by the HTTP service.
    #[arg(long, value_name = "FILE")]
    pub request: Option<PathBuf>,
    #[arg(long)]
    pub hardware: Option<String>,
    #[arg(long = "profiles", value_name = "FILE")]
    pub profiles: Vec<PathBuf>,
    #[arg(long, value_parser = parse_dtype)]
    pub dtype: Option<DataType>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub epochs: Option<u64>,
    #[arg(long)]
    pub backward_multiplier: Option<f64>,
    /// Grams CO2eq per kWh.
    #[arg(long)]
    pub carbon_intensity: Option<f64>,
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long)]
    pub clock_hz: Option<f64>,
    #[arg(long)]
    pub cores: Option<u64>,
    /// Efficiency in FLOPS per watt, replacing the profile's.
    #[arg(long)]
    pub efficiency: Option<f64>,
    /// Reject unknown keys in `.nnspec` files instead of warning.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_dtype(s: &str) -> Result<DataType, String> {
    s.parse()
}

fn parse_sort_key(s: &str) -> Result<SortKey, String> {
    s.parse()
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn read_bytes(path: &str) -> Result<Vec<u8>, Error> {
    if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| io_error(Path::new("<stdin>"), e))?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| io_error(Path::new(path), e))
    }
}

/// `zoo:<id>`, `-`, or a path to a `.nnspec` file.
pub fn network_ref(arg: &str) -> Result<NetworkRef, Error> {
    if let Some(id) = arg.strip_prefix("zoo:") {
        return Ok(NetworkRef::Zoo(id.to_string()));
    }
    let bytes = read_bytes(arg)?;
    String::from_utf8(bytes)
        .map(NetworkRef::Text)
        .map_err(|e| parse_spec(e.as_bytes()).expect_err("invalid UTF-8 never parses").into())
}

fn load_db(extra: &[PathBuf]) -> Result<ProfileDb, Error> {
    let mut db = ProfileDb::builtin().clone();
    for path in extra {
        let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
        db.extend(parse_profiles(&bytes)?.profiles);
    }
    Ok(db)
}

fn read_request<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Request(e.to_string()))
}

fn missing_network() -> Error {
    Error::Request("no network given: pass a spec file, zoo:<id>, or --request".into())
}

/// Applies every flag that was given on top of a request.
macro_rules! apply_common {
    ($req:expr, $c:expr) => {{
        let req = &mut $req;
        let c = $c;
        if let Some(h) = &c.hardware {
            req.hardware = HardwareRef::Id(h.clone());
        }
        if let Some(d) = c.dtype {
            req.dtype = d;
        }
        if let Some(v) = c.samples {
            req.training.training_samples = v;
        }
        if let Some(v) = c.epochs {
            req.training.epochs = v;
        }
        if let Some(v) = c.backward_multiplier {
            req.training.backward_multiplier = v;
        }
        if let Some(v) = c.carbon_intensity {
            req.intensity.grams_co2eq_per_kwh = v;
        }
        if let Some(v) = &c.region {
            req.intensity.region_label = v.clone();
        }
        if let Some(v) = c.clock_hz {
            req.overrides.clock_hz = Some(v);
        }
        if let Some(v) = c.cores {
            req.overrides.cores = Some(v);
        }
        if let Some(v) = c.efficiency {
            req.overrides.efficiency_flops_per_watt = Some(v);
        }
        if c.strict {
            req.strict = true;
        }
    }};
}

/// Output of one command: data for standard output (or `--output`) plus
/// diagnostics for standard error.
pub struct Outcome {
    pub data: String,
    pub warnings: Vec<String>,
    pub output: Option<PathBuf>,
}

fn outcome(data: String, warnings: Vec<String>, out: &OutputArgs) -> Outcome {
    Outcome {
        data,
        warnings,
        output: out.output.clone(),
    }
}

pub fn execute(command: &Command) -> Result<Outcome, Error> {
    match command {
        Command::Analyze {
            spec,
            predictions,
            include_training,
            common,
        } => {
            let db = load_db(&common.profiles)?;
            let mut req = match (&common.request, spec) {
                (Some(path), _) => read_request::<AnalysisRequest>(path)?,
                (None, Some(spec)) => AnalysisRequest::new(network_ref(spec)?),
                (None, None) => return Err(missing_network()),
            };
            if let (Some(_), Some(spec)) = (&common.request, spec) {
                req.network = network_ref(spec)?;
            }
            apply_common!(req, common);
            if predictions.is_some() {
                req.prediction_counts = predictions.clone();
            }
            if *include_training {
                req.include_training = true;
            }
            let report = analysis::analyze(&req, &db)?;
            let data = match common.out.format {
                Format::Json => render_json(&report),
                Format::Csv => render::analysis_csv(&report),
                Format::Table => render::analysis_table(&report),
            };
            Ok(outcome(data, report.warnings.clone(), &common.out))
        }
        Command::Compare {
            specs,
            sort_by,
            descending,
            fail_fast,
            common,
        } => {
            let db = load_db(&common.profiles)?;
            let networks = specs.iter().map(|s| network_ref(s)).collect::<Result<Vec<_>, _>>()?;
            let mut req = match &common.request {
                Some(path) => read_request::<CompareRequest>(path)?,
                None => CompareRequest::new(Vec::new()),
            };
            if !networks.is_empty() {
                req.networks = networks;
            }
            apply_common!(req, common);
            if let Some(k) = sort_by {
                req.sort_by = *k;
            }
            req.descending |= *descending;
            req.fail_fast |= *fail_fast;
            let report = analysis::compare(&req, &db)?;
            let data = match common.out.format {
                Format::Json => render_json(&report),
                Format::Csv => render::compare_csv(&report),
                Format::Table => render::compare_table(&report),
            };
            Ok(outcome(data, report.warnings.clone(), &common.out))
        }
        Command::Curve {
            spec,
            counts,
            from,
            to,
            per_decade,
            include_training,
            common,
        } => {
            let db = load_db(&common.profiles)?;
            let mut req = match (&common.request, spec) {
                (Some(path), _) => read_request::<CurveRequest>(path)?,
                (None, Some(spec)) => CurveRequest::new(network_ref(spec)?),
                (None, None) => return Err(missing_network()),
            };
            if let (Some(_), Some(spec)) = (&common.request, spec) {
                req.network = network_ref(spec)?;
            }
            apply_common!(req, common);
            if counts.is_some() {
                req.counts = counts.clone();
                req.range = None;
            }
            if from.is_some() || to.is_some() || per_decade.is_some() {
                let base = req.range.unwrap_or_default();
                req.range = Some(CountRange {
                    from: from.unwrap_or(base.from),
                    to: to.unwrap_or(base.to),
                    per_decade: per_decade.unwrap_or(base.per_decade),
                });
                req.counts = None;
            }
            if *include_training {
                req.include_training = true;
            }
            let report = analysis::curve(&req, &db)?;
            let data = match common.out.format {
                Format::Json => render_json(&report),
                Format::Csv => render::curve_csv(&report),
                Format::Table => render::curve_table(&report),
            };
            Ok(outcome(data, report.warnings.clone(), &common.out))
        }
        Command::Hardware { action, out, profiles } => {
            let db = load_db(profiles)?;
            let data = match action {
                ListOrShow::List => match out.format {
                    Format::Json => render_json(&service::profile_document(&db)),
                    Format::Csv => render::hardware_list_csv(db.profiles()),
                    Format::Table => render::hardware_list_table(db.profiles()),
                },
                ListOrShow::Show { id } => {
                    let info = analysis::hardware_info(db.get(id)?);
                    match out.format {
                        Format::Json => render_json(&info),
                        Format::Csv => render::hardware_info_csv(&info),
                        Format::Table => render::hardware_info_table(&info),
                    }
                }
            };
            Ok(outcome(data, Vec::new(), out))
        }
        Command::Zoo { action, out } => {
            let data = match action {
                ListOrShow::List => {
                    let entries = analysis::zoo_summaries();
                    match out.format {
                        Format::Json => render_json(&entries),
                        Format::Csv => render::zoo_list_csv(&entries),
                        Format::Table => render::zoo_list_table(&entries),
                    }
                }
                ListOrShow::Show { id } => {
                    let detail = analysis::zoo_detail(id)?;
                    match out.format {
                        Format::Json => render_json(&detail),
                        Format::Csv | Format::Table => detail.text,
                    }
                }
            };
            Ok(outcome(data, Vec::new(), out))
        }
        Command::Serve { port, bind, profiles } => {
            let db = load_db(profiles)?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| io_error(Path::new("<runtime>"), e))?;
            rt.block_on(service::serve(AppState::new(db), bind, *port))
                .map_err(|e| io_error(Path::new(&format!("{bind}:{port}")), e))?;
            Ok(Outcome {
                data: String::new(),
                warnings: Vec::new(),
                output: None,
            })
        }
    }
}

fn command_format(c: &Command) -> Option<Format> {
    match c {
        Command::Analyze { common, .. } | Command::Compare { common, .. } | Command::Curve { common, .. } => {
            Some(common.out.format)
        }
        Command::Hardware { out, .. } | Command::Zoo { out, .. } => Some(out.format),
        Command::Serve { .. } => None,
    }
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let json = command_format(&cli.command) == Some(Format::Json);
    let result = execute(&cli.command).and_then(|o| {
        for w in &o.warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        match &o.output {
            Some(path) => std::fs::write(path, &o.data).map_err(|e| io_error(path, e)),
            None => stdout
                .write_all(o.data.as_bytes())
                .map_err(|e| io_error(Path::new("<stdout>"), e)),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            // In JSON mode the error is the same body the service returns.
            if json {
                let _ = stderr.write_all(render_json(&ErrorBody::from(&e)).as_bytes());
            } else {
                let _ = writeln!(stderr, "error[{}]: {e}", e.code());
            }
            e.exit_code()
        }
    }
}
