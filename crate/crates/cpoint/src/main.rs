use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use cpoint::api::to_json;
use cpoint::filter::{read_series, run_filter, SeriesSource};
use cpoint::formats::parse_date;
use cpoint::service::{serve, Store};
use cpoint::{By, Error, Inputs, ModelBundle, SelectRequest, SelectionView};
use cpoint_core::frontier::report;
use cpoint_core::moments::FilterParams;

#[derive(Parser)]
#[command(name = "cpoint", version, about = "Mean-variance frontier sweeps over MDL models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate moments from price series.
    Filter {
        #[arg(long, env = "CPOINT_DATA_DIR")]
        data_dir: PathBuf,
        /// Last quote date, dd/mm/yy or yyyy-mm-dd.
        #[arg(long)]
        final_date: String,
        /// Days between samples.
        #[arg(long, default_value_t = 1)]
        interval: i32,
        /// Number of returns.
        #[arg(long)]
        samples: usize,
        /// Horizon in sampling intervals.
        #[arg(long, default_value_t = 1.0)]
        extrap: f64,
        #[arg(long, default_value_t = 0.5)]
        hurst: f64,
        /// Calendar file excluded from the asset list.
        #[arg(long, default_value = "DOLOF.OFC")]
        deflator: String,
        #[arg(long, default_value = "ofc")]
        extension: String,
        /// Comma-separated asset file stems; all series when omitted.
        #[arg(long, value_delimiter = ',')]
        assets: Vec<String>,
        #[arg(long)]
        moments_out: PathBuf,
        #[arg(long)]
        correl_out: PathBuf,
    },
    /// Compile a model and sweep its frontier into a bundle.
    Compile {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        correl: PathBuf,
        #[arg(long)]
        deriv: Option<PathBuf>,
        /// Horizon in days for option legs; defaults to extrap × interval.
        #[arg(long)]
        horizon_days: Option<f64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Print critical points and segments as JSON.
    Frontier {
        bundle: PathBuf,
    },
    /// Select one portfolio.
    Select {
        bundle: PathBuf,
        #[arg(long)]
        by: By,
        #[arg(long, allow_hyphen_values = true)]
        value: f64,
        /// Fail on selections outside the frontier.
        #[arg(long)]
        strict: bool,
        /// Print the report block instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Render a report for several selections, e.g. `--select eta=0.5 --select r=0.01`.
    Report {
        bundle: PathBuf,
        #[arg(long = "select", allow_hyphen_values = true)]
        selections: Vec<SelectRequest>,
        /// Append to this file instead of printing.
        #[arg(long)]
        append: Option<PathBuf>,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: std::net::SocketAddr,
        /// Bundles are kept under `<data-dir>/models`.
        #[arg(long, env = "CPOINT_DATA_DIR")]
        data_dir: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load(path: &Path) -> Result<ModelBundle, Error> {
    ModelBundle::from_json(&read(path)?)
}

fn run(command: Command) -> Result<String, Error> {
    match command {
        Command::Filter {
            data_dir,
            final_date,
            interval,
            samples,
            extrap,
            hurst,
            deflator,
            extension,
            assets,
            moments_out,
            correl_out,
        } => {
            let final_date =
                parse_date(&final_date).ok_or_else(|| Error::Request(format!("invalid date {final_date:?}")))?;
            let src = SeriesSource { dir: data_dir, extension, deflator: Some(deflator), assets };
            let series = read_series(&src)?;
            let params = FilterParams { final_date, interval, samples, extrap, hurst };
            let (moments, correl) = run_filter(&series, &params)?;
            write(&moments_out, &moments)?;
            write(&correl_out, &correl)?;
            Ok(format!("{} assets\n", series.len()))
        }
        Command::Compile { model, moments, correl, deriv, horizon_days, out } => {
            let inputs = Inputs {
                model: read(&model)?,
                moments: read(&moments)?,
                correl: read(&correl)?,
                deriv: deriv.as_deref().map(read).transpose()?,
                horizon_days,
            };
            let b = ModelBundle::build(&inputs)?;
            for line in &b.print_log {
                eprintln!("{line}");
            }
            write(&out, &b.to_json())?;
            Ok(format!("{}\n", b.id))
        }
        Command::Frontier { bundle } => Ok(to_json(&load(&bundle)?.frontier_view())),
        Command::Select { bundle, by, value, strict, text } => {
            let b = load(&bundle)?;
            let p = b.select(&SelectRequest { model_id: None, by, value, strict })?;
            Ok(if text { report(std::slice::from_ref(&p)) } else { to_json(&SelectionView::from(&p)) })
        }
        Command::Report { bundle, selections, append } => {
            let text = load(&bundle)?.report(&selections)?;
            match append {
                None => Ok(text),
                Some(path) => {
                    let mut f = std::fs::OpenOptions::new()
                        .create(true)
                        .append(true)
                        .open(&path)
                        .map_err(|e| Error::io(&path, e))?;
                    f.write_all(text.as_bytes()).map_err(|e| Error::io(&path, e))?;
                    Ok(String::new())
                }
            }
        }
        Command::Serve { addr, data_dir } => {
            let store = Arc::new(Store::new(data_dir.map(|d| d.join("models"))));
            let rt = tokio::runtime::Runtime::new().map_err(|e| Error::io("runtime", e))?;
            rt.block_on(serve(addr, store)).map_err(|e| Error::io(addr.to_string(), e))?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let b = e.body();
            let at = match (b.line, b.col) {
                (Some(l), Some(c)) => format!(" (line {l}, col {c})"),
                (Some(l), None) => format!(" (line {l})"),
                _ => String::new(),
            };
            eprintln!("error[{}]: {}{at}", b.code, b.message);
            ExitCode::FAILURE
        }
    }
}
