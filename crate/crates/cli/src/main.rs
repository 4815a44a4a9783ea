//! `dtn`: command-line front end for the disk DN and transmission-eigenvalue
//! pipelines.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical fault or
//! flagged result, 4 case refusal.

mod commands;
mod config;
mod svg;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dtn_core::output::FORMAT_VERSION;
use serde_json::{json, Value};

use commands::Report;
use config::{Cli, Command, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical fault: {0}")]
    Numerical(String),
    #[error("refused: {0}")]
    Refusal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Refusal(_) => 4,
        }
    }
}

impl From<dtn_core::Error> for CliError {
    fn from(e: dtn_core::Error) -> Self {
        match e {
            dtn_core::Error::CaseRefusal(m) => CliError::Refusal(m),
            dtn_core::Error::InvalidInput(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Scan(_) | Command::FreeRegion(_) => Format::Json,
        _ => Format::Csv,
    }
}

fn render(report: &Report, format: Format, threads: usize) -> Result<Vec<u8>, CliError> {
    let mut config = report.config.clone();
    config["threads"] = json!(threads);
    config["format"] = json!(match format {
        Format::Csv => "csv",
        Format::Json => "json",
    });
    match format {
        Format::Json => {
            let doc = json!({
                "format_version": FORMAT_VERSION,
                "command": report.command,
                "config": config,
                "result": report.result,
            });
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Numerical(e.to_string()))?;
            text.push('\n');
            Ok(text.into_bytes())
        }
        Format::Csv => {
            let mut buf = Vec::new();
            let comment = |buf: &mut Vec<u8>, key: &str, v: &Value| {
                let _ = writeln!(buf, "# {key}: {v}");
            };
            let _ = writeln!(buf, "# format_version: {FORMAT_VERSION}");
            let _ = writeln!(buf, "# command: {}", report.command);
            comment(&mut buf, "config", &config);
            if let Some(s) = &report.summary {
                comment(&mut buf, "summary", s);
            }
            let mut w = csv::Writer::from_writer(buf);
            let io = |e: csv::Error| CliError::Numerical(e.to_string());
            w.write_record(&report.header).map_err(io)?;
            for row in &report.rows {
                w.write_record(row).map_err(io)?;
            }
            w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))
        }
    }
}

fn write_to(path: Option<&std::path::Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Config(format!("stdout: {e}")))
        }
    }
}

fn run(mut cli: Cli) -> Result<bool, CliError> {
    if let Some(path) = cli.config.clone() {
        let table = config::load_table(&path)?;
        config::apply_file(&mut cli, table)?;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let threads = rayon::current_num_threads();
    let format = cli.format.unwrap_or_else(|| default_format(&cli.command));
    let report = match &cli.command {
        Command::DnCompare(a) => commands::dn_compare(a)?,
        Command::ParametrixCheck(a) => commands::parametrix_check(a)?,
        Command::Scan(a) => commands::scan_cmd(a)?,
        Command::FreeRegion(a) => commands::free_region(a)?,
        Command::Weyl(a) => commands::weyl(a)?,
        Command::Symbols(a) => commands::symbols(a)?,
    };
    let bytes = render(&report, format, threads)?;
    write_to(cli.out.as_deref(), &bytes)?;
    if let Some((path, text)) = &report.side_file {
        write_to(Some(path), text.as_bytes())?;
    }
    Ok(!report.flagged)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("dtn: finished with flagged results");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("dtn: {e}");
            ExitCode::from(e.code())
        }
    }
}
