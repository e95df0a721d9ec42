//! Report envelopes and writers for CSV, JSON and gnuplot output.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::config::RunConfig;
use super::CliError;

/// JSON envelope shared by all structured outputs.
#[derive(Debug, Serialize)]
pub struct AnalysisReport<'a, T: Serialize> {
    pub command: &'a str,
    pub tool: &'static str,
    pub version: &'static str,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
    pub config: &'a RunConfig,
    pub results: T,
    pub warnings: Vec<String>,
}

impl<'a, T: Serialize> AnalysisReport<'a, T> {
    pub fn new(command: &'a str, config: &'a RunConfig, results: T, warnings: Vec<String>) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            command,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            timestamp,
            config,
            results,
            warnings,
        }
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_csv<T: Serialize>(out: Option<&Path>, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// What to draw from a CSV file.
pub struct PlotSpec<'a> {
    pub title: &'a str,
    pub x_column: usize,
    pub y_column: usize,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub logscale_y: bool,
}

/// Writes `<csv>.gp`, a gnuplot script plotting two columns of the CSV.
pub fn write_gnuplot(csv_path: &Path, spec: &PlotSpec<'_>) -> Result<std::path::PathBuf, CliError> {
    let mut script_path = csv_path.as_os_str().to_owned();
    script_path.push(".gp");
    let script_path = std::path::PathBuf::from(script_path);
    let csv_name = csv_path.file_name().map_or_else(|| csv_path.display().to_string(), |n| n.to_string_lossy().into());
    let mut f = std::fs::File::create(&script_path)?;
    writeln!(f, "set datafile separator ','")?;
    writeln!(f, "set key autotitle columnhead")?;
    writeln!(f, "set title '{}'", spec.title)?;
    writeln!(f, "set xlabel '{}'", spec.x_label)?;
    writeln!(f, "set ylabel '{}'", spec.y_label)?;
    if spec.logscale_y {
        writeln!(f, "set logscale y")?;
    }
    writeln!(f, "plot '{csv_name}' using {}:{} with linespoints", spec.x_column, spec.y_column)?;
    Ok(script_path)
}
