use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything needed to rerun a command: its name, the seed, the activity
/// grid and the full argument set.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a, A: Serialize> {
    pub command: &'static str,
    pub seed: u64,
    pub x_grid: &'a [f64],
    pub version: &'static str,
    pub args: &'a A,
}

/// Writes `rows` to `out` (stdout when `None`). CSV output starts with
/// `# config: {json}` comment lines; JSON output is `{"config", "rows"}`.
pub fn emit<A: Serialize, R: Serialize>(
    config: &RunConfig<'_, A>,
    rows: &[R],
    format: Format,
    out: Option<&Path>,
) -> crate::CliResult<()> {
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a, C, R> {
                config: &'a C,
                rows: &'a [R],
            }
            serde_json::to_writer_pretty(&mut sink, &Doc { config, rows })?;
            writeln!(sink)?;
        }
        Format::Csv => {
            writeln!(sink, "# config: {}", serde_json::to_string(config)?)?;
            let mut wtr = csv::Writer::from_writer(&mut sink);
            for row in rows {
                wtr.serialize(row)?;
            }
            wtr.flush()?;
        }
    }
    sink.flush()?;
    Ok(())
}
