use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::{OutputFormat, ResultTable};
use crate::error::{Error, Result};

/// CSV with a leading `# {json header}` comment line, then one record per row.
/// Missing values are empty cells; infeasible points read `NaN`.
pub fn write_csv<W: Write>(table: &ResultTable, mut out: W) -> Result<()> {
    writeln!(out, "# {}", serde_json::to_string(&table.header)?).map_err(|e| Error::Csv(e.into()))?;
    let mut w = csv::Writer::from_writer(out);
    for row in &table.rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// `{"header": ..., "rows": [...]}`; `NaN` and missing values become `null`.
pub fn write_json<W: Write>(table: &ResultTable, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, table)?;
    writeln!(out).map_err(serde_json::Error::io)?;
    Ok(())
}

/// Writes to `path`, or to stdout when `None`.
pub fn emit_results(table: &ResultTable, path: Option<&Path>, format: OutputFormat) -> Result<()> {
    match path {
        Some(path) => {
            let io_err = |source: io::Error| Error::Io {
                path: path.to_owned(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            let mut w = BufWriter::new(file);
            write_any(table, &mut w, format).map_err(|e| relabel(e, path))?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_any(table, &mut lock, format)
        }
    }
}

fn write_any<W: Write>(table: &ResultTable, out: W, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(table, out),
        OutputFormat::Json => write_json(table, out),
    }
}

// write failures surface from csv/serde_json; attach the path
fn relabel(e: Error, path: &Path) -> Error {
    match e {
        Error::Csv(c) if c.is_io_error() => match c.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.to_owned(),
                source,
            },
            _ => unreachable!(),
        },
        Error::Json(j) if j.is_io() => Error::Io {
            path: path.to_owned(),
            source: j.into(),
        },
        other => other,
    }
}
