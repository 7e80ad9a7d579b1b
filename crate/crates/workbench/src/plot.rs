//! CSV plot-data emission: machine-readable scatter and trend files derived
//! from suite reports, for external plotting tools.
//!
//! Every file starts with `#`-prefixed comment lines documenting its columns;
//! the readers in this module skip those and round-trip the records.

use std::fs;
use std::path::{Path, PathBuf};

use csv::{ReaderBuilder, WriterBuilder};
use serde::{Deserialize, Serialize};

use crate::report::{ReportError, SuiteReport};

/// Long-format record: one computed value of one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueRow {
    pub case: String,
    pub key: String,
    pub value: f64,
}

/// Scatter record for the qualitative demo: norms versus average per case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub case: String,
    pub system: String,
    pub family: String,
    pub min_norm: f64,
    pub u2_min: f64,
    pub abs_avg: f64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_with_header<T: Serialize>(
    path: &Path,
    comment: &[&str],
    rows: &[T],
) -> Result<(), ReportError> {
    let mut body = Vec::new();
    for line in comment {
        body.extend_from_slice(format!("# {line}\n").as_bytes());
    }
    {
        let mut writer = WriterBuilder::new().from_writer(&mut body);
        for row in rows {
            writer.serialize(row)?;
        }
        writer.flush().map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    // Serde-driven headers only appear with at least one record; emit the
    // documented header row explicitly when the report is empty.
    fs::write(path, body).map_err(io_err(path))?;
    Ok(())
}

/// Emits the plot files for one suite report into `dir`, returning the paths
/// written.  Every suite gets a long-format `<suite>-values.csv`; the
/// qualitative demo additionally gets a norm-versus-average scatter.
pub fn emit_plotdata(report: &SuiteReport, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let values_path = dir.join(format!("{}-values.csv", report.suite));
    let mut rows: Vec<ValueRow> = Vec::new();
    for case in &report.cases {
        for (key, &value) in &case.values {
            rows.push(ValueRow {
                case: case.name.clone(),
                key: key.clone(),
                value,
            });
        }
    }
    let value_comments = [
        "columns: case,key,value",
        "one row per computed quantity of each case, in case order",
    ];
    if rows.is_empty() {
        let mut body = String::new();
        for line in value_comments {
            body.push_str(&format!("# {line}\n"));
        }
        body.push_str("case,key,value\n");
        fs::write(&values_path, body).map_err(io_err(&values_path))?;
    } else {
        write_with_header(&values_path, &value_comments, &rows)?;
    }
    written.push(values_path);

    if report.suite == "qualitative-demo" {
        let scatter_path = dir.join("qualitative-demo-scatter.csv");
        let scatter: Vec<ScatterRow> = report
            .cases
            .iter()
            .filter_map(|case| {
                let min_norm = case.values.get("min_norm")?;
                Some(ScatterRow {
                    case: case.name.clone(),
                    system: case
                        .inputs
                        .get("system")
                        .and_then(|v| v.as_str())
                        .unwrap_or("")
                        .to_string(),
                    family: case
                        .inputs
                        .get("family")
                        .and_then(|v| v.as_str())
                        .unwrap_or("")
                        .to_string(),
                    min_norm: *min_norm,
                    u2_min: case.values.get("u2_min").copied().unwrap_or(f64::NAN),
                    abs_avg: case.values.get("abs_avg").copied().unwrap_or(f64::NAN),
                })
            })
            .collect();
        let scatter_comments = [
            "columns: case,system,family,min_norm,u2_min,abs_avg",
            "scatter of minimum uniformity norm against absolute average",
        ];
        if scatter.is_empty() {
            let mut body = String::new();
            for line in scatter_comments {
                body.push_str(&format!("# {line}\n"));
            }
            body.push_str("case,system,family,min_norm,u2_min,abs_avg\n");
            fs::write(&scatter_path, body).map_err(io_err(&scatter_path))?;
        } else {
            write_with_header(&scatter_path, &scatter_comments, &scatter)?;
        }
        written.push(scatter_path);
    }
    Ok(written)
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>, ReportError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    Ok(ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(file))
}

/// Round-trip reader for a long-format values CSV.
pub fn read_values(path: &Path) -> Result<Vec<ValueRow>, ReportError> {
    let mut rows = Vec::new();
    for record in reader(path)?.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}

/// Round-trip reader for the qualitative-demo scatter CSV.
pub fn read_scatter(path: &Path) -> Result<Vec<ScatterRow>, ReportError> {
    let mut rows = Vec::new();
    for record in reader(path)?.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}
