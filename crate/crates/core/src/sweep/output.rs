//! CSV / NDJSON persistence and declarative plot scripts.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Method, SweepRecord};
use crate::error::{Error, Result};
use crate::semiclassical::Status;

pub const CSV_HEADER: &str = "method,n,m,omega_p,i_in,transmission,status,residual,wall_time_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Ndjson,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(OutputFormat::Csv),
            "ndjson" | "jsonl" => Some(OutputFormat::Ndjson),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Ndjson => "ndjson",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    method: Method,
    n: usize,
    m: Option<u32>,
    omega_p: f64,
    i_in: f64,
    transmission: f64,
    status: String,
    residual: f64,
    wall_time_ms: f64,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Writes the fixed-header CSV. Floats use the shortest representation that
/// round-trips exactly.
pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            method: r.method,
            n: r.n,
            m: r.m,
            omega_p: r.omega_p,
            i_in: r.i_in,
            transmission: r.transmission,
            status: r.status.as_str().to_owned(),
            residual: r.residual,
            wall_time_ms: r.wall_time_ms,
        })
        .map_err(csv_err)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

/// Reads records written by [`write_csv`]; diagnostics are left empty.
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header `{header}`")));
    }
    rdr.deserialize::<CsvRow>()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            let status = Status::parse(&row.status)
                .ok_or_else(|| Error::Parse(format!("unknown status `{}`", row.status)))?;
            Ok(SweepRecord {
                method: row.method,
                n: row.n,
                m: row.m,
                omega_p: row.omega_p,
                i_in: row.i_in,
                transmission: row.transmission,
                status,
                residual: row.residual,
                wall_time_ms: row.wall_time_ms,
                diagnostics: Default::default(),
            })
        })
        .collect()
}

/// One JSON object per line, diagnostics included.
pub fn write_ndjson<W: Write>(records: &[SweepRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Parse(e.to_string()))?;
        out.write_all(b"\n").map_err(|e| Error::Parse(e.to_string()))?;
    }
    Ok(())
}

/// Vega-Lite specification plotting `transmission` against `omega_p` (or
/// against `i_in` on a log axis when the frequency grid is a single point),
/// one line per method and one facet per intensity.
pub fn plot_script(title: &str, data_file: &str, ramp: bool) -> serde_json::Value {
    let (x, xscale, facet) = if ramp {
        ("i_in", serde_json::json!({"type": "log"}), "omega_p")
    } else {
        ("omega_p", serde_json::json!({"zero": false}), "i_in")
    };
    serde_json::json!({
        "$schema": "https://vega.github.io/schema/vega-lite/v5.json",
        "title": title,
        "data": {"url": data_file, "format": {"type": "csv"}},
        "facet": {"field": facet, "type": "ordinal"},
        "spec": {
            "mark": "line",
            "encoding": {
                "x": {"field": x, "type": "quantitative", "scale": xscale},
                "y": {"field": "transmission", "type": "quantitative", "scale": {"domain": [0, 1]}},
                "color": {"field": "method", "type": "nominal"}
            }
        }
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `<dir>/<stem>.<ext>` for each format and, when `plot` is set, a
/// `<stem>.vl.json` plot script referencing the first data file.
pub fn emit_outputs(
    records: &[SweepRecord],
    dir: &Path,
    stem: &str,
    formats: &[OutputFormat],
    plot: bool,
) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to write".into()));
    }
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for &fmt in formats {
        let path = dir.join(format!("{stem}.{}", fmt.extension()));
        let mut w = create(&path)?;
        match fmt {
            OutputFormat::Csv => write_csv(records, &mut w)?,
            OutputFormat::Ndjson => write_ndjson(records, &mut w)?,
        }
        w.flush().map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    if plot {
        let data = format!("{stem}.csv");
        if !formats.contains(&OutputFormat::Csv) {
            let path = dir.join(&data);
            write_csv(records, create(&path)?)?;
            written.push(path);
        }
        let ramp = records.iter().all(|r| r.omega_p == records[0].omega_p)
            && records.iter().any(|r| r.i_in != records[0].i_in);
        let path = dir.join(format!("{stem}.vl.json"));
        let text = serde_json::to_string_pretty(&plot_script(stem, &data, ramp))
            .map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::Diagnostics;

    fn rec(method: Method, w: f64, t: f64) -> SweepRecord {
        SweepRecord {
            method,
            n: 2,
            m: (method == Method::Thle).then_some(3),
            omega_p: w,
            i_in: 1.12e-6,
            transmission: t,
            status: Status::Converged,
            residual: 1.5e-16,
            wall_time_ms: 0.25,
            diagnostics: Diagnostics::default(),
        }
    }

    #[test]
    fn three_records_four_lines() {
        let recs = vec![
            rec(Method::Thle, 0.9, 0.1),
            rec(Method::Qca, 0.9, 0.2),
            rec(Method::Mqca, 1.0 / 3.0, 0.30000000000000004),
        ];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert!(text.lines().nth(2).unwrap().starts_with("QCA,2,,"));
        assert_eq!(parse_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn ndjson_lines() {
        let mut r = rec(Method::Mqca, 1.0, 0.5);
        r.diagnostics.u_eff = Some(crate::C64::new(1.0, -0.2));
        let mut buf = Vec::new();
        write_ndjson(&[r.clone(), r.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: SweepRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(parse_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn unwritable_path_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = emit_outputs(&[rec(Method::Qca, 1.0, 0.5)], &blocker.join("sub"), "s", &[OutputFormat::Csv], false)
            .unwrap_err();
        assert!(err.to_string().contains("file"));
    }

    #[test]
    fn emit_with_plot() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![rec(Method::Thle, 0.9, 0.1), rec(Method::Thle, 1.0, 0.9)];
        let files = emit_outputs(&recs, dir.path(), "fig", &[OutputFormat::Ndjson], true).unwrap();
        assert_eq!(files.len(), 3);
        let vl: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig.vl.json")).unwrap()).unwrap();
        assert_eq!(vl["data"]["url"], "fig.csv");
    }
}
