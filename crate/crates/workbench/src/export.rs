//! CSV and JSON result files.
//!
//! A CSV file opens with `#` comment lines carrying the run metadata and the
//! full configuration (`#| ` prefix), so `pcopo sweep --from out.csv` repeats
//! the run.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{config_parse, LoadedConfig};
use crate::error::{Result, WorkbenchError};
use crate::sweep::{PointStatus, ResultRecord, CODE_VERSION};

pub const CSV_SCHEMA: &str = "pcopo-csv";
pub const JSON_SCHEMA: &str = "pcopo-results";
pub const SCHEMA_VERSION: u32 = 1;

const CONFIG_PREFIX: &str = "#| ";
const PARAM_COLUMNS: [&str; 6] = ["E", "delta0", "delta1", "M0", "M1", "kp"];

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn io_err(e: std::io::Error) -> WorkbenchError {
    WorkbenchError::io("output", e)
}

pub fn write_csv<W: Write>(mut w: W, records: &[ResultRecord], config: &LoadedConfig) -> Result<()> {
    let s = &config.sweep;
    let stamp = records.first().map_or_else(crate::sweep::timestamp_now, |r| r.timestamp.clone());
    let mut head = vec![
        format!("{CSV_SCHEMA} v{SCHEMA_VERSION}"),
        format!("code_version: {CODE_VERSION}"),
        format!("generated: {stamp}"),
        format!("observable: {}", s.observable.name()),
        format!("engine: {}", s.engine.name()),
        format!("points: {}", records.len()),
        format!("params: {}", serde_json::to_string(&config.params)?),
        format!("options: {}", serde_json::to_string(&s.options)?),
    ];
    if s.engine.stochastic() {
        head.push(format!("seed: {}", config.sim.seed));
        head.push(format!("sim: {}", serde_json::to_string(&config.sim)?));
    }
    for line in head {
        writeln!(w, "# {line}").map_err(io_err)?;
    }
    writeln!(w, "# config:").map_err(io_err)?;
    for line in config.to_toml()?.lines() {
        writeln!(w, "{CONFIG_PREFIX}{line}").map_err(io_err)?;
    }

    let columns = s.observable.columns(s.engine);
    let with_errors = s.engine.stochastic();
    let mut header: Vec<String> = PARAM_COLUMNS.iter().map(|c| c.to_string()).collect();
    header.push("status".into());
    header.extend(columns.iter().map(|c| c.to_string()));
    if with_errors {
        header.extend(columns.iter().map(|c| format!("{c}_err")));
    }
    writeln!(w, "{}", header.join(",")).map_err(io_err)?;

    for r in records {
        let p = &r.params;
        let mut lead: Vec<String> = [p.e, p.delta0, p.delta1, p.m0, p.m1].iter().map(|&v| fmt_f64(v)).collect();
        lead.push(p.kp().map_or_else(|_| "nan".into(), fmt_f64));
        lead.push(r.status.name().into());
        let blank = vec![f64::NAN; columns.len()];
        let rows: Vec<(&[f64], Option<&[f64]>)> = if r.status == PointStatus::AboveThreshold {
            vec![(&blank[..], with_errors.then_some(&blank[..]))]
        } else {
            r.rows
                .iter()
                .enumerate()
                .map(|(i, row)| (&row[..], r.errors.as_ref().map(|e| &e[i][..])))
                .collect()
        };
        for (row, err) in rows {
            let mut cells = lead.clone();
            cells.extend(row.iter().map(|&v| fmt_f64(v)));
            if with_errors {
                let err = err.map_or_else(|| vec![f64::NAN; columns.len()], |e| e.to_vec());
                cells.extend(err.iter().map(|&v| fmt_f64(v)));
            }
            writeln!(w, "{}", cells.join(",")).map_err(io_err)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultsFile {
    pub schema: String,
    pub version: u32,
    pub code_version: String,
    pub config: String,
    pub records: Vec<ResultRecord>,
}

pub fn write_json<W: Write>(w: W, records: &[ResultRecord], config: &LoadedConfig) -> Result<()> {
    let file = ResultsFile {
        schema: JSON_SCHEMA.into(),
        version: SCHEMA_VERSION,
        code_version: CODE_VERSION.into(),
        config: config.to_toml()?,
        records: records.to_vec(),
    };
    serde_json::to_writer_pretty(w, &file)?;
    Ok(())
}

pub fn read_json(text: &str) -> Result<ResultsFile> {
    let file: ResultsFile = serde_json::from_str(text)?;
    if file.schema != JSON_SCHEMA || file.version != SCHEMA_VERSION {
        return Err(WorkbenchError::validation(
            "schema",
            format!("expected {JSON_SCHEMA} v{SCHEMA_VERSION}, found {} v{}", file.schema, file.version),
        ));
    }
    Ok(file)
}

/// Configuration embedded in a CSV or JSON result file.
pub fn config_from_results(text: &str, origin: &str) -> Result<LoadedConfig> {
    if text.trim_start().starts_with('{') {
        return config_parse(&read_json(text)?.config, origin);
    }
    let toml: String = text
        .lines()
        .filter_map(|l| l.strip_prefix(CONFIG_PREFIX).or_else(|| (l == CONFIG_PREFIX.trim_end()).then_some("")))
        .map(|l| format!("{l}\n"))
        .collect();
    if toml.is_empty() {
        return Err(WorkbenchError::validation("config", format!("{origin} carries no embedded configuration")));
    }
    config_parse(&toml, origin)
}

/// Writes JSON for a `.json` path and CSV otherwise.
pub fn write_output(path: &Path, records: &[ResultRecord], config: &LoadedConfig) -> Result<()> {
    let name = path.display().to_string();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| WorkbenchError::io(&name, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| WorkbenchError::io(&name, e))?;
    let w = std::io::BufWriter::new(file);
    if path.extension().is_some_and(|e| e == "json") {
        write_json(w, records, config)
    } else {
        write_csv(w, records, config)
    }
}
