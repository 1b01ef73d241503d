//! Serializing envelopes and writing them atomically.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentConfig, OutputFormat};
use super::envelope::ResultEnvelope;
use super::json::to_stable_string;
use super::CliError;

#[derive(Debug, Serialize)]
struct CsvRow {
    probe_index: usize,
    #[serde(rename = "F_i")]
    f_i: f64,
    shots: Option<u64>,
    passes: Option<u64>,
    p_hat: Option<f64>,
}

fn csv_rows(env: &ResultEnvelope) -> Vec<CsvRow> {
    if let Some(h) = &env.hom {
        return vec![CsvRow {
            probe_index: h.probe_index,
            f_i: 1.0 - 2.0 * h.coincidence,
            shots: Some(h.shots),
            passes: Some(h.shots - h.coincidences),
            p_hat: Some(1.0 - h.coincidence_rate),
        }];
    }
    env.analytic
        .probes
        .iter()
        .map(|p| {
            let rec = env
                .empirical
                .as_ref()
                .and_then(|e| e.rows.iter().find(|r| r.probe_index == p.probe_index));
            CsvRow {
                probe_index: p.probe_index,
                f_i: p.f_i,
                shots: rec.map(|r| r.shots),
                passes: rec.map(|r| r.passes),
                p_hat: rec.map(|r| r.p_hat),
            }
        })
        .collect()
}

pub fn render(env: &ResultEnvelope, format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => to_stable_string(env).map_err(|e| CliError::Other(e.to_string())),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in csv_rows(env) {
                w.serialize(row).map_err(|e| CliError::Other(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Other(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Other(e.to_string()))
        }
    }
}

/// Writes via a temporary file in the target directory and renames it into
/// place, so a failed run never leaves a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::FileIo(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn emit(env: &ResultEnvelope, cfg: &ExperimentConfig) -> Result<(), CliError> {
    let text = render(env, cfg.format)?;
    match &cfg.out {
        Some(path) => write_atomic(path, &text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::FileIo(format!("stdout: {e}")))
        }
    }
}
