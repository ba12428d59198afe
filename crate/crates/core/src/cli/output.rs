//! Payload and sidecar rendering.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use super::config::{Format, ScenarioConfig};
use super::scenarios::Outcome;

/// Provenance block shared by the JSON payload and the sidecar.
pub fn provenance(cfg: &ScenarioConfig, outcome: &Outcome) -> Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "scenario": cfg.scenario,
        "seed": cfg.common.seed,
        "dim": outcome.dim,
        "tolerances": { "tail": cfg.common.tail_tol },
        "config": cfg,
    })
}

/// Primary output. Byte-identical for identical configurations.
pub fn render_payload(cfg: &ScenarioConfig, outcome: &Outcome) -> Result<String, String> {
    match cfg.common.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(outcome.table.header).map_err(|e| e.to_string())?;
            for row in &outcome.table.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
        Format::Json => {
            let doc = json!({ "provenance": provenance(cfg, outcome), "result": outcome.result });
            serde_json::to_string_pretty(&doc)
                .map(|s| s + "\n")
                .map_err(|e| e.to_string())
        }
    }
}

/// Sidecar metadata; the timestamp is the only field that varies between runs.
pub fn render_sidecar(cfg: &ScenarioConfig, outcome: &Outcome) -> Result<String, String> {
    let mut doc = provenance(cfg, outcome);
    if cfg.common.timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        doc["generated_unix"] = json!(secs);
    }
    doc["summary"] = outcome.summary.clone();
    serde_json::to_string_pretty(&doc)
        .map(|s| s + "\n")
        .map_err(|e| e.to_string())
}

/// `<dir>/<stem>.meta.json` next to the payload.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    out.with_file_name(format!("{stem}.meta.json"))
}
