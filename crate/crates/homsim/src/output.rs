//! Scan-result serialization: the CSV curve, its visibility trailer, and
//! the metadata side-car that makes every output file regenerable.

use hom_core::clicksim::{ScanPoint, ScanResult, VisibilityEstimate};

use crate::config::ScenarioConfig;

pub const CSV_HEADER: &str = "delta_l_um,singles_d1,singles_d2,coincidences,trials,rate,rate_stderr";

/// Renders a scan as CSV text: fixed header, one record per delay in
/// scan order, and a visibility summary as a trailing comment record.
/// A scan whose curve supports no baseline (every point within the dip)
/// reports `nan` for both summary fields.
pub fn csv_document(result: &ScanResult, summary: Option<&VisibilityEstimate>) -> String {
    let mut out = String::with_capacity(64 * (result.points.len() + 2));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &result.points {
        let rate_line = format!(
            "{},{},{},{},{},{},{}\n",
            p.delta_l_um, p.singles_d1, p.singles_d2, p.coincidences, p.trials, p.rate,
            p.rate_stderr
        );
        out.push_str(&rate_line);
    }
    match summary {
        Some(v) => {
            out.push_str(&format!("# visibility,{},{}\n", v.visibility, v.stderr));
        }
        None => out.push_str("# visibility,nan,nan\n"),
    }
    out
}

/// Parses text produced by `csv_document`: the points and, when the
/// trailer carried numbers, the visibility summary.
pub fn parse_csv(text: &str) -> Result<(Vec<ScanPoint>, Option<(f64, f64)>), String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(format!("unrecognized CSV header {other:?}")),
    }
    let mut points = Vec::new();
    let mut summary = None;
    for (idx, line) in lines.enumerate() {
        let record = idx + 2;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# visibility,") {
            let fields: Vec<&str> = rest.split(',').collect();
            if fields.len() != 2 {
                return Err(format!("line {record}: malformed visibility trailer"));
            }
            let v: f64 = fields[0].parse().map_err(|e| format!("line {record}: {e}"))?;
            let s: f64 = fields[1].parse().map_err(|e| format!("line {record}: {e}"))?;
            if v.is_finite() && s.is_finite() {
                summary = Some((v, s));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format!("line {record}: expected 7 fields, found {}", fields.len()));
        }
        let parse_f = |i: usize| -> Result<f64, String> {
            fields[i].parse().map_err(|e| format!("line {record}, field {}: {e}", i + 1))
        };
        let parse_u = |i: usize| -> Result<u64, String> {
            fields[i].parse().map_err(|e| format!("line {record}, field {}: {e}", i + 1))
        };
        points.push(ScanPoint {
            delta_l_um: parse_f(0)?,
            singles_d1: parse_u(1)?,
            singles_d2: parse_u(2)?,
            coincidences: parse_u(3)?,
            trials: parse_u(4)?,
            rate: parse_f(5)?,
            rate_stderr: parse_f(6)?,
        });
    }
    Ok((points, summary))
}

/// The metadata side-car: the resolved configuration, seed included,
/// as versioned TOML.
pub fn metadata_document(config: &ScenarioConfig) -> String {
    toml::to_string_pretty(config).expect("resolved config serializes")
}
