//! Report serialization: a CSV summary with one row per margin, and a JSON
//! document carrying the full records (including argmin locations).

use std::path::Path;

use crate::error::Result;

use super::CheckReport;

/// CSV summary.  `check_id` is `check` or `check:part`; flags are joined
/// with `+`; numbers use the shortest round-trip form.
pub fn to_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check_id,config_digest,margin,tol,verdict,flags,wall_ms\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.row_id(),
            r.digest,
            r.margin,
            r.tol,
            r.verdict,
            r.flags.join("+"),
            r.wall_ms,
        ));
    }
    out
}

/// Full JSON document (pretty-printed array of report records).
pub fn to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Reports with the wall-clock field zeroed: the canonical form used when
/// comparing runs for determinism (timing is the one permitted difference).
pub fn canonical(reports: &[CheckReport]) -> Vec<CheckReport> {
    reports
        .iter()
        .cloned()
        .map(|mut r| {
            r.wall_ms = 0.0;
            r
        })
        .collect()
}

/// Write `report.csv` and `report.json` under `dir` (created if missing).
pub fn write_outputs(dir: &Path, reports: &[CheckReport]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.csv"), to_csv(reports))?;
    std::fs::write(dir.join("report.json"), to_json(reports))?;
    Ok(())
}
