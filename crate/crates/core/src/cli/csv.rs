use std::io::Write;
use std::path::Path;

use crate::scaling::{ScalingFit, SweepRecord};
use crate::Result;

/// Formats a double with 17 significant digits, enough for a lossless
/// round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes sweep records as CSV: comma-separated, `.` decimal, header row, LF
/// line endings.
///
/// In serial mode the wall-time column is written as zero so that identical
/// config and seed produce byte-identical files; measured times are kept in
/// parallel mode where no byte-level contract applies.
pub fn write_sweep_csv(path: &Path, records: &[SweepRecord], serial: bool) -> Result<()> {
    let mut out = String::new();
    out.push_str("h,value,basis_dim,residual,wall_time_s\n");
    for r in records {
        let wall = if serial { 0.0 } else { r.wall_time_s };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.h),
            fmt_f64(r.value),
            r.basis_dim,
            fmt_f64(r.residual),
            fmt_f64(wall),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads the `(h, value)` columns back from a sweep CSV.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let h: f64 = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| crate::Error::InvalidParameter(format!("bad CSV row `{line}`")))?;
        let v: f64 = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| crate::Error::InvalidParameter(format!("bad CSV row `{line}`")))?;
        rows.push((h, v));
    }
    Ok(rows)
}

/// JSON-style key-value block summarizing a fit.
pub fn fit_summary(
    quantity: &str,
    surface: &str,
    fit: &ScalingFit,
    drop_first: usize,
    seed: u64,
) -> String {
    let mut s = String::from("{\n");
    s.push_str(&format!("  \"quantity\": \"{quantity}\",\n"));
    s.push_str(&format!("  \"surface\": \"{surface}\",\n"));
    s.push_str(&format!("  \"alpha\": {},\n", fmt_f64(fit.exponent)));
    s.push_str(&format!("  \"prefactor\": {},\n", fmt_f64(fit.prefactor)));
    s.push_str(&format!("  \"r_squared\": {},\n", fmt_f64(fit.r_squared)));
    s.push_str(&format!("  \"points_fitted\": {},\n", fit.samples.len()));
    s.push_str(&format!("  \"drop_first\": {drop_first},\n"));
    s.push_str(&format!("  \"seed\": {seed}\n"));
    s.push_str("}\n");
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
