//! CSV formatting and atomic file output.
//!
//! Dialect: comma-separated, `.` decimal point, scientific notation with 17
//! significant digits, header row, LF line endings.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::real::Real;

/// Format a scalar in the CSV dialect (>= 15 significant digits).
pub fn fmt_float<F: Real>(x: F) -> String {
    let v = x.to_f64().unwrap_or(f64::NAN);
    format!("{v:.16e}")
}

/// Join fields into one CSV line (LF appended by the writers).
pub fn csv_line<S: Display>(fields: &[S]) -> String {
    fields
        .iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Write `content` to `path` atomically (temp file in the same directory,
/// then rename), so interrupted runs leave no truncated file behind.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => {
            fs::create_dir_all(d)?;
            tempfile::NamedTempFile::new_in(d)?
        }
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(content.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| crate::error::Error::Io(e.error))?;
    Ok(())
}
