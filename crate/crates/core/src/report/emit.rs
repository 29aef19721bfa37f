//! Writing reports and grids.

use std::fs;
use std::path::{Path, PathBuf};

use super::battery::Report;
use crate::error::{Error, Result};

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

/// The report as pretty-printed JSON with a trailing newline.
pub fn report_json(report: &Report) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn emit_report(report: &Report, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    fs::write(path, report_json(report)?).map_err(io(path))
}

/// `key,value` CSV with a header row.
pub fn grid_csv(rows: &[(String, f64)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

/// One `<name>.csv` per grid of the report; returns the written paths.
pub fn emit_grids(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    for (name, rows) in &report.grids {
        let path = dir.join(format!("{name}.csv"));
        fs::write(&path, grid_csv(rows)).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row_grid() {
        assert_eq!(grid_csv(&[("origin".into(), 0.5)]), "key,value\norigin,0.5\n");
        assert_eq!(grid_csv(&[]), "key,value\n");
    }
}
