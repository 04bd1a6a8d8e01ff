use std::fs;
use std::path::{Path, PathBuf};

use crate::CmdError;

/// 17 significant digits: round-trippable doubles, byte-stable across runs.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// One-line header, comma separators, newline-terminated rows. Written to a
/// temporary file in the target directory and renamed into place.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: &[Vec<String>],
) -> Result<PathBuf, CmdError> {
    fs::create_dir_all(dir)
        .map_err(|e| CmdError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let mut text = String::with_capacity(header.len() + 1 + rows.len() * 64);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let path = dir.join(name);
    let tmp = dir.join(format!("{name}.tmp"));
    fs::write(&tmp, text)
        .map_err(|e| CmdError::Config(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, &path)
        .map_err(|e| CmdError::Config(format!("cannot rename into {}: {e}", path.display())))?;
    Ok(path)
}
