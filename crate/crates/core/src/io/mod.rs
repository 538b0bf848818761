//! File formats: embedding files, manifests, score files, selection files
//! and reports. All writes are atomic (temp file in the target directory,
//! then rename).

mod embfile;
mod manifest;
mod report;
mod scores;

pub use embfile::{
    decode_embeddings, encode_embeddings, encoded_len, read_embeddings, write_embeddings,
    HEADER_LEN, MAGIC, VERSION,
};
pub use manifest::Manifest;
pub use report::{
    fmt_mean_std, fmt_sig, parse_mean_std, read_report, round_sig, write_report, ReportDoc, RunRow,
    SelectionDoc,
};
pub use scores::{parse_scores, read_scores, render_scores, write_scores};

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(|e| Error::io(path, e))?;
    }
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
