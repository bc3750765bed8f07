//! Filesystem helpers: atomic writes and a directory lock.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{io_error, CliError, Result};

/// Writes through a temp file in the same directory, then renames, so a
/// crash never leaves a partial artifact under the final name.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .ok_or_else(|| CliError::data(format!("no parent directory for {}", path.display())))?;
    fs::create_dir_all(dir).map_err(|e| io_error("creating output directory", e))?;
    let mut tmp = PathBuf::from(dir);
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("artifact");
    tmp.push(format!(".{name}.tmp"));
    {
        let mut file = fs::File::create(&tmp).map_err(|e| io_error("creating temp file", e))?;
        file.write_all(bytes)
            .map_err(|e| io_error("writing temp file", e))?;
        file.sync_all().map_err(|e| io_error("syncing temp file", e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io_error("renaming temp file", e))
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))
}

/// Exclusive lock on an output directory, released on drop. Prevents two
/// commands from interleaving writes into the same artifact tree.
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(output_dir: &Path) -> Result<DirLock> {
        fs::create_dir_all(output_dir).map_err(|e| io_error("creating output directory", e))?;
        let path = output_dir.join(".lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(DirLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::data(
                format!(
                    "output directory is locked by another command ({} exists)",
                    path.display()
                ),
            )),
            Err(e) => Err(io_error("acquiring directory lock", e)),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.txt");
        atomic_write(&path, b"one").unwrap();
        atomic_write(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        // No temp litter left behind.
        let names: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(names.len(), 1);
    }

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let lock = DirLock::acquire(dir.path()).unwrap();
        assert!(DirLock::acquire(dir.path()).is_err());
        drop(lock);
        assert!(DirLock::acquire(dir.path()).is_ok());
    }
}
