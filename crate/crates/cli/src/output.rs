//! Artifact destinations. Files are written to a temporary sibling and then
//! renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;

pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Sink { dir }
    }

    /// Written to `name` under the output directory, else to stdout.
    pub fn primary(&self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(name), bytes),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
                Ok(())
            }
        }
    }

    /// Written only when an output directory is set.
    pub fn extra(&self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(name), bytes),
            None => Ok(()),
        }
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .context("output path has no file name")?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let res = (|| {
        let mut fh = std::fs::File::create(&tmp)?;
        fh.write_all(bytes)?;
        fh.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    res.with_context(|| format!("writing {}", path.display()))
}
