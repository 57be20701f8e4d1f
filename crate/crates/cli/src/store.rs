use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Version written into every metadata document.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// An output directory. Each file is written to a temporary sibling and
/// renamed into place, so readers never observe a partial table.
#[derive(Debug, Clone)]
pub struct ResultStore {
    dir: PathBuf,
}

#[derive(Serialize)]
struct Metadata<'a, T: Serialize> {
    version: &'a str,
    config: &'a RunConfig,
    tables: &'a [String],
    summary: &'a T,
}

impl ResultStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_atomic(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let target = self.path(name);
        let tmp = self.path(&format!(".{name}.tmp"));
        let write = || -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, &target)
        };
        write().map_err(|e| CliError::io(&target, e))?;
        Ok(target)
    }

    /// `<command>.json`: the resolved configuration, the code version, the
    /// tables written by the run and a command-specific summary.
    pub fn write_metadata<T: Serialize>(
        &self,
        config: &RunConfig,
        tables: &[PathBuf],
        summary: &T,
    ) -> Result<PathBuf, CliError> {
        let names: Vec<String> = tables
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect();
        let doc = Metadata {
            version: CODE_VERSION,
            config,
            tables: &names,
            summary,
        };
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Format(e.to_string()))?;
        text.push('\n');
        self.write_atomic(&format!("{}.json", config.command.name()), text.as_bytes())
    }
}
