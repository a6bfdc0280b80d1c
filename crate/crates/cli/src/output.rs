use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use crate::Common;

/// The run directory, checked up front so nothing is half-written.
pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    /// Creates the directory and refuses to clobber any of `files` (or a
    /// non-empty `subdirs` entry) unless `--force` was given.
    pub fn prepare(common: &Common, files: &[&str], subdirs: &[&str]) -> Result<Self> {
        let Some(dir) = common.out_dir.clone() else {
            bail!("--out-dir is required (flag or config key out-dir)");
        };
        if !common.force {
            for f in files {
                let p = dir.join(f);
                if p.exists() {
                    bail!("{} exists; pass --force to overwrite", p.display());
                }
            }
            for d in subdirs {
                let p = dir.join(d);
                if p.read_dir().is_ok_and(|mut it| it.next().is_some()) {
                    bail!("{} is not empty; pass --force to overwrite", p.display());
                }
            }
        }
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for d in subdirs {
            let p = dir.join(d);
            std::fs::create_dir_all(&p).with_context(|| format!("creating {}", p.display()))?;
        }
        Ok(OutDir { dir })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let p = self.path(name);
        std::fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }
}

pub fn require_file(path: &Path, what: &str) -> Result<()> {
    if !path.is_file() {
        bail!("{what} {} does not exist", path.display());
    }
    Ok(())
}

pub fn required<T>(slot: Option<T>, flag: &str) -> Result<T> {
    slot.with_context(|| format!("--{flag} is required (flag or config key {flag})"))
}

/// Current UTC time for report headers.
pub fn generated_at() -> String {
    orgsignals::time::format_utc(chrono::Utc::now())
}
