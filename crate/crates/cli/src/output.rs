//! Failure classes with their exit codes, and overwrite-safe output files.

use std::fmt;
use std::path::PathBuf;

use poincare_core::Error;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or invalid spec, refused overwrite: exit 2.
    Config(String),
    /// A numerical routine failed: exit 3.
    Numerical(String),
    /// A checked claim did not hold: exit 4.
    Assertion(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Assertion(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Assertion(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_) | Error::Domain(_) | Error::Json(_) => Failure::Config(e.to_string()),
            Error::Numerical(_) | Error::Internal(_) => Failure::Numerical(e.to_string()),
        }
    }
}

/// Output directory that refuses to overwrite files unless forced.
pub struct Output {
    dir: PathBuf,
    force: bool,
}

impl Output {
    pub fn new(dir: PathBuf, force: bool) -> Self {
        Self { dir, force }
    }

    /// Write every file, or none of them if any would be overwritten without
    /// `--force`.
    pub fn write_all(&self, files: &[(&str, String)]) -> Result<(), Failure> {
        if !self.force {
            if let Some((name, _)) = files.iter().find(|(name, _)| self.dir.join(name).exists()) {
                return Err(Failure::Config(format!(
                    "{} exists; pass --force to overwrite",
                    self.dir.join(name).display()
                )));
            }
        }
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| Failure::Config(format!("cannot create {}: {e}", self.dir.display())))?;
        for (name, contents) in files {
            let path = self.dir.join(name);
            std::fs::write(&path, contents)
                .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}
