use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

/// Writes `content` to `path` through a temp file in the same directory and
/// a rename, so readers never see a partial artifact.
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// To `path` when given, else to stdout.
pub fn emit(path: Option<&Path>, content: &str) -> io::Result<()> {
    match path {
        Some(p) => write_atomic(p, content),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()
        }
    }
}

#[derive(Serialize)]
pub struct Diagnostic<'a> {
    pub status: &'static str,
    pub command: &'a str,
    pub kind: String,
    pub message: String,
}

impl<'a> Diagnostic<'a> {
    pub fn new(command: &'a str, kind: String, message: String) -> Self {
        Self {
            status: "error",
            command,
            kind,
            message,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagnostic serializes")
    }
}

/// Variant name of an error's `Debug` form, e.g. `Accuracy`.
pub fn kind_of(e: &impl std::fmt::Debug) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric() && c != '_')
        .next()
        .unwrap_or("Error")
        .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.csv");
        write_atomic(&p, "one\n").unwrap();
        write_atomic(&p, "two\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two\n");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn kinds() {
        let e = casimir_core::Error::Accuracy {
            estimate: 1.0,
            requested: 0.5,
        };
        assert_eq!(kind_of(&e), "Accuracy");
        assert_eq!(kind_of(&casimir_core::Error::DivisionByZero), "DivisionByZero");
    }
}
