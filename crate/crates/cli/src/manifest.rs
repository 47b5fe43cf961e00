//! Run manifests: enough to replay any output (argv, input hashes, seed,
//! versions).

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Default, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub threads: usize,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub exit_code: i32,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn hash_file(path: &Path) -> Option<FileHash> {
    let bytes = std::fs::read(path).ok()?;
    Some(FileHash {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

impl Manifest {
    pub fn new(argv: Vec<String>) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            argv,
            threads: rayon::current_num_threads(),
            ..Default::default()
        }
    }

    /// Records an input file; `builtin:` names carry no file.
    pub fn input(&mut self, spec: &str) {
        if spec.starts_with("builtin:") {
            return;
        }
        if let Some(h) = hash_file(Path::new(spec)) {
            self.inputs.push(h);
        }
    }

    pub fn output(&mut self, path: &Path) {
        if let Some(h) = hash_file(path) {
            self.outputs.push(h);
        }
    }

    /// Written next to `out` when there is one, else to the error stream.
    pub fn emit(&self, out: Option<&Path>) {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        match out {
            Some(p) => {
                let mut name = p.as_os_str().to_owned();
                name.push(".manifest.json");
                if let Err(e) = std::fs::write(PathBuf::from(name), text + "\n") {
                    eprintln!("warning: could not write manifest: {e}");
                }
            }
            None => eprintln!("manifest: {}", serde_json::to_string(self).expect("manifest serializes")),
        }
    }
}
