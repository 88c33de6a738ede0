use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgo_core::config::RunConfig;
use sha2::{Digest, Sha256};

use crate::args::Command;

/// Default output root when neither `--out-root` nor the environment
/// variable is set.
pub const DEFAULT_OUTPUT_ROOT: &str = "runs";
pub const OUTPUT_ROOT_ENV: &str = "SGO_OUTPUT_ROOT";

/// A file produced by a job, held in memory until the whole job succeeded.
pub struct Output {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub struct JobResult {
    pub outputs: Vec<Output>,
    pub summary: serde_json::Value,
}

impl JobResult {
    pub fn new(summary: serde_json::Value) -> Self {
        JobResult {
            outputs: Vec::new(),
            summary,
        }
    }

    pub fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.outputs.push(Output {
            name: name.to_string(),
            bytes: bytes.into(),
        });
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        self.add(name, json(value));
    }
}

/// Pretty JSON with a trailing newline; struct fields keep declaration order.
pub fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable value");
    bytes.push(b'\n');
    bytes
}

/// Numeric CSV: header row, comma separated, LF, 17 significant digits.
pub fn csv<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to re-run a job.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub job: Command,
    pub config: RunConfig,
    /// Input files and their SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Output files and their SHA-256.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(job: &Command, config: &RunConfig, inputs: BTreeMap<String, String>, result: &JobResult) -> Self {
        Manifest {
            tool: "sgo".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            job: job.clone(),
            config: config.clone(),
            inputs,
            outputs: result
                .outputs
                .iter()
                .map(|o| (o.name.clone(), sha256_hex(&o.bytes)))
                .collect(),
        }
    }

    /// First eight hex digits of the hash of job and configuration.
    pub fn short_hash(&self) -> String {
        let mut bytes = json(&self.job);
        bytes.extend(json(&self.config));
        sha256_hex(&bytes)[..8].to_string()
    }
}

pub fn output_root(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| {
            std::env::var_os(OUTPUT_ROOT_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

/// Writes all outputs plus `manifest.json` into a fresh directory. Files are
/// staged in a sibling directory and moved into place in one rename.
pub fn write_run(
    root: &Path,
    run_dir: Option<&Path>,
    subcommand: &str,
    manifest: &Manifest,
    result: &JobResult,
) -> std::io::Result<PathBuf> {
    let target = match run_dir {
        Some(dir) => {
            if dir.exists() {
                if fs::read_dir(dir)?.next().is_some() {
                    return Err(std::io::Error::new(
                        std::io::ErrorKind::AlreadyExists,
                        format!("run directory {} is not empty", dir.display()),
                    ));
                }
                fs::remove_dir(dir)?;
            }
            dir.to_path_buf()
        }
        None => {
            fs::create_dir_all(root)?;
            let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
            let base = format!("{stamp}-{subcommand}-{}", manifest.short_hash());
            let mut candidate = root.join(&base);
            let mut n = 1;
            while candidate.exists() {
                candidate = root.join(format!("{base}-{n}"));
                n += 1;
            }
            candidate
        }
    };
    let parent = target
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(parent)?;
    let name = target
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let staging = parent.join(format!(".staging-{name}-{}", std::process::id()));
    let write_all = || -> std::io::Result<()> {
        fs::create_dir_all(&staging)?;
        for o in &result.outputs {
            fs::write(staging.join(&o.name), &o.bytes)?;
        }
        fs::write(staging.join("manifest.json"), json(manifest))?;
        fs::rename(&staging, &target)
    };
    if let Err(e) = write_all() {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }
    Ok(target)
}
