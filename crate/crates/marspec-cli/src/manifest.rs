//! Run manifests: every command writes one JSON manifest recording what ran,
//! with which flags and seed, which inputs (by content hash), and which
//! outputs it produced. Output files point back at the manifest — JSON
//! documents through a `manifest` field, CSVs through a leading
//! `# manifest:` comment line — so any artifact can be traced to the exact
//! invocation that made it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use marspec::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Reproducibility record for one CLI invocation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    /// Subcommand name.
    pub command: String,
    /// Full command line as given (program name dropped).
    pub argv: Vec<String>,
    /// Random seed, for commands that draw.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Library version the binary was built against.
    pub version: String,
    /// Input files with content hashes.
    pub inputs: Vec<InputDigest>,
    /// Files this run wrote (the manifest itself excluded).
    pub outputs: Vec<String>,
    /// Wall-clock creation time; the only non-deterministic field.
    pub created_utc: String,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            argv: std::env::args().skip(1).collect(),
            seed: None,
            version: marspec_version(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            created_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Hashes and records an input file.
    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: format!("{digest:x}"),
        });
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Writes the manifest next to the outputs and returns its path.
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, json + "\n")?;
        Ok(())
    }
}

pub fn marspec_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// `out.csv` -> `out.manifest.json`; `stem` (no extension) -> `stem.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

/// Appends a suffix to an output stem: `out/mc` + `_rates.csv` -> `out/mc_rates.csv`.
pub fn stem_output(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(suffix);
    stem.with_file_name(name)
}

/// Writes a headered CSV whose first line is a provenance comment pointing
/// at the manifest.
pub fn write_csv<I>(path: &Path, manifest: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
    let manifest_name = manifest
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| manifest.display().to_string());
    writeln!(file, "# manifest: {manifest_name}")?;
    writeln!(file, "{header}")?;
    for row in rows {
        writeln!(file, "{row}")?;
    }
    file.flush()?;
    Ok(())
}

/// Serializes a JSON document with a `manifest` back-reference injected at
/// the top level.
pub fn write_json<T: Serialize>(path: &Path, manifest: &Path, doc: &T) -> Result<()> {
    let mut value = serde_json::to_value(doc).expect("document serializes");
    if let serde_json::Value::Object(map) = &mut value {
        let manifest_name = manifest
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| manifest.display().to_string());
        map.insert(
            "manifest".to_string(),
            serde_json::Value::String(manifest_name),
        );
    }
    let json = serde_json::to_string_pretty(&value).expect("document serializes");
    fs::write(path, json + "\n")?;
    Ok(())
}
