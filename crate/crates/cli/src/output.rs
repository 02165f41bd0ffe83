use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// What a command produced: text for the terminal, a JSON record, and named report files.
#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub json: Value,
    pub files: Vec<(String, String)>,
}

impl Output {
    pub fn new(text: impl Into<String>, json: Value) -> Self {
        Self { text: text.into(), json, files: Vec::new() }
    }

    pub fn file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.to_string(), contents));
        self
    }

    pub fn merge(&mut self, key: &str, other: Output) {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        self.text.push_str(&other.text);
        self.json[key] = other.json;
        self.files.extend(other.files);
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Write-then-rename, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> std::io::Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}

/// Report files plus manifest.json; everything except `timestamp` is a function of the config.
pub fn emit(dir: &Path, command: &str, seed: u64, config: &Value, out: &Output) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for (name, contents) in &out.files {
        write_atomic(dir, name, contents.as_bytes())?;
        files.push(json!({ "name": name, "sha256": sha256_hex(contents.as_bytes()) }));
    }
    let canonical = serde_json::to_string(config).expect("config serialises");
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config_hash": sha256_hex(canonical.as_bytes()),
        "config": config,
        "files": files,
        "timestamp": timestamp,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
    write_atomic(dir, "manifest.json", text.as_bytes())
}
