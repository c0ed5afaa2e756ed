use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use eo_core::instances::{format_instance, Instance};
use eo_core::sa::Calibration;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

pub fn digest(instance: &Instance) -> String {
    format!("{:x}", Sha256::digest(format_instance(instance).as_bytes()))
}

/// One reproducibility record, written as a line of `manifest.jsonl`.
#[derive(Debug)]
pub struct Manifest {
    id: String,
    command: Vec<String>,
    seed: u64,
    instances: Vec<Value>,
    parameters: Value,
    calibration: Option<Value>,
    outputs: Vec<String>,
}

impl Manifest {
    /// The id hashes the command line without `--out`, so identical
    /// experiments carry identical ids wherever they are written.
    pub fn new(args: &[String], seed: u64, parameters: Value) -> Self {
        let mut hasher = Sha256::new();
        let mut skip = false;
        for a in args.iter().skip(1) {
            if skip {
                skip = false;
                continue;
            }
            if a == "--out" {
                skip = true;
                continue;
            }
            if a.starts_with("--out=") {
                continue;
            }
            hasher.update(a.as_bytes());
            hasher.update([0]);
        }
        hasher.update(env!("CARGO_PKG_VERSION").as_bytes());
        let id = format!("{:x}", hasher.finalize())[..16].to_string();
        Self {
            id,
            command: args.to_vec(),
            seed,
            instances: Vec::new(),
            parameters,
            calibration: None,
            outputs: Vec::new(),
        }
    }

    pub fn add_instance(&mut self, label: String, instance: &Instance) {
        self.instances.push(json!({ "label": label, "digest": digest(instance), "n": instance.n() }));
    }

    pub fn set_calibration(&mut self, label: String, cal: &Calibration) {
        let entry = json!({
            "label": label,
            "eo_ns_per_step": cal.eo_ns_per_step,
            "sa_ns_per_trial": cal.sa_ns_per_trial,
            "ops": cal.ops,
        });
        match self.calibration.as_mut() {
            Some(Value::Array(list)) => list.push(entry),
            _ => self.calibration = Some(Value::Array(vec![entry])),
        }
    }

    /// Writes `lines` to `name` inside `dir`, preceded by the manifest reference.
    pub fn write_csv(&mut self, dir: &Path, name: &str, body: &str) -> CliResult<PathBuf> {
        let path = dir.join(name);
        let text = format!("# manifest: {}\n{body}", self.id);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn write_file(&mut self, dir: &Path, name: &str, body: &str) -> CliResult<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "command": self.command,
            "seed": self.seed,
            "instances": self.instances,
            "parameters": self.parameters,
            "calibration": self.calibration,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "outputs": self.outputs,
        })
    }

    pub fn append(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join(MANIFEST_FILE);
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| CliError::io(&path, e))?;
        writeln!(file, "{}", self.to_json()).map_err(|e| CliError::io(&path, e))
    }
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}
