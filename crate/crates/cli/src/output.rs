//! Result files. Every CSV carries `config_sha256` and `seed` columns and every
//! JSON document a header with the same fields.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

pub struct Emitter {
    dir: PathBuf,
    command: String,
    config: ExperimentConfig,
    hash: String,
    outputs: Vec<String>,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema: String,
    schema_version: u32,
    config_sha256: &'a str,
    seed: u64,
    data: &'a T,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    schema_version: u32,
    tool_version: &'static str,
    command: &'a str,
    config_sha256: &'a str,
    seed: u64,
    config: &'a ExperimentConfig,
    outputs: &'a [String],
}

impl Emitter {
    pub fn new(config: &ExperimentConfig, command: &str) -> Result<Self> {
        fs::create_dir_all(&config.out)
            .with_context(|| format!("creating {}", config.out.display()))?;
        Ok(Self {
            dir: config.out.clone(),
            command: command.to_string(),
            config: config.clone(),
            hash: config.hash(),
            outputs: Vec::new(),
        })
    }

    /// Writes a CSV table; `rows` may be empty, giving a header-only file.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut w =
            csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        let mut head: Vec<&str> = header.to_vec();
        head.extend(["config_sha256", "seed"]);
        w.write_record(&head)?;
        let seed = self.config.seed.to_string();
        for r in rows {
            debug_assert_eq!(r.len(), header.len());
            let mut rec: Vec<&str> = r.iter().map(String::as_str).collect();
            rec.push(&self.hash);
            rec.push(&seed);
            w.write_record(&rec)?;
        }
        w.flush()?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, kind: &str, data: &T) -> Result<PathBuf> {
        let doc = Document {
            schema: format!("wiretap-ldpc/{kind}"),
            schema_version: SCHEMA_VERSION,
            config_sha256: &self.hash,
            seed: self.config.seed,
            data,
        };
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    /// Writes a file verbatim (e.g. an alist) and records it in the manifest.
    pub fn raw(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    /// Writes `config.toml` (the resolved configuration) and `manifest.json`.
    pub fn finish(mut self) -> Result<PathBuf> {
        let toml = self.config.to_toml()?;
        self.raw("config.toml", &toml)?;
        let m = Manifest {
            schema: "wiretap-ldpc/manifest",
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            config_sha256: &self.hash,
            seed: self.config.seed,
            config: &self.config,
            outputs: &self.outputs,
        };
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&m)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Shortest round-trip form; exponent notation for very small or large values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
