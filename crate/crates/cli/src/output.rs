use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const SEED_RULE: &str = "sample i of a sweep uses seed_base + i; each seed drives ChaCha8 with \
                             separate streams for noise paths and ensemble matrices";

/// An output directory that remembers what was written to it.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: PathBuf) -> Result<Self> {
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root, written: Vec::new() })
    }

    /// Writes `name` through `fill`, buffered.
    pub fn write(&mut self, name: &str, fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
        let path = self.root.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        fill(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
            writeln!(w)
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        self.write(name, |w| w.write_all(text.as_bytes()))
    }

    /// `manifest.json`: everything needed to rerun the command.
    pub fn finish(mut self, command: &str, parameters: impl Serialize, seeds: &[u64], extra: Value) -> Result<()> {
        let manifest = json!({
            "tool": "stochairy",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "argv": std::env::args().skip(1).collect::<Vec<_>>(),
            "parameters": parameters,
            "seeds": seeds,
            "seed_rule": SEED_RULE,
            "outputs": self.written.clone(),
            "results": extra,
        });
        self.write_json("manifest.json", &manifest)
    }
}
