//! Output directory handling. Every payload embeds the resolved configuration;
//! the wall-clock time lives only in `manifest.json`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::Config;
use crate::CliError;

pub struct Output {
    dir: PathBuf,
    pub csv: bool,
    pub json: bool,
    written: Vec<String>,
}

impl Output {
    pub fn open(cfg: &Config, default_dir: &str, force_flag: bool) -> Result<Self, CliError> {
        let dir = PathBuf::from(cfg.str_or("output.out_dir", default_dir)?);
        let force = force_flag || cfg.bool_or("output.force", false)?;
        let formats = cfg.str_or("output.formats", "csv,json")?;
        let (mut csv, mut json) = (false, false);
        for f in formats.split(',').map(str::trim) {
            match f {
                "csv" => csv = true,
                "json" => json = true,
                other => {
                    return Err(CliError::Config(format!("unknown output format `{other}`; expected csv and/or json")))
                }
            }
        }
        if dir.exists() {
            let busy =
                fs::read_dir(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?.next().is_some();
            if busy && !force {
                return Err(CliError::Config(format!(
                    "output directory {} exists and is not empty; pass --force to overwrite",
                    dir.display()
                )));
            }
        }
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Output { dir, csv, json, written: Vec::new() })
    }

    /// Opens `name` for writing and records it for the manifest.
    pub fn file(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
        }
        self.written.push(name.to_string());
        File::create(&path).map(BufWriter::new).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// `{"config": .., "<key>": payload}` as pretty JSON.
    pub fn write_json(&mut self, name: &str, cfg: &Config, key: &str, payload: Value) -> Result<(), CliError> {
        let doc = json!({ "config": cfg.consumed(), key: payload });
        let mut f = self.file(name)?;
        serde_json::to_writer_pretty(&mut f, &doc).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(f)?;
        f.flush()?;
        Ok(())
    }

    /// Header comment lines, a column row, then `rows`.
    pub fn write_csv(
        &mut self,
        name: &str,
        cfg: &Config,
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let mut f = self.file(name)?;
        for line in cfg.header_lines() {
            writeln!(f, "# {line}")?;
        }
        writeln!(f, "{}", columns.join(","))?;
        for row in rows {
            writeln!(f, "{}", row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","))?;
        }
        f.flush()?;
        Ok(())
    }

    pub fn finish(mut self, command: &str) -> Result<PathBuf, CliError> {
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let files = std::mem::take(&mut self.written);
        let doc = json!({ "command": command, "created_unix": created, "files": files });
        let mut f = self.file("manifest.json")?;
        serde_json::to_writer_pretty(&mut f, &doc).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(f)?;
        f.flush()?;
        Ok(self.dir)
    }
}

/// RFC 4180 quoting where needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
