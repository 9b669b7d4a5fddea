use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const TOOL: &str = concat!("holofol ", env!("CARGO_PKG_VERSION"));

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Run identity written at the top of every output file. The config hash
/// covers the command, the input bytes and every option that affects the
/// results; output directory and thread count are excluded.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    /// Tolerances and budgets in effect, in a fixed order.
    pub settings: Vec<(String, String)>,
}

impl Header {
    pub fn new<C: Serialize>(command: &str, config: &C, seed: u64, settings: Vec<(String, String)>) -> Self {
        let canonical = serde_json::to_vec(config).expect("config serializes");
        Self {
            tool: TOOL.to_string(),
            command: command.to_string(),
            config_sha256: sha256_hex(&canonical),
            seed,
            settings,
        }
    }

    fn lines(&self) -> Vec<String> {
        let mut out = vec![
            self.tool.clone(),
            format!("command: {}", self.command),
            format!("config_sha256: {}", self.config_sha256),
            format!("seed: {}", self.seed),
        ];
        out.extend(self.settings.iter().map(|(k, v)| format!("{k}: {v}")));
        out
    }

    /// `# `-prefixed lines for CSV and text files.
    pub fn comment_block(&self) -> String {
        self.lines().iter().map(|l| format!("# {l}\n")).collect()
    }

    pub fn xml_comment(&self) -> String {
        format!("<!--\n{}-->\n", self.lines().iter().map(|l| format!("  {l}\n")).collect::<String>())
    }
}

/// Writes output files under one directory and remembers their paths.
pub struct Outputs {
    pub dir: PathBuf,
    pub header: Header,
    pub written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path, header: Header) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            header,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: String) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// CSV or plain text with the header as comment lines.
    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let full = format!("{}{}", self.header.comment_block(), body);
        self.write(name, full)
    }

    /// JSON object `{"header": ..., "data": ...}`.
    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            header: &'a Header,
            data: &'a T,
        }
        let mut body = serde_json::to_string_pretty(&Doc {
            header: &self.header,
            data,
        })
        .expect("report serializes");
        body.push('\n');
        self.write(name, body)
    }

    pub fn svg(&mut self, name: &str, svg: &str) -> Result<(), CliError> {
        // keep the XML declaration-free document valid: comment after the root tag
        let body = match svg.find('>') {
            Some(i) => format!("{}\n{}{}", &svg[..=i], self.header.xml_comment(), &svg[i + 1..]),
            None => svg.to_string(),
        };
        self.write(name, body)
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}
