use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Run metadata. Kept apart from the payload so that payloads of identical
/// configurations compare byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub timestamp_unix: u64,
}

impl Header {
    pub fn new(command: &'static str) -> Self {
        Self {
            tool: "torsion",
            version: env!("CARGO_PKG_VERSION"),
            command,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T> {
    pub header: Header,
    pub config: RunConfig,
    pub result: T,
}

/// Payloads that know how to lay themselves out as CSV.
pub trait CsvRows {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl<T: Serialize + CsvRows> Report<T> {
    pub fn new(command: &'static str, config: RunConfig, result: T) -> Self {
        Self {
            header: Header::new(command),
            config,
            result,
        }
    }

    /// The payload alone, as written for the configured format.
    pub fn payload_bytes(&self) -> Result<Vec<u8>, CliError> {
        match self.config.format {
            Format::Json => serde_json::to_vec_pretty(&self.result)
                .map_err(|e| CliError::Numerical(format!("serialization failed: {e}"))),
            Format::Csv => self.csv_bytes(),
        }
    }

    fn csv_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        w.write_record(self.result.header()).map_err(io)?;
        for row in self.result.rows() {
            w.write_record(&row).map_err(io)?;
        }
        w.into_inner()
            .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
    }

    /// Full document: JSON with header and config, or bare CSV.
    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        match self.config.format {
            Format::Json => {
                let mut v = serde_json::to_vec_pretty(self)
                    .map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))?;
                v.push(b'\n');
                Ok(v)
            }
            Format::Csv => self.csv_bytes(),
        }
    }

    pub fn emit(&self) -> Result<(), CliError> {
        let bytes = self.render()?;
        match &self.config.out {
            Some(path) => std::fs::write(path, bytes)?,
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}
