//! Result envelopes, deterministic JSON and CSV encoding, and atomic writes.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use spinstat_core::qcore::C64;

use crate::config::Parameters;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Metric {
    Real(f64),
    /// `[re, im]`.
    Complex([f64; 2]),
}

impl From<f64> for Metric {
    fn from(v: f64) -> Self {
        Metric::Real(v)
    }
}

impl From<C64> for Metric {
    fn from(z: C64) -> Self {
        Metric::Complex([z.re, z.im])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultEnvelope {
    pub schema_version: String,
    pub subcommand: String,
    pub seed: u64,
    pub phase_convention: String,
    pub parameters_echo: Parameters,
    pub metrics: BTreeMap<String, Metric>,
    pub tolerances: BTreeMap<String, f64>,
    pub failed_checks: Vec<String>,
    pub pass: bool,
}

/// Fixed 17-significant-digit scientific floats on top of pretty printing.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_json(envelope: &ResultEnvelope) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    envelope.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

/// A header plus rows of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub fn to_csv(table: &Table) -> CliResult<Vec<u8>> {
    if table.rows.is_empty() {
        return Err(CliError::EmptyInput);
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io("<csv buffer>", e.into_error()))
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn envelope() -> ResultEnvelope {
        let mut metrics = BTreeMap::new();
        metrics.insert("phase".into(), Metric::Real(std::f64::consts::PI));
        metrics.insert("rho10".into(), Metric::from(C64::new(0.0, -0.5)));
        ResultEnvelope {
            schema_version: SCHEMA_VERSION.into(),
            subcommand: "interferometer".into(),
            seed: 1,
            phase_convention: "test".into(),
            parameters_echo: Parameters {
                two_s: Some(1),
                alpha: Some(1.0),
                ..Default::default()
            },
            metrics,
            tolerances: BTreeMap::from([("phase".to_string(), 1e-9)]),
            failed_checks: vec![],
            pass: true,
        }
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_f64(std::f64::consts::PI), "3.1415926535897931e0");
        assert_eq!(format_f64(1e-9), "1.0000000000000001e-9");
        let text = String::from_utf8(to_json(&envelope()).unwrap()).unwrap();
        assert!(text.contains("\"phase\": 3.1415926535897931e0"));
        assert!(text.contains("\"alpha\": 1.0000000000000000e0"));
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn json_round_trips() {
        let e = envelope();
        let bytes = to_json(&e).unwrap();
        let back: ResultEnvelope = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, e);
        assert_eq!(to_json(&back).unwrap(), bytes);
    }

    #[test]
    fn csv_layout() {
        let t = Table {
            header: vec!["alpha", "note"],
            rows: vec![
                vec!["0".into(), "plain".into()],
                vec!["1".into(), "has,comma".into()],
            ],
        };
        let text = String::from_utf8(to_csv(&t).unwrap()).unwrap();
        assert_eq!(text, "alpha,note\n0,plain\n1,\"has,comma\"\n");
        let empty = Table {
            header: vec!["alpha"],
            rows: vec![],
        };
        assert!(matches!(to_csv(&empty), Err(CliError::EmptyInput)));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(
            std::fs::read_dir(path.parent().unwrap()).unwrap().count(),
            1
        );
    }
}
