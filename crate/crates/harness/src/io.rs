//! Diagnostics CSV and field snapshots.
//!
//! A snapshot is a pair of files: a TOML header `<stem>.toml` and a payload
//! `<stem>.bin` holding `(Re, Im)` pairs of little-endian `f64` in row-major
//! node order.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nlsrelax_core::integrators::Scheme;
use nlsrelax_core::model::ModelSpec;
use nlsrelax_core::observables::DiagnosticsRecord;
use nlsrelax_core::spectral::{ComplexField, SpectralGrid, Space};
use nlsrelax_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const CSV_HEADER: [&str; 8] = [
    "step",
    "time",
    "mass",
    "energy",
    "rel_energy_error",
    "fp_iters",
    "krylov_iters",
    "gamma_clamps",
];

pub const SNAPSHOT_FORMAT: &str = "nlsrelax-snapshot";
pub const SNAPSHOT_LAYOUT: &str = "interleaved-complex-row-major";

/// File stem shared by a run's outputs, e.g. `quintic_generalized-relaxation_dt1e-3`.
pub fn output_stem(prefix: &str, scheme: Scheme, dt: f64) -> String {
    format!("{prefix}_{scheme}_dt{dt:e}")
}

/// Streams diagnostics rows, flushing after each so that a failed run
/// leaves a readable prefix.
pub struct DiagnosticsWriter {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl DiagnosticsWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
        writer.write_record(CSV_HEADER).map_err(|e| HarnessError::csv(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            writer,
        })
    }

    pub fn write(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        let row = [
            record.step.to_string(),
            format!("{:e}", record.time),
            format!("{:e}", record.mass),
            format!("{:e}", record.energy_scheme),
            format!("{:e}", record.rel_energy_error),
            record.report.fp_iterations.to_string(),
            record.report.krylov_iterations.to_string(),
            record.report.gamma_clamps.to_string(),
        ];
        self.writer.write_record(&row).map_err(|e| HarnessError::csv(&self.path, e))?;
        self.writer.flush().map_err(|e| HarnessError::io(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

/// One parsed diagnostics row.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct DiagnosticsRow {
    pub step: u64,
    pub time: f64,
    pub mass: f64,
    pub energy: f64,
    pub rel_energy_error: f64,
    pub fp_iters: usize,
    pub krylov_iters: usize,
    pub gamma_clamps: usize,
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    let header = reader.headers().map_err(|e| HarnessError::csv(path, e))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::Malformed {
            path: path.to_path_buf(),
            reason: format!("unexpected CSV header {header:?}"),
        });
    }
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<DiagnosticsRow>, _>>()
        .map_err(|e| HarnessError::csv(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub format: String,
    pub dtype: String,
    pub endianness: String,
    pub layout: String,
    pub dim: usize,
    pub modes: usize,
    pub lower: Vec<f64>,
    pub extent: Vec<f64>,
    pub step: u64,
    pub time: f64,
    pub scheme: String,
    pub dt: f64,
    pub parameters: SnapshotParameters,
    /// Payload file name, relative to the header.
    pub payload: String,
    pub payload_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotParameters {
    pub beta: f64,
    pub sigma: u32,
    pub lambda: f64,
    pub omega: f64,
}

impl SnapshotParameters {
    pub fn from_model(model: &ModelSpec) -> Self {
        Self {
            beta: model.beta(),
            sigma: model.sigma(),
            lambda: model.lambda(),
            omega: model.omega(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub values: Vec<Complex64>,
}

impl Snapshot {
    /// Rebuilds the grid described by the header and wraps the payload.
    pub fn field(&self) -> Result<ComplexField> {
        let bounds: Vec<(f64, f64)> = self
            .header
            .lower
            .iter()
            .zip(&self.header.extent)
            .map(|(lo, ext)| (*lo, lo + ext))
            .collect();
        let grid = SpectralGrid::new(&bounds, self.header.modes)
            .map_err(|e| HarnessError::Config(format!("snapshot grid: {e}")))?;
        ComplexField::from_values(&Arc::new(grid), self.values.clone(), Space::Physical)
            .map_err(|e| HarnessError::Config(format!("snapshot field: {e}")))
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Writes `<dir>/<stem>.toml` and `<dir>/<stem>.bin`; returns the header path.
pub fn write_snapshot(
    dir: &Path,
    stem: &str,
    phi: &ComplexField,
    step: u64,
    time: f64,
    scheme: Scheme,
    dt: f64,
    model: &ModelSpec,
) -> Result<PathBuf> {
    let grid = phi.grid();
    let payload = format!("{stem}.bin");
    let payload_path = dir.join(&payload);
    let header_path = dir.join(format!("{stem}.toml"));

    let mut bytes = Vec::with_capacity(16 * phi.len());
    for z in phi.values() {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    let header = SnapshotHeader {
        format: SNAPSHOT_FORMAT.into(),
        dtype: "f64".into(),
        endianness: "little".into(),
        layout: SNAPSHOT_LAYOUT.into(),
        dim: grid.dim(),
        modes: grid.modes(),
        lower: grid.lower().to_vec(),
        extent: grid.extent().to_vec(),
        step,
        time,
        scheme: scheme.name().into(),
        dt,
        parameters: SnapshotParameters::from_model(model),
        payload,
        payload_bytes: bytes.len() as u64,
    };

    let mut out = BufWriter::new(File::create(&payload_path).map_err(|e| HarnessError::io(&payload_path, e))?);
    out.write_all(&bytes)
        .and_then(|_| out.flush())
        .map_err(|e| HarnessError::io(&payload_path, e))?;
    let text = toml::to_string(&header).expect("snapshot header is representable");
    std::fs::write(&header_path, text).map_err(|e| HarnessError::io(&header_path, e))?;
    Ok(header_path)
}

/// Reads a snapshot from its header path and checks it against the payload.
pub fn read_snapshot(header_path: &Path) -> Result<Snapshot> {
    let malformed = |reason: String| HarnessError::Malformed {
        path: header_path.to_path_buf(),
        reason,
    };
    let text = std::fs::read_to_string(header_path).map_err(|e| HarnessError::io(header_path, e))?;
    let header: SnapshotHeader = toml::from_str(&text).map_err(|e| malformed(e.to_string()))?;
    if header.format != SNAPSHOT_FORMAT
        || header.dtype != "f64"
        || header.endianness != "little"
        || header.layout != SNAPSHOT_LAYOUT
    {
        return Err(malformed("unsupported format, dtype, endianness or layout".into()));
    }
    if header.lower.len() != header.dim || header.extent.len() != header.dim {
        return Err(malformed("grid bounds do not match dim".into()));
    }
    let points = header
        .modes
        .checked_pow(header.dim as u32)
        .ok_or_else(|| malformed("grid too large".into()))?;
    let expected = 16 * points as u64;
    if header.payload_bytes != expected {
        return Err(malformed(format!(
            "payload_bytes {} does not match a {}^{} grid ({expected} bytes)",
            header.payload_bytes, header.modes, header.dim
        )));
    }

    let payload_path = header_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&header.payload);
    let mut bytes = Vec::with_capacity(expected as usize);
    File::open(&payload_path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| HarnessError::io(&payload_path, e))?;
    if bytes.len() as u64 != expected {
        return Err(malformed(format!(
            "payload holds {} bytes, header declares {expected}",
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok(Snapshot { header, values })
}
