//! On-disk format for states and operators.
//!
//! A file is a single JSON header line (terminated by `\n`) followed by a
//! raw little-endian payload of `f64` pairs, `(re, im)`, in logical
//! row-major order. MPS/MPO payloads concatenate the site tensors in chain
//! order; the header records the shapes so the payload carries no framing.
//!
//! ```text
//! {"format":"dismagick-state","version":1,"kind":"mps",...}\n
//! <re0><im0><re1><im1>...
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mpo::{Mpo, MpoError};
use crate::mps::{Mps, MpsError};
use crate::statevector::{StateError, Statevector};
use crate::types::{c64, C64};
use ndarray::{Array3, Array4};

/// Magic string in every header.
pub const FORMAT_NAME: &str = "dismagick-state";
/// Current format version.
pub const FORMAT_VERSION: u32 = 1;

/// Errors from reading or writing state files.
#[derive(Debug, Error)]
pub enum SerializeError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("header is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("expected kind {expected:?}, found {found:?}")]
    KindMismatch { expected: String, found: String },
    #[error("payload ended early: wanted {want} complex values, got {got}")]
    Truncated { want: usize, got: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error(transparent)]
    Mpo(#[from] MpoError),
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shapes: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<usize>,
}

impl Header {
    fn new(kind: &str) -> Self {
        Self {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            kind: kind.to_string(),
            qubits: None,
            shapes: None,
            center: None,
        }
    }

    fn shapes(&self) -> Result<&[Vec<usize>], SerializeError> {
        self.shapes
            .as_deref()
            .ok_or_else(|| SerializeError::Header("missing tensor shapes".into()))
    }
}

fn write_file(path: &Path, header: &Header, payload: &[&[C64]]) -> Result<(), SerializeError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    for chunk in payload {
        for z in *chunk {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_header_any<R: Read>(r: &mut R) -> Result<Header, SerializeError> {
    // Read up to the first newline by hand: the payload after it is binary,
    // so a line-oriented reader with a large buffer could swallow part of it.
    let mut line = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        let n = r.read(&mut byte)?;
        if n == 0 {
            return Err(SerializeError::Header("missing newline after header".into()));
        }
        if byte[0] == b'\n' {
            break;
        }
        line.push(byte[0]);
        if line.len() > 1 << 20 {
            return Err(SerializeError::Header("header line exceeds 1 MiB".into()));
        }
    }
    let header: Header = serde_json::from_slice(&line)?;
    if header.format != FORMAT_NAME {
        return Err(SerializeError::Header(format!(
            "format {:?}, want {FORMAT_NAME:?}",
            header.format
        )));
    }
    if header.version != FORMAT_VERSION {
        return Err(SerializeError::Header(format!(
            "version {}, this build reads {FORMAT_VERSION}",
            header.version
        )));
    }
    Ok(header)
}

fn read_header<R: Read>(r: &mut R, expected_kind: &str) -> Result<Header, SerializeError> {
    let header = read_header_any(r)?;
    if header.kind != expected_kind {
        return Err(SerializeError::KindMismatch {
            expected: expected_kind.to_string(),
            found: header.kind,
        });
    }
    Ok(header)
}

/// Reads just the header line and reports what the file holds
/// (`"statevector"`, `"mps"` or `"mpo"`).
pub fn peek_kind(path: impl AsRef<Path>) -> Result<String, SerializeError> {
    let mut r = BufReader::new(File::open(path.as_ref())?);
    Ok(read_header_any(&mut r)?.kind)
}

fn read_complex(r: &mut impl Read, want: usize) -> Result<Vec<C64>, SerializeError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let got = bytes.len() / 16;
    if got < want || bytes.len() % 16 != 0 {
        return Err(SerializeError::Truncated { want, got });
    }
    let mut out = Vec::with_capacity(want);
    for pair in bytes.chunks_exact(16).take(want) {
        let re = f64::from_le_bytes(pair[..8].try_into().expect("8-byte chunk"));
        let im = f64::from_le_bytes(pair[8..].try_into().expect("8-byte chunk"));
        out.push(c64(re, im));
    }
    Ok(out)
}

/// Write a statevector. Kind tag: `"statevector"`.
pub fn save_statevector(path: impl AsRef<Path>, sv: &Statevector) -> Result<(), SerializeError> {
    let mut header = Header::new("statevector");
    header.qubits = Some(sv.num_qubits());
    write_file(path.as_ref(), &header, &[sv.amplitudes()])
}

/// Read a statevector written by [`save_statevector`].
pub fn load_statevector(path: impl AsRef<Path>) -> Result<Statevector, SerializeError> {
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let header = read_header(&mut r, "statevector")?;
    let n = header
        .qubits
        .ok_or_else(|| SerializeError::Header("missing qubit count".into()))?;
    if n > 30 {
        return Err(SerializeError::Header(format!("{n} qubits is not readable here")));
    }
    let amps = read_complex(&mut r, 1usize << n)?;
    Ok(Statevector::from_amplitudes_raw(amps)?)
}

/// Write an MPS with its shapes and (if known) orthogonality center.
/// Kind tag: `"mps"`.
pub fn save_mps(path: impl AsRef<Path>, mps: &Mps) -> Result<(), SerializeError> {
    let mut header = Header::new("mps");
    header.shapes = Some(
        (0..mps.len())
            .map(|k| mps.tensor(k).shape().to_vec())
            .collect(),
    );
    header.center = mps.center();
    let chunks: Vec<Vec<C64>> = (0..mps.len())
        .map(|k| mps.tensor(k).iter().copied().collect())
        .collect();
    let views: Vec<&[C64]> = chunks.iter().map(|c| c.as_slice()).collect();
    write_file(path.as_ref(), &header, &views)
}

/// Read an MPS written by [`save_mps`].
pub fn load_mps(path: impl AsRef<Path>) -> Result<Mps, SerializeError> {
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let header = read_header(&mut r, "mps")?;
    let shapes = header.shapes()?.to_vec();
    let total: usize = shapes.iter().map(|s| s.iter().product::<usize>()).sum();
    let mut data = read_complex(&mut r, total)?;
    let mut tensors = Vec::with_capacity(shapes.len());
    for shape in &shapes {
        if shape.len() != 3 {
            return Err(SerializeError::Header(format!("rank-{} tensor in mps", shape.len())));
        }
        let n: usize = shape.iter().product();
        let rest = data.split_off(n);
        let t = Array3::from_shape_vec((shape[0], shape[1], shape[2]), data)
            .map_err(|e| SerializeError::Header(e.to_string()))?;
        tensors.push(t);
        data = rest;
    }
    Ok(Mps::from_tensors(tensors, header.center)?)
}

/// Write an MPO. Kind tag: `"mpo"`.
pub fn save_mpo(path: impl AsRef<Path>, mpo: &Mpo) -> Result<(), SerializeError> {
    let mut header = Header::new("mpo");
    header.shapes = Some(
        (0..mpo.len())
            .map(|k| mpo.tensor(k).shape().to_vec())
            .collect(),
    );
    let chunks: Vec<Vec<C64>> = (0..mpo.len())
        .map(|k| mpo.tensor(k).iter().copied().collect())
        .collect();
    let views: Vec<&[C64]> = chunks.iter().map(|c| c.as_slice()).collect();
    write_file(path.as_ref(), &header, &views)
}

/// Read an MPO written by [`save_mpo`].
pub fn load_mpo(path: impl AsRef<Path>) -> Result<Mpo, SerializeError> {
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let header = read_header(&mut r, "mpo")?;
    let shapes = header.shapes()?.to_vec();
    let total: usize = shapes.iter().map(|s| s.iter().product::<usize>()).sum();
    let mut data = read_complex(&mut r, total)?;
    let mut tensors = Vec::with_capacity(shapes.len());
    for shape in &shapes {
        if shape.len() != 4 {
            return Err(SerializeError::Header(format!("rank-{} tensor in mpo", shape.len())));
        }
        let n: usize = shape.iter().product();
        let rest = data.split_off(n);
        let t = Array4::from_shape_vec((shape[0], shape[1], shape[2], shape[3]), data)
            .map_err(|e| SerializeError::Header(e.to_string()))?;
        tensors.push(t);
        data = rest;
    }
    Ok(Mpo::from_tensors(tensors)?)
}
