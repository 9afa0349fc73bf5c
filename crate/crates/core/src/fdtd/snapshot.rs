//! Field dumps: one JSON header line, then little-endian `f64` values in
//! row-major order.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub field: String,
    pub step: u64,
    pub byte_order: String,
    pub dtype: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub data: Vec<f64>,
}

impl Snapshot {
    pub fn new(field: &str, nx: usize, ny: usize, dx: f64, step: u64, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), nx * ny);
        Self {
            header: SnapshotHeader {
                nx,
                ny,
                dx,
                field: field.to_string(),
                step,
                byte_order: "little-endian".into(),
                dtype: "f64".into(),
            },
            data,
        }
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let header = serde_json::to_string(&self.header).map_err(|e| Error::invalid("snapshot", e.to_string()))?;
        out.write_all(header.as_bytes())?;
        out.write_all(b"\n")?;
        for v in &self.data {
            out.write_all(&v.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        self.write(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut r = std::io::BufReader::new(input);
        let mut line = String::new();
        r.read_line(&mut line)?;
        let header: SnapshotHeader =
            serde_json::from_str(line.trim_end()).map_err(|e| Error::invalid("snapshot", e.to_string()))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != 8 * header.nx * header.ny {
            return Err(Error::invalid(
                "snapshot",
                format!("expected {} values, found {} bytes", header.nx * header.ny, bytes.len()),
            ));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Ok(Self { header, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = Snapshot::new("hz", 3, 2, 1e-3, 42, vec![1.0, -2.5, 0.0, f64::MIN_POSITIVE, 7.0, -0.0]);
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        let first = buf.iter().position(|&b| b == b'\n').unwrap();
        assert!(std::str::from_utf8(&buf[..first]).unwrap().contains("\"byte_order\":\"little-endian\""));
        assert_eq!(&buf[first + 1..first + 9], &1.0f64.to_le_bytes());
        let back = Snapshot::read(buf.as_slice()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn truncated_data_is_rejected() {
        let s = Snapshot::new("ex", 2, 2, 1.0, 0, vec![0.0; 4]);
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        buf.pop();
        assert!(Snapshot::read(buf.as_slice()).is_err());
    }
}
