//! Binary kernel cache.
//!
//! Little-endian layout:
//!
//! ```text
//! magic "SGK1" | version u32 | kind u8 | mode u8 | flags u8
//! | nx ny ntheta u32 | half_x half_y period f64
//! | sigma sigma1 sigma3 sigma_iso rho f64 | n_paths steps u64 | step f64 | seed u64
//! | crc32(header) u32 | nx*ny*ntheta f64 (x-major) | crc32(payload) u32
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{GridSpec, KernelGrid, KernelKind, KernelParams};
use crate::error::{Error, Result};
use crate::geometry::Polarity;

pub const MAGIC: &[u8; 4] = b"SGK1";
pub const FORMAT_VERSION: u32 = 1;

const FLAG_SYMMETRIZED: u8 = 1;

pub fn write_kernel<W: Write>(grid: &KernelGrid, mut out: W) -> Result<()> {
    let mut header = Vec::with_capacity(128);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    header.push(grid.params.kind.code());
    header.push(grid.params.mode.code());
    header.push(if grid.symmetrized { FLAG_SYMMETRIZED } else { 0 });
    for n in [grid.spec.nx, grid.spec.ny, grid.spec.ntheta] {
        let n = u32::try_from(n).map_err(|_| Error::InvalidArgument(format!("grid dimension {n} exceeds u32")))?;
        header.extend_from_slice(&n.to_le_bytes());
    }
    for v in [grid.spec.half_x, grid.spec.half_y, grid.period] {
        header.extend_from_slice(&v.to_le_bytes());
    }
    header.extend(grid.params.to_bytes());
    let header_crc = crc32fast::hash(&header);

    let mut payload = Vec::with_capacity(grid.values.len() * 8);
    for v in &grid.values {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    let payload_crc = crc32fast::hash(&payload);

    out.write_all(&header)?;
    out.write_all(&header_crc.to_le_bytes())?;
    out.write_all(&payload)?;
    out.write_all(&payload_crc.to_le_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn read_kernel<R: Read>(mut input: R) -> Result<KernelGrid> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn save_kernel(grid: &KernelGrid, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_kernel(grid, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_kernel(path: impl AsRef<Path>) -> Result<KernelGrid> {
    decode(&fs::read(path)?)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, field: &'static str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Format {
                field,
                reason: format!("truncated at byte {} of {}", self.bytes.len(), self.pos + n),
            }),
        }
    }

    fn u8(&mut self, field: &'static str) -> Result<u8> {
        Ok(self.take(1, field)?[0])
    }

    fn u32(&mut self, field: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, field)?.try_into().unwrap()))
    }

    fn u64(&mut self, field: &'static str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, field)?.try_into().unwrap()))
    }

    fn f64(&mut self, field: &'static str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, field)?.try_into().unwrap()))
    }
}

fn decode(bytes: &[u8]) -> Result<KernelGrid> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4, "magic")? != MAGIC {
        return Err(Error::Format {
            field: "magic",
            reason: "not a kernel cache file".into(),
        });
    }
    let version = c.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Format {
            field: "version",
            reason: format!("unsupported version {version}, expected {FORMAT_VERSION}"),
        });
    }
    let kind_code = c.u8("kind")?;
    let kind = KernelKind::from_code(kind_code).ok_or_else(|| Error::Format {
        field: "kind",
        reason: format!("unknown kernel kind code {kind_code}"),
    })?;
    let mode_code = c.u8("mode")?;
    let mode = Polarity::from_code(mode_code).ok_or_else(|| Error::Format {
        field: "mode",
        reason: format!("unknown mode code {mode_code}"),
    })?;
    let flags = c.u8("flags")?;
    let nx = c.u32("dims")? as usize;
    let ny = c.u32("dims")? as usize;
    let ntheta = c.u32("dims")? as usize;
    let half_x = c.f64("extent")?;
    let half_y = c.f64("extent")?;
    let period = c.f64("extent")?;
    let params = KernelParams {
        kind,
        sigma: c.f64("sigma")?,
        sigma1: c.f64("sigma1")?,
        sigma3: c.f64("sigma3")?,
        sigma_iso: c.f64("sigma_iso")?,
        rho: c.f64("rho")?,
        n_paths: c.u64("n_paths")?,
        steps: c.u64("steps")?,
        step: c.f64("step")?,
        seed: c.u64("seed")?,
        mode,
    };
    let header_end = c.pos;
    let stored = c.u32("header_crc")?;
    if crc32fast::hash(&bytes[..header_end]) != stored {
        return Err(Error::Checksum { field: "header" });
    }

    let spec = GridSpec {
        nx,
        ny,
        ntheta,
        half_x,
        half_y,
    };
    spec.validate(mode).map_err(|e| Error::Format {
        field: "dims",
        reason: e.to_string(),
    })?;
    let len = nx
        .checked_mul(ny)
        .and_then(|v| v.checked_mul(ntheta))
        .and_then(|v| v.checked_mul(8))
        .ok_or_else(|| Error::Format {
            field: "dims",
            reason: "grid too large".into(),
        })?;
    let payload = c.take(len, "values")?;
    let stored = c.u32("payload_crc")?;
    if crc32fast::hash(payload) != stored {
        return Err(Error::Checksum { field: "payload" });
    }
    if c.pos != bytes.len() {
        return Err(Error::Format {
            field: "payload_crc",
            reason: format!("{} trailing bytes", bytes.len() - c.pos),
        });
    }
    let values = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();

    Ok(KernelGrid {
        spec,
        period,
        values,
        params,
        symmetrized: flags & FLAG_SYMMETRIZED != 0,
    })
}
