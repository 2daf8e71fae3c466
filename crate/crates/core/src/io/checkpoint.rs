//! Binary checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! b"LCDO0001"
//! u64 length, config text (RunConfig::print)
//! u64 iter, u64 rung, u64 rung_iter, f64 tau_n, f64 tau_phi, f64 tau_v, f64 last_energy
//! u64 nx, u64 ny, u64 nz
//! n   as 3·N f64, x-fastest, components interleaved
//! φ   as N f64
//! v   as N f64
//! u64 CRC-64/ECMA-182 of every preceding byte
//! ```

use std::path::Path;

use crc::{Crc, CRC_64_ECMA_182};

use super::config::RunConfig;
use crate::grid::{FieldState, ScalarField, VectorField};
use crate::optimizer::Progress;
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"LCDO0001";
const CRC: Crc<u64> = Crc::<u64>::new(&CRC_64_ECMA_182);

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: RunConfig,
    pub progress: Progress,
    pub state: FieldState,
}

pub fn checksum(bytes: &[u8]) -> u64 {
    CRC.checksum(bytes)
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let grid = self.state.grid();
        let text = self.config.print();
        let mut b = Vec::with_capacity(128 + text.len() + 40 * grid.len());
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&(text.len() as u64).to_le_bytes());
        b.extend_from_slice(text.as_bytes());
        let p = &self.progress;
        for x in [p.iter, p.rung, p.rung_iter] {
            b.extend_from_slice(&(x as u64).to_le_bytes());
        }
        for x in [p.tau[0], p.tau[1], p.tau[2], p.last_energy] {
            b.extend_from_slice(&x.to_le_bytes());
        }
        for d in grid.dims {
            b.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for x in self.state.n.data.as_flattened().iter().chain(&self.state.phi.data).chain(&self.state.v.data) {
            b.extend_from_slice(&x.to_le_bytes());
        }
        let sum = checksum(&b);
        b.extend_from_slice(&sum.to_le_bytes());
        b
    }

    /// Verifies the checksum before looking at anything else, so a
    /// corrupted byte anywhere reports [`Error::Checksum`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 16 {
            return Err(Error::Format(format!("file too short ({} bytes)", bytes.len())));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
        let computed = checksum(body);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        let mut r = Reader { b: body, at: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let len = r.u64()? as usize;
        let text = std::str::from_utf8(r.take(len)?).map_err(|e| Error::Format(format!("config echo: {e}")))?;
        let config = RunConfig::parse(text)?;
        let (iter, rung, rung_iter) = (r.u64()? as usize, r.u64()? as usize, r.u64()? as usize);
        let tau = [r.f64()?, r.f64()?, r.f64()?];
        let last_energy = r.f64()?;
        let dims = [r.u64()? as usize, r.u64()? as usize, r.u64()? as usize];
        let grid = config.grid()?;
        if dims != grid.dims {
            return Err(Error::Format(format!("payload dims {dims:?} disagree with config {:?}", grid.dims)));
        }
        let cells = grid.len();
        let n: Vec<[f64; 3]> = (0..cells).map(|_| Ok([r.f64()?, r.f64()?, r.f64()?])).collect::<Result<_>>()?;
        let phi = (0..cells).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let v = (0..cells).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        if r.at != body.len() {
            return Err(Error::Format(format!("{} trailing bytes", body.len() - r.at)));
        }
        // fields are taken verbatim; FieldState::new would clamp
        let state = FieldState {
            n: VectorField::from_vec(grid, n)?,
            phi: ScalarField::from_vec(grid, phi)?,
            v: ScalarField::from_vec(grid, v)?,
        };
        Ok(Self { config, progress: Progress { iter, rung, rung_iter, tau, last_energy }, state })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

struct Reader<'a> {
    b: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.b.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated at byte {}", self.at)))?;
        let s = &self.b[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}
