//! `.zmf` field snapshots: little-endian header
//! `"ZMF1" | N: u32 | L: f64 | n_components: u32 | time: f64`
//! followed by row-major f64 samples, one N×N block per component.

use std::io::{Read, Write};
use std::path::Path;

use super::{ScalarField, SpectralError, SpectralGrid};

pub const MAGIC: &[u8; 4] = b"ZMF1";
const HEADER_LEN: usize = 4 + 4 + 8 + 4 + 8;

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub components: Vec<ScalarField>,
}

impl Snapshot {
    pub fn new(time: f64, components: Vec<ScalarField>) -> Self {
        assert!(
            !components.is_empty(),
            "snapshot needs at least one component"
        );
        let grid = components[0].grid();
        assert!(
            components.iter().all(|c| c.grid() == grid),
            "components on different grids"
        );
        Self { time, components }
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.components[0].grid()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let grid = self.grid();
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * grid.len() * self.components.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(grid.n() as u32).to_le_bytes());
        out.extend_from_slice(&grid.length().to_le_bytes());
        out.extend_from_slice(&(self.components.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.time.to_le_bytes());
        for c in &self.components {
            for v in c.values() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SpectralError> {
        let bad = |msg: &str| SpectralError::Snapshot(msg.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(bad("file shorter than header"));
        }
        if &bytes[0..4] != MAGIC {
            return Err(bad("bad magic, expected ZMF1"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let n = u32_at(4) as usize;
        let length = f64_at(8);
        let ncomp = u32_at(16) as usize;
        let time = f64_at(20);
        let grid = SpectralGrid::new(n, length)?;
        if ncomp == 0 {
            return Err(bad("zero components"));
        }
        let expected = HEADER_LEN + 8 * n * n * ncomp;
        if bytes.len() != expected {
            return Err(bad(&format!(
                "expected {expected} bytes, found {}",
                bytes.len()
            )));
        }
        let mut components = Vec::with_capacity(ncomp);
        for c in 0..ncomp {
            let start = HEADER_LEN + 8 * n * n * c;
            let values = (0..n * n).map(|i| f64_at(start + 8 * i)).collect();
            components.push(ScalarField::from_values(&grid, values)?);
        }
        Ok(Self { time, components })
    }

    pub fn write_to(&self, path: &Path) -> Result<(), SpectralError> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self, SpectralError> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_bit_exact() {
        let g = SpectralGrid::new(2, 1.5).unwrap();
        let f = ScalarField::from_values(&g, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let bytes = Snapshot::new(0.25, vec![f]).to_bytes();
        assert_eq!(&bytes[0..4], b"ZMF1");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(&bytes[8..16], &1.5f64.to_le_bytes());
        assert_eq!(&bytes[16..20], &1u32.to_le_bytes());
        assert_eq!(&bytes[20..28], &0.25f64.to_le_bytes());
        assert_eq!(&bytes[28..36], &1.0f64.to_le_bytes());
        assert_eq!(bytes.len(), 28 + 32);
    }

    #[test]
    fn round_trip_and_corruption() {
        let g = SpectralGrid::new(4, 2.0).unwrap();
        let a = ScalarField::from_fn(&g, |x, y| x - 2.0 * y);
        let b = ScalarField::from_fn(&g, |x, y| x * y);
        let snap = Snapshot::new(3.0, vec![a.clone(), b]);
        let bytes = snap.to_bytes();
        let back = Snapshot::from_bytes(&bytes).unwrap();
        assert_eq!(back.time, 3.0);
        assert_eq!(back.components[0].values(), a.values());
        assert!(Snapshot::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut wrong = bytes.clone();
        wrong[0] = b'X';
        assert!(Snapshot::from_bytes(&wrong).is_err());
    }
}
