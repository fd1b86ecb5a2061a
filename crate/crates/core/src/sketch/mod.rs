//! Linear sketches over the edge-indicator vector of an n-vertex graph:
//! exact t-sparse recovery and a distinct-count (support size) estimator.
//! Both are linear in the update stream, mergeable cellwise, and serialize
//! to versioned binary blobs.

pub mod cellmap;
pub mod field;
mod l0;
mod sparse;

pub use l0::L0Sketch;
pub use sparse::SparseRecoverySketch;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SketchError {
    #[error("sketch parameter/seed mismatch: cannot merge")]
    MergeMismatch,
    #[error("unrecognized blob header")]
    BadBlob,
    #[error("unsupported blob version {0}")]
    BadVersion(u32),
    #[error("truncated blob")]
    Truncated,
}

/// Canonical flat index of an unordered vertex pair: with u < v,
/// index = v(v-1)/2 + u. Bijective with pairs over 0..n and strictly below
/// n(n-1)/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIndex(pub u64);

impl EdgeIndex {
    pub fn of(u: u32, v: u32) -> EdgeIndex {
        assert_ne!(u, v, "self-loops have no edge index");
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        EdgeIndex(b as u64 * (b as u64 - 1) / 2 + a as u64)
    }

    pub fn endpoints(self) -> (u32, u32) {
        // invert v(v-1)/2 + u: v = floor((1+sqrt(1+8f))/2), then correct
        let f = self.0;
        let mut v = (((1.0 + (1.0 + 8.0 * f as f64).sqrt()) / 2.0) as u64).max(1);
        while v * (v - 1) / 2 > f {
            v -= 1;
        }
        while (v + 1) * v / 2 <= f {
            v += 1;
        }
        let u = f - v * (v - 1) / 2;
        (u as u32, v as u32)
    }
}

/// Number of possible edges on n vertices.
pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

pub(crate) mod blob {
    //! Minimal little-endian read/write helpers for sketch blobs.
    use super::SketchError;
    use std::io::{Read, Write};

    pub fn w_u32(w: &mut impl Write, x: u32) -> std::io::Result<()> {
        w.write_all(&x.to_le_bytes())
    }
    pub fn w_u64(w: &mut impl Write, x: u64) -> std::io::Result<()> {
        w.write_all(&x.to_le_bytes())
    }
    pub fn w_i64(w: &mut impl Write, x: i64) -> std::io::Result<()> {
        w.write_all(&x.to_le_bytes())
    }
    pub fn r_u32(r: &mut impl Read) -> Result<u32, SketchError> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b).map_err(|_| SketchError::Truncated)?;
        Ok(u32::from_le_bytes(b))
    }
    pub fn r_u64(r: &mut impl Read) -> Result<u64, SketchError> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b).map_err(|_| SketchError::Truncated)?;
        Ok(u64::from_le_bytes(b))
    }
    pub fn r_i64(r: &mut impl Read) -> Result<i64, SketchError> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b).map_err(|_| SketchError::Truncated)?;
        Ok(i64::from_le_bytes(b))
    }

    /// Byte-counting sink for measuring serialized size without allocating.
    pub struct CountingSink(pub u64);
    impl Write for CountingSink {
        fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
            self.0 += buf.len() as u64;
            Ok(buf.len())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }
}
