//! Support-size (distinct nonzero count) estimator for turnstile streams
//! over edge slots.
//!
//! Levels 0..=L nest by a 2-universal hash: an index lands in every level
//! up to the number of trailing zeros of its hash value, so level j sees
//! roughly a 2^-j sample of the support. Each level hashes its sample into
//! b fingerprint buckets; deletions cancel exactly because buckets hold
//! field-linear sums. Estimation: take the shallowest level whose occupancy
//! fits linear counting (at most half full), invert the collision bias with
//! b * ln(b / (b - occupied)), and rescale by 2^j.

use super::blob::{self, CountingSink};
use super::field::{self, PowTable, P};
use super::{pair_count, EdgeIndex, SketchError};
use crate::rng::{stream_rng, uniform_below};
use std::io::Write;

const BLOB_MAGIC: u32 = 0x3153_304C; // "L0S1" little-endian
const BLOB_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct PairHash {
    a: u64,
    b: u64,
}

impl PairHash {
    fn eval(&self, x: u64) -> u64 {
        field::reduce(self.a as u128 * x as u128 + self.b as u128)
    }
}

#[derive(Clone, Debug)]
pub struct L0Sketch {
    n: usize,
    gamma: f64,
    delta: f64,
    seed: u64,
    buckets: u32,
    level_hash: PairHash,
    bucket_hash: Vec<PairHash>,
    pows: PowTable,
    /// levels * buckets fingerprints, level-major
    fps: Vec<u64>,
    update_ops: u64,
    bucket_writes: u64,
}

impl L0Sketch {
    /// Estimator whose answer lands within (1 ± gamma) of the true support
    /// size with probability at least 1 - delta.
    pub fn new(gamma: f64, delta: f64, n: usize, seed: u64) -> Self {
        assert!(gamma > 0.0 && gamma <= 1.0, "gamma in (0,1]");
        assert!(delta > 0.0 && delta < 1.0, "delta in (0,1)");
        let domain = pair_count(n).max(2);
        let levels = (64 - (domain - 1).leading_zeros()) as usize + 1;
        let raw = 12.0 / (gamma * gamma) * (((levels + 1) as f64) / delta).ln();
        let buckets = (raw.ceil() as u64).max(64).next_power_of_two() as u32;
        let mut lh = stream_rng(seed, "sketch-l0-level", 0);
        let level_hash = PairHash {
            a: uniform_below(&mut lh, P - 1) + 1,
            b: uniform_below(&mut lh, P),
        };
        let bucket_hash = (0..levels)
            .map(|j| {
                let mut br = stream_rng(seed, "sketch-l0-bucket", j as u64);
                PairHash {
                    a: uniform_below(&mut br, P - 1) + 1,
                    b: uniform_below(&mut br, P),
                }
            })
            .collect();
        let mut rr = stream_rng(seed, "sketch-l0-rho", 0);
        let rho = uniform_below(&mut rr, P - 2) + 2;
        L0Sketch {
            n,
            gamma,
            delta,
            seed,
            buckets,
            level_hash,
            bucket_hash,
            pows: PowTable::new(rho, domain),
            fps: vec![0; levels * buckets as usize],
            update_ops: 0,
            bucket_writes: 0,
        }
    }

    pub fn levels(&self) -> usize {
        self.bucket_hash.len()
    }

    pub fn buckets(&self) -> u32 {
        self.buckets
    }

    pub fn update_ops(&self) -> u64 {
        self.update_ops
    }

    /// Total bucket touches so far; per update this is 1 + the number of
    /// trailing zeros of the level hash, so it stays O(levels) worst case
    /// and ~2 on average.
    pub fn bucket_writes(&self) -> u64 {
        self.bucket_writes
    }

    pub fn update(&mut self, e: EdgeIndex, delta: i64) {
        if delta == 0 {
            return;
        }
        debug_assert!(e.0 < pair_count(self.n));
        let depth = (self.level_hash.eval(e.0).trailing_zeros() as usize).min(self.levels() - 1);
        let term = field::mul(field::from_i64(delta), self.pows.pow(e.0));
        let mask = (self.buckets - 1) as u64;
        let mut slots = [0usize; 64];
        for j in 0..=depth {
            let slot = (self.bucket_hash[j].eval(e.0) & mask) as usize;
            slots[j] = j * self.buckets as usize + slot;
            #[cfg(target_arch = "x86_64")]
            unsafe {
                use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
                _mm_prefetch(self.fps.as_ptr().add(slots[j]) as *const i8, _MM_HINT_T0);
            }
        }
        for &idx in &slots[..=depth] {
            let cell = &mut self.fps[idx];
            *cell = field::add(*cell, term);
            self.bucket_writes += 1;
        }
        self.update_ops += 1;
    }

    fn occupancy(&self, level: usize) -> usize {
        let b = self.buckets as usize;
        self.fps[level * b..(level + 1) * b]
            .iter()
            .filter(|&&fp| fp != 0)
            .count()
    }

    /// Estimated support size of the resident vector.
    pub fn estimate(&self) -> u64 {
        let b = self.buckets as usize;
        let mut level = self.levels() - 1;
        for j in 0..self.levels() {
            if self.occupancy(j) * 2 <= b {
                level = j;
                break;
            }
        }
        let occ = self.occupancy(level).min(b - 1);
        let fills = (b as f64) * ((b as f64) / ((b - occ) as f64)).ln();
        (fills * (1u64 << level) as f64).round() as u64
    }

    pub fn merge(&mut self, other: &L0Sketch) -> Result<(), SketchError> {
        if self.n != other.n
            || self.seed != other.seed
            || self.buckets != other.buckets
            || self.fps.len() != other.fps.len()
        {
            return Err(SketchError::MergeMismatch);
        }
        for (mine, theirs) in self.fps.iter_mut().zip(other.fps.iter()) {
            *mine = field::add(*mine, *theirs);
        }
        self.update_ops += other.update_ops;
        self.bucket_writes += other.bucket_writes;
        Ok(())
    }

    pub fn serialize_into(&self, w: &mut impl Write) -> std::io::Result<()> {
        blob::w_u32(w, BLOB_MAGIC)?;
        blob::w_u32(w, BLOB_VERSION)?;
        blob::w_u64(w, self.n as u64)?;
        blob::w_u64(w, self.gamma.to_bits())?;
        blob::w_u64(w, self.delta.to_bits())?;
        blob::w_u64(w, self.seed)?;
        blob::w_u32(w, self.levels() as u32)?;
        blob::w_u32(w, self.buckets)?;
        blob::w_u64(w, self.update_ops)?;
        blob::w_u64(w, self.bucket_writes)?;
        for &fp in &self.fps {
            blob::w_u64(w, fp)?;
        }
        Ok(())
    }

    pub fn deserialize(r: &mut impl std::io::Read) -> Result<Self, SketchError> {
        if blob::r_u32(r)? != BLOB_MAGIC {
            return Err(SketchError::BadBlob);
        }
        let version = blob::r_u32(r)?;
        if version != BLOB_VERSION {
            return Err(SketchError::BadVersion(version));
        }
        let n = blob::r_u64(r)? as usize;
        let gamma = f64::from_bits(blob::r_u64(r)?);
        let delta = f64::from_bits(blob::r_u64(r)?);
        let seed = blob::r_u64(r)?;
        let levels = blob::r_u32(r)? as usize;
        let buckets = blob::r_u32(r)?;
        let mut sk = L0Sketch::new(gamma, delta, n, seed);
        if sk.levels() != levels || sk.buckets != buckets {
            return Err(SketchError::BadBlob);
        }
        sk.update_ops = blob::r_u64(r)?;
        sk.bucket_writes = blob::r_u64(r)?;
        for fp in sk.fps.iter_mut() {
            *fp = blob::r_u64(r)?;
        }
        Ok(sk)
    }

    pub fn serialized_bits(&self) -> u64 {
        let mut sink = CountingSink(0);
        self.serialize_into(&mut sink).expect("counting never fails");
        sink.0 * 8
    }
}
