//! Exact t-sparse recovery for integer vectors indexed by edge slots.
//!
//! Layout: r hash rows, each with b one-sparse detector cells
//! (count, index_sum, fingerprint). A cell is "pure" when it holds a single
//! surviving index, which the fingerprint certifies; decoding peels pure
//! cells until the structure drains. Row count is sized so that a stuck
//! configuration of up to t items survives with probability O(1/n^3):
//! a bad pair must collide in every row, so r >= (3 log2 n + 2 log2 t) / log2 b.
//!
//! Cells are stored sparsely: declared width b can be in the millions while
//! only the touched cells occupy memory, and serialization writes occupied
//! cells only.

use super::blob;
use super::cellmap::{Cell, CellMap};
use super::field::{self, PowTable, P};
use super::{pair_count, EdgeIndex, SketchError};
use crate::rng::{stream_rng, uniform_below};
use std::collections::VecDeque;
use std::io::Write;

const BLOB_MAGIC: u32 = 0x5331_5253; // "SRS1" little-endian
const BLOB_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct RowHash {
    a: u64,
    b: u64,
}

impl RowHash {
    fn bucket(&self, x: u64, mask: u32) -> u32 {
        (field::reduce(self.a as u128 * x as u128 + self.b as u128) as u32) & mask
    }
}

#[derive(Clone, Debug)]
pub struct SparseRecoverySketch {
    n: usize,
    t: u64,
    buckets: u32,
    seed: u64,
    pows: PowTable,
    hashes: Vec<RowHash>,
    rows: Vec<CellMap>,
    update_ops: u64,
}

fn next_pow2(x: u64) -> u64 {
    x.max(1).next_power_of_two()
}

/// Rows needed so that t items colliding pairwise in every row happens
/// with probability at most n^-3: solve b^-r * t^2 <= n^-3 for r.
fn row_count(n: usize, t: u64, buckets: u64) -> usize {
    let lb = (buckets.max(2) as f64).log2();
    let need = (3.0 * (n.max(2) as f64).log2() + 2.0 * ((t + 1) as f64).log2()) / lb;
    (need.ceil() as usize).clamp(4, 16)
}

impl SparseRecoverySketch {
    /// Sketch for vectors over the edge slots of an n-vertex graph that
    /// decodes exactly whenever the support stays at or below t.
    pub fn new(n: usize, t: u64, seed: u64) -> Self {
        let t = t.max(1);
        let buckets = next_pow2(2 * t).max(8);
        let r = row_count(n, t, buckets);
        let mut rng = stream_rng(seed, "sketch-sr-rho", 0);
        let rho = uniform_below(&mut rng, P - 2) + 2;
        let hashes = (0..r)
            .map(|i| {
                let mut hr = stream_rng(seed, "sketch-sr-row", i as u64);
                RowHash {
                    a: uniform_below(&mut hr, P - 1) + 1,
                    b: uniform_below(&mut hr, P),
                }
            })
            .collect();
        SparseRecoverySketch {
            n,
            t,
            buckets: buckets as u32,
            seed,
            pows: PowTable::new(rho, pair_count(n).max(2)),
            hashes,
            rows: vec![CellMap::new(); r],
            update_ops: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn capacity(&self) -> u64 {
        self.t
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn buckets(&self) -> u32 {
        self.buckets
    }

    /// Field-multiplication work per update; rows * 2 loads + 1 mul for the
    /// power table, constant per row otherwise.
    pub fn update_ops(&self) -> u64 {
        self.update_ops
    }

    pub fn update(&mut self, e: EdgeIndex, delta: i64) {
        if delta == 0 {
            return;
        }
        debug_assert!(e.0 < pair_count(self.n));
        let mask = self.buckets - 1;
        let fp_term = field::mul(field::from_i64(delta), self.pows.pow(e.0));
        // hash every row first and prefetch, so the row misses overlap
        let mut keys = [0u32; 16];
        for (i, hash) in self.hashes.iter().enumerate() {
            keys[i] = hash.bucket(e.0, mask);
            self.rows[i].prefetch(keys[i]);
        }
        for (row, &key) in self.rows.iter_mut().zip(&keys) {
            Self::apply(row, key, e.0, delta, fp_term);
        }
        self.update_ops += 1;
    }

    #[inline]
    fn apply(row: &mut CellMap, key: u32, index: u64, delta: i64, fp_term: u64) {
        let cell = row.entry(key);
        cell.count = cell.count.wrapping_add(delta);
        cell.index_sum = cell.index_sum.wrapping_add(delta.wrapping_mul(index as i64));
        cell.fp = field::add(cell.fp, fp_term);
    }

    /// Same end state as calling `update` once per item (the sketch is
    /// linear, so order is irrelevant), but items are staged per row in
    /// table-address order first. At stream scale a row's table spans
    /// hundreds of MB and per-item access order is random, which thrashes
    /// the TLB; walking each ~128 KiB table stripe in one go keeps the
    /// applies cache-resident.
    pub fn update_batch(&mut self, items: &[(EdgeIndex, i64)]) {
        const STRIPE_LOG2: u32 = 12; // 4096 slots of 32 bytes
        let mask = self.buckets - 1;
        let live: Vec<(u64, i64, u64)> = items
            .iter()
            .filter(|&&(_, d)| d != 0)
            .map(|&(e, d)| {
                debug_assert!(e.0 < pair_count(self.n));
                (e.0, d, field::mul(field::from_i64(d), self.pows.pow(e.0)))
            })
            .collect();
        if live.is_empty() {
            return;
        }
        let mut keys: Vec<u32> = Vec::new();
        let mut staged: Vec<(u32, u64, i64, u64)> = Vec::new();
        for (hash, row) in self.hashes.iter().zip(self.rows.iter_mut()) {
            row.reserve_additional(live.len());
            let stripes = row.table_len() >> STRIPE_LOG2;
            if stripes <= 1 {
                for &(e, d, term) in &live {
                    Self::apply(row, hash.bucket(e, mask), e, d, term);
                }
                continue;
            }
            keys.clear();
            let mut cursors = vec![0u32; stripes + 1];
            for &(e, _, _) in &live {
                let key = hash.bucket(e, mask);
                keys.push(key);
                cursors[(row.slot_index(key) >> STRIPE_LOG2) + 1] += 1;
            }
            for i in 1..cursors.len() {
                cursors[i] += cursors[i - 1];
            }
            staged.clear();
            staged.resize(live.len(), (0, 0, 0, 0));
            for (&key, &(e, d, term)) in keys.iter().zip(&live) {
                let c = &mut cursors[row.slot_index(key) >> STRIPE_LOG2];
                staged[*c as usize] = (key, e, d, term);
                *c += 1;
            }
            for &(key, e, d, term) in &staged {
                Self::apply(row, key, e, d, term);
            }
        }
        self.update_ops += live.len() as u64;
    }

    /// If `cell` holds exactly one surviving index, return (index, count).
    fn pure_item(&self, cell: &Cell, row: usize, key: u32) -> Option<(u64, i64)> {
        if cell.count == 0 {
            return None;
        }
        let q = cell.index_sum as i128;
        let c = cell.count as i128;
        if q % c != 0 {
            return None;
        }
        let flat = q / c;
        if flat < 0 || flat as u64 >= pair_count(self.n).max(1) {
            return None;
        }
        let flat = flat as u64;
        if self.hashes[row].bucket(flat, self.buckets - 1) != key {
            return None;
        }
        let expect = field::mul(field::from_i64(cell.count), self.pows.pow(flat));
        if cell.fp != expect {
            return None;
        }
        Some((flat, cell.count))
    }

    /// Peel pure cells until the sketch drains. Returns the recovered
    /// (index, count) pairs sorted by index, or None when the resident
    /// vector was not recoverable (support too large or hash collision
    /// deadlock).
    pub fn decode(&self) -> Option<Vec<(EdgeIndex, i64)>> {
        let mut rows = self.rows.clone();
        self.peel(&mut rows)
    }

    /// `decode`, but peeling the sketch's own tables instead of a copy.
    /// At stream scale the tables run to hundreds of MB, so the clone
    /// inside `decode` is worth skipping when the sketch is done for.
    pub fn into_decoded(mut self) -> Option<Vec<(EdgeIndex, i64)>> {
        let mut rows = std::mem::take(&mut self.rows);
        self.peel(&mut rows)
    }

    fn peel(&self, rows: &mut [CellMap]) -> Option<Vec<(EdgeIndex, i64)>> {
        let mask = self.buckets - 1;
        let mut work: VecDeque<(usize, u32)> = VecDeque::new();
        let mut nnz = 0u64;
        for (ri, row) in rows.iter().enumerate() {
            for (key, _) in row.iter_nonzero() {
                work.push_back((ri, key));
                nnz += 1;
            }
        }
        let mut out: Vec<(u64, i64)> = Vec::new();
        let mut budget = (nnz + 1) * (rows.len() as u64 + 2) + 4096;
        while let Some((ri, key)) = work.pop_front() {
            if budget == 0 {
                return None;
            }
            budget -= 1;
            let cell = match rows[ri].get(key) {
                Some(c) if !c.is_zero() => *c,
                _ => continue,
            };
            let (flat, count) = match self.pure_item(&cell, ri, key) {
                Some(hit) => hit,
                None => continue,
            };
            out.push((flat, count));
            let fp_term = field::mul(field::from_i64(count), self.pows.pow(flat));
            for (rj, (hash, row)) in self.hashes.iter().zip(rows.iter_mut()).enumerate() {
                let kj = hash.bucket(flat, mask);
                let c = row.entry(kj);
                c.count = c.count.wrapping_sub(count);
                c.index_sum = c.index_sum.wrapping_sub(count.wrapping_mul(flat as i64));
                c.fp = field::sub(c.fp, fp_term);
                if !c.is_zero() {
                    work.push_back((rj, kj));
                }
            }
        }
        if rows.iter().any(|r| r.iter_nonzero().next().is_some()) {
            return None;
        }
        out.sort_unstable_by_key(|&(flat, _)| flat);
        if out.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        Some(
            out.into_iter()
                .map(|(flat, c)| (EdgeIndex(flat), c))
                .collect(),
        )
    }

    /// Cellwise sum; only meaningful between sketches built with identical
    /// parameters and seed.
    pub fn merge(&mut self, other: &SparseRecoverySketch) -> Result<(), SketchError> {
        if self.n != other.n
            || self.t != other.t
            || self.buckets != other.buckets
            || self.seed != other.seed
            || self.rows.len() != other.rows.len()
        {
            return Err(SketchError::MergeMismatch);
        }
        for (mine, theirs) in self.rows.iter_mut().zip(other.rows.iter()) {
            for (key, cell) in theirs.iter_nonzero() {
                let c = mine.entry(key);
                c.count = c.count.wrapping_add(cell.count);
                c.index_sum = c.index_sum.wrapping_add(cell.index_sum);
                c.fp = field::add(c.fp, cell.fp);
            }
        }
        self.update_ops += other.update_ops;
        Ok(())
    }

    /// Occupied cells only, in key order, preceded by the parameters needed
    /// to rebuild hash functions from the seed.
    pub fn serialize_into(&self, w: &mut impl Write) -> std::io::Result<()> {
        blob::w_u32(w, BLOB_MAGIC)?;
        blob::w_u32(w, BLOB_VERSION)?;
        blob::w_u64(w, self.n as u64)?;
        blob::w_u64(w, self.t)?;
        blob::w_u32(w, self.buckets)?;
        blob::w_u32(w, self.rows.len() as u32)?;
        blob::w_u64(w, self.seed)?;
        blob::w_u64(w, self.update_ops)?;
        for row in &self.rows {
            let cells = row.sorted_nonzero();
            blob::w_u32(w, cells.len() as u32)?;
            for (key, cell) in cells {
                blob::w_u32(w, key)?;
                blob::w_i64(w, cell.count)?;
                blob::w_i64(w, cell.index_sum)?;
                blob::w_u64(w, cell.fp)?;
            }
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
        let t = blob::r_u64(r)?;
        let buckets = blob::r_u32(r)?;
        let row_n = blob::r_u32(r)? as usize;
        let seed = blob::r_u64(r)?;
        let update_ops = blob::r_u64(r)?;
        let mut sk = SparseRecoverySketch::new(n, t, seed);
        if sk.buckets != buckets || sk.rows.len() != row_n {
            return Err(SketchError::BadBlob);
        }
        sk.update_ops = update_ops;
        for row in sk.rows.iter_mut() {
            let nnz = blob::r_u32(r)? as usize;
            for _ in 0..nnz {
                let key = blob::r_u32(r)?;
                if key >= buckets {
                    return Err(SketchError::BadBlob);
                }
                let cell = row.entry(key);
                cell.count = blob::r_i64(r)?;
                cell.index_sum = blob::r_i64(r)?;
                cell.fp = blob::r_u64(r)?;
            }
        }
        Ok(sk)
    }

    /// Size of the serialized blob in bits. Computed arithmetically — the
    /// blob layout is fixed, so counting nonzero cells is enough and skips
    /// the sort that `serialize_into` needs for canonical order.
    pub fn serialized_bits(&self) -> u64 {
        const HEADER: u64 = 4 + 4 + 8 + 8 + 4 + 4 + 8 + 8;
        const PER_CELL: u64 = 4 + 8 + 8 + 8;
        let bytes: u64 = HEADER
            + self
                .rows
                .iter()
                .map(|row| 4 + PER_CELL * row.iter_nonzero().count() as u64)
                .sum::<u64>();
        bytes * 8
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn sample_support(n: u32, size: usize, seed: u64) -> Vec<(EdgeIndex, i64)> {
        let mut rng = stream_rng(seed, "test-support", 0);
        let mut picked = std::collections::BTreeMap::new();
        while picked.len() < size {
            let v = rng.gen_range(1..n);
            let u = rng.gen_range(0..v);
            let mag = rng.gen_range(1..=5i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
            picked.insert(EdgeIndex::of(u, v), mag);
        }
        picked.into_iter().collect()
    }

    #[test]
    fn recovers_exact_support() {
        for (size, seed) in [(1usize, 7u64), (10, 8), (100, 9)] {
            let mut sk = SparseRecoverySketch::new(500, 128, seed);
            let items = sample_support(500, size, seed);
            for &(e, c) in &items {
                sk.update(e, c);
            }
            assert_eq!(sk.decode().expect("decodable"), items, "size {size}");
        }
    }

    #[test]
    fn empty_decodes_empty() {
        let sk = SparseRecoverySketch::new(100, 4, 3);
        assert_eq!(sk.decode(), Some(vec![]));
    }

    #[test]
    fn cancelling_updates_vanish() {
        let mut sk = SparseRecoverySketch::new(100, 4, 11);
        let e = EdgeIndex::of(3, 97);
        sk.update(e, 1);
        sk.update(EdgeIndex::of(5, 6), 1);
        sk.update(e, -1);
        assert_eq!(sk.decode(), Some(vec![(EdgeIndex::of(5, 6), 1)]));
    }

    #[test]
    fn overfull_support_reports_failure() {
        // 60 items in a t=2 sketch: 16-bucket rows cannot drain.
        let mut sk = SparseRecoverySketch::new(300, 2, 5);
        for &(e, c) in sample_support(300, 60, 21).iter() {
            sk.update(e, c);
        }
        assert_eq!(sk.decode(), None);
    }

    #[test]
    fn merge_equals_combined_stream() {
        let items = sample_support(400, 50, 31);
        let (left, right) = items.split_at(25);
        let mut a = SparseRecoverySketch::new(400, 64, 77);
        let mut b = SparseRecoverySketch::new(400, 64, 77);
        for &(e, c) in left {
            a.update(e, c);
        }
        for &(e, c) in right {
            b.update(e, c);
        }
        a.merge(&b).unwrap();
        let mut want = items.clone();
        want.sort_unstable_by_key(|&(e, _)| e);
        assert_eq!(a.decode(), Some(want));
    }

    #[test]
    fn merge_rejects_foreign_seed() {
        let mut a = SparseRecoverySketch::new(400, 64, 1);
        let b = SparseRecoverySketch::new(400, 64, 2);
        assert_eq!(a.merge(&b), Err(SketchError::MergeMismatch));
    }

    #[test]
    fn batch_update_matches_serial() {
        let n = 3000;
        let mut rng = stream_rng(5150, "test-batch", 0);
        // duplicates, cancellations, zero deltas, growth past several stripes
        let mut items: Vec<(EdgeIndex, i64)> = Vec::new();
        for _ in 0..40_000 {
            let u = rng.gen_range(0..n as u32 - 1);
            let v = rng.gen_range(u + 1..n as u32);
            items.push((EdgeIndex::of(u, v), [-1i64, 0, 1, 1][rng.gen_range(0..4)]));
        }
        let mut serial = SparseRecoverySketch::new(n, 60_000, 99);
        for &(e, d) in &items {
            serial.update(e, d);
        }
        let mut batched = SparseRecoverySketch::new(n, 60_000, 99);
        batched.update_batch(&items);
        let mut a = Vec::new();
        let mut b = Vec::new();
        serial.serialize_into(&mut a).unwrap();
        batched.serialize_into(&mut b).unwrap();
        assert_eq!(a, b);
        assert_eq!(serial.update_ops(), batched.update_ops());
    }

    #[test]
    fn bit_count_matches_actual_serialization() {
        let mut sk = SparseRecoverySketch::new(400, 64, 9);
        for &(e, c) in sample_support(400, 50, 77).iter() {
            sk.update(e, c);
        }
        let mut sink = blob::CountingSink(0);
        sk.serialize_into(&mut sink).unwrap();
        assert_eq!(sk.serialized_bits(), sink.0 * 8);
    }

    #[test]
    fn blob_round_trip() {
        let mut sk = SparseRecoverySketch::new(400, 64, 13);
        for &(e, c) in sample_support(400, 40, 41).iter() {
            sk.update(e, c);
        }
        let mut buf = Vec::new();
        sk.serialize_into(&mut buf).unwrap();
        assert_eq!(buf.len() as u64 * 8, sk.serialized_bits());
        let back = SparseRecoverySketch::deserialize(&mut buf.as_slice()).unwrap();
        assert_eq!(back.decode(), sk.decode());
        assert_eq!(back.update_ops(), sk.update_ops());
    }

    #[test]
    fn blob_rejects_garbage() {
        let mut buf = Vec::new();
        SparseRecoverySketch::new(50, 4, 1)
            .serialize_into(&mut buf)
            .unwrap();
        buf[0] ^= 0xff;
        assert!(matches!(
            SparseRecoverySketch::deserialize(&mut buf.as_slice()),
            Err(SketchError::BadBlob)
        ));
    }

    #[test]
    fn row_count_tracks_parameters() {
        // wide buckets need few rows, narrow buckets need many
        assert_eq!(row_count(8192, 3_500_000, 1 << 23), 4);
        assert!(row_count(8192, 1, 8) > 4);
        assert_eq!(row_count(2, 1, 8), 4);
    }

    #[test]
    fn declared_width_costs_no_memory() {
        // billions of declared buckets, two occupied cells
        let mut sk = SparseRecoverySketch::new(65_536, 1 << 29, 3);
        sk.update(EdgeIndex::of(0, 1), 1);
        sk.update(EdgeIndex::of(2, 3), -4);
        assert!(sk.serialized_bits() < 10_000);
        assert_eq!(
            sk.decode(),
            Some(vec![(EdgeIndex::of(0, 1), 1), (EdgeIndex::of(2, 3), -4)])
        );
    }
}
