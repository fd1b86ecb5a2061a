//! Compact open-addressing map from bucket index to detector cell.
//!
//! Sketches declare huge bucket capacities (proportional to the sparsity
//! budget) but touch only as many buckets as there are distinct updated
//! coordinates, so backing them with a dense array would waste gigabytes.
//! Keys are bucket indices, already uniformly distributed, hence the cheap
//! multiplicative probe. The key lives in the same 32-byte slot as its cell
//! so a probe and the following update cost one cache line, and `prefetch`
//! lets the caller overlap the misses of independent rows. Tables are
//! calloc'd — the empty slot is all-zero bytes — so fresh allocations skip
//! the memset that a pattern fill would need. Insert-only; cells that
//! cancel to zero stay but are skipped when iterating.

use std::alloc::{alloc_zeroed, handle_alloc_error, Layout};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Cell {
    pub count: i64,
    pub index_sum: i64,
    pub fp: u64,
}

impl Cell {
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.count == 0 && self.index_sum == 0 && self.fp == 0
    }
}

/// Occupied slots store key + 1; zero means empty, so a zeroed allocation
/// is a valid empty table. Keys are bucket indices well below u32::MAX.
#[derive(Clone, Copy, Debug)]
#[repr(C, align(32))]
struct Slot {
    key_plus: u32,
    cell: Cell,
}

fn zeroed_slots(cap: usize) -> Vec<Slot> {
    let layout = Layout::array::<Slot>(cap).expect("table fits address space");
    unsafe {
        let ptr = alloc_zeroed(layout);
        if ptr.is_null() {
            handle_alloc_error(layout);
        }
        Vec::from_raw_parts(ptr as *mut Slot, cap, cap)
    }
}

#[derive(Debug)]
pub struct CellMap {
    slots: Vec<Slot>,
    len: usize,
    mask: usize,
}

impl Clone for CellMap {
    fn clone(&self) -> Self {
        let mut slots = zeroed_slots(self.slots.len());
        slots.copy_from_slice(&self.slots);
        CellMap {
            slots,
            len: self.len,
            mask: self.mask,
        }
    }
}

impl Default for CellMap {
    fn default() -> Self {
        Self::new()
    }
}

impl CellMap {
    pub fn new() -> Self {
        const CAP: usize = 16;
        CellMap {
            slots: zeroed_slots(CAP),
            len: 0,
            mask: CAP - 1,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn slot_of(&self, key: u32) -> usize {
        // fibonacci hashing; keys below u32::MAX
        ((key as u64).wrapping_mul(0x9E3779B97F4A7C15) >> 32) as usize & self.mask
    }

    /// Grow once so `extra` further distinct keys fit without rehashing.
    /// Lets batch callers pay the table build a single time instead of
    /// through a cascade of doublings.
    pub fn reserve_additional(&mut self, extra: usize) {
        let need = self.len + extra;
        let mut cap = self.slots.len();
        while need * 5 > cap * 4 {
            cap *= 2;
        }
        if cap > self.slots.len() {
            let old = std::mem::replace(&mut self.slots, zeroed_slots(cap));
            self.mask = cap - 1;
            self.len = 0;
            for s in old {
                if s.key_plus != 0 {
                    *self.entry(s.key_plus - 1) = s.cell;
                }
            }
        }
    }

    /// Home slot index for a key in the current table; batch callers sort
    /// by this so their applies walk the table in address order.
    #[inline]
    pub fn slot_index(&self, key: u32) -> usize {
        self.slot_of(key)
    }

    pub fn table_len(&self) -> usize {
        self.slots.len()
    }

    /// Pull the slot a key would land in toward the cache ahead of `entry`.
    #[inline]
    pub fn prefetch(&self, key: u32) {
        #[cfg(target_arch = "x86_64")]
        unsafe {
            use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
            let i = self.slot_of(key);
            _mm_prefetch(self.slots.as_ptr().add(i) as *const i8, _MM_HINT_T0);
        }
        #[cfg(not(target_arch = "x86_64"))]
        let _ = key;
    }

    #[inline]
    pub fn entry(&mut self, key: u32) -> &mut Cell {
        debug_assert_ne!(key, u32::MAX);
        if (self.len + 1) * 5 > self.slots.len() * 4 {
            self.grow();
        }
        let want = key + 1;
        let mut i = self.slot_of(key);
        loop {
            let k = self.slots[i].key_plus;
            if k == want {
                return &mut self.slots[i].cell;
            }
            if k == 0 {
                self.slots[i].key_plus = want;
                self.len += 1;
                return &mut self.slots[i].cell;
            }
            i = (i + 1) & self.mask;
        }
    }

    pub fn get(&self, key: u32) -> Option<&Cell> {
        let want = key + 1;
        let mut i = self.slot_of(key);
        loop {
            let k = self.slots[i].key_plus;
            if k == want {
                return Some(&self.slots[i].cell);
            }
            if k == 0 {
                return None;
            }
            i = (i + 1) & self.mask;
        }
    }

    fn grow(&mut self) {
        let new_cap = self.slots.len() * 2;
        let old = std::mem::replace(&mut self.slots, zeroed_slots(new_cap));
        self.mask = new_cap - 1;
        self.len = 0;
        for s in old {
            if s.key_plus != 0 {
                *self.entry(s.key_plus - 1) = s.cell;
            }
        }
    }

    /// Occupied, nonzero cells in unspecified order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (u32, &Cell)> + '_ {
        self.slots
            .iter()
            .filter(|s| s.key_plus != 0 && !s.cell.is_zero())
            .map(|s| (s.key_plus - 1, &s.cell))
    }

    /// Nonzero cells sorted by key; canonical order for serialization.
    pub fn sorted_nonzero(&self) -> Vec<(u32, Cell)> {
        let mut v: Vec<(u32, Cell)> = self.iter_nonzero().map(|(k, c)| (k, *c)).collect();
        v.sort_unstable_by_key(|&(k, _)| k);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_lookup_grow() {
        let mut m = CellMap::new();
        for i in 0..10_000u32 {
            let c = m.entry(i * 7);
            c.count += i as i64;
            c.fp = i as u64;
        }
        assert_eq!(m.get(7).unwrap().count, 1);
        assert_eq!(m.get(69993).unwrap().count, 9999);
        assert!(m.get(5).is_none());
        // key 0 with count 0 but fp nonzero is still "nonzero"
        assert_eq!(m.iter_nonzero().count(), 9999); // i=0 cell is all-zero
        let sorted = m.sorted_nonzero();
        assert!(sorted.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn key_zero_is_distinct_from_empty() {
        let mut m = CellMap::new();
        m.entry(0).count = 7;
        assert_eq!(m.get(0).unwrap().count, 7);
        assert_eq!(m.len(), 1);
        assert!(m.get(1).is_none());
    }

    #[test]
    fn cancelled_cells_skip_iteration() {
        let mut m = CellMap::new();
        m.entry(3).count = 5;
        m.entry(3).count = 0;
        assert_eq!(m.iter_nonzero().count(), 0);
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn clone_preserves_contents() {
        let mut m = CellMap::new();
        for i in 0..1000u32 {
            m.entry(i * 3).count = i as i64;
        }
        let c = m.clone();
        assert_eq!(c.len(), m.len());
        assert_eq!(c.get(999 * 3).unwrap().count, 999);
    }

    #[test]
    fn slots_are_one_cache_line_wide() {
        assert_eq!(std::mem::size_of::<Slot>(), 32);
    }
}
