//! Linear-scan LRU: the O(M)-per-access reference engine.

use super::CacheEngine;
use crate::trace::AccessEvent;
use alloc::vec;
use alloc::vec::Vec;

const EMPTY: i32 = -1;

/// LRU cache that finds hits and victims by scanning all `M` slots.
///
/// Kept deliberately simple; it is the oracle the constant-time engine is
/// checked against, and the slow side of the timing comparison.
pub struct ScanCache {
    ids: Vec<i32>,
    stamps: Vec<u64>,
    dirty: Vec<bool>,
    /// Timestamp the next access will be stamped with. Slots are initialized
    /// to `0..M-1`, so the first access stamps `M` and empty slots fill in
    /// slot order.
    time: u64,
    reads: u64,
    writes: u64,
}

impl ScanCache {
    pub fn new(capacity: u32) -> Self {
        assert!(capacity >= 1, "capacity must be at least 1");
        let m = capacity as usize;
        ScanCache {
            ids: vec![EMPTY; m],
            stamps: (0..m as u64).collect(),
            dirty: vec![false; m],
            time: m as u64,
            reads: 0,
            writes: 0,
        }
    }

    pub fn resident_ids(&self) -> &[i32] {
        &self.ids
    }

    pub fn timestamps(&self) -> &[u64] {
        &self.stamps
    }

    pub fn dirty_bits(&self) -> &[bool] {
        &self.dirty
    }
}

impl CacheEngine for ScanCache {
    fn touch(&mut self, ev: AccessEvent) {
        let stamp = self.time;
        self.time += 1;
        let id = ev.id as i32;

        let mut hit = false;
        for p in 0..self.ids.len() {
            if self.ids[p] == id {
                self.stamps[p] = stamp;
                self.dirty[p] = ev.write;
                hit = true;
            }
        }
        if hit {
            return;
        }

        let mut victim = 0;
        let mut oldest = self.stamps[0];
        for p in 1..self.stamps.len() {
            if self.stamps[p] < oldest {
                oldest = self.stamps[p];
                victim = p;
            }
        }
        if self.dirty[victim] {
            self.writes += 1;
        }
        self.reads += 1;
        self.ids[victim] = id;
        self.dirty[victim] = ev.write;
        self.stamps[victim] = stamp;
    }

    fn flush(&mut self) {
        for p in 0..self.dirty.len() {
            if self.dirty[p] {
                self.writes += 1;
            }
        }
    }

    fn reads(&self) -> u64 {
        self.reads
    }

    fn writes(&self) -> u64 {
        self.writes
    }

    fn capacity(&self) -> u32 {
        self.ids.len() as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state() {
        let c = ScanCache::new(12);
        assert_eq!(c.timestamps(), (0..12).collect::<Vec<u64>>().as_slice());
        assert!(c.resident_ids().iter().all(|&id| id == EMPTY));
        assert_eq!((c.reads(), c.writes()), (0, 0));

        let c = ScanCache::new(1);
        assert_eq!(c.timestamps(), &[0]);
    }

    #[test]
    fn first_triple_fills_left_to_right() {
        let mut c = ScanCache::new(12);
        c.touch(AccessEvent::read(0));
        c.touch(AccessEvent::read(16));
        c.touch(AccessEvent::write(32));
        assert_eq!((c.reads(), c.writes()), (3, 0));
        assert_eq!(&c.timestamps()[..3], &[12, 13, 14]);
        assert_eq!(&c.resident_ids()[..3], &[0, 16, 32]);
        assert_eq!(c.dirty_bits()[..3], [false, false, true]);
    }

    #[test]
    fn hit_refreshes_timestamp_without_io() {
        let mut c = ScanCache::new(12);
        for ev in [
            AccessEvent::read(0),
            AccessEvent::read(16),
            AccessEvent::write(32),
            AccessEvent::read(4),
            AccessEvent::read(17),
            AccessEvent::write(32),
        ] {
            c.touch(ev);
        }
        assert_eq!((c.reads(), c.writes()), (5, 0));
        assert_eq!(c.timestamps()[2], 17); // refreshed on the second C touch
    }

    #[test]
    fn evicting_dirty_entry_writes_back() {
        let mut c = ScanCache::new(2);
        c.touch(AccessEvent::write(7));
        c.touch(AccessEvent::read(8));
        c.touch(AccessEvent::read(9)); // evicts dirty 7
        assert_eq!((c.reads(), c.writes()), (3, 1));
        c.touch(AccessEvent::read(8)); // hit
        assert_eq!((c.reads(), c.writes()), (3, 1));
    }

    #[test]
    fn dirty_bit_on_hit_is_assignment() {
        let mut c = ScanCache::new(2);
        c.touch(AccessEvent::write(7));
        c.touch(AccessEvent::read(7)); // overwrites the dirty bit
        c.touch(AccessEvent::read(8));
        c.touch(AccessEvent::read(9)); // evicts 7, now clean
        assert_eq!((c.reads(), c.writes()), (3, 0));
    }

    #[test]
    fn flush_counts_dirty_residents() {
        let mut c = ScanCache::new(4);
        c.flush();
        assert_eq!(c.writes(), 0);

        let mut c = ScanCache::new(4);
        c.touch(AccessEvent::write(1));
        c.touch(AccessEvent::write(2));
        c.touch(AccessEvent::write(3));
        c.touch(AccessEvent::read(4));
        c.flush();
        assert_eq!(c.writes(), 3);
    }
}
