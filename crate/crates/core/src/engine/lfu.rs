//! Least-frequently-used replacement with oldest-timestamp tie-break.

use super::CacheEngine;
use crate::trace::AccessEvent;
use alloc::vec;
use alloc::vec::Vec;

const EMPTY: i32 = -1;

/// LFU cache: the victim is the resident with the smallest in-cache use
/// count, ties broken by smallest timestamp. Insertion counts as the first
/// use; an evicted entry's count is forgotten entirely, so re-entering
/// starts from 1 again. Empty slots carry count 0 and therefore fill first,
/// in slot order.
pub struct LfuCache {
    ids: Vec<i32>,
    freq: Vec<u64>,
    stamps: Vec<u64>,
    dirty: Vec<bool>,
    time: u64,
    reads: u64,
    writes: u64,
}

impl LfuCache {
    pub fn new(capacity: u32) -> Self {
        assert!(capacity >= 1, "capacity must be at least 1");
        let m = capacity as usize;
        LfuCache {
            ids: vec![EMPTY; m],
            freq: vec![0; m],
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

    pub fn frequencies(&self) -> &[u64] {
        &self.freq
    }

    pub fn timestamps(&self) -> &[u64] {
        &self.stamps
    }
}

impl CacheEngine for LfuCache {
    fn touch(&mut self, ev: AccessEvent) {
        let stamp = self.time;
        self.time += 1;
        let id = ev.id as i32;

        for p in 0..self.ids.len() {
            if self.ids[p] == id {
                self.freq[p] += 1;
                self.stamps[p] = stamp;
                self.dirty[p] = ev.write;
                return;
            }
        }

        let mut victim = 0;
        for p in 1..self.ids.len() {
            if (self.freq[p], self.stamps[p]) < (self.freq[victim], self.stamps[victim]) {
                victim = p;
            }
        }
        if self.dirty[victim] {
            self.writes += 1;
        }
        self.reads += 1;
        self.ids[victim] = id;
        self.freq[victim] = 1;
        self.stamps[victim] = stamp;
        self.dirty[victim] = ev.write;
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
    fn least_used_entry_is_evicted() {
        // counts a:1 b:2 c:3 d:4, then a new entry replaces a
        let mut c = LfuCache::new(4);
        for (id, hits) in [(10, 1u32), (11, 2), (12, 3), (13, 4)] {
            for _ in 0..hits {
                c.touch(AccessEvent::read(id));
            }
        }
        c.touch(AccessEvent::read(14));
        assert_eq!(c.resident_ids(), &[14, 11, 12, 13]);
        assert_eq!(c.frequencies(), &[1, 2, 3, 4]);
    }

    #[test]
    fn frequency_tie_breaks_by_oldest_timestamp() {
        let mut c = LfuCache::new(2);
        c.touch(AccessEvent::read(5)); // slot 0, freq 1, older stamp
        c.touch(AccessEvent::read(6)); // slot 1, freq 1, younger stamp
        c.touch(AccessEvent::read(7)); // tie on freq, evicts slot 0
        assert_eq!(c.resident_ids(), &[7, 6]);
    }

    #[test]
    fn hit_leaves_counters_alone() {
        let mut c = LfuCache::new(2);
        c.touch(AccessEvent::read(5));
        c.touch(AccessEvent::read(5));
        assert_eq!((c.reads(), c.writes()), (1, 0));
        assert_eq!(c.frequencies()[0], 2);
    }

    #[test]
    fn eviction_forgets_frequency() {
        let mut c = LfuCache::new(2);
        for _ in 0..5 {
            c.touch(AccessEvent::read(5));
        }
        c.touch(AccessEvent::read(6));
        c.touch(AccessEvent::read(7)); // evicts 6 (freq 1 vs 5)
        c.touch(AccessEvent::read(6)); // 6 returns with freq 1, not 2
        assert_eq!(c.resident_ids(), &[5, 6]);
        assert_eq!(c.frequencies()[1], 1);
        // now 6 (freq 1, older) loses against 7's would-be history
        c.touch(AccessEvent::read(8));
        assert_eq!(c.resident_ids(), &[5, 8]);
    }

    #[test]
    fn dirty_eviction_writes_back() {
        let mut c = LfuCache::new(1);
        c.touch(AccessEvent::write(3));
        c.touch(AccessEvent::read(4));
        assert_eq!((c.reads(), c.writes()), (2, 1));
        c.flush();
        assert_eq!(c.writes(), 1); // 4 is clean
    }
}
