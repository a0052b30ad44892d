//! Constant-time LRU: double-chained age links plus a reverse id index.
//!
//! Every slot carries `younger`/`older` links forming one chain over all `M`
//! slots, sorted by timestamp from `oldest` to `youngest`, and `slot_of` maps
//! each entry id to its slot (`-1` when absent). A hit splices its slot to
//! the chain tail, a miss recycles the chain head; either way the number of
//! element updates per access is a small constant independent of `M`.

use super::CacheEngine;
use crate::trace::AccessEvent;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

const NONE: i32 = -1;

pub struct FastCache {
    /// Resident entry id per slot, `-1` when the slot is still empty.
    ids: Vec<i32>,
    stamps: Vec<u64>,
    dirty: Vec<bool>,
    /// Next slot towards the young end of the age chain; `-1` at `youngest`.
    younger: Vec<i32>,
    /// Next slot towards the old end; `-1` at `oldest`.
    older: Vec<i32>,
    oldest: i32,
    youngest: i32,
    /// Reverse index over the whole id space: id -> slot, `-1` when absent.
    slot_of: Vec<i32>,
    time: u64,
    reads: u64,
    writes: u64,
    touch_updates: u32,
}

/// Plain-array view of the engine state, in the layout the update logic is
/// usually described with; handy for tests and debugging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastSnapshot {
    pub ids: Vec<i32>,
    pub stamps: Vec<u64>,
    pub younger: Vec<i32>,
    pub older: Vec<i32>,
    pub slot_of: Vec<i32>,
    pub oldest: i32,
    pub youngest: i32,
}

impl FastCache {
    /// Empty cache over `id_space` distinct ids. Slot `p` starts with
    /// timestamp `p`, so the age chain runs slot `0` (oldest) to `M-1`
    /// (youngest) and misses fill the slots in order.
    pub fn new(capacity: u32, id_space: u32) -> Self {
        assert!(capacity >= 1, "capacity must be at least 1");
        assert!(
            i32::try_from(id_space).is_ok(),
            "id space must fit in the reverse index"
        );
        let m = capacity as usize;
        FastCache {
            ids: vec![NONE; m],
            stamps: (0..m as u64).collect(),
            dirty: vec![false; m],
            younger: (1..=m as i32)
                .map(|p| if p == m as i32 { NONE } else { p })
                .collect(),
            older: (-1..m as i32 - 1).collect(),
            oldest: 0,
            youngest: m as i32 - 1,
            slot_of: vec![NONE; id_space as usize],
            time: m as u64,
            reads: 0,
            writes: 0,
            touch_updates: 0,
        }
    }

    /// Rebuilds an engine from a plain-array state. The timestamp counter
    /// resumes after the youngest stamp; dirty bits and counters start
    /// cleared. Fails if the arrays do not describe a consistent chain.
    pub fn from_snapshot(snap: &FastSnapshot) -> Result<Self, String> {
        let m = snap.ids.len();
        if m == 0 || snap.stamps.len() != m || snap.younger.len() != m || snap.older.len() != m {
            return Err(String::from("array lengths disagree"));
        }
        let time = snap.stamps.iter().max().copied().unwrap_or(0) + 1;
        let cache = FastCache {
            ids: snap.ids.clone(),
            stamps: snap.stamps.clone(),
            dirty: vec![false; m],
            younger: snap.younger.clone(),
            older: snap.older.clone(),
            oldest: snap.oldest,
            youngest: snap.youngest,
            slot_of: snap.slot_of.clone(),
            time,
            reads: 0,
            writes: 0,
            touch_updates: 0,
        };
        cache.audit()?;
        Ok(cache)
    }

    pub fn snapshot(&self) -> FastSnapshot {
        FastSnapshot {
            ids: self.ids.clone(),
            stamps: self.stamps.clone(),
            younger: self.younger.clone(),
            older: self.older.clone(),
            slot_of: self.slot_of.clone(),
            oldest: self.oldest,
            youngest: self.youngest,
        }
    }

    /// Number of element updates the most recent [`touch`] performed,
    /// counters and anchors included. Bounded by a constant (at most 16)
    /// regardless of capacity.
    ///
    /// [`touch`]: CacheEngine::touch
    pub fn last_touch_updates(&self) -> u32 {
        self.touch_updates
    }

    /// Full-structure consistency check: the chain visits every slot exactly
    /// once in strictly increasing timestamp order, both link directions
    /// agree, and the reverse index matches the resident ids.
    pub fn audit(&self) -> Result<(), String> {
        let m = self.ids.len();
        if self.older[self.oldest as usize] != NONE {
            return Err(String::from("oldest has an older neighbor"));
        }
        if self.younger[self.youngest as usize] != NONE {
            return Err(String::from("youngest has a younger neighbor"));
        }
        let mut visited = vec![false; m];
        let mut p = self.oldest;
        let mut prev = NONE;
        let mut steps = 0;
        while p != NONE {
            let pu = p as usize;
            if pu >= m || visited[pu] {
                return Err(format!("chain revisits or escapes at slot {p}"));
            }
            visited[pu] = true;
            if self.older[pu] != prev {
                return Err(format!("older link of slot {p} disagrees with the chain"));
            }
            if prev != NONE && self.stamps[pu] <= self.stamps[prev as usize] {
                return Err(format!("timestamps not increasing at slot {p}"));
            }
            prev = p;
            p = self.younger[pu];
            steps += 1;
        }
        if steps != m {
            return Err(format!("chain covers {steps} of {m} slots"));
        }
        if prev != self.youngest {
            return Err(String::from("chain does not end at youngest"));
        }
        let mut residents = 0;
        for (slot, &id) in self.ids.iter().enumerate() {
            if id == NONE {
                continue;
            }
            residents += 1;
            if self.slot_of.get(id as usize).copied() != Some(slot as i32) {
                return Err(format!("reverse index wrong for id {id}"));
            }
        }
        let indexed = self.slot_of.iter().filter(|&&s| s != NONE).count();
        if indexed != residents {
            return Err(format!("{indexed} indexed ids but {residents} residents"));
        }
        Ok(())
    }
}

impl CacheEngine for FastCache {
    fn touch(&mut self, ev: AccessEvent) {
        let mut updates = 0;
        let stamp = self.time;
        self.time += 1;
        updates += 1;
        let slot = self.slot_of[ev.id as usize];

        if slot != NONE {
            let p = slot as usize;
            self.stamps[p] = stamp;
            self.dirty[p] = ev.write;
            updates += 2;
            if slot == self.youngest {
                // already at the chain tail, links stay as they are
            } else if slot == self.oldest {
                self.oldest = self.younger[p];
                self.older[self.oldest as usize] = NONE;
                self.younger[p] = NONE;
                self.younger[self.youngest as usize] = slot;
                self.older[p] = self.youngest;
                self.youngest = slot;
                updates += 6;
            } else {
                self.older[self.younger[p] as usize] = self.older[p];
                self.younger[self.older[p] as usize] = self.younger[p];
                self.younger[p] = NONE;
                self.younger[self.youngest as usize] = slot;
                self.older[p] = self.youngest;
                self.youngest = slot;
                updates += 6;
            }
        } else {
            let v = self.oldest as usize;
            if self.dirty[v] {
                self.writes += 1;
                updates += 1;
            }
            self.reads += 1;
            updates += 1;
            if self.ids[v] != NONE {
                self.slot_of[self.ids[v] as usize] = NONE;
                updates += 1;
            }
            self.ids[v] = ev.id as i32;
            self.dirty[v] = ev.write;
            self.stamps[v] = stamp;
            self.older[v] = self.youngest;
            self.younger[self.youngest as usize] = self.oldest;
            self.youngest = self.oldest;
            self.oldest = self.younger[v];
            self.slot_of[ev.id as usize] = self.youngest;
            self.older[self.oldest as usize] = NONE;
            self.younger[self.youngest as usize] = NONE;
            updates += 10;
        }
        self.touch_updates = updates;
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
