//! Cache replacement engines and trace replay.
//!
//! All engines share the same accounting: a miss loads the entry from main
//! memory (`reads += 1`, evicting the victim first and charging a write-back
//! if the victim is dirty), a hit refreshes the slot's timestamp and
//! overwrites its dirty bit with the event's write intent, and [`flush`]
//! charges one final write-back per dirty resident when the replay ends.
//! Slot timestamps start at `0..M-1` so an empty cache fills left to right,
//! and the first access stamps `M`.
//!
//! [`flush`]: CacheEngine::flush

mod fast;
mod lfu;
mod scan;

pub use fast::{FastCache, FastSnapshot};
pub use lfu::LfuCache;
pub use scan::ScanCache;

use crate::trace::{AccessEvent, AccessTrace, BlockSpec, EntryId, IdScheme, PinPlacement};
use core::fmt;

/// Replay failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    ZeroCapacity,
    /// An event id outside the trace's `[0, 3n^2)` id space.
    IdOutOfRange {
        id: EntryId,
        id_space: u32,
    },
    Config(crate::trace::ConfigError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::ZeroCapacity => write!(f, "cache capacity must be at least 1"),
            SimError::IdOutOfRange { id, id_space } => {
                write!(f, "entry id {id} outside the id space [0, {id_space})")
            }
            SimError::Config(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SimError {}

impl From<crate::trace::ConfigError> for SimError {
    fn from(e: crate::trace::ConfigError) -> Self {
        SimError::Config(e)
    }
}

/// Common surface of the three replacement engines.
pub trait CacheEngine {
    /// Processes one access. The id must lie inside the id space the engine
    /// was constructed for.
    fn touch(&mut self, ev: AccessEvent);
    /// Charges one write-back per dirty resident. Call once, after the last
    /// event of a replay.
    fn flush(&mut self);
    fn reads(&self) -> u64;
    fn writes(&self) -> u64;
    fn capacity(&self) -> u32;
}

/// Which engine a replay should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    /// LRU via a full slot scan per access: O(M) work per event.
    LruScan,
    /// LRU via double-chained age links and a reverse id index: O(1) work
    /// per event.
    LruFast,
    /// Least-frequently-used with oldest-timestamp tie-break; counts reset
    /// on eviction.
    Lfu,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::LruScan => "lru-scan",
            EngineKind::LruFast => "lru-fast",
            EngineKind::Lfu => "lfu",
        }
    }
}

/// Engine instance dispatched by [`EngineKind`].
pub enum Engine {
    Scan(ScanCache),
    Fast(FastCache),
    Lfu(LfuCache),
}

impl Engine {
    pub fn new(kind: EngineKind, capacity: u32, id_space: u32) -> Result<Self, SimError> {
        if capacity == 0 {
            return Err(SimError::ZeroCapacity);
        }
        Ok(match kind {
            EngineKind::LruScan => Engine::Scan(ScanCache::new(capacity)),
            EngineKind::LruFast => Engine::Fast(FastCache::new(capacity, id_space)),
            EngineKind::Lfu => Engine::Lfu(LfuCache::new(capacity)),
        })
    }
}

impl CacheEngine for Engine {
    fn touch(&mut self, ev: AccessEvent) {
        match self {
            Engine::Scan(e) => e.touch(ev),
            Engine::Fast(e) => e.touch(ev),
            Engine::Lfu(e) => e.touch(ev),
        }
    }

    fn flush(&mut self) {
        match self {
            Engine::Scan(e) => e.flush(),
            Engine::Fast(e) => e.flush(),
            Engine::Lfu(e) => e.flush(),
        }
    }

    fn reads(&self) -> u64 {
        match self {
            Engine::Scan(e) => e.reads(),
            Engine::Fast(e) => e.reads(),
            Engine::Lfu(e) => e.reads(),
        }
    }

    fn writes(&self) -> u64 {
        match self {
            Engine::Scan(e) => e.writes(),
            Engine::Fast(e) => e.writes(),
            Engine::Lfu(e) => e.writes(),
        }
    }

    fn capacity(&self) -> u32 {
        match self {
            Engine::Scan(e) => e.capacity(),
            Engine::Fast(e) => e.capacity(),
            Engine::Lfu(e) => e.capacity(),
        }
    }
}

/// Counter totals of one full replay, flush included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimResult {
    /// Cache fills from main memory (every miss, cold misses included).
    pub reads: u64,
    /// Write-backs of dirty entries, on eviction or at the final flush.
    pub writes: u64,
    /// `reads + writes`.
    pub io: u64,
    /// Number of events consumed.
    pub events: u64,
}

/// Incremental replay of an event stream through one engine.
///
/// Feed events one at a time and read the running counters between feeds for
/// per-event checkpointing; [`finish`](Replay::finish) applies the final
/// dirty flush and returns the totals.
pub struct Replay {
    engine: Engine,
    id_space: u32,
    events: u64,
}

impl Replay {
    pub fn new(kind: EngineKind, capacity: u32, id_space: u32) -> Result<Self, SimError> {
        Ok(Replay {
            engine: Engine::new(kind, capacity, id_space)?,
            id_space,
            events: 0,
        })
    }

    pub fn feed(&mut self, ev: AccessEvent) -> Result<(), SimError> {
        if ev.id >= self.id_space {
            return Err(SimError::IdOutOfRange {
                id: ev.id,
                id_space: self.id_space,
            });
        }
        self.engine.touch(ev);
        self.events += 1;
        Ok(())
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn reads(&self) -> u64 {
        self.engine.reads()
    }

    pub fn writes(&self) -> u64 {
        self.engine.writes()
    }

    pub fn finish(mut self) -> SimResult {
        self.engine.flush();
        SimResult {
            reads: self.engine.reads(),
            writes: self.engine.writes(),
            io: self.engine.reads() + self.engine.writes(),
            events: self.events,
        }
    }
}

/// Replays a materialized trace and returns the totals.
pub fn simulate_trace(
    trace: &AccessTrace,
    capacity: u32,
    kind: EngineKind,
) -> Result<SimResult, SimError> {
    simulate_events(
        trace.events.iter().copied(),
        trace.id_scheme().id_space(),
        capacity,
        kind,
    )
}

/// Replays an arbitrary event stream.
pub fn simulate_events<I>(
    events: I,
    id_space: u32,
    capacity: u32,
    kind: EngineKind,
) -> Result<SimResult, SimError>
where
    I: IntoIterator<Item = AccessEvent>,
{
    let mut replay = Replay::new(kind, capacity, id_space)?;
    for ev in events {
        replay.feed(ev)?;
    }
    Ok(replay.finish())
}

/// Generates and replays the blocked-matmul event stream without
/// materializing it; `pinned` selects the explicit-control emulation.
pub fn simulate_generated(
    n: u32,
    block: BlockSpec,
    pinned: Option<PinPlacement>,
    capacity: u32,
    kind: EngineKind,
) -> Result<SimResult, SimError> {
    let scheme = IdScheme::new(n)?;
    let mut engine = Engine::new(kind, capacity, scheme.id_space())?;
    let mut count = 0u64;
    // generated ids are in range by construction; feed the engine directly
    let feed = |ev: AccessEvent| {
        engine.touch(ev);
        count += 1;
    };
    match pinned {
        None => crate::trace::for_each_event(n, block, feed)?,
        Some(p) => crate::trace::for_each_pinned_event(n, block, p, feed)?,
    }
    engine.flush();
    Ok(SimResult {
        reads: engine.reads(),
        writes: engine.writes(),
        io: engine.reads() + engine.writes(),
        events: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{generate_pinned_trace, generate_trace};
    use alloc::vec;
    use alloc::vec::Vec;

    fn unit_trace_n4() -> AccessTrace {
        generate_trace(4, BlockSpec::unit()).unwrap()
    }

    #[test]
    fn worked_example_counter_checkpoints() {
        // n = 4, M = 12, unit blocks: running (reads, writes) after each
        // accumulation step of the replayed table
        let trace = unit_trace_n4();
        for kind in [EngineKind::LruScan, EngineKind::LruFast] {
            let mut replay = Replay::new(kind, 12, 48).unwrap();
            let mut seen = Vec::new();
            for (idx, &ev) in trace.events.iter().enumerate() {
                replay.feed(ev).unwrap();
                if (idx + 1) % 3 == 0 && idx < 63 {
                    seen.push((replay.reads(), replay.writes()));
                }
            }
            assert_eq!(
                seen,
                vec![
                    (3, 0),
                    (5, 0),
                    (7, 0),
                    (9, 0),
                    (11, 0),
                    (12, 0),
                    (13, 0),
                    (14, 0),
                    (16, 0),
                    (17, 1),
                    (18, 1),
                    (19, 1),
                    (21, 1),
                    (22, 2),
                    (23, 2),
                    (24, 2),
                    (27, 3),
                    (29, 3),
                    (31, 3),
                    (33, 3),
                    (35, 3),
                ],
                "{} diverged from the worked example",
                kind.name()
            );
        }
    }

    #[test]
    fn small_full_cache_replay() {
        // n = 2, M = 12: all 12 entries fit, each faults once, the four
        // dirty C entries flush
        let trace = generate_trace(2, BlockSpec::unit()).unwrap();
        for kind in [EngineKind::LruScan, EngineKind::LruFast, EngineKind::Lfu] {
            let r = simulate_trace(&trace, 12, kind).unwrap();
            assert_eq!((r.reads, r.writes, r.io), (12, 4, 16), "{}", kind.name());
            assert_eq!(r.events, 24);
        }
    }

    #[test]
    fn pinned_io_not_worse_at_small_scale() {
        let block = BlockSpec::new(2, 2, 1).unwrap();
        let plain =
            simulate_trace(&generate_trace(8, block).unwrap(), 24, EngineKind::LruFast).unwrap();
        let pinned = simulate_trace(
            &generate_pinned_trace(8, block).unwrap(),
            24,
            EngineKind::LruFast,
        )
        .unwrap();
        assert!(
            pinned.io <= plain.io,
            "pinned {} > plain {}",
            pinned.io,
            plain.io
        );
    }

    #[test]
    fn rejects_out_of_range_ids() {
        let r = simulate_events([AccessEvent::read(48)], 48, 4, EngineKind::LruFast);
        assert_eq!(
            r,
            Err(SimError::IdOutOfRange {
                id: 48,
                id_space: 48
            })
        );
    }

    #[test]
    fn rejects_zero_capacity() {
        assert_eq!(
            Replay::new(EngineKind::LruScan, 0, 48).err(),
            Some(SimError::ZeroCapacity)
        );
    }

    #[test]
    fn streaming_matches_materialized() {
        let block = BlockSpec::new(3, 2, 4).unwrap();
        let t = generate_trace(7, block).unwrap();
        let a = simulate_trace(&t, 10, EngineKind::LruFast).unwrap();
        let b = simulate_generated(7, block, None, 10, EngineKind::LruFast).unwrap();
        assert_eq!(a, b);

        let tp = generate_pinned_trace(7, block).unwrap();
        let ap = simulate_trace(&tp, 10, EngineKind::LruFast).unwrap();
        let bp = simulate_generated(
            7,
            block,
            Some(PinPlacement::AfterKb),
            10,
            EngineKind::LruFast,
        )
        .unwrap();
        assert_eq!(ap, bp);
    }

    #[test]
    fn capacity_saturation() {
        // M >= 3n^2: compulsory misses only, flush writes back all of C
        for n in [1u32, 2, 3, 5] {
            let trace = generate_trace(n, BlockSpec::unit()).unwrap();
            for kind in [EngineKind::LruScan, EngineKind::LruFast, EngineKind::Lfu] {
                let r = simulate_trace(&trace, 3 * n * n + 1, kind).unwrap();
                assert_eq!(r.reads, (3 * n * n) as u64);
                assert_eq!(r.writes, (n * n) as u64);
            }
        }
    }
}
