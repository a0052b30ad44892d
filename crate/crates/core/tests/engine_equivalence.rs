//! The linear-scan engine is the oracle for the constant-time engine: on any
//! event stream and any capacity the two must report identical counters at
//! every step, and the chain structure must survive a full audit after every
//! single touch.

use proptest::prelude::*;
use tilecache_core::engine::{
    simulate_trace, CacheEngine, EngineKind, FastCache, Replay, ScanCache,
};
use tilecache_core::trace::{generate_pinned_trace, generate_trace, AccessEvent, BlockSpec};

const CAPACITIES: [u32; 6] = [1, 2, 3, 5, 12, 64];

fn arb_trace() -> impl Strategy<Value = (u32, Vec<AccessEvent>)> {
    (1u32..=8).prop_flat_map(|n| {
        let id_space = 3 * n * n;
        let event = (0..id_space, any::<bool>()).prop_map(|(id, write)| AccessEvent { id, write });
        (Just(id_space), prop::collection::vec(event, 0..2000))
    })
}

proptest! {
    #[test]
    fn scan_and_fast_agree_on_random_traces((id_space, events) in arb_trace()) {
        for m in CAPACITIES {
            let mut scan = ScanCache::new(m);
            let mut fast = FastCache::new(m, id_space);
            for &ev in &events {
                scan.touch(ev);
                fast.touch(ev);
                prop_assert_eq!(scan.reads(), fast.reads());
                prop_assert_eq!(scan.writes(), fast.writes());
            }
            scan.flush();
            fast.flush();
            prop_assert_eq!(scan.reads(), fast.reads());
            prop_assert_eq!(scan.writes(), fast.writes());
        }
    }

    #[test]
    fn fast_chain_audits_clean_after_every_touch((id_space, events) in arb_trace()) {
        for m in [1u32, 2, 5, 12] {
            let mut fast = FastCache::new(m, id_space);
            for &ev in &events {
                fast.touch(ev);
                if let Err(e) = fast.audit() {
                    return Err(TestCaseError::fail(format!("audit failed at M={m}: {e}")));
                }
                prop_assert!(fast.last_touch_updates() <= 16);
            }
        }
    }

    #[test]
    fn counters_are_monotone_and_conserved((id_space, events) in arb_trace()) {
        let m = 5;
        let mut replay = Replay::new(EngineKind::LruFast, m, id_space).unwrap();
        let mut scan = ScanCache::new(m);
        let (mut last_r, mut last_w) = (0, 0);
        let mut expected_reads = 0;
        for &ev in &events {
            // a read happens exactly when the id is not resident
            if !scan.resident_ids().contains(&(ev.id as i32)) {
                expected_reads += 1;
            }
            scan.touch(ev);
            replay.feed(ev).unwrap();
            prop_assert!(replay.reads() >= last_r && replay.writes() >= last_w);
            last_r = replay.reads();
            last_w = replay.writes();
            prop_assert_eq!(replay.reads(), expected_reads);
        }
        let events_fed = replay.events();
        let result = replay.finish();
        prop_assert_eq!(result.events, events_fed);
        prop_assert_eq!(result.io, result.reads + result.writes);
        prop_assert!(result.reads <= result.events);
        prop_assert!(result.writes <= result.reads + m as u64);
    }
}

#[test]
fn engines_agree_on_generated_traces() {
    for n in 1u32..=12 {
        let mut blocks = vec![
            BlockSpec::unit(),
            BlockSpec::new(n, n, n).unwrap(),
            BlockSpec::new(1.max(n / 2), 1.max(n / 3), n).unwrap(),
        ];
        if n >= 4 {
            blocks.push(BlockSpec::new(3, 4, 2).unwrap());
        }
        for block in blocks {
            for trace in [
                generate_trace(n, block).unwrap(),
                generate_pinned_trace(n, block).unwrap(),
            ] {
                for m in CAPACITIES {
                    let a = simulate_trace(&trace, m, EngineKind::LruScan).unwrap();
                    let b = simulate_trace(&trace, m, EngineKind::LruFast).unwrap();
                    assert_eq!(a, b, "n={n} {block:?} M={m} pinned={}", trace.meta.pinned);
                }
            }
        }
    }
}
