//! Experiment driver: parameter sweeps over the blocked-matmul simulations,
//! I/O normalization against the lower bound, built-in verification vectors,
//! and the engine/kernel timing probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::time::Instant;
use tilecache_core::bounds::{hong_kung_bound, olivry_bound, predicted_io_for_tiles, TileShape};
use tilecache_core::engine::{
    simulate_generated, simulate_trace, CacheEngine, EngineKind, FastCache, FastSnapshot,
    ScanCache, SimResult,
};
use tilecache_core::kernel::{flop_count, matmul, matmul_naive, Matrix};
use tilecache_core::trace::{generate_trace, AccessEvent, BlockSpec, PinPlacement};

/// Replacement policy as selected on the command line. `PinnedLru` is the
/// LRU engine fed the pinned trace variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Policy {
    Lru,
    Lfu,
    #[value(name = "pinned-lru")]
    PinnedLru,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Lru => "lru",
            Policy::Lfu => "lfu",
            Policy::PinnedLru => "pinned-lru",
        }
    }

    pub fn pinned(self) -> Option<PinPlacement> {
        matches!(self, Policy::PinnedLru).then_some(PinPlacement::AfterKb)
    }

    pub fn engine_kind(self, engine: EngineChoice) -> EngineKind {
        match self {
            Policy::Lfu => EngineKind::Lfu,
            Policy::Lru | Policy::PinnedLru => match engine {
                EngineChoice::Scan => EngineKind::LruScan,
                EngineChoice::Fast => EngineKind::LruFast,
            },
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl serde::Serialize for Policy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Which LRU implementation backs the LRU-based policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum EngineChoice {
    Scan,
    #[default]
    Fast,
}

/// The swept dimension plus the fixed values of the other dimensions.
#[derive(Debug, Clone, Copy)]
pub enum SweepAxis {
    /// Sweep the matrix dimension at a fixed blocking.
    N { block: BlockSpec },
    /// Sweep `bk` at fixed `n`, `bi`, `bj`.
    Bk { n: u32, bi: u32, bj: u32 },
    /// Sweep `b = bi = bj` at fixed `n`, `bk`.
    B { n: u32, bk: u32 },
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::N { .. } => "n",
            SweepAxis::Bk { .. } => "bk",
            SweepAxis::B { .. } => "b",
        }
    }

    /// The `(n, block)` configuration for one swept value.
    fn configuration(&self, value: u32) -> (u32, BlockSpec) {
        match *self {
            SweepAxis::N { block } => (value, block),
            SweepAxis::Bk { n, bi, bj } => (n, BlockSpec { bi, bj, bk: value }),
            SweepAxis::B { n, bk } => (
                n,
                BlockSpec {
                    bi: value,
                    bj: value,
                    bk,
                },
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub capacity: u32,
    pub axis: SweepAxis,
    /// Inclusive swept range, ascending.
    pub start: u32,
    pub stop: u32,
    pub step: u32,
    pub policies: Vec<Policy>,
    pub engine: EngineChoice,
}

impl ExperimentConfig {
    fn values(&self) -> impl Iterator<Item = u32> + '_ {
        (self.start..=self.stop).step_by(self.step as usize)
    }
}

/// One `(swept value, policy)` measurement.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRow {
    pub axis_value: u32,
    pub policy: Policy,
    pub n: u32,
    pub bi: u32,
    pub bj: u32,
    pub bk: u32,
    #[serde(rename = "M")]
    pub capacity: u32,
    pub reads: u64,
    pub writes: u64,
    pub io: u64,
    /// Lower bound used as the normalization denominator.
    pub olivry: f64,
    pub hong_kung: f64,
    /// `n^2 + n^3/bi + n^3/bj`, the explicit-control prediction for the
    /// row's tile configuration.
    pub predicted_io: f64,
    /// `io / olivry`; meaningful once the bound is positive.
    pub normalized: f64,
    /// Whether the row's three working tiles fit the cache:
    /// `bi*bk + bi*bj + bj*bk <= M`.
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Non-fatal notes, e.g. block sizes that do not divide `n`.
    pub warnings: Vec<String>,
}

#[derive(Debug)]
pub enum HarnessError {
    BadRange(String),
    Config(tilecache_core::trace::ConfigError),
    Sim(tilecache_core::engine::SimError),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::BadRange(msg) => write!(f, "{msg}"),
            HarnessError::Config(e) => write!(f, "{e}"),
            HarnessError::Sim(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<tilecache_core::trace::ConfigError> for HarnessError {
    fn from(e: tilecache_core::trace::ConfigError) -> Self {
        HarnessError::Config(e)
    }
}

impl From<tilecache_core::engine::SimError> for HarnessError {
    fn from(e: tilecache_core::engine::SimError) -> Self {
        HarnessError::Sim(e)
    }
}

/// Runs one sweep: for every swept value and every policy, generates the
/// trace (pinned for `pinned-lru`), replays it, and emits one row with the
/// bounds evaluated at the row's dimensions. Rows are ordered by
/// `(swept value, policy name)` and the output is deterministic.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput, HarnessError> {
    if cfg.step == 0 {
        return Err(HarnessError::BadRange("range step must be positive".into()));
    }
    if cfg.start < 1 || cfg.stop < cfg.start {
        return Err(HarnessError::BadRange(format!(
            "range {}:{}:{} is empty or not ascending",
            cfg.start, cfg.stop, cfg.step
        )));
    }
    if cfg.policies.is_empty() {
        return Err(HarnessError::BadRange("no policies selected".into()));
    }
    let mut policies = cfg.policies.clone();
    policies.sort_by_key(|p| p.name());
    policies.dedup();

    // validate every configuration up front so a sweep never dies midway
    for value in cfg.values() {
        let (n, block) = cfg.axis.configuration(value);
        block.validate_for(n).map_err(HarnessError::Config)?;
    }

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for value in cfg.values() {
        let (n, block) = cfg.axis.configuration(value);
        if !block.divides(n) {
            warnings.push(format!(
                "{}={value}: blocks ({},{},{}) do not divide n={n}; \
                 closed-form predictions assume exact tiling",
                cfg.axis.name(),
                block.bi,
                block.bj,
                block.bk
            ));
        }
        for &policy in &policies {
            let result = simulate_generated(
                n,
                block,
                policy.pinned(),
                cfg.capacity,
                policy.engine_kind(cfg.engine),
            )?;
            rows.push(make_row(value, policy, n, block, cfg.capacity, result));
        }
    }
    Ok(SweepOutput { rows, warnings })
}

fn make_row(
    axis_value: u32,
    policy: Policy,
    n: u32,
    block: BlockSpec,
    capacity: u32,
    result: SimResult,
) -> SweepRow {
    let olivry = olivry_bound(n, capacity).expect("validated dimensions");
    let hong_kung = hong_kung_bound(n, n, n, capacity).expect("validated dimensions");
    let tiles = block.bi as u64 * block.bk as u64
        + block.bi as u64 * block.bj as u64
        + block.bj as u64 * block.bk as u64;
    SweepRow {
        axis_value,
        policy,
        n,
        bi: block.bi,
        bj: block.bj,
        bk: block.bk,
        capacity,
        reads: result.reads,
        writes: result.writes,
        io: result.io,
        olivry,
        hong_kung,
        predicted_io: predicted_io_for_tiles(n, block.bi, block.bj),
        normalized: result.io as f64 / olivry,
        feasible: tiles <= capacity as u64,
    }
}

// ---------------------------------------------------------------------------
// built-in verification vectors

/// Cache size of the worked replay example.
pub const WORKED_CAPACITY: u32 = 12;
/// Matrix dimension of the worked replay example.
pub const WORKED_N: u32 = 4;

/// Running `(events, reads, writes)` checkpoints of the worked unit-stride
/// replay (n = 4, M = 12), one per accumulation step.
pub const WORKED_CHECKPOINTS: [(u64, u64, u64); 21] = [
    (3, 3, 0),
    (6, 5, 0),
    (9, 7, 0),
    (12, 9, 0),
    (15, 11, 0),
    (18, 12, 0),
    (21, 13, 0),
    (24, 14, 0),
    (27, 16, 0),
    (30, 17, 1),
    (33, 18, 1),
    (36, 19, 1),
    (39, 21, 1),
    (42, 22, 2),
    (45, 23, 2),
    (48, 24, 2),
    (51, 27, 3),
    (54, 29, 3),
    (57, 31, 3),
    (60, 33, 3),
    (63, 35, 3),
];

/// Replays the worked example on one LRU engine and checks every checkpoint.
/// Returns the number of checkpoints verified.
pub fn verify_worked_checkpoints(kind: EngineKind) -> Result<usize, String> {
    let trace = generate_trace(WORKED_N, BlockSpec::unit()).expect("static configuration");
    let mut replay =
        tilecache_core::engine::Replay::new(kind, WORKED_CAPACITY, trace.id_scheme().id_space())
            .map_err(|e| e.to_string())?;
    let mut next = 0;
    for &ev in &trace.events {
        replay.feed(ev).map_err(|e| e.to_string())?;
        if next < WORKED_CHECKPOINTS.len() && replay.events() == WORKED_CHECKPOINTS[next].0 {
            let (at, reads, writes) = WORKED_CHECKPOINTS[next];
            if (replay.reads(), replay.writes()) != (reads, writes) {
                return Err(format!(
                    "{} at event {at}: expected r={reads} w={writes}, got r={} w={}",
                    kind.name(),
                    replay.reads(),
                    replay.writes()
                ));
            }
            next += 1;
        }
    }
    if next != WORKED_CHECKPOINTS.len() {
        return Err(format!("only {next} checkpoints reached"));
    }
    // full-trace totals after the dirty flush
    let result = replay.finish();
    if (result.reads, result.writes) != (96, 16) {
        return Err(format!(
            "final totals wrong: r={} w={}",
            result.reads, result.writes
        ));
    }
    Ok(WORKED_CHECKPOINTS.len())
}

/// The worked single-access transition of the constant-time engine
/// (n = 2, M = 6): state before, the access, and the expected state after.
pub fn worked_fast_transition() -> (FastSnapshot, AccessEvent, FastSnapshot) {
    let before = FastSnapshot {
        ids: vec![0, 4, 8, 2, 5, 6],
        stamps: vec![12, 7, 11, 9, 10, 13],
        younger: vec![5, 3, 0, 4, 2, -1],
        older: vec![2, -1, 4, 1, 3, 0],
        slot_of: vec![0, -1, 3, -1, 1, 4, 5, -1, 2, -1, -1, -1],
        oldest: 1,
        youngest: 5,
    };
    let after = FastSnapshot {
        ids: vec![0, 10, 8, 2, 5, 6],
        stamps: vec![12, 14, 11, 9, 10, 13],
        younger: vec![5, -1, 0, 4, 2, 1],
        older: vec![2, 5, 4, -1, 3, 0],
        slot_of: vec![0, -1, 3, -1, -1, 4, 5, -1, 2, -1, 1, -1],
        oldest: 3,
        youngest: 1,
    };
    (before, AccessEvent::write(10), after)
}

/// Applies the worked transition and compares all five arrays exactly.
pub fn verify_worked_fast_transition() -> Result<(), String> {
    let (before, event, expected) = worked_fast_transition();
    let mut cache = FastCache::from_snapshot(&before)?;
    cache.touch(event);
    let got = cache.snapshot();
    if got != expected {
        return Err(format!("post-access state diverged:\n{got:#?}"));
    }
    cache.audit()
}

/// Replays `count` seeded random traces through both LRU engines at several
/// capacities and demands identical counters. Returns the replay count.
pub fn randomized_equivalence(count: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut replays = 0;
    for case in 0..count {
        let n = rng.random_range(1u32..=8);
        let id_space = 3 * n * n;
        let len = rng.random_range(0usize..=10_000);
        let events: Vec<AccessEvent> = (0..len)
            .map(|_| AccessEvent {
                id: rng.random_range(0..id_space),
                write: rng.random_bool(0.33),
            })
            .collect();
        for m in [1u32, 2, 3, 5, 12, 64] {
            let mut scan = ScanCache::new(m);
            let mut fast = FastCache::new(m, id_space);
            for &ev in &events {
                scan.touch(ev);
                fast.touch(ev);
            }
            scan.flush();
            fast.flush();
            if (scan.reads(), scan.writes()) != (fast.reads(), fast.writes()) {
                return Err(format!(
                    "case {case} (n={n}, len={len}, M={m}): scan r={} w={}, fast r={} w={}",
                    scan.reads(),
                    scan.writes(),
                    fast.reads(),
                    fast.writes()
                ));
            }
            replays += 1;
        }
    }
    Ok(replays)
}

#[derive(Debug)]
pub struct SelfTestCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct SelfTestReport {
    pub checks: Vec<SelfTestCheck>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs the built-in verification vectors: the worked counter checkpoints on
/// both LRU engines, the worked constant-time transition, the tile-size spot
/// values, and a batch of randomized scan-vs-fast equivalence replays.
pub fn selftest() -> SelfTestReport {
    let mut checks = Vec::new();
    let mut push = |name, result: Result<String, String>| match result {
        Ok(detail) => checks.push(SelfTestCheck {
            name,
            passed: true,
            detail,
        }),
        Err(detail) => checks.push(SelfTestCheck {
            name,
            passed: false,
            detail,
        }),
    };

    push(
        "worked-checkpoints-scan",
        verify_worked_checkpoints(EngineKind::LruScan).map(|n| format!("{n} checkpoints match")),
    );
    push(
        "worked-checkpoints-fast",
        verify_worked_checkpoints(EngineKind::LruFast).map(|n| format!("{n} checkpoints match")),
    );
    push(
        "worked-fast-transition",
        verify_worked_fast_transition().map(|()| "all five arrays match".into()),
    );
    push("optimal-block-values", {
        let rect = tilecache_core::bounds::optimal_block(220, TileShape::Rect);
        let cubic = tilecache_core::bounds::optimal_block(220, TileShape::Cubic);
        match (rect, cubic) {
            (Ok(13), Ok(8)) => Ok("rect b=13, cubic b=8 at M=220".into()),
            other => Err(format!("expected (13, 8) at M=220, got {other:?}")),
        }
    });
    push(
        "randomized-equivalence",
        randomized_equivalence(100, SELFTEST_SEED)
            .map(|n| format!("{n} replays agree across engines")),
    );
    SelfTestReport { checks }
}

pub const SELFTEST_SEED: u64 = 0x7113_cac8;

// ---------------------------------------------------------------------------
// timing probes

#[derive(Debug, Clone)]
pub struct TimingRow {
    pub capacity: u32,
    pub seconds: f64,
    pub per_event_ns: f64,
}

#[derive(Debug, Clone)]
pub struct TimingProbe {
    pub engine: EngineKind,
    pub n: u32,
    pub events: u64,
    pub rows: Vec<TimingRow>,
}

impl TimingProbe {
    /// Time ratio between two probed capacities.
    pub fn ratio(&self, hi: u32, lo: u32) -> Option<f64> {
        let find = |m| {
            self.rows
                .iter()
                .find(|r| r.capacity == m)
                .map(|r| r.seconds)
        };
        Some(find(hi)? / find(lo)?)
    }
}

/// Replays the unit-stride trace for dimension `n` once per capacity and
/// engine, `reps` times each, keeping the fastest run. Absolute times are
/// machine specific; the capacity-scaling ratios are what matters.
pub fn timing_probe(capacities: &[u32], n: u32, kind: EngineKind, reps: u32) -> TimingProbe {
    let trace = generate_trace(n, BlockSpec::unit()).expect("valid dimension");
    let events = trace.events.len() as u64;
    let mut rows = Vec::new();
    for &m in capacities {
        let mut best = f64::INFINITY;
        for _ in 0..reps.max(1) {
            let t0 = Instant::now();
            let result = simulate_trace(&trace, m, kind).expect("valid trace");
            let dt = t0.elapsed().as_secs_f64();
            std::hint::black_box(result);
            best = best.min(dt);
        }
        rows.push(TimingRow {
            capacity: m,
            seconds: best,
            per_event_ns: best * 1e9 / events as f64,
        });
    }
    TimingProbe {
        engine: kind,
        n,
        events,
        rows,
    }
}

#[derive(Debug, Clone)]
pub struct KernelTiming {
    pub n: usize,
    pub block: BlockSpec,
    pub naive_seconds: f64,
    pub blocked_seconds: f64,
    /// blocked time / naive time
    pub ratio: f64,
    pub flops: u64,
}

/// Times the actual arithmetic, naive versus blocked, on deterministic
/// double-precision inputs. Reported for context only; wall-clock numbers
/// are machine specific.
pub fn kernel_timing(n: usize, block: BlockSpec) -> KernelTiming {
    let a = Matrix::from_fn(n, |i, j| ((i * 31 + j * 17) % 97) as f64 / 97.0 - 0.5);
    let b = Matrix::from_fn(n, |i, j| ((i * 13 + j * 41) % 89) as f64 / 89.0 - 0.5);

    let t0 = Instant::now();
    let naive = matmul_naive(&a, &b).expect("same dimensions");
    let naive_seconds = t0.elapsed().as_secs_f64();
    std::hint::black_box(&naive);

    let t0 = Instant::now();
    let blocked = matmul(&a, &b, block).expect("same dimensions");
    let blocked_seconds = t0.elapsed().as_secs_f64();
    std::hint::black_box(&blocked);

    KernelTiming {
        n,
        block,
        naive_seconds,
        blocked_seconds,
        ratio: blocked_seconds / naive_seconds,
        flops: flop_count(n as u64),
    }
}
