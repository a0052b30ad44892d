//! Entry-id assignment and access-trace generation for the matmul loop nests.
//!
//! Every entry of the three `n x n` matrices gets a unique id in `[0, 3n^2)`:
//! `A` occupies `[0, n^2)`, `B` `[n^2, 2n^2)` and `C` `[2n^2, 3n^2)`, with
//! `id = base + n*j + i` inside each matrix. The generators walk the blocked
//! six-loop nest (unit blocks reproduce the naive triple loop) and emit one
//! event triple `A(ib,kb) B(kb,jb) C(ib,jb)` per innermost iteration, the
//! `C` touch carrying write intent.

use alloc::vec::Vec;
use core::fmt;

/// Identifier of one matrix entry in the combined `[0, 3n^2)` id space.
pub type EntryId = u32;

/// Which of the three matrices an entry id belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    A,
    B,
    C,
}

impl Role {
    fn base(self, n: u32) -> u32 {
        match self {
            Role::A => 0,
            Role::B => n * n,
            Role::C => 2 * n * n,
        }
    }
}

/// Rejected dimension or block configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    /// `n` outside `[1, MAX_DIMENSION]`.
    InvalidDimension(u32),
    /// A block stride of zero.
    ZeroBlock,
    /// A block stride exceeding the matrix dimension.
    BlockExceedsDimension { block: u32, n: u32 },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::InvalidDimension(n) => {
                write!(f, "matrix dimension {n} outside [1, {MAX_DIMENSION}]")
            }
            ConfigError::ZeroBlock => write!(f, "block strides must be at least 1"),
            ConfigError::BlockExceedsDimension { block, n } => {
                write!(f, "block stride {block} exceeds matrix dimension {n}")
            }
        }
    }
}

impl core::error::Error for ConfigError {}

/// Largest supported matrix dimension; keeps `3n^2` within `i32`, which the
/// constant-time engine relies on for its reverse index.
pub const MAX_DIMENSION: u32 = 26_754;

/// Bijective mapping from (matrix, row, column) onto the flat id space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdScheme {
    n: u32,
}

impl IdScheme {
    pub fn new(n: u32) -> Result<Self, ConfigError> {
        if !(1..=MAX_DIMENSION).contains(&n) {
            return Err(ConfigError::InvalidDimension(n));
        }
        Ok(IdScheme { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Total number of distinct ids, `3n^2`.
    pub fn id_space(&self) -> u32 {
        3 * self.n * self.n
    }

    /// Id of entry `(i, j)` of the given matrix: `base + n*j + i`.
    pub fn id(&self, role: Role, i: u32, j: u32) -> EntryId {
        debug_assert!(i < self.n && j < self.n);
        role.base(self.n) + self.n * j + i
    }

    pub fn a(&self, i: u32, j: u32) -> EntryId {
        self.id(Role::A, i, j)
    }

    pub fn b(&self, i: u32, j: u32) -> EntryId {
        self.id(Role::B, i, j)
    }

    pub fn c(&self, i: u32, j: u32) -> EntryId {
        self.id(Role::C, i, j)
    }

    pub fn contains(&self, id: EntryId) -> bool {
        id < self.id_space()
    }

    pub fn role_of(&self, id: EntryId) -> Option<Role> {
        let sq = self.n * self.n;
        match id {
            _ if id < sq => Some(Role::A),
            _ if id < 2 * sq => Some(Role::B),
            _ if id < 3 * sq => Some(Role::C),
            _ => None,
        }
    }
}

/// Strides of the six-loop blocking, one per loop direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    pub bi: u32,
    pub bj: u32,
    pub bk: u32,
}

impl BlockSpec {
    pub fn new(bi: u32, bj: u32, bk: u32) -> Result<Self, ConfigError> {
        if bi == 0 || bj == 0 || bk == 0 {
            return Err(ConfigError::ZeroBlock);
        }
        Ok(BlockSpec { bi, bj, bk })
    }

    /// Unit strides everywhere: the naive triple loop.
    pub fn unit() -> Self {
        BlockSpec {
            bi: 1,
            bj: 1,
            bk: 1,
        }
    }

    pub fn validate_for(&self, n: u32) -> Result<(), ConfigError> {
        for block in [self.bi, self.bj, self.bk] {
            if block == 0 {
                return Err(ConfigError::ZeroBlock);
            }
            if block > n {
                return Err(ConfigError::BlockExceedsDimension { block, n });
            }
        }
        Ok(())
    }

    /// Whether every stride divides `n`; the closed-form I/O predictions
    /// assume this, the simulators do not.
    pub fn divides(&self, n: u32) -> bool {
        n.is_multiple_of(self.bi) && n.is_multiple_of(self.bj) && n.is_multiple_of(self.bk)
    }
}

/// One memory touch: the entry id plus whether the access modifies the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccessEvent {
    pub id: EntryId,
    pub write: bool,
}

impl AccessEvent {
    pub fn read(id: EntryId) -> Self {
        AccessEvent { id, write: false }
    }

    pub fn write(id: EntryId) -> Self {
        AccessEvent { id, write: true }
    }
}

/// Where the cache-pinning touch block is inserted in the loop nest.
///
/// The re-touch loops sit "just outside the innermost loop"; that reading is
/// ambiguous between the end of the `jb` body (right after the `kb` loop) and
/// the end of the `k` body (after the whole `ib/jb/kb` nest). The former is
/// what the reference snippet's indentation shows and is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PinPlacement {
    /// After each completion of the `kb` loop (inside the `jb` loop).
    #[default]
    AfterKb,
    /// After the inner three loops, once per `(i, j, k)` tile step.
    AfterK,
}

/// Generation parameters recorded alongside a materialized trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceMeta {
    pub n: u32,
    pub block: BlockSpec,
    pub pinned: bool,
}

/// A materialized event sequence plus the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessTrace {
    pub meta: TraceMeta,
    pub events: Vec<AccessEvent>,
}

impl AccessTrace {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn id_scheme(&self) -> IdScheme {
        IdScheme { n: self.meta.n }
    }
}

/// Visits every `(ib, jb, kb)` index triple of the guarded six-loop nest in
/// program order. The guards `(ib < i + bi) && (ib < n)` make non-dividing
/// block sizes walk exactly the same `n^3` triples as the naive loop.
pub fn for_each_iteration<F>(n: u32, block: BlockSpec, mut f: F) -> Result<(), ConfigError>
where
    F: FnMut(u32, u32, u32),
{
    IdScheme::new(n)?;
    block.validate_for(n)?;
    let mut i = 0;
    while i < n {
        let mut j = 0;
        while j < n {
            let mut k = 0;
            while k < n {
                for ib in i..n.min(i + block.bi) {
                    for jb in j..n.min(j + block.bj) {
                        for kb in k..n.min(k + block.bk) {
                            f(ib, jb, kb);
                        }
                    }
                }
                k += block.bk;
            }
            j += block.bj;
        }
        i += block.bi;
    }
    Ok(())
}

/// Streams the events of the blocked multiplication without materializing
/// them: per innermost iteration the triple `A(ib,kb)`, `B(kb,jb)`,
/// `C(ib,jb)`, the last with write intent.
pub fn for_each_event<F>(n: u32, block: BlockSpec, mut f: F) -> Result<(), ConfigError>
where
    F: FnMut(AccessEvent),
{
    let scheme = IdScheme::new(n)?;
    for_each_iteration(n, block, |ib, jb, kb| {
        f(AccessEvent::read(scheme.a(ib, kb)));
        f(AccessEvent::read(scheme.b(kb, jb)));
        f(AccessEvent::write(scheme.c(ib, jb)));
    })
}

/// Streams the pinned-variant events: the plain event stream with one extra
/// write touch of every `C` entry of the current block appended at the chosen
/// placement, which under LRU keeps the block's `C` entries youngest and so
/// emulates explicit cache control.
pub fn for_each_pinned_event<F>(
    n: u32,
    block: BlockSpec,
    placement: PinPlacement,
    mut f: F,
) -> Result<(), ConfigError>
where
    F: FnMut(AccessEvent),
{
    let scheme = IdScheme::new(n)?;
    block.validate_for(n)?;
    let touch_block = |i: u32, j: u32, f: &mut F| {
        for ib1 in i..n.min(i + block.bi) {
            for jb1 in j..n.min(j + block.bj) {
                f(AccessEvent::write(scheme.c(ib1, jb1)));
            }
        }
    };
    let mut i = 0;
    while i < n {
        let mut j = 0;
        while j < n {
            let mut k = 0;
            while k < n {
                for ib in i..n.min(i + block.bi) {
                    for jb in j..n.min(j + block.bj) {
                        for kb in k..n.min(k + block.bk) {
                            f(AccessEvent::read(scheme.a(ib, kb)));
                            f(AccessEvent::read(scheme.b(kb, jb)));
                            f(AccessEvent::write(scheme.c(ib, jb)));
                        }
                        if placement == PinPlacement::AfterKb {
                            touch_block(i, j, &mut f);
                        }
                    }
                }
                if placement == PinPlacement::AfterK {
                    touch_block(i, j, &mut f);
                }
                k += block.bk;
            }
            j += block.bj;
        }
        i += block.bi;
    }
    Ok(())
}

/// Materializes the unpinned trace; length is exactly `3n^3`.
pub fn generate_trace(n: u32, block: BlockSpec) -> Result<AccessTrace, ConfigError> {
    let mut events = Vec::new();
    for_each_event(n, block, |ev| events.push(ev))?;
    Ok(AccessTrace {
        meta: TraceMeta {
            n,
            block,
            pinned: false,
        },
        events,
    })
}

/// Materializes the pinned trace with the default placement.
pub fn generate_pinned_trace(n: u32, block: BlockSpec) -> Result<AccessTrace, ConfigError> {
    generate_pinned_trace_with(n, block, PinPlacement::default())
}

pub fn generate_pinned_trace_with(
    n: u32,
    block: BlockSpec,
    placement: PinPlacement,
) -> Result<AccessTrace, ConfigError> {
    let mut events = Vec::new();
    for_each_pinned_event(n, block, placement, |ev| events.push(ev))?;
    Ok(AccessTrace {
        meta: TraceMeta {
            n,
            block,
            pinned: true,
        },
        events,
    })
}
