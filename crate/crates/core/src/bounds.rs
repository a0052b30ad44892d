//! Closed-form communication lower bounds, optimal tile sizes, and predicted
//! I/O volumes for blocked matrix multiplication under a cache of `M` scalar
//! entries.
//!
//! Tile sizes are exact integer computations (`isqrt`-based floors of the
//! real-valued optima); the bounds and predictions are double-precision.

use core::fmt;

/// Tile aspect of the six-loop blocking the formulas are evaluated for.
///
/// `Rect` is `Alpha` with `alpha = 1` as far as the formulas go; it is kept
/// distinct because it is the shape of interest (the proven-optimal one) and
/// reports label it separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TileShape {
    /// `bi = bj = bk = b`.
    Cubic,
    /// `bi = bj = b`, `bk = 1`.
    Rect,
    /// `bi = bj = b`, `bk = alpha` for a fixed `alpha >= 1`.
    Alpha(u32),
}

impl fmt::Display for TileShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TileShape::Cubic => write!(f, "cubic"),
            TileShape::Rect => write!(f, "rect"),
            TileShape::Alpha(_) => write!(f, "alpha"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundsError {
    /// A dimension or capacity of zero.
    Domain(&'static str),
    /// No block size of at least 1 fits the cache for this shape.
    Infeasible { capacity: u32, shape: TileShape },
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::Domain(what) => write!(f, "{what} must be at least 1"),
            BoundsError::Infeasible { capacity, shape } => write!(
                f,
                "no {shape} tile of size >= 1 fits a cache of {capacity} entries"
            ),
        }
    }
}

impl core::error::Error for BoundsError {}

fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

fn cube(n: u32) -> f64 {
    let nf = n as f64;
    nf * nf * nf
}

fn square(n: u32) -> f64 {
    let nf = n as f64;
    nf * nf
}

/// Asymptotic communication lower bound `2*m*n*k / sqrt(M)` for multiplying
/// an `m x k` by a `k x n` matrix.
pub fn hong_kung_bound(m: u32, k: u32, n: u32, capacity: u32) -> Result<f64, BoundsError> {
    if m < 1 || k < 1 || n < 1 {
        return Err(BoundsError::Domain("matrix dimensions"));
    }
    if capacity < 1 {
        return Err(BoundsError::Domain("cache capacity"));
    }
    Ok(2.0 * m as f64 * n as f64 * k as f64 / sqrt(capacity as f64))
}

/// Non-asymptotic lower bound `2n^3/sqrt(M) - 2n^2/sqrt(M) + 5n - M - 2`
/// for square `n x n` multiplication.
pub fn olivry_bound(n: u32, capacity: u32) -> Result<f64, BoundsError> {
    if n < 1 {
        return Err(BoundsError::Domain("matrix dimension"));
    }
    if capacity < 1 {
        return Err(BoundsError::Domain("cache capacity"));
    }
    let root = sqrt(capacity as f64);
    Ok(2.0 * cube(n) / root - 2.0 * square(n) / root + 5.0 * n as f64 - capacity as f64 - 2.0)
}

/// Largest integer block size `b` such that the shape's three working tiles
/// fit in the cache simultaneously:
///
/// - cubic: `3b^2 <= M`, giving `b = floor(sqrt(M/3))`
/// - rect: `b^2 + 2b <= M`, giving `b = floor(sqrt(M+1)) - 1`
/// - alpha: `b^2 + 2*alpha*b <= M`, giving `b = floor(sqrt(alpha^2+M)) - alpha`
pub fn optimal_block(capacity: u32, shape: TileShape) -> Result<u32, BoundsError> {
    if capacity < 1 {
        return Err(BoundsError::Domain("cache capacity"));
    }
    let m = capacity as u64;
    let b = match shape {
        TileShape::Cubic => (m / 3).isqrt(),
        TileShape::Rect => (m + 1).isqrt() - 1,
        TileShape::Alpha(alpha) => {
            if alpha < 1 {
                return Err(BoundsError::Domain("alpha"));
            }
            let a = alpha as u64;
            (a * a + m).isqrt() - a
        }
    };
    if b < 1 {
        return Err(BoundsError::Infeasible { capacity, shape });
    }
    Ok(b as u32)
}

/// Predicted I/O of one shape at its optimal block size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedIo {
    /// The integer block size the prediction is achievable with.
    pub block: u32,
    /// `n^2 + 2n^3/b` with the integer `b`: what a simulator with explicit
    /// cache control can actually reach.
    pub exact: f64,
    /// The closed form with the un-floored block size:
    /// `2*sqrt(3)*n^3/sqrt(M) + n^2` (cubic), `2n^3/sqrt(M) + n^2` (rect),
    /// `2n^3/(-alpha + sqrt(alpha^2+M)) + n^2` (alpha).
    pub asymptotic: f64,
}

/// Predicted I/O volume under explicit cache control for the given shape,
/// using the shape's optimal block size for the capacity.
pub fn predicted_io(n: u32, capacity: u32, shape: TileShape) -> Result<PredictedIo, BoundsError> {
    if n < 1 {
        return Err(BoundsError::Domain("matrix dimension"));
    }
    let block = optimal_block(capacity, shape)?;
    let m = capacity as f64;
    let exact = square(n) + 2.0 * cube(n) / block as f64;
    let asymptotic = match shape {
        TileShape::Cubic => 2.0 * sqrt(3.0) * cube(n) / sqrt(m) + square(n),
        TileShape::Rect => 2.0 * cube(n) / sqrt(m) + square(n),
        TileShape::Alpha(alpha) => {
            let a = alpha as f64;
            2.0 * cube(n) / (-a + sqrt(a * a + m)) + square(n)
        }
    };
    Ok(PredictedIo {
        block,
        exact,
        asymptotic,
    })
}

/// Predicted I/O `n^2 + n^3/bi + n^3/bj` for a concrete tile configuration:
/// each `C` tile loads once, each tile step loads one `A` and one `B` tile.
/// Exact when the strides divide `n`.
pub fn predicted_io_for_tiles(n: u32, bi: u32, bj: u32) -> f64 {
    square(n) + cube(n) / bi as f64 + cube(n) / bj as f64
}

/// The tile shape with the least predicted I/O: `(b, b, 1)`. Growing
/// `bk = alpha` only shrinks the affordable `b` and with it the reuse, which
/// the alpha-sweep ordering test confirms exhaustively.
pub fn best_shape(_n: u32, _capacity: u32) -> TileShape {
    TileShape::Rect
}

/// Bounds, optimal block size, and predictions for one `(n, M, shape)`
/// configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundsReport {
    pub n: u32,
    #[cfg_attr(feature = "serde", serde(rename = "M"))]
    pub capacity: u32,
    #[cfg_attr(feature = "serde", serde(serialize_with = "shape_name"))]
    pub shape: TileShape,
    #[cfg_attr(feature = "serde", serde(rename = "b"))]
    pub block: u32,
    pub predicted_io_exact: f64,
    pub predicted_io_asymptotic: f64,
    pub hong_kung: f64,
    pub olivry: f64,
}

#[cfg(feature = "serde")]
fn shape_name<S: serde::Serializer>(shape: &TileShape, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(shape)
}

pub fn bounds_report(n: u32, capacity: u32, shape: TileShape) -> Result<BoundsReport, BoundsError> {
    let predicted = predicted_io(n, capacity, shape)?;
    Ok(BoundsReport {
        n,
        capacity,
        shape,
        block: predicted.block,
        predicted_io_exact: predicted.exact,
        predicted_io_asymptotic: predicted.asymptotic,
        hong_kung: hong_kung_bound(n, n, n, capacity)?,
        olivry: olivry_bound(n, capacity)?,
    })
}
