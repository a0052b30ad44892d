//! The actual arithmetic: naive and blocked square matmul.
//!
//! This is not a fast GEMM; it exists to pin down the loop orders the trace
//! generator models and to count flops. The blocked variant visits indices
//! in exactly the guarded six-loop order, so on integer inputs it must agree
//! bitwise with the naive triple loop.

use crate::trace::BlockSpec;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{AddAssign, Mul};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelError {
    DimensionMismatch { left: usize, right: usize },
    InvalidBlock(crate::trace::ConfigError),
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::DimensionMismatch { left, right } => {
                write!(f, "matrix dimensions disagree: {left} vs {right}")
            }
            KernelError::InvalidBlock(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for KernelError {}

/// Dense square matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![T::default(); n * n],
        }
    }

    pub fn from_rows(rows: &[&[T]]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        Matrix { n, data }
    }

    /// Builds from a function of (row, column).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T: Copy + Default + From<u8>> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { T::from(1) } else { T::from(0) })
    }
}

/// Elementary multiplications in a plain matmul: `2n^3 - n^2`
/// (`n^3` products plus `(n-1) * n^2` additions).
pub fn flop_count(n: u64) -> u64 {
    2 * n * n * n - n * n
}

/// `C = A * B` with the naive row-by-column triple loop.
pub fn matmul_naive<T>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, KernelError>
where
    T: Copy + Default + AddAssign + Mul<Output = T>,
{
    if a.n != b.n {
        return Err(KernelError::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    let n = a.n;
    let mut c = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c.data[i * n + j] += a.data[i * n + k] * b.data[k * n + j];
            }
        }
    }
    Ok(c)
}

/// `C = A * B` in the guarded six-loop blocked order; unit strides reproduce
/// the naive order exactly.
pub fn matmul<T>(a: &Matrix<T>, b: &Matrix<T>, block: BlockSpec) -> Result<Matrix<T>, KernelError>
where
    T: Copy + Default + AddAssign + Mul<Output = T>,
{
    matmul_observed(a, b, block, |_, _, _| {})
}

/// Blocked matmul that reports every `(ib, jb, kb)` accumulation it performs,
/// in order; the iteration-order tests compare this against the trace
/// generator's walk.
pub fn matmul_observed<T, F>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    block: BlockSpec,
    mut observe: F,
) -> Result<Matrix<T>, KernelError>
where
    T: Copy + Default + AddAssign + Mul<Output = T>,
    F: FnMut(usize, usize, usize),
{
    if a.n != b.n {
        return Err(KernelError::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    let n = a.n;
    block
        .validate_for(n as u32)
        .map_err(KernelError::InvalidBlock)?;
    let (bi, bj, bk) = (block.bi as usize, block.bj as usize, block.bk as usize);
    let mut c = Matrix::zeros(n);
    let mut i = 0;
    while i < n {
        let mut j = 0;
        while j < n {
            let mut k = 0;
            while k < n {
                for ib in i..n.min(i + bi) {
                    for jb in j..n.min(j + bj) {
                        for kb in k..n.min(k + bk) {
                            c.data[ib * n + jb] += a.data[ib * n + kb] * b.data[kb * n + jb];
                            observe(ib, jb, kb);
                        }
                    }
                }
                k += bk;
            }
            j += bj;
        }
        i += bi;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_by_hand() {
        let a = Matrix::from_rows(&[&[1i64, 2], &[3, 4]]);
        let b = Matrix::from_rows(&[&[5i64, 6], &[7, 8]]);
        let c = matmul(&a, &b, BlockSpec::unit()).unwrap();
        assert_eq!(c, Matrix::from_rows(&[&[19i64, 22], &[43, 50]]));
        assert_eq!(matmul_naive(&a, &b).unwrap(), c);
    }

    #[test]
    fn identity_is_neutral() {
        let a = Matrix::from_fn(5, |i, j| (3 * i + 7 * j + 1) as i64);
        let id = Matrix::identity(5);
        for block in [BlockSpec::unit(), BlockSpec::new(2, 3, 5).unwrap()] {
            assert_eq!(matmul(&a, &id, block).unwrap(), a);
            assert_eq!(matmul(&id, &a, block).unwrap(), a);
        }
    }

    #[test]
    fn blocked_equals_naive_on_integers() {
        let n = 6;
        let a = Matrix::from_fn(n, |i, j| ((i * 31 + j * 17) % 13) as i64 - 6);
        let b = Matrix::from_fn(n, |i, j| ((i * 7 + j * 29) % 11) as i64 - 5);
        let naive = matmul_naive(&a, &b).unwrap();
        for bi in 1..=n as u32 {
            for bj in 1..=n as u32 {
                for bk in 1..=n as u32 {
                    let block = BlockSpec::new(bi, bj, bk).unwrap();
                    assert_eq!(matmul(&a, &b, block).unwrap(), naive, "{block:?}");
                }
            }
        }
    }

    #[test]
    fn iteration_order_matches_trace_generator() {
        use alloc::vec::Vec;
        let n = 7u32;
        for block in [
            BlockSpec::unit(),
            BlockSpec::new(2, 3, 4).unwrap(),
            BlockSpec::new(7, 1, 2).unwrap(),
        ] {
            let a: Matrix<i64> = Matrix::zeros(n as usize);
            let mut kernel_order = Vec::new();
            matmul_observed(&a, &a, block, |ib, jb, kb| {
                kernel_order.push((ib as u32, jb as u32, kb as u32));
            })
            .unwrap();
            let mut trace_order = Vec::new();
            crate::trace::for_each_iteration(n, block, |ib, jb, kb| {
                trace_order.push((ib, jb, kb));
            })
            .unwrap();
            assert_eq!(kernel_order, trace_order, "{block:?}");
        }
    }

    #[test]
    fn blocked_matches_naive_within_tolerance_on_doubles() {
        // blocked order permutes the additions, so doubles only agree to
        // rounding; 1e-12 relative per entry
        let n = 8;
        let a = Matrix::from_fn(n, |i, j| ((i * 53 + j * 19) % 101) as f64 / 50.5 - 1.0);
        let b = Matrix::from_fn(n, |i, j| ((i * 11 + j * 43) % 103) as f64 / 51.5 - 1.0);
        let naive = matmul_naive(&a, &b).unwrap();
        for bi in 1..=n as u32 {
            for bj in 1..=n as u32 {
                for bk in 1..=n as u32 {
                    let blocked = matmul(&a, &b, BlockSpec::new(bi, bj, bk).unwrap()).unwrap();
                    for (x, y) in blocked.as_slice().iter().zip(naive.as_slice()) {
                        let tol = 1e-12 * y.abs().max(1.0);
                        assert!((x - y).abs() <= tol, "({bi},{bj},{bk}): {x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn flop_counts() {
        assert_eq!(flop_count(1), 1);
        assert_eq!(flop_count(2), 12);
        assert_eq!(flop_count(100), 1_990_000);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a: Matrix<i64> = Matrix::zeros(3);
        let b: Matrix<i64> = Matrix::zeros(4);
        assert!(matches!(
            matmul(&a, &b, BlockSpec::unit()),
            Err(KernelError::DimensionMismatch { left: 3, right: 4 })
        ));
    }
}
