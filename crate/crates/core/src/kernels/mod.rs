//! Flat-buffer kernels.
//!
//! Every loop whose trip count scales with the number of array elements lives
//! in this module. Kernels take read-only input slices and scalars plus
//! caller-allocated output slices of an agreed length; they never allocate.
//! Kernels whose output size depends on the data come in pairs: a `*_count`
//! function that returns the size, and the filling function proper.
//!
//! Failures are reported through [`KernelStatus`], carrying the index of the
//! first offending element. The full contract of each kernel is listed in
//! `docs/kernels.md` at the repository root.

use std::fmt;

mod elementwise;
mod index;
mod list;
pub mod sequential;

#[cfg(feature = "parallel")]
pub mod parallel;

pub use elementwise::{
    decode_le, encode_le, fill, gather, int64_to_float64, map_binary, map_binary_scalar, map_unary,
    BinaryElement, BinaryOp, NumericElement, UnaryOp,
};
pub use index::{
    arange, compare_equal, missing_equal, nonzero, nonzero_count, option_nonnull,
    option_nonnull_count, option_positions, union_local_index, union_positions, union_select,
    union_select_count, validate_index,
    validate_union,
};
pub use list::{
    carry_index, carry_list, carry_list_count, check_list_lengths, jagged_carry, jagged_nonzero,
    jagged_nonzero_count, lengths_equal, list_at, list_lengths, range_per_list,
    range_per_list_count, slice_bounds, tile_arange, validate_offsets,
};

/// Failure reported by a kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelError {
    pub kernel: &'static str,
    pub message: &'static str,
    /// Index of the first offending element.
    pub position: usize,
}

impl KernelError {
    pub(crate) const fn new(kernel: &'static str, message: &'static str, position: usize) -> Self {
        KernelError {
            kernel,
            message,
            position,
        }
    }
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} at position {}",
            self.kernel, self.message, self.position
        )
    }
}

impl std::error::Error for KernelError {}

pub type KernelStatus = Result<(), KernelError>;

pub(crate) fn check_len(
    kernel: &'static str,
    actual: usize,
    expected: usize,
) -> KernelStatus {
    if actual == expected {
        Ok(())
    } else {
        Err(KernelError::new(kernel, "output buffer has the wrong length", 0))
    }
}

/// Inputs shorter than this never go to the thread pool.
#[cfg(feature = "parallel")]
pub const PARALLEL_MIN_LEN: usize = 1 << 15;
