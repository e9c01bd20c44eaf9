//! Elementwise kernels. Each dispatches to the thread pool for long inputs
//! when the `parallel` feature is enabled, and to [`super::sequential`]
//! otherwise; both paths produce identical output.

use std::str::FromStr;

use super::{check_len, sequential, KernelError, KernelStatus};
use crate::buffer::Element;

/// Element types that widen exactly (or by rounding, for very large `i64`)
/// to `f64`.
pub trait NumericElement: Element {
    fn to_f64(self) -> f64;
}

macro_rules! impl_numeric {
    ($($t:ty),*) => {$(
        impl NumericElement for $t {
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    )*};
}

impl_numeric!(i8, u8, i64, f64);

/// Unary operations understood by [`map_unary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Sin,
    Negate,
    Abs,
    /// Widening to `f64` with no other change.
    Identity,
}

impl UnaryOp {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            UnaryOp::Sin => x.sin(),
            UnaryOp::Negate => -x,
            UnaryOp::Abs => x.abs(),
            UnaryOp::Identity => x,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Sin => "sin",
            UnaryOp::Negate => "negate",
            UnaryOp::Abs => "abs",
            UnaryOp::Identity => "identity",
        }
    }
}

impl FromStr for UnaryOp {
    type Err = KernelError;

    fn from_str(name: &str) -> Result<Self, Self::Err> {
        Ok(match name {
            "sin" => UnaryOp::Sin,
            "negate" => UnaryOp::Negate,
            "abs" => UnaryOp::Abs,
            "identity" => UnaryOp::Identity,
            _ => return Err(KernelError::new("map_unary", "unknown op name", 0)),
        })
    }
}

/// Binary operations understood by [`map_binary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Multiply,
}

impl BinaryOp {
    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "add",
            BinaryOp::Multiply => "multiply",
        }
    }
}

impl FromStr for BinaryOp {
    type Err = KernelError;

    fn from_str(name: &str) -> Result<Self, Self::Err> {
        match name {
            "add" => Ok(BinaryOp::Add),
            "multiply" => Ok(BinaryOp::Multiply),
            _ => Err(KernelError::new("map_binary", "unknown op name", 0)),
        }
    }
}

/// Element types closed under [`BinaryOp`]. Integer arithmetic wraps.
pub trait BinaryElement: Element {
    fn combine(op: BinaryOp, a: Self, b: Self) -> Self;
}

impl BinaryElement for i64 {
    #[inline]
    fn combine(op: BinaryOp, a: i64, b: i64) -> i64 {
        match op {
            BinaryOp::Add => a.wrapping_add(b),
            BinaryOp::Multiply => a.wrapping_mul(b),
        }
    }
}

impl BinaryElement for f64 {
    #[inline]
    fn combine(op: BinaryOp, a: f64, b: f64) -> f64 {
        match op {
            BinaryOp::Add => a + b,
            BinaryOp::Multiply => a * b,
        }
    }
}

#[cfg(feature = "parallel")]
#[inline]
fn use_pool(len: usize) -> bool {
    len >= super::PARALLEL_MIN_LEN
}

/// `out[j] = values[indices[j]]`.
pub fn gather<T: Element>(values: &[T], indices: &[i64], out: &mut [T]) -> KernelStatus {
    #[cfg(feature = "parallel")]
    if use_pool(indices.len()) {
        return super::parallel::gather(values, indices, out);
    }
    sequential::gather(values, indices, out)
}

/// Exact widening of each element (rounding to nearest beyond 2^53).
pub fn int64_to_float64(src: &[i64], out: &mut [f64]) -> KernelStatus {
    #[cfg(feature = "parallel")]
    if use_pool(src.len()) {
        return super::parallel::int64_to_float64(src, out);
    }
    sequential::int64_to_float64(src, out)
}

/// `out[i] = op(src[i])`, widening integer inputs first.
pub fn map_unary<T: NumericElement>(op: UnaryOp, src: &[T], out: &mut [f64]) -> KernelStatus {
    #[cfg(feature = "parallel")]
    if use_pool(src.len()) {
        return super::parallel::map_unary(op, src, out);
    }
    sequential::map_unary(op, src, out)
}

/// `out[i] = left[i] op right[i]`.
pub fn map_binary<T: BinaryElement>(
    op: BinaryOp,
    left: &[T],
    right: &[T],
    out: &mut [T],
) -> KernelStatus {
    #[cfg(feature = "parallel")]
    if use_pool(left.len()) {
        return super::parallel::map_binary(op, left, right, out);
    }
    sequential::map_binary(op, left, right, out)
}

/// `out[i] = left[i] op scalar`.
pub fn map_binary_scalar<T: BinaryElement>(
    op: BinaryOp,
    left: &[T],
    scalar: T,
    out: &mut [T],
) -> KernelStatus {
    #[cfg(feature = "parallel")]
    if use_pool(left.len()) {
        return super::parallel::map_binary_scalar(op, left, scalar, out);
    }
    sequential::map_binary_scalar(op, left, scalar, out)
}

/// `out[i] = value`.
pub fn fill<T: Element>(value: T, out: &mut [T]) -> KernelStatus {
    #[cfg(feature = "parallel")]
    if use_pool(out.len()) {
        return super::parallel::fill(value, out);
    }
    sequential::fill(value, out)
}

/// Writes the little-endian image of `src` into `out`.
pub fn encode_le<T: Element>(src: &[T], out: &mut [u8]) -> KernelStatus {
    check_len("encode_le", out.len(), src.len() * T::WIDTH)?;
    for (value, chunk) in src.iter().zip(out.chunks_exact_mut(T::WIDTH)) {
        value.write_le(chunk);
    }
    Ok(())
}

/// Reads little-endian elements; fails at the first invalid element image.
pub fn decode_le<T: Element>(bytes: &[u8], out: &mut [T]) -> KernelStatus {
    const NAME: &str = "decode_le";
    check_len(NAME, bytes.len(), out.len() * T::WIDTH)?;
    for (i, (slot, chunk)) in out.iter_mut().zip(bytes.chunks_exact(T::WIDTH)).enumerate() {
        match T::read_le(chunk) {
            Some(v) => *slot = v,
            None => return Err(KernelError::new(NAME, "invalid element image", i)),
        }
    }
    Ok(())
}
