//! Single-threaded implementations of the elementwise kernels. Always
//! compiled; the dispatching wrappers fall back to these for short inputs or
//! when the `parallel` feature is off.

use super::elementwise::{BinaryElement, BinaryOp, NumericElement, UnaryOp};
use super::{check_len, KernelError, KernelStatus};
use crate::buffer::Element;

pub fn gather<T: Element>(values: &[T], indices: &[i64], out: &mut [T]) -> KernelStatus {
    const NAME: &str = "gather";
    check_len(NAME, out.len(), indices.len())?;
    let len = values.len() as i64;
    for (j, (&ix, slot)) in indices.iter().zip(out.iter_mut()).enumerate() {
        if ix < 0 || ix >= len {
            return Err(KernelError::new(NAME, "index out of range", j));
        }
        *slot = values[ix as usize];
    }
    Ok(())
}

pub fn int64_to_float64(src: &[i64], out: &mut [f64]) -> KernelStatus {
    check_len("int64_to_float64", out.len(), src.len())?;
    for (slot, &x) in out.iter_mut().zip(src) {
        *slot = x as f64;
    }
    Ok(())
}

pub fn map_unary<T: NumericElement>(op: UnaryOp, src: &[T], out: &mut [f64]) -> KernelStatus {
    check_len("map_unary", out.len(), src.len())?;
    for (slot, &x) in out.iter_mut().zip(src) {
        *slot = op.apply(x.to_f64());
    }
    Ok(())
}

pub fn map_binary<T: BinaryElement>(
    op: BinaryOp,
    left: &[T],
    right: &[T],
    out: &mut [T],
) -> KernelStatus {
    const NAME: &str = "map_binary";
    check_len(NAME, right.len(), left.len())?;
    check_len(NAME, out.len(), left.len())?;
    for ((slot, &a), &b) in out.iter_mut().zip(left).zip(right) {
        *slot = T::combine(op, a, b);
    }
    Ok(())
}

pub fn map_binary_scalar<T: BinaryElement>(
    op: BinaryOp,
    left: &[T],
    scalar: T,
    out: &mut [T],
) -> KernelStatus {
    check_len("map_binary_scalar", out.len(), left.len())?;
    for (slot, &a) in out.iter_mut().zip(left) {
        *slot = T::combine(op, a, scalar);
    }
    Ok(())
}

pub fn fill<T: Element>(value: T, out: &mut [T]) -> KernelStatus {
    out.fill(value);
    Ok(())
}
