//! Thread-pool implementations of the elementwise kernels.
//!
//! Work is split into fixed-size chunks; each chunk runs the sequential
//! kernel, so outputs are bitwise identical to [`super::sequential`]. On
//! failure the reported position is the smallest failing position over all
//! chunks, matching the sequential scan.

use rayon::prelude::*;

use super::elementwise::{BinaryElement, BinaryOp, NumericElement, UnaryOp};
use super::{check_len, sequential, KernelError, KernelStatus};
use crate::buffer::Element;

const CHUNK: usize = 1 << 13;

fn first_error<I>(errors: I) -> KernelStatus
where
    I: ParallelIterator<Item = KernelError>,
{
    match errors.min_by_key(|e| e.position) {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

pub fn gather<T: Element>(values: &[T], indices: &[i64], out: &mut [T]) -> KernelStatus {
    check_len("gather", out.len(), indices.len())?;
    first_error(
        out.par_chunks_mut(CHUNK)
            .zip(indices.par_chunks(CHUNK))
            .enumerate()
            .filter_map(|(c, (out, ix))| {
                sequential::gather(values, ix, out)
                    .err()
                    .map(|e| KernelError { position: e.position + c * CHUNK, ..e })
            }),
    )
}

pub fn int64_to_float64(src: &[i64], out: &mut [f64]) -> KernelStatus {
    check_len("int64_to_float64", out.len(), src.len())?;
    out.par_chunks_mut(CHUNK)
        .zip(src.par_chunks(CHUNK))
        .for_each(|(out, src)| {
            for (slot, &x) in out.iter_mut().zip(src) {
                *slot = x as f64;
            }
        });
    Ok(())
}

pub fn map_unary<T: NumericElement>(op: UnaryOp, src: &[T], out: &mut [f64]) -> KernelStatus {
    check_len("map_unary", out.len(), src.len())?;
    out.par_chunks_mut(CHUNK)
        .zip(src.par_chunks(CHUNK))
        .for_each(|(out, src)| {
            for (slot, &x) in out.iter_mut().zip(src) {
                *slot = op.apply(x.to_f64());
            }
        });
    Ok(())
}

pub fn map_binary<T: BinaryElement>(
    op: BinaryOp,
    left: &[T],
    right: &[T],
    out: &mut [T],
) -> KernelStatus {
    check_len("map_binary", right.len(), left.len())?;
    check_len("map_binary", out.len(), left.len())?;
    out.par_chunks_mut(CHUNK)
        .zip(left.par_chunks(CHUNK).zip(right.par_chunks(CHUNK)))
        .for_each(|(out, (a, b))| {
            for ((slot, &a), &b) in out.iter_mut().zip(a).zip(b) {
                *slot = T::combine(op, a, b);
            }
        });
    Ok(())
}

pub fn map_binary_scalar<T: BinaryElement>(
    op: BinaryOp,
    left: &[T],
    scalar: T,
    out: &mut [T],
) -> KernelStatus {
    check_len("map_binary_scalar", out.len(), left.len())?;
    out.par_chunks_mut(CHUNK)
        .zip(left.par_chunks(CHUNK))
        .for_each(|(out, a)| {
            for (slot, &a) in out.iter_mut().zip(a) {
                *slot = T::combine(op, a, scalar);
            }
        });
    Ok(())
}

pub fn fill<T: Element>(value: T, out: &mut [T]) -> KernelStatus {
    out.par_chunks_mut(CHUNK).for_each(|out| out.fill(value));
    Ok(())
}
