//! Kernels over list offsets: lengths, validation, and the carry (gather of
//! sublists) family used by slicing.

use super::{check_len, KernelError, KernelStatus};

fn list_count(kernel: &'static str, offsets: &[i64]) -> Result<usize, KernelError> {
    if offsets.is_empty() {
        Err(KernelError::new(kernel, "offsets must have at least one entry", 0))
    } else {
        Ok(offsets.len() - 1)
    }
}

#[inline]
fn normalize_at(at: i64, len: i64) -> Option<i64> {
    let idx = if at < 0 { at + len } else { at };
    (0..len).contains(&idx).then_some(idx)
}

/// `lengths[i] = offsets[i + 1] - offsets[i]`.
pub fn list_lengths(offsets: &[i64], lengths: &mut [i64]) -> KernelStatus {
    const NAME: &str = "list_lengths";
    let n = list_count(NAME, offsets)?;
    check_len(NAME, lengths.len(), n)?;
    for i in 0..n {
        let len = offsets[i + 1] - offsets[i];
        if len < 0 {
            return Err(KernelError::new(NAME, "offsets not non-decreasing", i));
        }
        lengths[i] = len;
    }
    Ok(())
}

/// Checks the list-offsets invariants against a content of `content_len`.
pub fn validate_offsets(offsets: &[i64], content_len: usize) -> KernelStatus {
    const NAME: &str = "validate_offsets";
    let n = list_count(NAME, offsets)?;
    if offsets[0] != 0 {
        return Err(KernelError::new(NAME, "offsets[0] is not 0", 0));
    }
    for i in 0..n {
        if offsets[i + 1] < offsets[i] {
            return Err(KernelError::new(NAME, "offsets not non-decreasing", i));
        }
    }
    if offsets[n] > content_len as i64 {
        return Err(KernelError::new(NAME, "offsets exceed content length", n));
    }
    Ok(())
}

/// Total number of content elements in the sublists selected by `carry`.
pub fn carry_list_count(offsets: &[i64], carry: &[i64]) -> Result<usize, KernelError> {
    const NAME: &str = "carry_list";
    let n = list_count(NAME, offsets)? as i64;
    let mut total = 0i64;
    for (j, &c) in carry.iter().enumerate() {
        if c < 0 || c >= n {
            return Err(KernelError::new(NAME, "carry index out of range", j));
        }
        let len = offsets[c as usize + 1] - offsets[c as usize];
        if len < 0 {
            return Err(KernelError::new(NAME, "offsets not non-decreasing", j));
        }
        total += len;
    }
    Ok(total as usize)
}

/// Gathers the sublists `carry[j]` into compacted `nextoffsets`, and lists in
/// `nextcarry` the content index of every element they contain.
pub fn carry_list(
    offsets: &[i64],
    carry: &[i64],
    nextoffsets: &mut [i64],
    nextcarry: &mut [i64],
) -> KernelStatus {
    const NAME: &str = "carry_list";
    let n = list_count(NAME, offsets)? as i64;
    check_len(NAME, nextoffsets.len(), carry.len() + 1)?;
    nextoffsets[0] = 0;
    let mut k = 0usize;
    for (j, &c) in carry.iter().enumerate() {
        if c < 0 || c >= n {
            return Err(KernelError::new(NAME, "carry index out of range", j));
        }
        let start = offsets[c as usize];
        let stop = offsets[c as usize + 1];
        if stop < start {
            return Err(KernelError::new(NAME, "offsets not non-decreasing", j));
        }
        if k + (stop - start) as usize > nextcarry.len() {
            return Err(KernelError::new(NAME, "output buffer has the wrong length", j));
        }
        for x in start..stop {
            nextcarry[k] = x;
            k += 1;
        }
        nextoffsets[j + 1] = k as i64;
    }
    check_len(NAME, nextcarry.len(), k)
}

/// Normalizes a `start:stop:step` range against a sequence of length `len`,
/// returning the first selected position and the number of positions.
///
/// Missing or out-of-bounds bounds are clamped. `step` must be non-zero.
pub fn slice_bounds(len: i64, start: Option<i64>, stop: Option<i64>, step: i64) -> (i64, i64) {
    debug_assert!(step != 0);
    if step > 0 {
        let clamp = |v: i64| {
            if v < 0 {
                (v + len).max(0)
            } else {
                v.min(len)
            }
        };
        let first = start.map_or(0, clamp);
        let last = stop.map_or(len, clamp);
        let count = if last > first {
            (last - first + step - 1) / step
        } else {
            0
        };
        (first, count)
    } else {
        let clamp = |v: i64| {
            if v < 0 {
                (v + len).max(-1)
            } else {
                v.min(len - 1)
            }
        };
        let first = start.map_or(len - 1, clamp);
        let last = stop.map_or(-1, clamp);
        let count = if first > last {
            (first - last + (-step) - 1) / (-step)
        } else {
            0
        };
        (first, count)
    }
}

/// Counting pass of [`range_per_list`].
pub fn range_per_list_count(
    offsets: &[i64],
    start: Option<i64>,
    stop: Option<i64>,
    step: i64,
) -> Result<usize, KernelError> {
    const NAME: &str = "range_per_list";
    let n = list_count(NAME, offsets)?;
    if step == 0 {
        return Err(KernelError::new(NAME, "step must be non-zero", 0));
    }
    let mut total = 0i64;
    for i in 0..n {
        let len = offsets[i + 1] - offsets[i];
        if len < 0 {
            return Err(KernelError::new(NAME, "offsets not non-decreasing", i));
        }
        total += slice_bounds(len, start, stop, step).1;
    }
    Ok(total as usize)
}

/// Applies `start:stop:step` inside every sublist.
pub fn range_per_list(
    offsets: &[i64],
    start: Option<i64>,
    stop: Option<i64>,
    step: i64,
    nextoffsets: &mut [i64],
    nextcarry: &mut [i64],
) -> KernelStatus {
    const NAME: &str = "range_per_list";
    let n = list_count(NAME, offsets)?;
    if step == 0 {
        return Err(KernelError::new(NAME, "step must be non-zero", 0));
    }
    check_len(NAME, nextoffsets.len(), n + 1)?;
    nextoffsets[0] = 0;
    let mut k = 0usize;
    for i in 0..n {
        let len = offsets[i + 1] - offsets[i];
        if len < 0 {
            return Err(KernelError::new(NAME, "offsets not non-decreasing", i));
        }
        let (first, count) = slice_bounds(len, start, stop, step);
        if k + count as usize > nextcarry.len() {
            return Err(KernelError::new(NAME, "output buffer has the wrong length", i));
        }
        for c in 0..count {
            nextcarry[k] = offsets[i] + first + c * step;
            k += 1;
        }
        nextoffsets[i + 1] = k as i64;
    }
    check_len(NAME, nextcarry.len(), k)
}

/// Picks element `at` (negative counts from the end) of every sublist.
pub fn list_at(offsets: &[i64], at: i64, carry: &mut [i64]) -> KernelStatus {
    const NAME: &str = "list_at";
    let n = list_count(NAME, offsets)?;
    check_len(NAME, carry.len(), n)?;
    for i in 0..n {
        let len = offsets[i + 1] - offsets[i];
        match normalize_at(at, len) {
            Some(idx) => carry[i] = offsets[i] + idx,
            None => return Err(KernelError::new(NAME, "index out of range", i)),
        }
    }
    Ok(())
}

/// Applies the same index list inside every sublist. The error position is
/// the flat output position `i * index.len() + j`.
pub fn carry_index(
    offsets: &[i64],
    index: &[i64],
    nextoffsets: &mut [i64],
    nextcarry: &mut [i64],
) -> KernelStatus {
    const NAME: &str = "carry_index";
    let n = list_count(NAME, offsets)?;
    let m = index.len();
    check_len(NAME, nextoffsets.len(), n + 1)?;
    check_len(NAME, nextcarry.len(), n * m)?;
    nextoffsets[0] = 0;
    for i in 0..n {
        let len = offsets[i + 1] - offsets[i];
        for (j, &at) in index.iter().enumerate() {
            match normalize_at(at, len) {
                Some(idx) => nextcarry[i * m + j] = offsets[i] + idx,
                None => return Err(KernelError::new(NAME, "index out of range", i * m + j)),
            }
        }
        nextoffsets[i + 1] = ((i + 1) * m) as i64;
    }
    Ok(())
}

/// Fails at the first sublist whose length is not `expected`.
pub fn check_list_lengths(offsets: &[i64], expected: i64) -> KernelStatus {
    const NAME: &str = "check_list_lengths";
    let n = list_count(NAME, offsets)?;
    for i in 0..n {
        if offsets[i + 1] - offsets[i] != expected {
            return Err(KernelError::new(NAME, "list length mismatch", i));
        }
    }
    Ok(())
}

/// Fails at the first list whose length differs between the two offsets.
pub fn lengths_equal(left: &[i64], right: &[i64]) -> KernelStatus {
    const NAME: &str = "lengths_equal";
    let n = list_count(NAME, left)?;
    if right.len() != left.len() {
        return Err(KernelError::new(NAME, "different number of lists", 0));
    }
    for i in 0..n {
        if left[i + 1] - left[i] != right[i + 1] - right[i] {
            return Err(KernelError::new(NAME, "list lengths differ", i));
        }
    }
    Ok(())
}

/// Applies a per-sublist index list: sublist `i` of `offsets` is indexed by
/// `jagged_index[jagged_offsets[i]..jagged_offsets[i + 1]]`. The error
/// position is the offending position within `jagged_index`.
pub fn jagged_carry(
    offsets: &[i64],
    jagged_offsets: &[i64],
    jagged_index: &[i64],
    nextcarry: &mut [i64],
) -> KernelStatus {
    const NAME: &str = "jagged_carry";
    let n = list_count(NAME, offsets)?;
    if jagged_offsets.len() != offsets.len() {
        return Err(KernelError::new(NAME, "different number of lists", 0));
    }
    check_len(
        NAME,
        nextcarry.len(),
        (jagged_offsets[n] - jagged_offsets[0]).max(0) as usize,
    )?;
    let mut k = 0usize;
    for i in 0..n {
        let len = offsets[i + 1] - offsets[i];
        for j in jagged_offsets[i]..jagged_offsets[i + 1] {
            let j = j as usize;
            match normalize_at(jagged_index[j], len) {
                Some(idx) => nextcarry[k] = offsets[i] + idx,
                None => return Err(KernelError::new(NAME, "index out of range", j)),
            }
            k += 1;
        }
    }
    Ok(())
}

/// Counting pass of [`jagged_nonzero`].
pub fn jagged_nonzero_count(jagged_offsets: &[i64], mask: &[bool]) -> Result<usize, KernelError> {
    const NAME: &str = "jagged_nonzero";
    let n = list_count(NAME, jagged_offsets)?;
    let (start, stop) = (jagged_offsets[0] as usize, jagged_offsets[n] as usize);
    if stop > mask.len() || start > stop {
        return Err(KernelError::new(NAME, "offsets exceed mask length", n));
    }
    Ok(mask[start..stop].iter().filter(|&&b| b).count())
}

/// Converts per-sublist masks into per-sublist local index lists.
pub fn jagged_nonzero(
    jagged_offsets: &[i64],
    mask: &[bool],
    nextoffsets: &mut [i64],
    local_index: &mut [i64],
) -> KernelStatus {
    const NAME: &str = "jagged_nonzero";
    let n = list_count(NAME, jagged_offsets)?;
    check_len(NAME, nextoffsets.len(), n + 1)?;
    nextoffsets[0] = 0;
    let mut k = 0usize;
    for i in 0..n {
        let start = jagged_offsets[i];
        for j in start..jagged_offsets[i + 1] {
            if mask[j as usize] {
                if k >= local_index.len() {
                    return Err(KernelError::new(NAME, "output buffer has the wrong length", i));
                }
                local_index[k] = j - start;
                k += 1;
            }
        }
        nextoffsets[i + 1] = k as i64;
    }
    check_len(NAME, local_index.len(), k)
}

/// `out[i] = i % period`.
pub fn tile_arange(period: i64, out: &mut [i64]) -> KernelStatus {
    const NAME: &str = "tile_arange";
    if out.is_empty() {
        return Ok(());
    }
    if period <= 0 {
        return Err(KernelError::new(NAME, "period must be positive", 0));
    }
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = i as i64 % period;
    }
    Ok(())
}
