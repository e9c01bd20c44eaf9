//! Kernels over index, tag, and mask buffers.

use super::{check_len, KernelError, KernelStatus};

/// Number of `true` entries.
pub fn nonzero_count(mask: &[bool]) -> usize {
    mask.iter().filter(|&&b| b).count()
}

/// Positions of the `true` entries in ascending order.
pub fn nonzero(mask: &[bool], indices: &mut [i64]) -> KernelStatus {
    const NAME: &str = "nonzero";
    let mut k = 0usize;
    for (i, &b) in mask.iter().enumerate() {
        if b {
            if k >= indices.len() {
                return Err(KernelError::new(NAME, "output buffer has the wrong length", i));
            }
            indices[k] = i as i64;
            k += 1;
        }
    }
    check_len(NAME, indices.len(), k)
}

/// `out[i] = i`.
pub fn arange(out: &mut [i64]) -> KernelStatus {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = i as i64;
    }
    Ok(())
}

/// Checks `0 <= index[i] < content_len`, also admitting `-1` when
/// `allow_missing` is set.
pub fn validate_index(index: &[i64], content_len: usize, allow_missing: bool) -> KernelStatus {
    const NAME: &str = "validate_index";
    let limit = content_len as i64;
    for (i, &x) in index.iter().enumerate() {
        let ok = (0..limit).contains(&x) || (allow_missing && x == -1);
        if !ok {
            return Err(KernelError::new(NAME, "index out of range", i));
        }
    }
    Ok(())
}

/// Checks union tags against the number of contents and each index against
/// the length of the content its tag selects.
pub fn validate_union(tags: &[i8], index: &[i64], content_lengths: &[i64]) -> KernelStatus {
    const NAME: &str = "validate_union";
    if tags.len() != index.len() {
        return Err(KernelError::new(NAME, "tags and index lengths differ", 0));
    }
    let arity = content_lengths.len() as i64;
    for i in 0..tags.len() {
        let tag = tags[i] as i64;
        if tag < 0 || tag >= arity {
            return Err(KernelError::new(NAME, "tag out of range", i));
        }
        if index[i] < 0 || index[i] >= content_lengths[tag as usize] {
            return Err(KernelError::new(NAME, "index out of range", i));
        }
    }
    Ok(())
}

/// Number of non-missing entries of an option index.
pub fn option_nonnull_count(index: &[i64]) -> usize {
    index.iter().filter(|&&x| x >= 0).count()
}

/// Splits an option index into the content positions of present entries
/// (`nextcarry`) and a compacted option index (`outindex`: rank among
/// present entries, or -1).
pub fn option_nonnull(index: &[i64], nextcarry: &mut [i64], outindex: &mut [i64]) -> KernelStatus {
    const NAME: &str = "option_nonnull";
    check_len(NAME, outindex.len(), index.len())?;
    let mut k = 0usize;
    for (i, &x) in index.iter().enumerate() {
        if x >= 0 {
            if k >= nextcarry.len() {
                return Err(KernelError::new(NAME, "output buffer has the wrong length", i));
            }
            nextcarry[k] = x;
            outindex[i] = k as i64;
            k += 1;
        } else {
            outindex[i] = -1;
        }
    }
    check_len(NAME, nextcarry.len(), k)
}

/// Positions of the present (non-negative) entries of an option index.
/// Counting pass: [`option_nonnull_count`].
pub fn option_positions(index: &[i64], positions: &mut [i64]) -> KernelStatus {
    const NAME: &str = "option_positions";
    let mut k = 0usize;
    for (i, &x) in index.iter().enumerate() {
        if x >= 0 {
            if k >= positions.len() {
                return Err(KernelError::new(NAME, "output buffer has the wrong length", i));
            }
            positions[k] = i as i64;
            k += 1;
        }
    }
    check_len(NAME, positions.len(), k)
}

/// Number of union entries tagged `which`.
pub fn union_select_count(tags: &[i8], which: i8) -> usize {
    tags.iter().filter(|&&t| t == which).count()
}

/// Content positions (from `index`) of the entries tagged `which`, in order.
pub fn union_select(tags: &[i8], index: &[i64], which: i8, nextcarry: &mut [i64]) -> KernelStatus {
    const NAME: &str = "union_select";
    if tags.len() != index.len() {
        return Err(KernelError::new(NAME, "tags and index lengths differ", 0));
    }
    let mut k = 0usize;
    for i in 0..tags.len() {
        if tags[i] == which {
            if k >= nextcarry.len() {
                return Err(KernelError::new(NAME, "output buffer has the wrong length", i));
            }
            nextcarry[k] = index[i];
            k += 1;
        }
    }
    check_len(NAME, nextcarry.len(), k)
}

/// Positions of the entries tagged `which`. Counting pass:
/// [`union_select_count`].
pub fn union_positions(tags: &[i8], which: i8, positions: &mut [i64]) -> KernelStatus {
    const NAME: &str = "union_positions";
    let mut k = 0usize;
    for (i, &t) in tags.iter().enumerate() {
        if t == which {
            if k >= positions.len() {
                return Err(KernelError::new(NAME, "output buffer has the wrong length", i));
            }
            positions[k] = i as i64;
            k += 1;
        }
    }
    check_len(NAME, positions.len(), k)
}

/// `local[i]` = number of earlier entries carrying the same tag as entry `i`.
pub fn union_local_index(tags: &[i8], local: &mut [i64]) -> KernelStatus {
    const NAME: &str = "union_local_index";
    check_len(NAME, local.len(), tags.len())?;
    let mut counters = [0i64; 128];
    for (i, &t) in tags.iter().enumerate() {
        if t < 0 {
            return Err(KernelError::new(NAME, "tag out of range", i));
        }
        local[i] = counters[t as usize];
        counters[t as usize] += 1;
    }
    Ok(())
}

/// Fails at the first position where the two buffers differ.
pub fn compare_equal<T: PartialEq>(left: &[T], right: &[T]) -> KernelStatus {
    const NAME: &str = "compare_equal";
    if left.len() != right.len() {
        return Err(KernelError::new(NAME, "lengths differ", left.len().min(right.len())));
    }
    match left.iter().zip(right).position(|(a, b)| a != b) {
        Some(i) => Err(KernelError::new(NAME, "values differ", i)),
        None => Ok(()),
    }
}

/// Fails at the first position where exactly one of two option indexes is
/// missing.
pub fn missing_equal(left: &[i64], right: &[i64]) -> KernelStatus {
    const NAME: &str = "missing_equal";
    if left.len() != right.len() {
        return Err(KernelError::new(NAME, "lengths differ", left.len().min(right.len())));
    }
    match left.iter().zip(right).position(|(a, b)| (*a < 0) != (*b < 0)) {
        Some(i) => Err(KernelError::new(NAME, "missing values differ", i)),
        None => Ok(()),
    }
}
