//! Composite selection (`getitem`) with mixed selector kinds.
//!
//! Selectors are consumed left to right, one dimension each. Field selectors
//! do not consume a dimension and commute with all others, so they are
//! applied first. The rest are applied by [`select`], which takes a node whose
//! entries are lists and applies the head selector inside every entry at
//! once, keeping the node's length. The top-level array is handled by
//! wrapping it as the single entry of a one-element list.

use thiserror::Error;

use crate::buffer::Buffer;
use crate::kernels::{self, KernelError};
use crate::layout::{Layout, LayoutError};
use crate::value::{write_json_string, Value};

/// One element of a selection tuple.
#[derive(Clone, Debug, PartialEq)]
pub enum Selector {
    /// Projects a record field (does not consume a dimension).
    Field(String),
    /// One element; negative values count from the end.
    At(i64),
    /// `start:stop:step` with Python slice semantics; `step` defaults to 1.
    Range {
        start: Option<i64>,
        stop: Option<i64>,
        step: Option<i64>,
    },
    FlatIndex(Vec<i64>),
    FlatMask(Vec<bool>),
    /// Nested integer lists, one per element of the current dimension.
    JaggedIndex(Value),
    /// Nested boolean lists, one per element of the current dimension.
    JaggedMask(Value),
}

impl Selector {
    pub fn field(name: &str) -> Selector {
        Selector::Field(name.to_owned())
    }

    pub fn range(start: Option<i64>, stop: Option<i64>, step: Option<i64>) -> Selector {
        Selector::Range { start, stop, step }
    }

    /// The full range `:`.
    pub fn all() -> Selector {
        Selector::range(None, None, None)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SliceError {
    #[error("index {index} out of range for length {length} at {path}")]
    IndexOutOfRange { index: i64, length: i64, path: String },
    #[error("field {name:?} not found; available fields: {available:?}")]
    FieldNotFound { name: String, available: Vec<String> },
    #[error("mask of length {got} does not match list length {expected} at {path}")]
    MaskLengthMismatch { expected: i64, got: i64, path: String },
    #[error(
        "jagged selector does not match the array at {path}: list {position} has length {expected}, selector has {got}"
    )]
    JaggedStructureMismatch {
        path: String,
        position: usize,
        expected: i64,
        got: i64,
    },
    #[error("too many selectors: {remaining} left at {path}, which has no further dimension")]
    TooManySelectors { path: String, remaining: usize },
    #[error("at most one flat index or mask selector is allowed per selection")]
    MultipleArraySelectors,
    #[error("invalid selector: {0}")]
    InvalidSelector(String),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("internal kernel failure: {0}")]
    Kernel(#[from] KernelError),
}

type Result<T> = std::result::Result<T, SliceError>;

/// Result of a selection: an array, or a single value when every dimension
/// was consumed by `At` selectors.
#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Array(Layout),
    Scalar(Value),
}

impl Item {
    pub fn to_value(&self) -> std::result::Result<Value, LayoutError> {
        match self {
            Item::Array(layout) => layout.to_values(),
            Item::Scalar(v) => Ok(v.clone()),
        }
    }

    pub fn to_json(&self) -> std::result::Result<String, LayoutError> {
        Ok(self.to_value()?.to_json())
    }

    pub fn as_array(&self) -> Option<&Layout> {
        match self {
            Item::Array(layout) => Some(layout),
            Item::Scalar(_) => None,
        }
    }
}

/// Jagged selector converted to a layout of nested lists.
#[derive(Clone)]
struct Jagged {
    layout: Layout,
    mask: bool,
}

enum Step {
    At(i64),
    Range(Option<i64>, Option<i64>, i64),
    Index(Vec<i64>),
    Mask(Vec<bool>),
    Jagged(Jagged),
}

fn jagged(value: &Value, mask: bool) -> Result<Jagged> {
    let what = if mask { "jagged mask" } else { "jagged index" };
    let layout = crate::builder::from_values(value)
        .map_err(|e| SliceError::InvalidSelector(format!("{what}: {e}")))?;
    // Every level must be a plain list, ending in the right leaf kind.
    let mut node = &layout;
    let mut depth = 0;
    loop {
        match node {
            Layout::ListOffset(l) if !l.is_string() => {
                node = l.content();
                depth += 1;
            }
            Layout::Empty(_) => break,
            Layout::Numeric(n) => {
                let expected = if mask {
                    crate::buffer::DType::Bool
                } else {
                    crate::buffer::DType::Int64
                };
                if n.data().dtype() != expected {
                    return Err(SliceError::InvalidSelector(format!(
                        "{what} must contain only {}",
                        if mask { "booleans" } else { "integers" }
                    )));
                }
                break;
            }
            _ => {
                return Err(SliceError::InvalidSelector(format!(
                    "{what} must be nested lists of {}",
                    if mask { "booleans" } else { "integers" }
                )))
            }
        }
    }
    if depth < 1 && layout.length() > 0 {
        return Err(SliceError::InvalidSelector(format!("{what} must be a list of lists")));
    }
    Ok(Jagged { layout, mask })
}

/// Applies `selectors` to `layout`.
pub fn getitem(layout: &Layout, selectors: &[Selector]) -> Result<Item> {
    let mut projected = layout.clone();
    let mut steps = Vec::with_capacity(selectors.len());
    let mut flat_arrays = 0;
    for selector in selectors {
        match selector {
            Selector::Field(name) => {
                projected = projected.project_field(name).map_err(|e| match e {
                    LayoutError::FieldNotFound { name, available } => {
                        SliceError::FieldNotFound { name, available }
                    }
                    LayoutError::NoRecord => SliceError::FieldNotFound {
                        name: name.clone(),
                        available: Vec::new(),
                    },
                    other => SliceError::Layout(other),
                })?;
            }
            Selector::At(i) => steps.push(Step::At(*i)),
            Selector::Range { start, stop, step } => {
                let step = step.unwrap_or(1);
                if step == 0 {
                    return Err(SliceError::InvalidSelector("range step must be non-zero".into()));
                }
                steps.push(Step::Range(*start, *stop, step));
            }
            Selector::FlatIndex(index) => {
                flat_arrays += 1;
                steps.push(Step::Index(index.clone()));
            }
            Selector::FlatMask(mask) => {
                flat_arrays += 1;
                steps.push(Step::Mask(mask.clone()));
            }
            Selector::JaggedIndex(v) => steps.push(Step::Jagged(jagged(v, false)?)),
            Selector::JaggedMask(v) => steps.push(Step::Jagged(jagged(v, true)?)),
        }
    }
    if flat_arrays > 1 {
        return Err(SliceError::MultipleArraySelectors);
    }
    if steps.is_empty() {
        return Ok(Item::Array(projected));
    }

    let n = projected.length() as i64;
    let wrapper_offsets = Buffer::from_vec(vec![0, n]);
    let result = select_list(&wrapper_offsets, &projected, &steps, "root", "root")?;
    if matches!(steps[0], Step::At(_)) {
        entry(&result, 0)
    } else {
        match &result {
            Layout::ListOffset(l) => Ok(Item::Array(l.content().prefix(l.offsets()[1] as usize))),
            _ => unreachable!("range-like selection of a list yields a list"),
        }
    }
}

/// Entry `i` of `layout` as a layout (when it is a list) or a plain value.
fn entry(layout: &Layout, i: i64) -> Result<Item> {
    match layout {
        Layout::ListOffset(l) if !l.is_string() => {
            let one = layout.take(&[i])?;
            let Layout::ListOffset(one) = &one else { unreachable!() };
            Ok(Item::Array(one.content().prefix(one.offsets()[1] as usize)))
        }
        Layout::IndexedOption(o) => {
            let at = o.index()[i as usize];
            if at < 0 {
                Ok(Item::Scalar(Value::Null))
            } else {
                entry(o.content(), at)
            }
        }
        Layout::Union(u) => entry(&u.contents()[u.tags()[i as usize] as usize], u.index()[i as usize]),
        _ => {
            let one = layout.take(&[i])?.to_values()?;
            match one {
                Value::List(mut items) => Ok(Item::Scalar(items.pop().expect("one entry"))),
                _ => unreachable!("to_values yields a list"),
            }
        }
    }
}

fn child_path(path: &str, suffix: &str) -> String {
    format!("{path}{suffix}")
}

fn field_path(path: &str, name: &str) -> String {
    let mut quoted = String::new();
    write_json_string(name, &mut quoted);
    format!("{path}.field({quoted})")
}

fn too_many(path: &str, steps: &[Step]) -> SliceError {
    SliceError::TooManySelectors {
        path: path.to_owned(),
        remaining: steps.len(),
    }
}

/// Applies `steps[0]` inside every entry of `node` (whose entries must be
/// lists), then the rest of `steps` inside the selected elements.
fn select(node: &Layout, steps: &[Step], path: &str) -> Result<Layout> {
    if steps.is_empty() {
        return Ok(node.clone());
    }
    match node {
        Layout::ListOffset(l) if !l.is_string() => {
            let content = l.content().prefix(l.offsets()[l.offsets().len() - 1] as usize);
            let result = select_list(l.offsets(), &content, steps, path, &child_path(path, ".content"))?;
            // after At the list dimension is gone and the result is content
            if matches!(steps[0], Step::At(_)) {
                Ok(result)
            } else {
                Ok(result.with_parameters(l.parameters().clone()))
            }
        }
        Layout::ListOffset(_) | Layout::Numeric(_) => Err(too_many(path, steps)),
        Layout::Empty(_) => Ok(node.clone()),
        Layout::IndexedOption(o) => {
            let index = o.index().as_slice();
            let count = kernels::option_nonnull_count(index);
            if matches!(steps[0], Step::At(_)) && count < index.len() {
                let position = index.iter().position(|&x| x < 0).unwrap_or(0);
                let Step::At(at) = steps[0] else { unreachable!() };
                return Err(SliceError::IndexOutOfRange {
                    index: at,
                    length: 0,
                    path: format!("{path}[{position}] (missing value)"),
                });
            }
            let mut nextcarry = vec![0i64; count];
            let mut outindex = vec![0i64; index.len()];
            kernels::option_nonnull(index, &mut nextcarry, &mut outindex)?;
            let content = select(&o.content().take(&nextcarry)?, steps, &child_path(path, ".content"))?;
            Ok(Layout::indexed_option(outindex, content).with_parameters(o.parameters().clone()))
        }
        Layout::Union(u) => {
            let tags = u.tags().as_slice();
            let mut contents = Vec::with_capacity(u.contents().len());
            for (k, content) in u.contents().iter().enumerate() {
                let count = kernels::union_select_count(tags, k as i8);
                let mut carry = vec![0i64; count];
                kernels::union_select(tags, u.index(), k as i8, &mut carry)?;
                let path = child_path(path, &format!(".contents[{k}]"));
                let taken = content.take(&carry)?;
                // a variant with nothing selected imposes no depth requirement
                contents.push(if count == 0 { taken } else { select(&taken, steps, &path)? });
            }
            let mut local = vec![0i64; tags.len()];
            kernels::union_local_index(tags, &mut local)?;
            Ok(Layout::union(u.tags().clone(), local, contents).with_parameters(u.parameters().clone()))
        }
        Layout::Record(r) => {
            let fields = r
                .fields()
                .iter()
                .map(|(name, content)| {
                    let selected = select(&content.prefix(r.length()), steps, &field_path(path, name))?;
                    Ok((name.clone(), selected))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Layout::record(fields, r.length()).with_parameters(r.parameters().clone()))
        }
    }
}

/// [`select`] on a list given by `offsets` (starting at 0) over `content`.
fn select_list(
    offsets: &Buffer<i64>,
    content: &Layout,
    steps: &[Step],
    path: &str,
    content_path: &str,
) -> Result<Layout> {
    let (head, tail) = (&steps[0], &steps[1..]);
    let o = offsets.as_slice();
    let n = o.len() - 1;
    let sublist_len = |i: usize| o[i + 1] - o[i];
    match head {
        Step::At(at) => {
            let mut carry = vec![0i64; n];
            kernels::list_at(o, *at, &mut carry).map_err(|e| SliceError::IndexOutOfRange {
                index: *at,
                length: sublist_len(e.position),
                path: path.to_owned(),
            })?;
            select(&content.take(&carry)?, tail, content_path)
        }
        Step::Range(start, stop, step) => {
            let total = kernels::range_per_list_count(o, *start, *stop, *step)?;
            let mut nextoffsets = vec![0i64; n + 1];
            let mut nextcarry = vec![0i64; total];
            kernels::range_per_list(o, *start, *stop, *step, &mut nextoffsets, &mut nextcarry)?;
            let selected = select(&content.take(&nextcarry)?, tail, content_path)?;
            Ok(Layout::list_offset(nextoffsets, selected))
        }
        Step::Index(index) => select_index(o, index, content, tail, path, content_path),
        Step::Mask(mask) => {
            kernels::check_list_lengths(o, mask.len() as i64).map_err(|e| {
                SliceError::MaskLengthMismatch {
                    expected: sublist_len(e.position),
                    got: mask.len() as i64,
                    path: path.to_owned(),
                }
            })?;
            let mut index = vec![0i64; kernels::nonzero_count(mask)];
            kernels::nonzero(mask, &mut index)?;
            select_index(o, &index, content, tail, path, content_path)
        }
        Step::Jagged(j) => {
            let m = j.layout.length();
            kernels::check_list_lengths(o, m as i64).map_err(|e| SliceError::JaggedStructureMismatch {
                path: path.to_owned(),
                position: e.position,
                expected: sublist_len(e.position),
                got: m as i64,
            })?;
            // one copy of the selector per list of this dimension
            let mut tiling = vec![0i64; n * m];
            kernels::tile_arange(m as i64, &mut tiling)?;
            let tiled = Jagged {
                layout: j.layout.take(&tiling)?,
                mask: j.mask,
            };
            let selected = apply_jagged(content, &tiled, tail, content_path)?;
            Ok(Layout::list_offset(offsets.clone(), selected))
        }
    }
}

fn select_index(
    o: &[i64],
    index: &[i64],
    content: &Layout,
    tail: &[Step],
    path: &str,
    content_path: &str,
) -> Result<Layout> {
    let n = o.len() - 1;
    let m = index.len();
    let mut nextoffsets = vec![0i64; n + 1];
    let mut nextcarry = vec![0i64; n * m];
    kernels::carry_index(o, index, &mut nextoffsets, &mut nextcarry).map_err(|e| {
        let (i, j) = (e.position / m.max(1), e.position % m.max(1));
        SliceError::IndexOutOfRange {
            index: index[j],
            length: o[i + 1] - o[i],
            path: path.to_owned(),
        }
    })?;
    let selected = select(&content.take(&nextcarry)?, tail, content_path)?;
    Ok(Layout::list_offset(nextoffsets, selected))
}

/// Applies entry `i` of the jagged selector inside entry `i` of `node`
/// (same length), then `tail` inside the selected elements.
fn apply_jagged(node: &Layout, j: &Jagged, tail: &[Step], path: &str) -> Result<Layout> {
    if j.layout.length() != node.length() {
        return Err(SliceError::JaggedStructureMismatch {
            path: path.to_owned(),
            position: 0,
            expected: node.length() as i64,
            got: j.layout.length() as i64,
        });
    }
    match node {
        Layout::Empty(_) => Ok(node.clone()),
        Layout::IndexedOption(o) => {
            let index = o.index().as_slice();
            let count = kernels::option_nonnull_count(index);
            let mut nextcarry = vec![0i64; count];
            let mut outindex = vec![0i64; index.len()];
            kernels::option_nonnull(index, &mut nextcarry, &mut outindex)?;
            let mut positions = vec![0i64; count];
            kernels::option_positions(index, &mut positions)?;
            let sub = Jagged {
                layout: j.layout.take(&positions)?,
                mask: j.mask,
            };
            let content = apply_jagged(&o.content().take(&nextcarry)?, &sub, tail, &child_path(path, ".content"))?;
            Ok(Layout::indexed_option(outindex, content).with_parameters(o.parameters().clone()))
        }
        Layout::Union(u) => {
            let tags = u.tags().as_slice();
            let mut contents = Vec::with_capacity(u.contents().len());
            for (k, content) in u.contents().iter().enumerate() {
                let count = kernels::union_select_count(tags, k as i8);
                let mut carry = vec![0i64; count];
                kernels::union_select(tags, u.index(), k as i8, &mut carry)?;
                let mut positions = vec![0i64; count];
                kernels::union_positions(tags, k as i8, &mut positions)?;
                let sub = Jagged {
                    layout: j.layout.take(&positions)?,
                    mask: j.mask,
                };
                let path = child_path(path, &format!(".contents[{k}]"));
                let taken = content.take(&carry)?;
                contents.push(if count == 0 { taken } else { apply_jagged(&taken, &sub, tail, &path)? });
            }
            let mut local = vec![0i64; tags.len()];
            kernels::union_local_index(tags, &mut local)?;
            Ok(Layout::union(u.tags().clone(), local, contents).with_parameters(u.parameters().clone()))
        }
        Layout::Record(r) => {
            let fields = r
                .fields()
                .iter()
                .map(|(name, content)| {
                    let selected = apply_jagged(&content.prefix(r.length()), j, tail, &field_path(path, name))?;
                    Ok((name.clone(), selected))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Layout::record(fields, r.length()).with_parameters(r.parameters().clone()))
        }
        Layout::ListOffset(l) if !l.is_string() => {
            let o = l.offsets().as_slice();
            let content = l.content().prefix(o[o.len() - 1] as usize);
            let content_path = child_path(path, ".content");
            let (jo, jc) = match &j.layout {
                Layout::ListOffset(jl) => (jl.offsets().as_slice(), jl.content().prefix(jl.offsets()[jl.offsets().len() - 1] as usize)),
                // an empty selector for an empty array
                _ => return Ok(node.clone()),
            };
            let mismatch = |e: KernelError| SliceError::JaggedStructureMismatch {
                path: path.to_owned(),
                position: e.position,
                expected: o.get(e.position + 1).zip(o.get(e.position)).map_or(0, |(b, a)| b - a),
                got: jo.get(e.position + 1).zip(jo.get(e.position)).map_or(0, |(b, a)| b - a),
            };
            let selected = match &jc {
                Layout::ListOffset(_) => {
                    // selector reaches deeper: lists must line up exactly
                    kernels::lengths_equal(o, jo).map_err(mismatch)?;
                    let inner = Jagged {
                        layout: jc.clone(),
                        mask: j.mask,
                    };
                    let selected = apply_jagged(&content, &inner, tail, &content_path)?;
                    return Ok(Layout::list_offset(l.offsets().clone(), selected)
                        .with_parameters(l.parameters().clone()));
                }
                Layout::Numeric(leaf) if j.mask => {
                    kernels::lengths_equal(o, jo).map_err(mismatch)?;
                    let crate::layout::NumericData::Bool(mask) = leaf.data() else {
                        unreachable!("checked when the selector was built")
                    };
                    let total = kernels::jagged_nonzero_count(jo, mask)?;
                    let mut nextoffsets = vec![0i64; jo.len()];
                    let mut local = vec![0i64; total];
                    kernels::jagged_nonzero(jo, mask, &mut nextoffsets, &mut local)?;
                    let mut nextcarry = vec![0i64; total];
                    kernels::jagged_carry(o, &nextoffsets, &local, &mut nextcarry)?;
                    (nextoffsets, nextcarry)
                }
                Layout::Numeric(leaf) => {
                    let crate::layout::NumericData::Int64(index) = leaf.data() else {
                        unreachable!("checked when the selector was built")
                    };
                    if jo.len() != o.len() {
                        return Err(mismatch(KernelError::new("jagged_carry", "different number of lists", 0)));
                    }
                    let mut nextcarry = vec![0i64; index.len()];
                    kernels::jagged_carry(o, jo, index, &mut nextcarry).map_err(|e| {
                        let i = jo.partition_point(|&x| x <= e.position as i64).saturating_sub(1);
                        SliceError::IndexOutOfRange {
                            index: index[e.position],
                            length: o[i + 1] - o[i],
                            path: path.to_owned(),
                        }
                    })?;
                    (jo.to_vec(), nextcarry)
                }
                _ => {
                    // every selector list is empty
                    if j.mask {
                        kernels::lengths_equal(o, jo).map_err(mismatch)?;
                    }
                    (jo.to_vec(), Vec::new())
                }
            };
            let (nextoffsets, nextcarry) = selected;
            let taken = select(&content.take(&nextcarry)?, tail, &content_path)?;
            Ok(Layout::list_offset(nextoffsets, taken).with_parameters(l.parameters().clone()))
        }
        Layout::ListOffset(_) | Layout::Numeric(_) => Err(SliceError::TooManySelectors {
            path: path.to_owned(),
            remaining: tail.len() + 1,
        }),
    }
}
