//! Layout nodes: the columnar representation.
//!
//! A [`Layout`] is an immutable tree in which every node contributes one
//! structural feature (variable-length lists, records, tagged unions, missing
//! values, numeric leaves) over flat [`Buffer`]s. Nodes are reference counted,
//! so deriving a new layout from an old one shares every untouched child and
//! buffer.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::buffer::{Buffer, DType, Element};
use crate::kernels::{self, KernelError};
use crate::value::Value;

/// Parameter key that selects special interpretation of a node.
pub const CLASS_KEY: &str = "__class__";
/// Parameter key overriding how a record's type is displayed.
pub const DISPLAY_KEY: &str = "__str__";
/// `__class__` value marking a list of `u8` as UTF-8 text.
pub const STRING_CLASS: &str = "string";

/// JSON-valued metadata attached to a node, ordered by key.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Parameters(BTreeMap<String, serde_json::Value>);

impl Parameters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> Option<&serde_json::Value> {
        self.0.get(key)
    }

    /// A copy with `key` set to `value`; `null` removes the key.
    pub fn with(&self, key: &str, value: serde_json::Value) -> Parameters {
        let mut next = self.clone();
        if value.is_null() {
            next.0.remove(key);
        } else {
            next.0.insert(key.to_owned(), value);
        }
        next
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &serde_json::Value)> {
        self.0.iter()
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.get(key).and_then(serde_json::Value::as_str)
    }

    pub fn is_string(&self) -> bool {
        self.get_str(CLASS_KEY) == Some(STRING_CLASS)
    }

    pub fn string() -> Parameters {
        Parameters::new().with(CLASS_KEY, STRING_CLASS.into())
    }
}

impl FromIterator<(String, serde_json::Value)> for Parameters {
    fn from_iter<I: IntoIterator<Item = (String, serde_json::Value)>>(iter: I) -> Self {
        Parameters(iter.into_iter().filter(|(_, v)| !v.is_null()).collect())
    }
}

/// The typed buffer of a numeric leaf.
#[derive(Clone, Debug, PartialEq)]
pub enum NumericData {
    Bool(Buffer<bool>),
    Int8(Buffer<i8>),
    UInt8(Buffer<u8>),
    Int64(Buffer<i64>),
    Float64(Buffer<f64>),
}

macro_rules! on_numeric {
    ($data:expr, $buf:ident => $body:expr) => {
        match $data {
            NumericData::Bool($buf) => $body,
            NumericData::Int8($buf) => $body,
            NumericData::UInt8($buf) => $body,
            NumericData::Int64($buf) => $body,
            NumericData::Float64($buf) => $body,
        }
    };
}

macro_rules! map_numeric {
    ($data:expr, $buf:ident => $body:expr) => {
        match $data {
            NumericData::Bool($buf) => NumericData::Bool($body),
            NumericData::Int8($buf) => NumericData::Int8($body),
            NumericData::UInt8($buf) => NumericData::UInt8($body),
            NumericData::Int64($buf) => NumericData::Int64($body),
            NumericData::Float64($buf) => NumericData::Float64($body),
        }
    };
}

#[allow(unused_imports)]
pub(crate) use {map_numeric, on_numeric};

impl NumericData {
    pub fn len(&self) -> usize {
        on_numeric!(self, b => b.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> DType {
        on_numeric!(self, b => b.dtype())
    }

    pub fn prefix(&self, len: usize) -> NumericData {
        map_numeric!(self, b => b.prefix(len))
    }

    pub fn value_at(&self, i: usize) -> Value {
        match self {
            NumericData::Bool(b) => Value::Bool(b[i]),
            NumericData::Int8(b) => Value::Int(b[i] as i64),
            NumericData::UInt8(b) => Value::Int(b[i] as i64),
            NumericData::Int64(b) => Value::Int(b[i]),
            NumericData::Float64(b) => Value::Float(b[i]),
        }
    }

    pub fn take(&self, indices: &[i64]) -> Result<NumericData, KernelError> {
        fn go<T: Element + Default>(src: &Buffer<T>, indices: &[i64]) -> Result<Buffer<T>, KernelError> {
            let mut out = vec![T::default(); indices.len()];
            kernels::gather(src, indices, &mut out)?;
            Ok(Buffer::from_vec(out))
        }
        Ok(map_numeric!(self, b => go(b, indices)?))
    }
}

macro_rules! numeric_from {
    ($t:ty, $variant:ident) => {
        impl From<Vec<$t>> for NumericData {
            fn from(values: Vec<$t>) -> Self {
                NumericData::$variant(Buffer::from_vec(values))
            }
        }

        impl From<Buffer<$t>> for NumericData {
            fn from(values: Buffer<$t>) -> Self {
                NumericData::$variant(values)
            }
        }
    };
}

numeric_from!(bool, Bool);
numeric_from!(i8, Int8);
numeric_from!(u8, UInt8);
numeric_from!(i64, Int64);
numeric_from!(f64, Float64);

#[derive(Clone, Debug, PartialEq)]
pub struct NumericArray {
    data: NumericData,
    parameters: Parameters,
}

impl NumericArray {
    pub fn data(&self) -> &NumericData {
        &self.data
    }

    pub fn parameters(&self) -> &Parameters {
        &self.parameters
    }
}

/// Variable-length lists: sublist `i` is `content[offsets[i]..offsets[i + 1]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ListOffsetArray {
    offsets: Buffer<i64>,
    content: Layout,
    parameters: Parameters,
}

impl ListOffsetArray {
    pub fn offsets(&self) -> &Buffer<i64> {
        &self.offsets
    }

    pub fn content(&self) -> &Layout {
        &self.content
    }

    pub fn parameters(&self) -> &Parameters {
        &self.parameters
    }

    /// True for a string-flagged list over `u8`.
    pub fn is_string(&self) -> bool {
        self.parameters.is_string()
            && matches!(&self.content, Layout::Numeric(n) if n.data.dtype() == DType::UInt8)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecordArray {
    fields: Vec<(String, Layout)>,
    length: usize,
    parameters: Parameters,
}

impl RecordArray {
    pub fn fields(&self) -> &[(String, Layout)] {
        &self.fields
    }

    pub fn field(&self, name: &str) -> Option<&Layout> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, l)| l)
    }

    pub fn field_names(&self) -> Vec<String> {
        self.fields.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn parameters(&self) -> &Parameters {
        &self.parameters
    }
}

/// Tagged union: entry `i` is `contents[tags[i]][index[i]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnionArray {
    tags: Buffer<i8>,
    index: Buffer<i64>,
    contents: Vec<Layout>,
    parameters: Parameters,
}

impl UnionArray {
    pub fn tags(&self) -> &Buffer<i8> {
        &self.tags
    }

    pub fn index(&self) -> &Buffer<i64> {
        &self.index
    }

    pub fn contents(&self) -> &[Layout] {
        &self.contents
    }

    pub fn parameters(&self) -> &Parameters {
        &self.parameters
    }
}

/// Possibly-missing entries: `index[i] == -1` is missing, otherwise the
/// entry is `content[index[i]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedOptionArray {
    index: Buffer<i64>,
    content: Layout,
    parameters: Parameters,
}

impl IndexedOptionArray {
    pub fn index(&self) -> &Buffer<i64> {
        &self.index
    }

    pub fn content(&self) -> &Layout {
        &self.content
    }

    pub fn parameters(&self) -> &Parameters {
        &self.parameters
    }
}

/// Zero-length array of unknown type.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmptyArray {
    parameters: Parameters,
}

impl EmptyArray {
    pub fn parameters(&self) -> &Parameters {
        &self.parameters
    }
}

/// A node of a columnar array. Cloning is cheap and shares everything.
#[derive(Clone, Debug, PartialEq)]
pub enum Layout {
    Numeric(Arc<NumericArray>),
    ListOffset(Arc<ListOffsetArray>),
    Record(Arc<RecordArray>),
    Union(Arc<UnionArray>),
    IndexedOption(Arc<IndexedOptionArray>),
    Empty(Arc<EmptyArray>),
}

/// A violated structural invariant, located by its path from the root.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("structure error at {path}: {message}")]
pub struct StructureError {
    pub path: String,
    pub message: String,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("invalid UTF-8 in string at {path}: {message}")]
    Encoding { path: String, message: String },
    #[error("field {name:?} not found; available fields: {available:?}")]
    FieldNotFound { name: String, available: Vec<String> },
    #[error("no record found at any depth")]
    NoRecord,
}

impl Layout {
    pub fn numeric(data: impl Into<NumericData>) -> Layout {
        Layout::Numeric(Arc::new(NumericArray {
            data: data.into(),
            parameters: Parameters::new(),
        }))
    }

    pub fn list_offset(offsets: impl Into<Buffer<i64>>, content: Layout) -> Layout {
        Layout::ListOffset(Arc::new(ListOffsetArray {
            offsets: offsets.into(),
            content,
            parameters: Parameters::new(),
        }))
    }

    pub fn record(fields: Vec<(String, Layout)>, length: usize) -> Layout {
        Layout::Record(Arc::new(RecordArray {
            fields,
            length,
            parameters: Parameters::new(),
        }))
    }

    pub fn union(tags: impl Into<Buffer<i8>>, index: impl Into<Buffer<i64>>, contents: Vec<Layout>) -> Layout {
        Layout::Union(Arc::new(UnionArray {
            tags: tags.into(),
            index: index.into(),
            contents,
            parameters: Parameters::new(),
        }))
    }

    pub fn indexed_option(index: impl Into<Buffer<i64>>, content: Layout) -> Layout {
        Layout::IndexedOption(Arc::new(IndexedOptionArray {
            index: index.into(),
            content,
            parameters: Parameters::new(),
        }))
    }

    pub fn empty() -> Layout {
        Layout::Empty(Arc::new(EmptyArray::default()))
    }

    /// A string-flagged list of `u8` holding the given strings.
    pub fn strings<S: AsRef<str>>(items: &[S]) -> Layout {
        let mut offsets = Vec::with_capacity(items.len() + 1);
        let mut bytes = Vec::new();
        offsets.push(0i64);
        for s in items {
            bytes.extend_from_slice(s.as_ref().as_bytes());
            offsets.push(bytes.len() as i64);
        }
        Layout::list_offset(offsets, Layout::numeric(bytes)).with_parameters(Parameters::string())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Layout::Numeric(_) => "numeric",
            Layout::ListOffset(_) => "listoffset",
            Layout::Record(_) => "record",
            Layout::Union(_) => "union",
            Layout::IndexedOption(_) => "indexedoption",
            Layout::Empty(_) => "empty",
        }
    }

    /// Logical number of entries.
    pub fn length(&self) -> usize {
        match self {
            Layout::Numeric(n) => n.data.len(),
            Layout::ListOffset(l) => l.offsets.len().saturating_sub(1),
            Layout::Record(r) => r.length,
            Layout::Union(u) => u.tags.len(),
            Layout::IndexedOption(o) => o.index.len(),
            Layout::Empty(_) => 0,
        }
    }

    pub fn parameters(&self) -> &Parameters {
        match self {
            Layout::Numeric(n) => &n.parameters,
            Layout::ListOffset(l) => &l.parameters,
            Layout::Record(r) => &r.parameters,
            Layout::Union(u) => &u.parameters,
            Layout::IndexedOption(o) => &o.parameters,
            Layout::Empty(e) => &e.parameters,
        }
    }

    pub fn parameter(&self, key: &str) -> Option<&serde_json::Value> {
        self.parameters().get(key)
    }

    /// The same node with its parameters replaced. Children are shared.
    pub fn with_parameters(&self, parameters: Parameters) -> Layout {
        match self {
            Layout::Numeric(n) => Layout::Numeric(Arc::new(NumericArray {
                data: n.data.clone(),
                parameters,
            })),
            Layout::ListOffset(l) => Layout::ListOffset(Arc::new(ListOffsetArray {
                offsets: l.offsets.clone(),
                content: l.content.clone(),
                parameters,
            })),
            Layout::Record(r) => Layout::Record(Arc::new(RecordArray {
                fields: r.fields.clone(),
                length: r.length,
                parameters,
            })),
            Layout::Union(u) => Layout::Union(Arc::new(UnionArray {
                tags: u.tags.clone(),
                index: u.index.clone(),
                contents: u.contents.clone(),
                parameters,
            })),
            Layout::IndexedOption(o) => Layout::IndexedOption(Arc::new(IndexedOptionArray {
                index: o.index.clone(),
                content: o.content.clone(),
                parameters,
            })),
            Layout::Empty(_) => Layout::Empty(Arc::new(EmptyArray { parameters })),
        }
    }

    /// A new node with `key` set to `value` (`null` removes it). The
    /// receiver is unchanged and children are shared.
    pub fn set_parameter(&self, key: &str, value: serde_json::Value) -> Layout {
        self.with_parameters(self.parameters().with(key, value))
    }

    /// True for a string-flagged list of `u8`.
    pub fn is_string(&self) -> bool {
        matches!(self, Layout::ListOffset(l) if l.is_string())
    }

    /// Checks every structural invariant recursively.
    pub fn validate(&self) -> Result<(), StructureError> {
        self.validate_at("root")
    }

    fn validate_at(&self, path: &str) -> Result<(), StructureError> {
        let fail = |message: String| StructureError {
            path: path.to_owned(),
            message,
        };
        let kernel_fail = |e: KernelError| fail(format!("{} (position {})", e.message, e.position));
        match self {
            Layout::Numeric(_) | Layout::Empty(_) => Ok(()),
            Layout::ListOffset(l) => {
                kernels::validate_offsets(&l.offsets, l.content.length()).map_err(kernel_fail)?;
                l.content.validate_at(&format!("{path}.content"))
            }
            Layout::Record(r) => {
                let mut seen = HashSet::new();
                for (name, content) in &r.fields {
                    if !seen.insert(name.as_str()) {
                        return Err(fail(format!("duplicate field name {name:?}")));
                    }
                    if content.length() < r.length {
                        return Err(fail(format!(
                            "field {name:?} has length {} below record length {}",
                            content.length(),
                            r.length
                        )));
                    }
                    content.validate_at(&format!("{path}.field({name:?})"))?;
                }
                Ok(())
            }
            Layout::Union(u) => {
                if u.contents.len() > i8::MAX as usize {
                    return Err(fail("too many union contents".into()));
                }
                let lengths: Vec<i64> = u.contents.iter().map(|c| c.length() as i64).collect();
                kernels::validate_union(&u.tags, &u.index, &lengths).map_err(kernel_fail)?;
                for (i, content) in u.contents.iter().enumerate() {
                    content.validate_at(&format!("{path}.contents[{i}]"))?;
                }
                Ok(())
            }
            Layout::IndexedOption(o) => {
                kernels::validate_index(&o.index, o.content.length(), true).map_err(kernel_fail)?;
                o.content.validate_at(&format!("{path}.content"))
            }
        }
    }

    /// Nested plain values (a [`Value::List`] of `length()` entries).
    pub fn to_values(&self) -> Result<Value, LayoutError> {
        self.validate()?;
        Ok(Value::List(self.materialize("root")?))
    }

    fn materialize(&self, path: &str) -> Result<Vec<Value>, LayoutError> {
        match self {
            Layout::Numeric(n) => Ok((0..n.data.len()).map(|i| n.data.value_at(i)).collect()),
            Layout::Empty(_) => Ok(Vec::new()),
            Layout::ListOffset(l) if l.is_string() => {
                let Layout::Numeric(bytes) = &l.content else {
                    unreachable!("is_string checked the content")
                };
                let NumericData::UInt8(bytes) = &bytes.data else {
                    unreachable!("is_string checked the dtype")
                };
                l.offsets
                    .windows(2)
                    .enumerate()
                    .map(|(i, w)| {
                        let raw = &bytes[w[0] as usize..w[1] as usize];
                        std::str::from_utf8(raw).map(|s| Value::Str(s.to_owned())).map_err(|e| {
                            LayoutError::Encoding {
                                path: format!("{path}[{i}]"),
                                message: e.to_string(),
                            }
                        })
                    })
                    .collect()
            }
            Layout::ListOffset(l) => {
                let content = l.content.materialize(&format!("{path}.content"))?;
                let mut items = content.into_iter();
                Ok(l.offsets
                    .windows(2)
                    .map(|w| Value::List(items.by_ref().take((w[1] - w[0]) as usize).collect()))
                    .collect())
            }
            Layout::Record(r) => {
                let mut columns = Vec::with_capacity(r.fields.len());
                for (name, content) in &r.fields {
                    let values = content.materialize(&format!("{path}.field({name:?})"))?;
                    columns.push((name, values.into_iter()));
                }
                Ok((0..r.length)
                    .map(|_| {
                        Value::Record(
                            columns
                                .iter_mut()
                                .map(|(name, it)| ((*name).clone(), it.next().unwrap_or(Value::Null)))
                                .collect(),
                        )
                    })
                    .collect())
            }
            Layout::Union(u) => {
                let contents = u
                    .contents
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.materialize(&format!("{path}.contents[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(u.tags
                    .iter()
                    .zip(u.index.iter())
                    .map(|(&t, &i)| contents[t as usize][i as usize].clone())
                    .collect())
            }
            Layout::IndexedOption(o) => {
                let content = o.content.materialize(&format!("{path}.content"))?;
                Ok(o.index
                    .iter()
                    .map(|&i| if i < 0 { Value::Null } else { content[i as usize].clone() })
                    .collect())
            }
        }
    }

    /// Replaces the shallowest record (looking through lists, options, and
    /// unions) by its field `name`. List offsets and option indexes above
    /// the record are shared, not copied.
    pub fn project_field(&self, name: &str) -> Result<Layout, LayoutError> {
        match self {
            Layout::Record(r) => match r.field(name) {
                Some(content) => Ok(content.prefix(r.length)),
                None => Err(LayoutError::FieldNotFound {
                    name: name.to_owned(),
                    available: r.field_names(),
                }),
            },
            Layout::ListOffset(l) if !l.is_string() => Ok(Layout::ListOffset(Arc::new(ListOffsetArray {
                offsets: l.offsets.clone(),
                content: l.content.project_field(name)?,
                parameters: l.parameters.clone(),
            }))),
            Layout::IndexedOption(o) => Ok(Layout::IndexedOption(Arc::new(IndexedOptionArray {
                index: o.index.clone(),
                content: o.content.project_field(name)?,
                parameters: o.parameters.clone(),
            }))),
            Layout::Union(u) => {
                let mut contents = Vec::with_capacity(u.contents.len());
                let mut failed = false;
                for content in &u.contents {
                    match content.project_field(name) {
                        Ok(projected) => contents.push(projected),
                        Err(_) => failed = true,
                    }
                }
                if failed {
                    let mut available = Vec::new();
                    for content in &u.contents {
                        for field in content.record_field_names() {
                            if !available.contains(&field) {
                                available.push(field);
                            }
                        }
                    }
                    return Err(LayoutError::FieldNotFound {
                        name: name.to_owned(),
                        available,
                    });
                }
                Ok(Layout::Union(Arc::new(UnionArray {
                    tags: u.tags.clone(),
                    index: u.index.clone(),
                    contents,
                    parameters: u.parameters.clone(),
                })))
            }
            _ => Err(LayoutError::NoRecord),
        }
    }

    /// Field names of the shallowest record, if any.
    pub fn record_field_names(&self) -> Vec<String> {
        match self {
            Layout::Record(r) => r.field_names(),
            Layout::ListOffset(l) if !l.is_string() => l.content.record_field_names(),
            Layout::IndexedOption(o) => o.content.record_field_names(),
            Layout::Union(u) => u.contents.iter().flat_map(|c| c.record_field_names()).collect(),
            _ => Vec::new(),
        }
    }

    /// The first `len` entries. Buffers are shared, never copied.
    ///
    /// Panics if `len` exceeds `length()`.
    pub fn prefix(&self, len: usize) -> Layout {
        assert!(len <= self.length(), "prefix {len} longer than layout {}", self.length());
        if len == self.length() {
            return self.clone();
        }
        match self {
            Layout::Numeric(n) => Layout::Numeric(Arc::new(NumericArray {
                data: n.data.prefix(len),
                parameters: n.parameters.clone(),
            })),
            Layout::ListOffset(l) => Layout::ListOffset(Arc::new(ListOffsetArray {
                offsets: l.offsets.prefix(len + 1),
                content: l.content.clone(),
                parameters: l.parameters.clone(),
            })),
            Layout::Record(r) => Layout::Record(Arc::new(RecordArray {
                fields: r.fields.clone(),
                length: len,
                parameters: r.parameters.clone(),
            })),
            Layout::Union(u) => Layout::Union(Arc::new(UnionArray {
                tags: u.tags.prefix(len),
                index: u.index.prefix(len),
                contents: u.contents.clone(),
                parameters: u.parameters.clone(),
            })),
            Layout::IndexedOption(o) => Layout::IndexedOption(Arc::new(IndexedOptionArray {
                index: o.index.prefix(len),
                content: o.content.clone(),
                parameters: o.parameters.clone(),
            })),
            Layout::Empty(_) => unreachable!("empty arrays have length 0"),
        }
    }

    /// The entries at `indices`, in order. List contents are compacted.
    pub fn take(&self, indices: &[i64]) -> Result<Layout, KernelError> {
        Ok(match self {
            Layout::Numeric(n) => Layout::Numeric(Arc::new(NumericArray {
                data: n.data.take(indices)?,
                parameters: n.parameters.clone(),
            })),
            Layout::ListOffset(l) => {
                let total = kernels::carry_list_count(&l.offsets, indices)?;
                let mut nextoffsets = vec![0i64; indices.len() + 1];
                let mut nextcarry = vec![0i64; total];
                kernels::carry_list(&l.offsets, indices, &mut nextoffsets, &mut nextcarry)?;
                Layout::ListOffset(Arc::new(ListOffsetArray {
                    offsets: Buffer::from_vec(nextoffsets),
                    content: l.content.take(&nextcarry)?,
                    parameters: l.parameters.clone(),
                }))
            }
            Layout::Record(r) => {
                kernels::validate_index(indices, r.length, false)?;
                let fields = r
                    .fields
                    .iter()
                    .map(|(name, content)| Ok((name.clone(), content.take(indices)?)))
                    .collect::<Result<Vec<_>, KernelError>>()?;
                Layout::Record(Arc::new(RecordArray {
                    fields,
                    length: indices.len(),
                    parameters: r.parameters.clone(),
                }))
            }
            Layout::Union(u) => {
                let mut tags = vec![0i8; indices.len()];
                let mut index = vec![0i64; indices.len()];
                kernels::gather(&u.tags, indices, &mut tags)?;
                kernels::gather(&u.index, indices, &mut index)?;
                Layout::Union(Arc::new(UnionArray {
                    tags: Buffer::from_vec(tags),
                    index: Buffer::from_vec(index),
                    contents: u.contents.clone(),
                    parameters: u.parameters.clone(),
                }))
            }
            Layout::IndexedOption(o) => {
                let mut index = vec![0i64; indices.len()];
                kernels::gather(&o.index, indices, &mut index)?;
                Layout::IndexedOption(Arc::new(IndexedOptionArray {
                    index: Buffer::from_vec(index),
                    content: o.content.clone(),
                    parameters: o.parameters.clone(),
                }))
            }
            Layout::Empty(_) => {
                kernels::validate_index(indices, 0, false)?;
                self.clone()
            }
        })
    }

    /// Visits every buffer-bearing node depth-first (node before children).
    pub fn walk(&self, visit: &mut dyn FnMut(&Layout)) {
        visit(self);
        match self {
            Layout::ListOffset(l) => l.content.walk(visit),
            Layout::IndexedOption(o) => o.content.walk(visit),
            Layout::Record(r) => r.fields.iter().for_each(|(_, c)| c.walk(visit)),
            Layout::Union(u) => u.contents.iter().for_each(|c| c.walk(visit)),
            Layout::Numeric(_) | Layout::Empty(_) => {}
        }
    }
}
