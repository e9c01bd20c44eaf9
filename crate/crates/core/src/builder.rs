//! Record-oriented to columnar conversion with type discovery.
//!
//! A [`Builder`] is filled one value (or one list/record boundary) at a time
//! and discovers its type as it goes. Each accumulator node mirrors a layout
//! node kind; when a value arrives that the current node cannot hold, the
//! node replaces itself:
//!
//! * integers followed by a real convert the accumulated integers to floats
//!   once (through [`kernels::int64_to_float64`]) and continue as floats;
//! * any other incompatible kind turns the node into a tagged union whose
//!   first variant is the existing accumulator, reused as is;
//! * a null turns the node into an option, and a record field that is
//!   missing from some records becomes an option with missing entries.
//!
//! Type discovery is inherently per-value dynamic dispatch, so unlike the rest
//! of the crate this module loops over values itself; bulk conversions still
//! go through the kernels.

use std::mem;

use thiserror::Error;

use crate::buffer::GrowableBuffer;
use crate::kernels;
use crate::layout::{Layout, Parameters};
use crate::value::Value;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BuilderError {
    #[error("fill-state error: expected {expected}, got {got}")]
    FillState {
        expected: &'static str,
        got: &'static str,
    },
    #[error("duplicate field {0:?} in one record")]
    DuplicateField(String),
    #[error("unsupported value kind: {0}")]
    UnsupportedValueKind(String),
}

type Result<T = ()> = std::result::Result<T, BuilderError>;

const EXPECT_VALUE: &str = "a value, begin_list or begin_record";
const EXPECT_FIELD: &str = "field or end_record";
const EXPECT_FIELD_VALUE: &str = "a value for the declared field";
const EXPECT_ITEM: &str = "a value, begin_list, begin_record or end_list";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Bool,
    Int,
    Float,
    Str,
    List,
    Record,
}

#[derive(Default)]
struct Stats {
    promotions: u64,
}

#[derive(Clone, Debug)]
struct StrAcc {
    offsets: GrowableBuffer<i64>,
    bytes: GrowableBuffer<u8>,
}

#[derive(Clone, Debug)]
struct ListAcc {
    offsets: GrowableBuffer<i64>,
    content: Acc,
    open: bool,
}

#[derive(Clone, Debug)]
struct FieldAcc {
    name: String,
    content: Acc,
    filled: bool,
}

#[derive(Clone, Debug)]
struct RecordAcc {
    fields: Vec<FieldAcc>,
    length: usize,
    open: bool,
    current: Option<usize>,
}

#[derive(Clone, Debug)]
struct OptionAcc {
    index: GrowableBuffer<i64>,
    content: Acc,
}

#[derive(Clone, Debug)]
struct UnionAcc {
    tags: GrowableBuffer<i8>,
    index: GrowableBuffer<i64>,
    contents: Vec<Acc>,
    current: Option<usize>,
}

/// Mutable accumulator tree.
#[derive(Clone, Debug)]
enum Acc {
    /// Nothing but `nulls` missing values so far.
    Unknown { nulls: usize },
    Bool(GrowableBuffer<bool>),
    Int(GrowableBuffer<i64>),
    Float(GrowableBuffer<f64>),
    Str(Box<StrAcc>),
    List(Box<ListAcc>),
    Record(Box<RecordAcc>),
    Option(Box<OptionAcc>),
    Union(Box<UnionAcc>),
}

fn offsets_start() -> GrowableBuffer<i64> {
    let mut offsets = GrowableBuffer::new();
    offsets.push(0);
    offsets
}

fn arange(len: usize) -> Vec<i64> {
    let mut out = vec![0i64; len];
    kernels::arange(&mut out).expect("arange cannot fail");
    out
}

fn missing(len: usize) -> Vec<i64> {
    let mut out = vec![0i64; len];
    kernels::fill(-1i64, &mut out).expect("fill cannot fail");
    out
}

impl Acc {
    fn len(&self) -> usize {
        match self {
            Acc::Unknown { nulls } => *nulls,
            Acc::Bool(b) => b.len(),
            Acc::Int(b) => b.len(),
            Acc::Float(b) => b.len(),
            Acc::Str(s) => s.offsets.len() - 1,
            Acc::List(l) => l.offsets.len() - 1,
            Acc::Record(r) => r.length,
            Acc::Option(o) => o.index.len(),
            Acc::Union(u) => u.tags.len(),
        }
    }

    /// True while a list or record is open somewhere inside.
    fn active(&self) -> bool {
        match self {
            Acc::List(l) => l.open,
            Acc::Record(r) => r.open,
            Acc::Option(o) => o.content.active(),
            Acc::Union(u) => u.current.is_some(),
            _ => false,
        }
    }

    fn kind(&self) -> Option<Kind> {
        match self {
            Acc::Bool(_) => Some(Kind::Bool),
            Acc::Int(_) => Some(Kind::Int),
            Acc::Float(_) => Some(Kind::Float),
            Acc::Str(_) => Some(Kind::Str),
            Acc::List(_) => Some(Kind::List),
            Acc::Record(_) => Some(Kind::Record),
            _ => None,
        }
    }

    /// Passes an event to the open child of an active node.
    fn route(&mut self, got: &'static str, f: impl FnOnce(&mut Acc) -> Result) -> Result {
        match self {
            Acc::List(l) => f(&mut l.content),
            Acc::Option(o) => f(&mut o.content),
            Acc::Union(u) => {
                let k = u.current.expect("active union has a current child");
                f(&mut u.contents[k])?;
                if !u.contents[k].active() {
                    u.current = None;
                }
                Ok(())
            }
            Acc::Record(r) => {
                let Some(k) = r.current else {
                    return Err(BuilderError::FillState {
                        expected: EXPECT_FIELD,
                        got,
                    });
                };
                f(&mut r.fields[k].content)?;
                if !r.fields[k].content.active() {
                    r.fields[k].filled = true;
                    r.current = None;
                }
                Ok(())
            }
            _ => unreachable!("route on an inactive node"),
        }
    }

    fn into_union(&mut self) {
        let old = mem::replace(self, Acc::Unknown { nulls: 0 });
        let len = old.len();
        let mut tags = vec![0i8; len];
        kernels::fill(0i8, &mut tags).expect("fill cannot fail");
        *self = Acc::Union(Box::new(UnionAcc {
            tags: GrowableBuffer::from_vec(tags),
            index: GrowableBuffer::from_vec(arange(len)),
            contents: vec![old],
            current: None,
        }));
    }

    fn into_option(&mut self) {
        let old = mem::replace(self, Acc::Unknown { nulls: 0 });
        let index = match &old {
            Acc::Unknown { nulls } => missing(*nulls),
            other => arange(other.len()),
        };
        let content = match old {
            Acc::Unknown { .. } => Acc::Unknown { nulls: 0 },
            other => other,
        };
        *self = Acc::Option(Box::new(OptionAcc {
            index: GrowableBuffer::from_vec(index),
            content,
        }));
    }

    /// Starts a new entry of `kind` in an inactive node, restructuring it
    /// first when it cannot hold that kind. `fill` receives the node that
    /// will hold the entry.
    fn start(&mut self, kind: Kind, stats: &mut Stats, fill: impl FnOnce(&mut Acc, &mut Stats) -> Result) -> Result {
        debug_assert!(!self.active());
        match self {
            Acc::Unknown { nulls: 0 } => fill(self, stats),
            Acc::Unknown { .. } => {
                self.into_option();
                self.start(kind, stats, fill)
            }
            Acc::Option(o) => {
                o.index.push(o.content.len() as i64);
                o.content.start(kind, stats, fill)
            }
            Acc::Union(u) => {
                let found = u.contents.iter().position(|c| c.kind() == Some(kind)).or_else(|| {
                    let fallback = match kind {
                        Kind::Int => Kind::Float,
                        Kind::Float => Kind::Int,
                        _ => return None,
                    };
                    u.contents.iter().position(|c| c.kind() == Some(fallback))
                });
                let k = match found {
                    Some(k) => k,
                    None => {
                        u.contents.push(Acc::Unknown { nulls: 0 });
                        u.contents.len() - 1
                    }
                };
                u.tags.push(k as i8);
                u.index.push(u.contents[k].len() as i64);
                fill(&mut u.contents[k], stats)?;
                if u.contents[k].active() {
                    u.current = Some(k);
                }
                Ok(())
            }
            _ => {
                let compatible = match (self.kind(), kind) {
                    (Some(a), b) if a == b => true,
                    (Some(Kind::Int), Kind::Float) | (Some(Kind::Float), Kind::Int) => true,
                    _ => false,
                };
                if compatible {
                    fill(self, stats)
                } else {
                    self.into_union();
                    self.start(kind, stats, fill)
                }
            }
        }
    }

    fn null(&mut self) -> Result {
        if self.active() {
            return self.route("null", Acc::null);
        }
        match self {
            Acc::Unknown { nulls } => *nulls += 1,
            Acc::Option(o) => o.index.push(-1),
            _ => {
                self.into_option();
                return self.null();
            }
        }
        Ok(())
    }

    fn boolean(&mut self, v: bool, stats: &mut Stats) -> Result {
        if self.active() {
            return self.route("boolean", |c| c.boolean(v, stats));
        }
        self.start(Kind::Bool, stats, |acc, _| {
            match acc {
                Acc::Bool(b) => b.push(v),
                _ => {
                    let mut b = GrowableBuffer::new();
                    b.push(v);
                    *acc = Acc::Bool(b);
                }
            }
            Ok(())
        })
    }

    fn integer(&mut self, v: i64, stats: &mut Stats) -> Result {
        if self.active() {
            return self.route("integer", |c| c.integer(v, stats));
        }
        self.start(Kind::Int, stats, |acc, _| {
            match acc {
                Acc::Int(b) => b.push(v),
                Acc::Float(b) => b.push(v as f64),
                _ => {
                    let mut b = GrowableBuffer::new();
                    b.push(v);
                    *acc = Acc::Int(b);
                }
            }
            Ok(())
        })
    }

    fn real(&mut self, v: f64, stats: &mut Stats) -> Result {
        if self.active() {
            return self.route("real", |c| c.real(v, stats));
        }
        self.start(Kind::Float, stats, |acc, stats| {
            match acc {
                Acc::Float(b) => b.push(v),
                Acc::Int(ints) => {
                    let mut floats = Vec::with_capacity((ints.len() * 2).max(crate::buffer::INITIAL_CAPACITY));
                    floats.resize(ints.len(), 0.0);
                    kernels::int64_to_float64(ints.as_slice(), &mut floats)
                        .expect("output sized to input");
                    floats.push(v);
                    stats.promotions += 1;
                    *acc = Acc::Float(GrowableBuffer::from_vec(floats));
                }
                _ => {
                    let mut b = GrowableBuffer::new();
                    b.push(v);
                    *acc = Acc::Float(b);
                }
            }
            Ok(())
        })
    }

    fn string(&mut self, v: &str, stats: &mut Stats) -> Result {
        if self.active() {
            return self.route("string", |c| c.string(v, stats));
        }
        self.start(Kind::Str, stats, |acc, _| {
            if !matches!(acc, Acc::Str(_)) {
                *acc = Acc::Str(Box::new(StrAcc {
                    offsets: offsets_start(),
                    bytes: GrowableBuffer::new(),
                }));
            }
            let Acc::Str(s) = acc else { unreachable!() };
            s.bytes.extend_from_slice(v.as_bytes());
            s.offsets.push(s.bytes.len() as i64);
            Ok(())
        })
    }

    fn begin_list(&mut self, stats: &mut Stats) -> Result {
        if self.active() {
            return self.route("begin_list", |c| c.begin_list(stats));
        }
        self.start(Kind::List, stats, |acc, _| {
            match acc {
                Acc::List(l) => l.open = true,
                _ => {
                    *acc = Acc::List(Box::new(ListAcc {
                        offsets: offsets_start(),
                        content: Acc::Unknown { nulls: 0 },
                        open: true,
                    }))
                }
            }
            Ok(())
        })
    }

    fn end_list(&mut self) -> Result {
        match self {
            Acc::List(l) if l.open && !l.content.active() => {
                l.offsets.push(l.content.len() as i64);
                l.open = false;
                Ok(())
            }
            _ if self.active() => self.route("end_list", Acc::end_list),
            _ => Err(BuilderError::FillState {
                expected: EXPECT_VALUE,
                got: "end_list",
            }),
        }
    }

    fn begin_record(&mut self, stats: &mut Stats) -> Result {
        if self.active() {
            return self.route("begin_record", |c| c.begin_record(stats));
        }
        self.start(Kind::Record, stats, |acc, _| {
            if !matches!(acc, Acc::Record(_)) {
                *acc = Acc::Record(Box::new(RecordAcc {
                    fields: Vec::new(),
                    length: 0,
                    open: false,
                    current: None,
                }));
            }
            let Acc::Record(r) = acc else { unreachable!() };
            r.open = true;
            r.current = None;
            for f in &mut r.fields {
                f.filled = false;
            }
            Ok(())
        })
    }

    fn field(&mut self, name: &str) -> Result {
        match self {
            Acc::Record(r) if r.open => match r.current {
                Some(k) if r.fields[k].content.active() => r.fields[k].content.field(name),
                Some(_) => Err(BuilderError::FillState {
                    expected: EXPECT_FIELD_VALUE,
                    got: "field",
                }),
                None => {
                    let k = match r.fields.iter().position(|f| f.name == name) {
                        Some(k) if r.fields[k].filled => {
                            return Err(BuilderError::DuplicateField(name.to_owned()))
                        }
                        Some(k) => k,
                        None => {
                            // earlier records lacked this field
                            r.fields.push(FieldAcc {
                                name: name.to_owned(),
                                content: Acc::Unknown { nulls: r.length },
                                filled: false,
                            });
                            r.fields.len() - 1
                        }
                    };
                    r.current = Some(k);
                    Ok(())
                }
            },
            Acc::List(l) if l.open && !l.content.active() => Err(BuilderError::FillState {
                expected: EXPECT_ITEM,
                got: "field",
            }),
            _ if self.active() => self.route("field", |c| c.field(name)),
            _ => Err(BuilderError::FillState {
                expected: EXPECT_VALUE,
                got: "field",
            }),
        }
    }

    fn end_record(&mut self) -> Result {
        match self {
            Acc::Record(r) if r.open => match r.current {
                Some(k) if r.fields[k].content.active() => {
                    r.fields[k].content.end_record()?;
                    if !r.fields[k].content.active() {
                        r.fields[k].filled = true;
                        r.current = None;
                    }
                    Ok(())
                }
                Some(_) => Err(BuilderError::FillState {
                    expected: EXPECT_FIELD_VALUE,
                    got: "end_record",
                }),
                None => {
                    for f in &mut r.fields {
                        if !f.filled {
                            f.content.null()?;
                        }
                    }
                    r.length += 1;
                    r.open = false;
                    Ok(())
                }
            },
            Acc::List(l) if l.open && !l.content.active() => Err(BuilderError::FillState {
                expected: EXPECT_ITEM,
                got: "end_record",
            }),
            _ if self.active() => self.route("end_record", Acc::end_record),
            _ => Err(BuilderError::FillState {
                expected: EXPECT_VALUE,
                got: "end_record",
            }),
        }
    }

    fn snapshot(&self) -> Layout {
        match self {
            Acc::Unknown { nulls: 0 } => Layout::empty(),
            Acc::Unknown { nulls } => Layout::indexed_option(missing(*nulls), Layout::empty()),
            Acc::Bool(b) => Layout::numeric(b.snapshot()),
            Acc::Int(b) => Layout::numeric(b.snapshot()),
            Acc::Float(b) => Layout::numeric(b.snapshot()),
            Acc::Str(s) => Layout::list_offset(s.offsets.snapshot(), Layout::numeric(s.bytes.snapshot()))
                .with_parameters(Parameters::string()),
            Acc::List(l) => Layout::list_offset(l.offsets.snapshot(), l.content.snapshot()),
            Acc::Record(r) => Layout::record(
                r.fields
                    .iter()
                    .map(|f| (f.name.clone(), f.content.snapshot()))
                    .collect(),
                r.length,
            ),
            Acc::Option(o) => Layout::indexed_option(o.index.snapshot(), o.content.snapshot()),
            Acc::Union(u) => Layout::union(
                u.tags.snapshot(),
                u.index.snapshot(),
                u.contents.iter().map(Acc::snapshot).collect(),
            ),
        }
    }
}

/// Appendable array that discovers its type while being filled.
pub struct Builder {
    root: Acc,
    stats: Stats,
    completed: usize,
}

impl Default for Builder {
    fn default() -> Self {
        Self::new()
    }
}

impl Builder {
    pub fn new() -> Self {
        Builder {
            root: Acc::Unknown { nulls: 0 },
            stats: Stats::default(),
            completed: 0,
        }
    }

    fn after(&mut self, result: Result) -> Result {
        if result.is_ok() && !self.root.active() {
            self.completed = self.root.len();
        }
        result
    }

    pub fn null(&mut self) -> Result {
        let r = self.root.null();
        self.after(r)
    }

    pub fn boolean(&mut self, v: bool) -> Result {
        let r = self.root.boolean(v, &mut self.stats);
        self.after(r)
    }

    pub fn integer(&mut self, v: i64) -> Result {
        let r = self.root.integer(v, &mut self.stats);
        self.after(r)
    }

    pub fn real(&mut self, v: f64) -> Result {
        let r = self.root.real(v, &mut self.stats);
        self.after(r)
    }

    /// Appends a string (a string-flagged list of UTF-8 bytes).
    pub fn string(&mut self, v: &str) -> Result {
        let r = self.root.string(v, &mut self.stats);
        self.after(r)
    }

    pub fn begin_list(&mut self) -> Result {
        let r = self.root.begin_list(&mut self.stats);
        self.after(r)
    }

    pub fn end_list(&mut self) -> Result {
        let r = self.root.end_list();
        self.after(r)
    }

    pub fn begin_record(&mut self) -> Result {
        let r = self.root.begin_record(&mut self.stats);
        self.after(r)
    }

    /// Declares the field the next value belongs to.
    pub fn field(&mut self, name: &str) -> Result {
        let r = self.root.field(name);
        self.after(r)
    }

    pub fn end_record(&mut self) -> Result {
        let r = self.root.end_record();
        self.after(r)
    }

    /// Number of completed top-level entries.
    pub fn length(&self) -> usize {
        self.completed
    }

    /// True when no list or record is open.
    pub fn is_balanced(&self) -> bool {
        !self.root.active()
    }

    /// Number of integer-to-float conversions performed so far.
    pub fn promotions(&self) -> u64 {
        self.stats.promotions
    }

    /// Immutable layout of everything filled so far. Buffers are shared with
    /// the builder, which stays usable; later fills never alter a snapshot.
    pub fn snapshot(&self) -> Result<Layout> {
        if self.root.active() {
            return Err(BuilderError::FillState {
                expected: "end_list or end_record",
                got: "snapshot",
            });
        }
        Ok(self.root.snapshot())
    }

    /// Drives the fill events of one nested value.
    pub fn fill_value(&mut self, value: &Value) -> Result {
        match value {
            Value::Null => self.null(),
            Value::Bool(b) => self.boolean(*b),
            Value::Int(i) => self.integer(*i),
            Value::Float(f) => self.real(*f),
            Value::Str(s) => self.string(s),
            Value::List(items) => {
                self.begin_list()?;
                for item in items {
                    self.fill_value(item)?;
                }
                self.end_list()
            }
            Value::Record(fields) => {
                self.begin_record()?;
                for (name, item) in fields {
                    self.field(name)?;
                    self.fill_value(item)?;
                }
                self.end_record()
            }
        }
    }
}

/// Converts a list of nested values to a layout.
pub fn from_values(values: &Value) -> Result<Layout> {
    let Value::List(items) = values else {
        return Err(BuilderError::UnsupportedValueKind(
            "the top-level value must be a list".into(),
        ));
    };
    let mut builder = Builder::new();
    for item in items {
        builder.fill_value(item)?;
    }
    builder.snapshot()
}
