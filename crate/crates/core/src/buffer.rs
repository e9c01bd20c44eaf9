//! Flat, immutable, reference-counted buffers of fixed-width elements.
//!
//! A [`Buffer`] is a read-only view onto a prefix of shared storage. Cloning a
//! buffer, taking a prefix of it, or placing it in a new layout node never
//! copies the elements. [`GrowableBuffer`] is the builder-side counterpart: it
//! appends in place until a snapshot shares its storage, after which the next
//! append copies (the snapshot keeps the old storage untouched).

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

/// Initial capacity of a [`GrowableBuffer`]; growth is by doubling after that.
pub const INITIAL_CAPACITY: usize = 1024;

/// The element types a buffer may hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DType {
    Bool,
    Int8,
    UInt8,
    Int64,
    Float64,
}

impl DType {
    /// Width of one element in bytes.
    pub fn width(self) -> usize {
        match self {
            DType::Bool | DType::Int8 | DType::UInt8 => 1,
            DType::Int64 | DType::Float64 => 8,
        }
    }

    /// Short name used in on-disk manifests.
    pub fn name(self) -> &'static str {
        match self {
            DType::Bool => "bool8",
            DType::Int8 => "i8",
            DType::UInt8 => "u8",
            DType::Int64 => "i64",
            DType::Float64 => "f64",
        }
    }

    pub fn from_name(name: &str) -> Option<DType> {
        Some(match name {
            "bool8" => DType::Bool,
            "i8" => DType::Int8,
            "u8" => DType::UInt8,
            "i64" => DType::Int64,
            "f64" => DType::Float64,
            _ => return None,
        })
    }
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fixed-width element type with a little-endian byte image.
pub trait Element: Copy + Default + PartialEq + fmt::Debug + Send + Sync + 'static {
    const DTYPE: DType;
    const WIDTH: usize;

    fn write_le(self, out: &mut [u8]);

    /// `None` when the bytes are not a valid image (only possible for `bool`).
    fn read_le(bytes: &[u8]) -> Option<Self>;
}

impl Element for bool {
    const DTYPE: DType = DType::Bool;
    const WIDTH: usize = 1;

    fn write_le(self, out: &mut [u8]) {
        out[0] = self as u8;
    }

    fn read_le(bytes: &[u8]) -> Option<Self> {
        match bytes[0] {
            0 => Some(false),
            1 => Some(true),
            _ => None,
        }
    }
}

macro_rules! impl_element {
    ($t:ty, $dtype:expr) => {
        impl Element for $t {
            const DTYPE: DType = $dtype;
            const WIDTH: usize = std::mem::size_of::<$t>();

            fn write_le(self, out: &mut [u8]) {
                out[..Self::WIDTH].copy_from_slice(&self.to_le_bytes());
            }

            fn read_le(bytes: &[u8]) -> Option<Self> {
                let mut raw = [0u8; std::mem::size_of::<$t>()];
                raw.copy_from_slice(&bytes[..Self::WIDTH]);
                Some(<$t>::from_le_bytes(raw))
            }
        }
    };
}

impl_element!(i8, DType::Int8);
impl_element!(u8, DType::UInt8);
impl_element!(i64, DType::Int64);
impl_element!(f64, DType::Float64);

/// Immutable view of the first `len` elements of shared storage.
#[derive(Clone)]
pub struct Buffer<T> {
    data: Arc<Vec<T>>,
    len: usize,
}

impl<T: Element> Buffer<T> {
    pub fn from_vec(values: Vec<T>) -> Self {
        let len = values.len();
        Buffer {
            data: Arc::new(values),
            len,
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data[..self.len]
    }

    pub fn dtype(&self) -> DType {
        T::DTYPE
    }

    /// The first `len` elements, sharing storage with `self`.
    ///
    /// Panics if `len` exceeds the current length.
    pub fn prefix(&self, len: usize) -> Self {
        assert!(len <= self.len, "prefix {len} longer than buffer {}", self.len);
        Buffer {
            data: Arc::clone(&self.data),
            len,
        }
    }

    /// True when both views point at the same storage allocation.
    pub fn ptr_eq(&self, other: &Buffer<T>) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
    }
}

impl<T: Element> Deref for Buffer<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        self.as_slice()
    }
}

impl<T: Element> From<Vec<T>> for Buffer<T> {
    fn from(values: Vec<T>) -> Self {
        Buffer::from_vec(values)
    }
}

impl<T: Element> PartialEq for Buffer<T> {
    fn eq(&self, other: &Self) -> bool {
        self.as_slice() == other.as_slice()
    }
}

impl<T: Element> fmt::Debug for Buffer<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

/// Append-only accumulator that snapshots into [`Buffer`]s without copying.
#[derive(Clone)]
pub struct GrowableBuffer<T> {
    data: Arc<Vec<T>>,
}

impl<T: Element> Default for GrowableBuffer<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Element> GrowableBuffer<T> {
    pub fn new() -> Self {
        GrowableBuffer {
            data: Arc::new(Vec::with_capacity(INITIAL_CAPACITY)),
        }
    }

    /// Adopts an existing vector (e.g. the output of a conversion kernel).
    pub fn from_vec(values: Vec<T>) -> Self {
        GrowableBuffer {
            data: Arc::new(values),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn push(&mut self, value: T) {
        storage_mut(&mut self.data).push(value);
    }

    pub fn extend_from_slice(&mut self, values: &[T]) {
        storage_mut(&mut self.data).extend_from_slice(values);
    }

    /// Last element, if any.
    pub fn last(&self) -> Option<T> {
        self.data.last().copied()
    }

    pub fn snapshot(&self) -> Buffer<T> {
        Buffer {
            data: Arc::clone(&self.data),
            len: self.data.len(),
        }
    }
}

// Copy-on-write: appends after a snapshot must not be visible through it.
fn storage_mut<T: Clone>(data: &mut Arc<Vec<T>>) -> &mut Vec<T> {
    if Arc::get_mut(data).is_none() {
        let mut copy = Vec::with_capacity((data.len() * 2).max(INITIAL_CAPACITY));
        copy.extend_from_slice(data);
        *data = Arc::new(copy);
    }
    Arc::get_mut(data).expect("unique after copy")
}

impl<T: Element> fmt::Debug for GrowableBuffer<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter()).finish()
    }
}
