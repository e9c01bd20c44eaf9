//! Jagged, nested columnar arrays.
//!
//! Arrays of arbitrary nested structure (variable-length lists, records,
//! tagged unions, missing values) are represented as immutable trees of
//! [`Layout`] nodes over flat buffers. All work that scales with the number of
//! elements is done by the flat-buffer [`kernels`]; the layout code only walks
//! the (small) type structure. The one exception is [`builder`], which turns
//! record-oriented data into columnar layouts while discovering its type.

pub mod buffer;
pub mod builder;
pub mod json;
pub mod kernels;
pub mod layout;
pub mod slicing;
pub mod storage;
pub mod typesys;
pub mod ufunc;
pub mod value;

pub use buffer::{Buffer, DType};
pub use builder::{from_values, Builder, BuilderError};
pub use slicing::{getitem, Item, Selector, SliceError};
pub use storage::StorageError;
pub use json::{from_json, from_json_numbers, to_json, JsonError, JsonOptions};
pub use layout::{Layout, LayoutError, NumericData, Parameters, StructureError};
pub use typesys::{type_of, ArrayType, PrimitiveType};
pub use value::Value;
