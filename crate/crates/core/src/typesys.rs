//! Logical types of layouts and their DataShape-style rendering, e.g.
//! `3 * var * {"x": int64, "y": var * float64}`.

use std::fmt;

use crate::buffer::DType;
use crate::layout::{Layout, DISPLAY_KEY};
use crate::value::write_json_string;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimitiveType {
    Bool,
    Int8,
    UInt8,
    Int64,
    Float64,
}

impl PrimitiveType {
    pub fn name(self) -> &'static str {
        match self {
            PrimitiveType::Bool => "bool",
            PrimitiveType::Int8 => "int8",
            PrimitiveType::UInt8 => "uint8",
            PrimitiveType::Int64 => "int64",
            PrimitiveType::Float64 => "float64",
        }
    }
}

impl From<DType> for PrimitiveType {
    fn from(dtype: DType) -> Self {
        match dtype {
            DType::Bool => PrimitiveType::Bool,
            DType::Int8 => PrimitiveType::Int8,
            DType::UInt8 => PrimitiveType::UInt8,
            DType::Int64 => PrimitiveType::Int64,
            DType::Float64 => PrimitiveType::Float64,
        }
    }
}

/// The type of one entry of an array (the outer length is not part of it).
///
/// Build unions and options through [`ArrayType::union`] and
/// [`ArrayType::option`], which keep them canonical: unions are flat,
/// duplicate-free and have at least two members; options never nest.
#[derive(Clone, Debug, PartialEq)]
pub enum ArrayType {
    Primitive(PrimitiveType),
    VarList(Box<ArrayType>),
    Record {
        fields: Vec<(String, ArrayType)>,
        /// Replaces the field listing when rendered (`__str__` parameter).
        display: Option<String>,
    },
    Union(Vec<ArrayType>),
    Option(Box<ArrayType>),
    Unknown,
    String,
}

impl ArrayType {
    pub fn var(item: ArrayType) -> ArrayType {
        ArrayType::VarList(Box::new(item))
    }

    pub fn record<S: Into<String>>(fields: Vec<(S, ArrayType)>) -> ArrayType {
        ArrayType::Record {
            fields: fields.into_iter().map(|(n, t)| (n.into(), t)).collect(),
            display: None,
        }
    }

    pub fn option(item: ArrayType) -> ArrayType {
        match item {
            ArrayType::Option(_) => item,
            other => ArrayType::Option(Box::new(other)),
        }
    }

    pub fn union(members: Vec<ArrayType>) -> ArrayType {
        let mut flat: Vec<ArrayType> = Vec::with_capacity(members.len());
        for member in members {
            let parts = match member {
                ArrayType::Union(inner) => inner,
                other => vec![other],
            };
            for part in parts {
                if !flat.contains(&part) {
                    flat.push(part);
                }
            }
        }
        match flat.len() {
            0 => ArrayType::Unknown,
            1 => flat.pop().expect("one member"),
            _ => ArrayType::Union(flat),
        }
    }

    /// The type of field `name` of the shallowest record, wrapped in the same
    /// outer list and option dimensions.
    pub fn project_field(&self, name: &str) -> Option<ArrayType> {
        match self {
            ArrayType::Record { fields, .. } => {
                fields.iter().find(|(n, _)| n == name).map(|(_, t)| t.clone())
            }
            ArrayType::VarList(item) => item.project_field(name).map(ArrayType::var),
            ArrayType::Option(item) => item.project_field(name).map(ArrayType::option),
            ArrayType::Union(members) => members
                .iter()
                .map(|m| m.project_field(name))
                .collect::<Option<Vec<_>>>()
                .map(ArrayType::union),
            _ => None,
        }
    }

    /// Rendering with an outer length, e.g. `2 * var * float64`.
    pub fn render(&self, length: usize) -> String {
        format!("{length} * {self}")
    }
}

impl fmt::Display for ArrayType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrayType::Primitive(p) => f.write_str(p.name()),
            ArrayType::VarList(item) => write!(f, "var * {item}"),
            ArrayType::Record {
                display: Some(name),
                ..
            } => f.write_str(name),
            ArrayType::Record { fields, .. } => {
                f.write_str("{")?;
                for (i, (name, t)) in fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    let mut quoted = String::new();
                    write_json_string(name, &mut quoted);
                    write!(f, "{quoted}: {t}")?;
                }
                f.write_str("}")
            }
            ArrayType::Union(members) => {
                f.write_str("union[")?;
                for (i, t) in members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("]")
            }
            ArrayType::Option(item) => write!(f, "?{item}"),
            ArrayType::Unknown => f.write_str("unknown"),
            ArrayType::String => f.write_str("string"),
        }
    }
}

/// The logical type of one entry of `layout`.
pub fn type_of(layout: &Layout) -> ArrayType {
    match layout {
        Layout::Numeric(n) => ArrayType::Primitive(n.data().dtype().into()),
        Layout::ListOffset(l) if l.is_string() => ArrayType::String,
        Layout::ListOffset(l) => ArrayType::var(type_of(l.content())),
        Layout::Record(r) => ArrayType::Record {
            fields: r
                .fields()
                .iter()
                .map(|(name, content)| (name.clone(), type_of(content)))
                .collect(),
            display: r.parameters().get_str(DISPLAY_KEY).map(str::to_owned),
        },
        Layout::Union(u) => ArrayType::union(u.contents().iter().map(type_of).collect()),
        Layout::IndexedOption(o) => ArrayType::option(type_of(o.content())),
        Layout::Empty(_) => ArrayType::Unknown,
    }
}

/// `type_of` rendered with the layout's length.
pub fn render(layout: &Layout) -> String {
    type_of(layout).render(layout.length())
}

impl Layout {
    pub fn array_type(&self) -> ArrayType {
        type_of(self)
    }

    /// The rendered type, e.g. `3 * var * {"x": int64}`.
    pub fn type_string(&self) -> String {
        render(self)
    }
}
