//! Elementwise functions applied through nested structure.
//!
//! Only numeric leaves are touched; list offsets, record fields, union tags,
//! and option indexes pass through unchanged (shared, not copied).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::buffer::Buffer;
use crate::kernels::{self, BinaryOp, KernelError, UnaryOp};
use crate::layout::{Layout, NumericData, Parameters};
use crate::value::write_json_string;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementwiseOp {
    Unary(UnaryOp),
    Binary(BinaryOp),
}

impl ElementwiseOp {
    pub const NAMES: [&'static str; 5] = ["sin", "negate", "abs", "add", "multiply"];

    pub fn name(self) -> &'static str {
        match self {
            ElementwiseOp::Unary(op) => op.name(),
            ElementwiseOp::Binary(op) => op.name(),
        }
    }

    pub fn arity(self) -> usize {
        match self {
            ElementwiseOp::Unary(_) => 1,
            ElementwiseOp::Binary(_) => 2,
        }
    }
}

impl FromStr for ElementwiseOp {
    type Err = UfuncError;

    fn from_str(name: &str) -> Result<Self> {
        match name {
            "sin" => Ok(ElementwiseOp::Unary(UnaryOp::Sin)),
            "negate" => Ok(ElementwiseOp::Unary(UnaryOp::Negate)),
            "abs" => Ok(ElementwiseOp::Unary(UnaryOp::Abs)),
            "add" => Ok(ElementwiseOp::Binary(BinaryOp::Add)),
            "multiply" => Ok(ElementwiseOp::Binary(BinaryOp::Multiply)),
            other => Err(UfuncError::UnknownOp(other.to_owned())),
        }
    }
}

impl fmt::Display for ElementwiseOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Right-hand operand broadcast to every leaf element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Int(i64),
    Float(f64),
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum UfuncError {
    #[error("non-numeric leaf ({kind}) at {path}")]
    NonNumericLeaf { path: String, kind: &'static str },
    #[error("structure mismatch at {path}: {message}")]
    StructureMismatch { path: String, message: String },
    #[error("unknown elementwise function {0:?}")]
    UnknownOp(String),
    #[error("internal kernel failure: {0}")]
    Kernel(#[from] KernelError),
}

type Result<T> = std::result::Result<T, UfuncError>;

fn field_path(path: &str, name: &str) -> String {
    let mut quoted = String::new();
    write_json_string(name, &mut quoted);
    format!("{path}.field({quoted})")
}

fn leaf_params(before: &NumericData, after: &NumericData, params: &Parameters) -> Parameters {
    if before.dtype() == after.dtype() {
        params.clone()
    } else {
        Parameters::new()
    }
}

fn with_params(layout: Layout, params: &Parameters) -> Layout {
    if params.is_empty() {
        layout
    } else {
        layout.with_parameters(params.clone())
    }
}

fn as_f64(data: &NumericData) -> Result<Vec<f64>> {
    let mut out = vec![0.0; data.len()];
    match data {
        NumericData::Int8(b) => kernels::map_unary(UnaryOp::Identity, b, &mut out)?,
        NumericData::UInt8(b) => kernels::map_unary(UnaryOp::Identity, b, &mut out)?,
        NumericData::Int64(b) => kernels::int64_to_float64(b, &mut out)?,
        NumericData::Float64(b) => out.copy_from_slice(b),
        NumericData::Bool(_) => unreachable!("booleans are rejected before conversion"),
    }
    Ok(out)
}

/// Applies a one-argument function to every numeric leaf. Integer leaves
/// become `float64` leaves.
pub fn map_unary(op: UnaryOp, a: &Layout) -> Result<Layout> {
    unary(op, a, "root")
}

fn unary(op: UnaryOp, a: &Layout, path: &str) -> Result<Layout> {
    Ok(match a {
        Layout::Numeric(n) => {
            let data = n.data();
            let mut out = vec![0.0; data.len()];
            match data {
                NumericData::Bool(_) => {
                    return Err(UfuncError::NonNumericLeaf {
                        path: path.to_owned(),
                        kind: "bool",
                    })
                }
                NumericData::Int8(b) => kernels::map_unary(op, b, &mut out)?,
                NumericData::UInt8(b) => kernels::map_unary(op, b, &mut out)?,
                NumericData::Int64(b) => kernels::map_unary(op, b, &mut out)?,
                NumericData::Float64(b) => kernels::map_unary(op, b, &mut out)?,
            }
            let out = NumericData::from(out);
            let params = leaf_params(data, &out, n.parameters());
            with_params(Layout::numeric(out), &params)
        }
        Layout::ListOffset(l) if l.is_string() => {
            return Err(UfuncError::NonNumericLeaf {
                path: path.to_owned(),
                kind: "string",
            })
        }
        Layout::ListOffset(l) => with_params(
            Layout::list_offset(l.offsets().clone(), unary(op, l.content(), &format!("{path}.content"))?),
            l.parameters(),
        ),
        Layout::Record(r) => {
            let fields = r
                .fields()
                .iter()
                .map(|(name, content)| {
                    Ok((name.clone(), unary(op, &content.prefix(r.length()), &field_path(path, name))?))
                })
                .collect::<Result<Vec<_>>>()?;
            with_params(Layout::record(fields, r.length()), r.parameters())
        }
        Layout::Union(u) => {
            let contents = u
                .contents()
                .iter()
                .enumerate()
                .map(|(k, c)| unary(op, c, &format!("{path}.contents[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            with_params(Layout::union(u.tags().clone(), u.index().clone(), contents), u.parameters())
        }
        Layout::IndexedOption(o) => with_params(
            Layout::indexed_option(o.index().clone(), unary(op, o.content(), &format!("{path}.content"))?),
            o.parameters(),
        ),
        Layout::Empty(_) => a.clone(),
    })
}

/// Combines every numeric leaf with a scalar. Integer leaves with an integer
/// scalar stay `int64` (wrapping); anything involving a float is `float64`.
pub fn map_binary_scalar(op: BinaryOp, a: &Layout, b: Scalar) -> Result<Layout> {
    leaves(a, "root", &mut |data, path| {
        Ok(match (data, b) {
            (NumericData::Bool(_), _) => {
                return Err(UfuncError::NonNumericLeaf {
                    path: path.to_owned(),
                    kind: "bool",
                })
            }
            (NumericData::Int64(x), Scalar::Int(s)) => {
                let mut out = vec![0i64; x.len()];
                kernels::map_binary_scalar(op, x, s, &mut out)?;
                NumericData::from(out)
            }
            (data, s) => {
                let x = as_f64(data)?;
                let s = match s {
                    Scalar::Int(i) => i as f64,
                    Scalar::Float(f) => f,
                };
                let mut out = vec![0.0; x.len()];
                kernels::map_binary_scalar(op, &x, s, &mut out)?;
                NumericData::from(out)
            }
        })
    })
}

/// A layout with the structure of `a` whose numeric leaves all hold `value`.
pub fn full_like(a: &Layout, value: Scalar) -> Result<Layout> {
    leaves(a, "root", &mut |data, _| {
        Ok(match value {
            Scalar::Int(i) => {
                let mut out = vec![0i64; data.len()];
                kernels::fill(i, &mut out)?;
                NumericData::from(out)
            }
            Scalar::Float(f) => {
                let mut out = vec![0.0; data.len()];
                kernels::fill(f, &mut out)?;
                NumericData::from(out)
            }
        })
    })
}

/// Rebuilds `a` with every numeric leaf replaced by `f(leaf)`.
fn leaves(
    a: &Layout,
    path: &str,
    f: &mut dyn FnMut(&NumericData, &str) -> Result<NumericData>,
) -> Result<Layout> {
    Ok(match a {
        Layout::Numeric(n) => {
            let out = f(n.data(), path)?;
            let params = leaf_params(n.data(), &out, n.parameters());
            with_params(Layout::numeric(out), &params)
        }
        Layout::ListOffset(l) if l.is_string() => {
            return Err(UfuncError::NonNumericLeaf {
                path: path.to_owned(),
                kind: "string",
            })
        }
        Layout::ListOffset(l) => with_params(
            Layout::list_offset(l.offsets().clone(), leaves(l.content(), &format!("{path}.content"), f)?),
            l.parameters(),
        ),
        Layout::Record(r) => {
            let mut fields = Vec::with_capacity(r.fields().len());
            for (name, content) in r.fields() {
                fields.push((name.clone(), leaves(&content.prefix(r.length()), &field_path(path, name), f)?));
            }
            with_params(Layout::record(fields, r.length()), r.parameters())
        }
        Layout::Union(u) => {
            let mut contents = Vec::with_capacity(u.contents().len());
            for (k, c) in u.contents().iter().enumerate() {
                contents.push(leaves(c, &format!("{path}.contents[{k}]"), f)?);
            }
            with_params(Layout::union(u.tags().clone(), u.index().clone(), contents), u.parameters())
        }
        Layout::IndexedOption(o) => with_params(
            Layout::indexed_option(o.index().clone(), leaves(o.content(), &format!("{path}.content"), f)?),
            o.parameters(),
        ),
        Layout::Empty(_) => a.clone(),
    })
}

/// Combines two layouts of identical structure elementwise.
pub fn map_binary(op: BinaryOp, a: &Layout, b: &Layout) -> Result<Layout> {
    binary(op, a, b, "root")
}

fn mismatch(path: &str, message: impl Into<String>) -> UfuncError {
    UfuncError::StructureMismatch {
        path: path.to_owned(),
        message: message.into(),
    }
}

fn binary(op: BinaryOp, a: &Layout, b: &Layout, path: &str) -> Result<Layout> {
    if a.length() != b.length() {
        return Err(mismatch(
            path,
            format!("lengths differ ({} and {})", a.length(), b.length()),
        ));
    }
    Ok(match (a, b) {
        (Layout::Numeric(x), Layout::Numeric(y)) => {
            let (dx, dy) = (x.data(), y.data());
            if matches!(dx, NumericData::Bool(_)) || matches!(dy, NumericData::Bool(_)) {
                return Err(UfuncError::NonNumericLeaf {
                    path: path.to_owned(),
                    kind: "bool",
                });
            }
            let out = match (dx, dy) {
                (NumericData::Int64(l), NumericData::Int64(r)) => {
                    let mut out = vec![0i64; l.len()];
                    kernels::map_binary(op, l, r, &mut out)?;
                    NumericData::from(out)
                }
                _ => {
                    let (l, r) = (as_f64(dx)?, as_f64(dy)?);
                    let mut out = vec![0.0; l.len()];
                    kernels::map_binary(op, &l, &r, &mut out)?;
                    NumericData::from(out)
                }
            };
            let params = leaf_params(dx, &out, x.parameters());
            with_params(Layout::numeric(out), &params)
        }
        (Layout::ListOffset(l), _) | (_, Layout::ListOffset(l)) if l.is_string() => {
            return Err(UfuncError::NonNumericLeaf {
                path: path.to_owned(),
                kind: "string",
            })
        }
        (Layout::ListOffset(x), Layout::ListOffset(y)) => {
            kernels::compare_equal(x.offsets(), y.offsets()).map_err(|e| {
                mismatch(path, format!("list offsets differ at position {}", e.position))
            })?;
            let stop = x.offsets()[x.offsets().len() - 1] as usize;
            let content = binary(
                op,
                &x.content().prefix(stop),
                &y.content().prefix(stop),
                &format!("{path}.content"),
            )?;
            with_params(Layout::list_offset(x.offsets().clone(), content), x.parameters())
        }
        (Layout::Record(x), Layout::Record(y)) => {
            if x.field_names() != y.field_names() {
                return Err(mismatch(
                    path,
                    format!("fields differ ({:?} and {:?})", x.field_names(), y.field_names()),
                ));
            }
            let mut fields = Vec::with_capacity(x.fields().len());
            for ((name, l), (_, r)) in x.fields().iter().zip(y.fields()) {
                let len = x.length();
                fields.push((name.clone(), binary(op, &l.prefix(len), &r.prefix(len), &field_path(path, name))?));
            }
            with_params(Layout::record(fields, x.length()), x.parameters())
        }
        (Layout::IndexedOption(x), Layout::IndexedOption(y)) => {
            let (xi, yi) = (x.index().as_slice(), y.index().as_slice());
            kernels::missing_equal(xi, yi)
                .map_err(|e| mismatch(path, format!("missing values differ at position {}", e.position)))?;
            let count = kernels::option_nonnull_count(xi);
            let mut xcarry = vec![0i64; count];
            let mut ycarry = vec![0i64; count];
            let mut outindex = vec![0i64; xi.len()];
            kernels::option_nonnull(xi, &mut xcarry, &mut outindex)?;
            kernels::option_nonnull(yi, &mut ycarry, &mut outindex)?;
            let content = binary(
                op,
                &x.content().take(&xcarry)?,
                &y.content().take(&ycarry)?,
                &format!("{path}.content"),
            )?;
            with_params(Layout::indexed_option(outindex, content), x.parameters())
        }
        (Layout::Union(x), Layout::Union(y)) => {
            if x.contents().len() != y.contents().len() {
                return Err(mismatch(path, "unions have different numbers of variants"));
            }
            let tags = x.tags().as_slice();
            kernels::compare_equal(tags, y.tags())
                .map_err(|e| mismatch(path, format!("union tags differ at position {}", e.position)))?;
            let mut contents = Vec::with_capacity(x.contents().len());
            for k in 0..x.contents().len() {
                let count = kernels::union_select_count(tags, k as i8);
                let mut xcarry = vec![0i64; count];
                let mut ycarry = vec![0i64; count];
                kernels::union_select(tags, x.index(), k as i8, &mut xcarry)?;
                kernels::union_select(tags, y.index(), k as i8, &mut ycarry)?;
                contents.push(binary(
                    op,
                    &x.contents()[k].take(&xcarry)?,
                    &y.contents()[k].take(&ycarry)?,
                    &format!("{path}.contents[{k}]"),
                )?);
            }
            let mut local = vec![0i64; tags.len()];
            kernels::union_local_index(tags, &mut local)?;
            with_params(
                Layout::union(x.tags().clone(), Buffer::from_vec(local), contents),
                x.parameters(),
            )
        }
        (Layout::Empty(_), Layout::Empty(_)) => a.clone(),
        _ => return Err(mismatch(path, format!("node kinds differ ({} and {})", a.kind(), b.kind()))),
    })
}
