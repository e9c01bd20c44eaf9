use std::fmt::Write;

use crate::layout::{Layout, LayoutError, NumericData};
use crate::value::{write_float, write_json_string};

/// Location of a node, kept on the stack and rendered only for errors.
enum Segment<'a> {
    Root,
    Content,
    Field(&'a str),
    Variant(usize),
}

struct Path<'a> {
    parent: Option<&'a Path<'a>>,
    segment: Segment<'a>,
}

impl Path<'_> {
    fn render(&self) -> String {
        let mut out = match self.parent {
            Some(parent) => parent.render(),
            None => String::new(),
        };
        match self.segment {
            Segment::Root => out.push_str("root"),
            Segment::Content => out.push_str(".content"),
            Segment::Field(name) => {
                out.push_str(".field(");
                write_json_string(name, &mut out);
                out.push(')');
            }
            Segment::Variant(k) => {
                let _ = write!(out, ".contents[{k}]");
            }
        }
        out
    }

    fn child<'a>(&'a self, segment: Segment<'a>) -> Path<'a> {
        Path {
            parent: Some(self),
            segment,
        }
    }
}

/// Compact JSON for a layout: no insignificant whitespace, strings as JSON
/// strings, missing values as `null`, floats in shortest round-trip form
/// (non-finite floats as `null`), record fields in stored order.
pub fn to_json(layout: &Layout) -> Result<String, LayoutError> {
    let mut out = String::new();
    write_json(layout, &mut out)?;
    Ok(out)
}

pub fn write_json(layout: &Layout, out: &mut String) -> Result<(), LayoutError> {
    layout.validate()?;
    let root = Path {
        parent: None,
        segment: Segment::Root,
    };
    out.push('[');
    for i in 0..layout.length() {
        if i > 0 {
            out.push(',');
        }
        write_entry(layout, i, out, &root)?;
    }
    out.push(']');
    Ok(())
}

fn write_entry(layout: &Layout, i: usize, out: &mut String, path: &Path<'_>) -> Result<(), LayoutError> {
    match layout {
        Layout::Numeric(n) => match n.data() {
            NumericData::Bool(b) => out.push_str(if b[i] { "true" } else { "false" }),
            NumericData::Int8(b) => {
                let _ = write!(out, "{}", b[i]);
            }
            NumericData::UInt8(b) => {
                let _ = write!(out, "{}", b[i]);
            }
            NumericData::Int64(b) => {
                let _ = write!(out, "{}", b[i]);
            }
            NumericData::Float64(b) => write_float(b[i], out),
        },
        Layout::ListOffset(l) if l.is_string() => {
            let o = l.offsets();
            let Layout::Numeric(content) = l.content() else { unreachable!() };
            let NumericData::UInt8(bytes) = content.data() else { unreachable!() };
            let raw = &bytes[o[i] as usize..o[i + 1] as usize];
            let s = std::str::from_utf8(raw).map_err(|e| LayoutError::Encoding {
                path: format!("{}[{i}]", path.render()),
                message: e.to_string(),
            })?;
            write_json_string(s, out);
        }
        Layout::ListOffset(l) => {
            let o = l.offsets();
            let content_path = path.child(Segment::Content);
            out.push('[');
            for j in o[i] as usize..o[i + 1] as usize {
                if j > o[i] as usize {
                    out.push(',');
                }
                write_entry(l.content(), j, out, &content_path)?;
            }
            out.push(']');
        }
        Layout::Record(r) => {
            out.push('{');
            for (k, (name, content)) in r.fields().iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_json_string(name, out);
                out.push(':');
                write_entry(content, i, out, &path.child(Segment::Field(name)))?;
            }
            out.push('}');
        }
        Layout::Union(u) => {
            let tag = u.tags()[i] as usize;
            write_entry(&u.contents()[tag], u.index()[i] as usize, out, &path.child(Segment::Variant(tag)))?;
        }
        Layout::IndexedOption(o) => {
            let at = o.index()[i];
            if at < 0 {
                out.push_str("null");
            } else {
                write_entry(o.content(), at as usize, out, &path.child(Segment::Content))?;
            }
        }
        Layout::Empty(_) => unreachable!("an empty array has no entries"),
    }
    Ok(())
}
