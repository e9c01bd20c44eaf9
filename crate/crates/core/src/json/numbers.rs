//! Fast path for nested lists of numbers of a known, uniform depth.
//!
//! The accumulators are fixed up front: one offsets buffer per inner list
//! level and one leaf buffer. Leaves are kept as `i64` until the first real
//! arrives and are then converted once, so the result equals what the general
//! path produces for the same text.

use std::io::Read;

use super::reader::{Event, Parser};
use super::{JsonError, DEFAULT_MAX_DEPTH};
use crate::kernels;
use crate::layout::Layout;

enum Leaves {
    Int(Vec<i64>),
    Float(Vec<f64>),
}

impl Leaves {
    fn len(&self) -> usize {
        match self {
            Leaves::Int(v) => v.len(),
            Leaves::Float(v) => v.len(),
        }
    }
}

/// `depth` counts the top-level array: depth 2 reads `[[1.0], [2.0, 3.0]]`.
pub fn from_json_numbers(text: &[u8], depth: usize) -> Result<Layout, JsonError> {
    from_json_numbers_reader(text, depth)
}

pub fn from_json_numbers_reader<R: Read>(reader: R, depth: usize) -> Result<Layout, JsonError> {
    assert!(depth >= 1, "depth counts the top-level array and must be positive");
    let mut parser = Parser::new(reader, depth.max(DEFAULT_MAX_DEPTH), false);
    // offsets[k] belongs to the lists at nesting level k + 2
    let mut offsets: Vec<Vec<i64>> = (1..depth).map(|_| vec![0i64]).collect();
    let mut leaves = Leaves::Int(Vec::new());
    let mut level = 0usize;

    let deviation = |parser: &Parser<R>, message: String| JsonError::StructureDeviation {
        offset: parser.token_offset(),
        message,
    };

    loop {
        let event = match parser.next_event()? {
            Some(event) => event,
            None => break,
        };
        match event {
            Event::StartArray => {
                level += 1;
                if level > depth {
                    return Err(deviation(&parser, format!("lists nested deeper than {depth}")));
                }
            }
            Event::EndArray => {
                if level >= 2 {
                    let children = if level == depth {
                        leaves.len()
                    } else {
                        offsets[level - 1].len() - 1
                    };
                    offsets[level - 2].push(children as i64);
                }
                level -= 1;
            }
            Event::Int(i) if level == depth => match &mut leaves {
                Leaves::Int(v) => v.push(i),
                Leaves::Float(v) => v.push(i as f64),
            },
            Event::Float(f) if level == depth => {
                if let Leaves::Int(ints) = &leaves {
                    let mut floats = vec![0.0; ints.len()];
                    kernels::int64_to_float64(ints, &mut floats).expect("output sized to input");
                    leaves = Leaves::Float(floats);
                }
                let Leaves::Float(v) = &mut leaves else { unreachable!() };
                v.push(f);
            }
            Event::Int(_) | Event::Float(_) => {
                return Err(deviation(&parser, format!("number at depth {level}, expected depth {depth}")));
            }
            other => {
                let kind = match other {
                    Event::StartObject | Event::EndObject | Event::Key(_) => "an object",
                    Event::Str(_) => "a string",
                    Event::Bool(_) => "a boolean",
                    _ => "null",
                };
                return Err(deviation(&parser, format!("found {kind} where a number or list was expected")));
            }
        }
    }
    if level != 0 {
        unreachable!("the parser only ends after a complete value");
    }

    // innermost first; a level without any elements has unknown content
    let mut content = if leaves.len() == 0 {
        Layout::empty()
    } else {
        match leaves {
            Leaves::Int(v) => Layout::numeric(v),
            Leaves::Float(v) => Layout::numeric(v),
        }
    };
    for level_offsets in offsets.into_iter().rev() {
        let total = *level_offsets.last().expect("starts with 0");
        if total == 0 {
            content = Layout::empty();
        }
        content = Layout::list_offset(level_offsets, content);
    }
    if content.length() == 0 {
        content = Layout::empty();
    }
    Ok(content)
}
