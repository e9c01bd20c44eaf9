use std::io::Read;

use super::reader::{Event, Parser};
use super::{JsonError, JsonOptions};
use crate::builder::{Builder, BuilderError};
use crate::layout::Layout;

/// Converts a top-level JSON array to a layout with default options.
pub fn from_json(text: &[u8]) -> Result<Layout, JsonError> {
    from_json_with(text, JsonOptions::default())
}

pub fn from_json_with(text: &[u8], options: JsonOptions) -> Result<Layout, JsonError> {
    from_json_reader(text, options)
}

/// Converts a JSON array (or NDJSON lines) read incrementally from `reader`.
pub fn from_json_reader<R: Read>(reader: R, options: JsonOptions) -> Result<Layout, JsonError> {
    let mut parser = Parser::new(reader, options.max_depth, options.ndjson);
    let mut builder = Builder::new();
    // entries of the top-level array live at depth 1; NDJSON lines at 0
    let entry_depth = if options.ndjson { 0 } else { 1 };

    if !options.ndjson {
        match parser.next_event()? {
            Some(Event::StartArray) => {}
            _ => {
                return Err(JsonError::Parse {
                    offset: parser.token_offset(),
                    message: "the top-level value must be an array".into(),
                })
            }
        }
    }

    loop {
        let depth_before = parser.depth();
        let event = match parser.next_event()? {
            Some(event) => event,
            None => break,
        };
        if !options.ndjson && depth_before == entry_depth && event == Event::EndArray {
            // closing bracket of the top-level array; only whitespace may follow
            if parser.next_event()?.is_some() {
                unreachable!("the parser rejects trailing values");
            }
            break;
        }
        let result = match event {
            Event::StartArray => builder.begin_list(),
            Event::EndArray => builder.end_list(),
            Event::StartObject => builder.begin_record(),
            Event::EndObject => builder.end_record(),
            Event::Key(k) => builder.field(k),
            Event::Str(s) => builder.string(s),
            Event::Int(i) => builder.integer(i),
            Event::Float(f) => builder.real(f),
            Event::Bool(b) => builder.boolean(b),
            Event::Null => builder.null(),
        };
        if let Err(e) = result {
            let offset = parser.token_offset();
            return Err(match e {
                BuilderError::DuplicateField(key) => JsonError::DuplicateKey { offset, key },
                source => JsonError::Builder { offset, source },
            });
        }
    }
    builder.snapshot().map_err(|source| JsonError::Builder {
        offset: parser.offset(),
        source,
    })
}
