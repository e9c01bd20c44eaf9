//! Slice expressions in display syntax, e.g. `"y", [0, 2], :, 1:`.
//!
//! Terms are separated by top-level commas:
//! - a double-quoted JSON string selects a record field
//! - an integer selects one element
//! - `start:stop:step`, each part optional, selects a range
//! - `[i, j, ...]` or `[true, false, ...]` selects a flat index or mask
//! - `[[...], ...]` of integers or booleans selects jaggedly

use ragged::{Selector, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("syntax error at character {position}: {message}")]
pub struct ExprError {
    pub position: usize,
    pub message: String,
}

fn error<T>(position: usize, message: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError {
        position,
        message: message.into(),
    })
}

pub fn parse(expression: &str) -> Result<Vec<Selector>, ExprError> {
    let terms = split_terms(expression)?;
    if terms.len() == 1 && terms[0].1.trim().is_empty() {
        return Ok(Vec::new());
    }
    terms.into_iter().map(|(start, text)| parse_term(start, text)).collect()
}

/// Splits at commas outside brackets and strings; positions are in chars.
fn split_terms(expression: &str) -> Result<Vec<(usize, &str)>, ExprError> {
    let mut terms = Vec::new();
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    let mut term_start = (0usize, 0usize);
    let mut string_start = 0;
    for (position, (byte, c)) in expression.char_indices().enumerate() {
        if in_string {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => {
                in_string = true;
                string_start = position;
            }
            '[' => depth += 1,
            ']' => {
                if depth == 0 {
                    return error(position, "unmatched ']'");
                }
                depth -= 1;
            }
            ',' if depth == 0 => {
                terms.push((term_start.0, &expression[term_start.1..byte]));
                term_start = (position + 1, byte + 1);
            }
            _ => {}
        }
    }
    let length = expression.chars().count();
    if in_string {
        return error(string_start, "unterminated string");
    }
    if depth > 0 {
        return error(length, "unclosed '['");
    }
    terms.push((term_start.0, &expression[term_start.1..]));
    Ok(terms)
}

fn parse_term(start: usize, raw: &str) -> Result<Selector, ExprError> {
    let leading = raw.chars().take_while(|c| c.is_whitespace()).count();
    let position = start + leading;
    let text = raw.trim();
    if text.is_empty() {
        return error(position, "empty selector term");
    }
    if text.starts_with('"') {
        return match serde_json::from_str::<String>(text) {
            Ok(name) => Ok(Selector::Field(name)),
            Err(e) => error(position, format!("invalid field name: {e}")),
        };
    }
    if text.starts_with('[') {
        return parse_array(position, text);
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() > 3 {
            return error(position, "a range has at most three parts");
        }
        let mut bounds = [None; 3];
        let mut offset = position;
        for (k, part) in parts.iter().enumerate() {
            let trimmed = part.trim();
            if !trimmed.is_empty() {
                let at = offset + part.chars().take_while(|c| c.is_whitespace()).count();
                bounds[k] = Some(parse_int(at, trimmed)?);
            }
            offset += part.chars().count() + 1;
        }
        if bounds[2] == Some(0) {
            return error(position, "range step must not be zero");
        }
        return Ok(Selector::Range {
            start: bounds[0],
            stop: bounds[1],
            step: bounds[2],
        });
    }
    Ok(Selector::At(parse_int(position, text)?))
}

fn parse_int(position: usize, text: &str) -> Result<i64, ExprError> {
    let digits = text.strip_prefix(['-', '+']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return error(position, format!("expected an integer, a range, a quoted field or a list, found {text:?}"));
    }
    text.parse()
        .or_else(|_| error(position, format!("integer {text} does not fit in 64 bits")))
}

fn parse_array(position: usize, text: &str) -> Result<Selector, ExprError> {
    let json: serde_json::Value = match serde_json::from_str(text) {
        Ok(json) => json,
        Err(e) => return error(position, format!("invalid list: {e}")),
    };
    let items = json.as_array().expect("text starts with '['");
    if items.iter().any(|item| item.is_array()) {
        if !items.iter().all(|item| item.is_array()) {
            return error(position, "a jagged selector must hold only lists");
        }
        let mut kinds = (false, false);
        if !leaves_ok(&json, &mut kinds) {
            return error(position, "a jagged selector holds only integers or only booleans");
        }
        let value = Value::from_json_value(&json);
        return Ok(match kinds {
            (false, true) => Selector::JaggedMask(value),
            _ => Selector::JaggedIndex(value),
        });
    }
    if items.iter().all(|item| item.is_boolean()) && !items.is_empty() {
        return Ok(Selector::FlatMask(items.iter().map(|b| b.as_bool().unwrap()).collect()));
    }
    match items.iter().map(serde_json::Value::as_i64).collect::<Option<Vec<i64>>>() {
        Some(index) => Ok(Selector::FlatIndex(index)),
        None => error(position, "a flat selector holds only integers or only booleans"),
    }
}

/// Checks nested leaves; `kinds` records (saw integer, saw boolean).
fn leaves_ok(json: &serde_json::Value, kinds: &mut (bool, bool)) -> bool {
    match json {
        serde_json::Value::Array(items) => items.iter().all(|item| leaves_ok(item, kinds)),
        serde_json::Value::Bool(_) => {
            kinds.1 = true;
            !kinds.0
        }
        serde_json::Value::Number(n) if n.is_i64() => {
            kinds.0 = true;
            !kinds.1
        }
        _ => false,
    }
}
