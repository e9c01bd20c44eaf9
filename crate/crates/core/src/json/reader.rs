//! Streaming pull parser producing one [`Event`] per JSON token.
//!
//! Input is consumed through a fixed-size window, so memory use does not
//! depend on the input size. Every byte is examined once. Integer and real
//! numbers are told apart lexically: a literal containing `.`, `e`, or `E`
//! is a real.

use std::io::{self, Read};

use super::JsonError;

const WINDOW: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Event<'a> {
    StartArray,
    EndArray,
    StartObject,
    EndObject,
    Key(&'a str),
    Str(&'a str),
    Int(i64),
    Float(f64),
    Bool(bool),
    Null,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Frame {
    Array,
    Object,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    /// Before the first top-level value (or between NDJSON lines).
    Start,
    Value,
    ArrayFirst,
    ArrayNext,
    ObjectFirst,
    ObjectNext,
    /// After a complete top-level value.
    Done,
}

pub struct Parser<R> {
    reader: R,
    buf: Box<[u8]>,
    pos: usize,
    end: usize,
    /// Absolute offset of `buf[0]`.
    base: u64,
    eof: bool,
    stack: Vec<Frame>,
    state: State,
    scratch: Vec<u8>,
    max_depth: usize,
    ndjson: bool,
    token_offset: u64,
}

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r')
}

impl<R: Read> Parser<R> {
    pub fn new(reader: R, max_depth: usize, ndjson: bool) -> Self {
        Parser {
            reader,
            buf: vec![0u8; WINDOW].into_boxed_slice(),
            pos: 0,
            end: 0,
            base: 0,
            eof: false,
            stack: Vec::new(),
            state: State::Start,
            scratch: Vec::new(),
            max_depth,
            ndjson,
            token_offset: 0,
        }
    }

    /// Absolute offset of the next unread byte.
    pub fn offset(&self) -> u64 {
        self.base + self.pos as u64
    }

    /// Offset at which the most recent event's token starts.
    pub fn token_offset(&self) -> u64 {
        self.token_offset
    }

    /// Current nesting depth (open arrays and objects).
    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    fn refill(&mut self) -> Result<bool, JsonError> {
        if self.eof {
            return Ok(false);
        }
        self.base += self.end as u64;
        self.pos = 0;
        self.end = 0;
        loop {
            match self.reader.read(&mut self.buf) {
                Ok(0) => {
                    self.eof = true;
                    return Ok(false);
                }
                Ok(n) => {
                    self.end = n;
                    return Ok(true);
                }
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(JsonError::Io(e.to_string())),
            }
        }
    }

    #[inline]
    fn peek(&mut self) -> Result<Option<u8>, JsonError> {
        if self.pos < self.end {
            return Ok(Some(self.buf[self.pos]));
        }
        if self.refill()? {
            Ok(Some(self.buf[self.pos]))
        } else {
            Ok(None)
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, JsonError> {
        Err(JsonError::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&mut self, expected: &str) -> Result<T, JsonError> {
        match self.peek()? {
            None => self.error(format!("unexpected end of input, expected {expected}")),
            Some(b) => self.error(format!("unexpected character {:?}, expected {expected}", b as char)),
        }
    }

    /// Skips whitespace; with `stop_at_newline`, stops before a newline.
    fn skip_ws(&mut self, stop_at_newline: bool) -> Result<Option<u8>, JsonError> {
        loop {
            while self.pos < self.end {
                let b = self.buf[self.pos];
                if !is_ws(b) || (stop_at_newline && b == b'\n') {
                    return Ok(Some(b));
                }
                self.pos += 1;
            }
            if !self.refill()? {
                return Ok(None);
            }
        }
    }

    fn expect_literal(&mut self, literal: &[u8]) -> Result<(), JsonError> {
        for &want in literal {
            match self.peek()? {
                Some(b) if b == want => self.pos += 1,
                _ => return self.unexpected(&format!("literal {:?}", std::str::from_utf8(literal).unwrap())),
            }
        }
        Ok(())
    }

    fn push(&mut self, frame: Frame) -> Result<(), JsonError> {
        if self.stack.len() >= self.max_depth {
            return Err(JsonError::DepthLimitExceeded {
                offset: self.token_offset,
                limit: self.max_depth,
            });
        }
        self.stack.push(frame);
        Ok(())
    }

    fn after_value(&mut self) {
        self.state = match self.stack.last() {
            None => State::Done,
            Some(Frame::Array) => State::ArrayNext,
            Some(Frame::Object) => State::ObjectNext,
        };
    }

    /// Reads the body of a string whose opening quote is consumed.
    fn read_string(&mut self) -> Result<(), JsonError> {
        self.scratch.clear();
        loop {
            let start = self.pos;
            while self.pos < self.end {
                let b = self.buf[self.pos];
                if b == b'"' || b == b'\\' || b < 0x20 {
                    break;
                }
                self.pos += 1;
            }
            self.scratch.extend_from_slice(&self.buf[start..self.pos]);
            let Some(b) = self.peek()? else {
                return self.error("unterminated string");
            };
            match b {
                b'"' => {
                    self.pos += 1;
                    break;
                }
                b'\\' => {
                    self.pos += 1;
                    self.read_escape()?;
                }
                b if b < 0x20 => return self.error("control character in string"),
                _ => {}
            }
        }
        if std::str::from_utf8(&self.scratch).is_err() {
            return Err(JsonError::Parse {
                offset: self.token_offset,
                message: "invalid UTF-8 in string".into(),
            });
        }
        Ok(())
    }

    fn read_hex4(&mut self) -> Result<u32, JsonError> {
        let mut v = 0u32;
        for _ in 0..4 {
            let digit = match self.peek()? {
                Some(b) => (b as char).to_digit(16),
                None => None,
            };
            match digit {
                Some(d) => {
                    v = v * 16 + d;
                    self.pos += 1;
                }
                None => return self.unexpected("four hex digits"),
            }
        }
        Ok(v)
    }

    fn read_escape(&mut self) -> Result<(), JsonError> {
        let Some(b) = self.peek()? else {
            return self.error("unterminated escape");
        };
        self.pos += 1;
        let c = match b {
            b'"' => '"',
            b'\\' => '\\',
            b'/' => '/',
            b'b' => '\u{08}',
            b'f' => '\u{0c}',
            b'n' => '\n',
            b'r' => '\r',
            b't' => '\t',
            b'u' => {
                let hi = self.read_hex4()?;
                let code = if (0xD800..0xDC00).contains(&hi) {
                    if self.peek()? != Some(b'\\') {
                        return self.error("unpaired surrogate in escape");
                    }
                    self.pos += 1;
                    if self.peek()? != Some(b'u') {
                        return self.error("unpaired surrogate in escape");
                    }
                    self.pos += 1;
                    let lo = self.read_hex4()?;
                    if !(0xDC00..0xE000).contains(&lo) {
                        return self.error("unpaired surrogate in escape");
                    }
                    0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00)
                } else {
                    hi
                };
                match char::from_u32(code) {
                    Some(c) => c,
                    None => return self.error("unpaired surrogate in escape"),
                }
            }
            other => {
                self.pos -= 1;
                return self.error(format!("invalid escape character {:?}", other as char));
            }
        };
        let mut utf8 = [0u8; 4];
        self.scratch.extend_from_slice(c.encode_utf8(&mut utf8).as_bytes());
        Ok(())
    }

    fn read_digits(&mut self) -> Result<usize, JsonError> {
        let mut count = 0;
        while let Some(b) = self.peek()? {
            if !b.is_ascii_digit() {
                break;
            }
            self.scratch.push(b);
            self.pos += 1;
            count += 1;
        }
        Ok(count)
    }

    fn read_number(&mut self) -> Result<Event<'static>, JsonError> {
        self.scratch.clear();
        if self.peek()? == Some(b'-') {
            self.scratch.push(b'-');
            self.pos += 1;
        }
        let int_start = self.scratch.len();
        if self.read_digits()? == 0 {
            return self.unexpected("a digit");
        }
        if self.scratch[int_start] == b'0' && self.scratch.len() - int_start > 1 {
            return Err(JsonError::Parse {
                offset: self.token_offset,
                message: "leading zero in number".into(),
            });
        }
        let mut real = false;
        if self.peek()? == Some(b'.') {
            real = true;
            self.scratch.push(b'.');
            self.pos += 1;
            if self.read_digits()? == 0 {
                return self.unexpected("a digit after '.'");
            }
        }
        if let Some(b'e' | b'E') = self.peek()? {
            real = true;
            self.scratch.push(b'e');
            self.pos += 1;
            if let Some(sign @ (b'+' | b'-')) = self.peek()? {
                self.scratch.push(sign);
                self.pos += 1;
            }
            if self.read_digits()? == 0 {
                return self.unexpected("a digit in the exponent");
            }
        }
        // the scratch holds only ASCII digits and signs
        let text = std::str::from_utf8(&self.scratch).expect("ASCII");
        if real {
            let v: f64 = text.parse().expect("validated float literal");
            Ok(Event::Float(v))
        } else {
            match text.parse::<i64>() {
                Ok(v) => Ok(Event::Int(v)),
                Err(_) => Err(JsonError::IntegerOverflow {
                    offset: self.token_offset,
                    literal: text.to_owned(),
                }),
            }
        }
    }

    fn scratch_str(&self) -> &str {
        std::str::from_utf8(&self.scratch).expect("validated in read_string")
    }

    /// Next event, or `None` at the end of the input.
    pub fn next_event(&mut self) -> Result<Option<Event<'_>>, JsonError> {
        loop {
            match self.state {
                State::Start => {
                    let b = self.skip_ws(false)?;
                    self.token_offset = self.offset();
                    if b.is_none() {
                        if self.ndjson {
                            return Ok(None);
                        }
                        return self.error("unexpected end of input, expected a value");
                    }
                    self.state = State::Value;
                }
                State::Done => {
                    let b = self.skip_ws(self.ndjson)?;
                    self.token_offset = self.offset();
                    match b {
                        None => return Ok(None),
                        Some(b'\n') if self.ndjson => {
                            self.pos += 1;
                            self.state = State::Start;
                        }
                        Some(_) if self.ndjson => {
                            return self.error("expected a newline after an NDJSON value")
                        }
                        Some(_) => return self.error("trailing characters after the top-level value"),
                    }
                }
                State::Value => {
                    let b = self.skip_ws(false)?;
                    self.token_offset = self.offset();
                    let Some(b) = b else {
                        return self.error("unexpected end of input, expected a value");
                    };
                    return match b {
                        b'[' => {
                            self.push(Frame::Array)?;
                            self.pos += 1;
                            self.state = State::ArrayFirst;
                            Ok(Some(Event::StartArray))
                        }
                        b'{' => {
                            self.push(Frame::Object)?;
                            self.pos += 1;
                            self.state = State::ObjectFirst;
                            Ok(Some(Event::StartObject))
                        }
                        b'"' => {
                            self.pos += 1;
                            self.read_string()?;
                            self.after_value();
                            Ok(Some(Event::Str(self.scratch_str())))
                        }
                        b'-' | b'0'..=b'9' => {
                            let event = self.read_number()?;
                            self.after_value();
                            Ok(Some(event))
                        }
                        b't' => {
                            self.expect_literal(b"true")?;
                            self.after_value();
                            Ok(Some(Event::Bool(true)))
                        }
                        b'f' => {
                            self.expect_literal(b"false")?;
                            self.after_value();
                            Ok(Some(Event::Bool(false)))
                        }
                        b'n' => {
                            self.expect_literal(b"null")?;
                            self.after_value();
                            Ok(Some(Event::Null))
                        }
                        _ => self.unexpected("a value"),
                    };
                }
                State::ArrayFirst | State::ArrayNext => {
                    let b = self.skip_ws(false)?;
                    self.token_offset = self.offset();
                    match b {
                        Some(b']') => {
                            self.pos += 1;
                            self.stack.pop();
                            self.after_value();
                            return Ok(Some(Event::EndArray));
                        }
                        Some(b',') if self.state == State::ArrayNext => {
                            self.pos += 1;
                            self.state = State::Value;
                        }
                        Some(_) if self.state == State::ArrayFirst => self.state = State::Value,
                        _ => return self.unexpected("',' or ']'"),
                    }
                }
                State::ObjectFirst | State::ObjectNext => {
                    let b = self.skip_ws(false)?;
                    self.token_offset = self.offset();
                    match b {
                        Some(b'}') => {
                            self.pos += 1;
                            self.stack.pop();
                            self.after_value();
                            return Ok(Some(Event::EndObject));
                        }
                        Some(b',') if self.state == State::ObjectNext => {
                            self.pos += 1;
                            if self.skip_ws(false)? != Some(b'"') {
                                return self.unexpected("a string key");
                            }
                        }
                        Some(b'"') if self.state == State::ObjectFirst => {}
                        _ if self.state == State::ObjectFirst => return self.unexpected("a string key or '}'"),
                        _ => return self.unexpected("',' or '}'"),
                    }
                    // at the opening quote of a key
                    self.token_offset = self.offset();
                    self.pos += 1;
                    self.read_string()?;
                    if self.skip_ws(false)? != Some(b':') {
                        return self.unexpected("':'");
                    }
                    self.pos += 1;
                    self.state = State::Value;
                    return Ok(Some(Event::Key(self.scratch_str())));
                }
            }
        }
    }
}
