//! On-disk container: a directory holding `manifest.json` (the node tree)
//! and one raw little-endian file per buffer, named `b0.raw`, `b1.raw`, ...
//! Buffer ids are assigned depth-first, each node's own buffers before those
//! of its children. The schema is documented in `docs/manifest.md`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::buffer::{Buffer, DType, Element};
use crate::kernels;
use crate::layout::{on_numeric, Layout, NumericData, Parameters, StructureError};

pub const MANIFEST: &str = "manifest.json";
pub const VERSION: u64 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum StorageError {
    #[error("I/O error at {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{0} exists and is not a container (no {MANIFEST}); refusing to overwrite")]
    NotAContainer(PathBuf),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

type Result<T> = std::result::Result<T, StorageError>;

fn io_error(path: &Path, e: io::Error) -> StorageError {
    StorageError::Io {
        path: path.to_owned(),
        message: e.to_string(),
    }
}

fn format_error<T>(message: impl Into<String>) -> Result<T> {
    Err(StorageError::Format(message.into()))
}

struct Writer {
    next_id: usize,
    files: Vec<(String, Vec<u8>)>,
}

impl Writer {
    fn buffer<T: Element>(&mut self, data: &[T]) -> Json {
        let id = format!("b{}", self.next_id);
        self.next_id += 1;
        let mut bytes = vec![0u8; data.len() * T::WIDTH];
        kernels::encode_le(data, &mut bytes).expect("output sized to input");
        self.files.push((id.clone(), bytes));
        json!({"id": id, "dtype": T::DTYPE.name(), "length": data.len()})
    }

    fn node(&mut self, layout: &Layout) -> Json {
        let mut node = Map::new();
        node.insert("kind".into(), layout.kind().into());
        node.insert("length".into(), layout.length().into());
        let parameters: Map<String, Json> = layout
            .parameters()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        node.insert("parameters".into(), Json::Object(parameters));
        let mut buffers = Map::new();
        match layout {
            Layout::Numeric(n) => {
                node.insert("dtype".into(), n.data().dtype().name().into());
                let reference = on_numeric!(n.data(), b => self.buffer(b.as_slice()));
                buffers.insert("data".into(), reference);
                node.insert("buffers".into(), Json::Object(buffers));
            }
            Layout::ListOffset(l) => {
                buffers.insert("offsets".into(), self.buffer(l.offsets().as_slice()));
                node.insert("buffers".into(), Json::Object(buffers));
                node.insert("content".into(), self.node(l.content()));
            }
            Layout::Record(r) => {
                node.insert("buffers".into(), Json::Object(buffers));
                let fields: Vec<Json> = r
                    .fields()
                    .iter()
                    .map(|(name, content)| json!({"name": name, "content": self.node(content)}))
                    .collect();
                node.insert("fields".into(), Json::Array(fields));
            }
            Layout::Union(u) => {
                buffers.insert("tags".into(), self.buffer(u.tags().as_slice()));
                buffers.insert("index".into(), self.buffer(u.index().as_slice()));
                node.insert("buffers".into(), Json::Object(buffers));
                let contents: Vec<Json> = u.contents().iter().map(|c| self.node(c)).collect();
                node.insert("contents".into(), Json::Array(contents));
            }
            Layout::IndexedOption(o) => {
                buffers.insert("index".into(), self.buffer(o.index().as_slice()));
                node.insert("buffers".into(), Json::Object(buffers));
                node.insert("content".into(), self.node(o.content()));
            }
            Layout::Empty(_) => {
                node.insert("buffers".into(), Json::Object(buffers));
            }
        }
        Json::Object(node)
    }
}

/// The manifest text and buffer images `write` would produce.
pub fn encode(layout: &Layout) -> Result<(String, Vec<(String, Vec<u8>)>)> {
    layout.validate()?;
    let mut writer = Writer {
        next_id: 0,
        files: Vec::new(),
    };
    let root = writer.node(layout);
    let manifest = json!({"version": VERSION, "length": layout.length(), "root": root});
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    Ok((text, writer.files))
}

/// Writes `layout` as a container at directory `path`. An existing
/// container there is replaced; any other existing directory content makes
/// the call fail.
pub fn write(layout: &Layout, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (manifest, files) = encode(layout)?;
    match fs::metadata(path) {
        Ok(meta) if !meta.is_dir() => {
            return Err(StorageError::Io {
                path: path.to_owned(),
                message: "not a directory".into(),
            })
        }
        Ok(_) => {
            let mut entries = fs::read_dir(path).map_err(|e| io_error(path, e))?.peekable();
            if entries.peek().is_some() {
                if !path.join(MANIFEST).is_file() {
                    return Err(StorageError::NotAContainer(path.to_owned()));
                }
                for entry in entries {
                    let entry = entry.map_err(|e| io_error(path, e))?;
                    let name = entry.file_name();
                    let name = name.to_string_lossy();
                    let stale = name == MANIFEST
                        || (name.starts_with('b')
                            && name.ends_with(".raw")
                            && name[1..name.len() - 4].bytes().all(|b| b.is_ascii_digit()));
                    if stale {
                        fs::remove_file(entry.path()).map_err(|e| io_error(&entry.path(), e))?;
                    }
                }
            }
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            fs::create_dir_all(path).map_err(|e| io_error(path, e))?;
        }
        Err(e) => return Err(io_error(path, e)),
    }
    for (id, bytes) in &files {
        let file = path.join(format!("{id}.raw"));
        fs::write(&file, bytes).map_err(|e| io_error(&file, e))?;
    }
    // manifest last, so a partial write never looks like a complete container
    let file = path.join(MANIFEST);
    fs::write(&file, manifest).map_err(|e| io_error(&file, e))
}

struct Reader<'a> {
    dir: &'a Path,
}

fn get<'j>(node: &'j Map<String, Json>, key: &str, at: &str) -> Result<&'j Json> {
    match node.get(key) {
        Some(v) => Ok(v),
        None => format_error(format!("missing field {key:?} in node {at}")),
    }
}

fn get_usize(node: &Map<String, Json>, key: &str, at: &str) -> Result<usize> {
    match get(node, key, at)?.as_u64() {
        Some(v) => Ok(v as usize),
        None => format_error(format!("field {key:?} of node {at} must be a non-negative integer")),
    }
}

fn get_object<'j>(node: &'j Map<String, Json>, key: &str, at: &str) -> Result<&'j Map<String, Json>> {
    match get(node, key, at)?.as_object() {
        Some(v) => Ok(v),
        None => format_error(format!("field {key:?} of node {at} must be an object")),
    }
}

fn get_array<'j>(node: &'j Map<String, Json>, key: &str, at: &str) -> Result<&'j Vec<Json>> {
    match get(node, key, at)?.as_array() {
        Some(v) => Ok(v),
        None => format_error(format!("field {key:?} of node {at} must be an array")),
    }
}

impl Reader<'_> {
    fn buffer<T: Element>(&self, buffers: &Map<String, Json>, role: &str, at: &str) -> Result<Buffer<T>> {
        let Some(reference) = buffers.get(role).and_then(Json::as_object) else {
            return format_error(format!("node {at} lacks buffer reference {role:?}"));
        };
        let id = match get(reference, "id", at)?.as_str() {
            Some(id) if id.starts_with('b') && id[1..].bytes().all(|b| b.is_ascii_digit()) && id.len() > 1 => id,
            _ => return format_error(format!("buffer {role:?} of node {at} has an invalid id")),
        };
        let dtype = get(reference, "dtype", at)?.as_str().and_then(DType::from_name);
        if dtype != Some(T::DTYPE) {
            return format_error(format!(
                "buffer {id} ({role} of node {at}) must have dtype {}",
                T::DTYPE.name()
            ));
        }
        let length = get_usize(reference, "length", at)?;
        let file = self.dir.join(format!("{id}.raw"));
        let bytes = match fs::read(&file) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return format_error(format!("missing buffer {id} ({id}.raw)"))
            }
            Err(e) => return Err(io_error(&file, e)),
        };
        if bytes.len() != length * T::WIDTH {
            return format_error(format!(
                "buffer {id} has {} bytes, expected {} ({length} x {})",
                bytes.len(),
                length * T::WIDTH,
                T::WIDTH
            ));
        }
        let mut values = vec![T::default(); length];
        kernels::decode_le(&bytes, &mut values)
            .map_err(|e| StorageError::Format(format!("buffer {id}: element {} is invalid", e.position)))?;
        Ok(Buffer::from_vec(values))
    }

    fn node(&self, json: &Json, at: &str) -> Result<Layout> {
        let Some(node) = json.as_object() else {
            return format_error(format!("node {at} must be an object"));
        };
        let kind = get(node, "kind", at)?.as_str().unwrap_or_default();
        let length = get_usize(node, "length", at)?;
        let parameters: Parameters = get_object(node, "parameters", at)?
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let buffers = get_object(node, "buffers", at)?;
        let layout = match kind {
            "numeric" => {
                let dtype = get(node, "dtype", at)?.as_str().and_then(DType::from_name);
                let data = match dtype {
                    Some(DType::Bool) => NumericData::Bool(self.buffer(buffers, "data", at)?),
                    Some(DType::Int8) => NumericData::Int8(self.buffer(buffers, "data", at)?),
                    Some(DType::UInt8) => NumericData::UInt8(self.buffer(buffers, "data", at)?),
                    Some(DType::Int64) => NumericData::Int64(self.buffer(buffers, "data", at)?),
                    Some(DType::Float64) => NumericData::Float64(self.buffer(buffers, "data", at)?),
                    None => return format_error(format!("node {at} has an unknown dtype")),
                };
                Layout::numeric(data)
            }
            "listoffset" => {
                let offsets = self.buffer::<i64>(buffers, "offsets", at)?;
                let content = self.node(get(node, "content", at)?, &format!("{at}.content"))?;
                Layout::list_offset(offsets, content)
            }
            "record" => {
                let mut fields = Vec::new();
                for field in get_array(node, "fields", at)? {
                    let Some(field) = field.as_object() else {
                        return format_error(format!("fields of node {at} must be objects"));
                    };
                    let Some(name) = get(field, "name", at)?.as_str() else {
                        return format_error(format!("field names of node {at} must be strings"));
                    };
                    let content = self.node(get(field, "content", at)?, &format!("{at}.field({name:?})"))?;
                    fields.push((name.to_owned(), content));
                }
                Layout::record(fields, length)
            }
            "union" => {
                let tags = self.buffer::<i8>(buffers, "tags", at)?;
                let index = self.buffer::<i64>(buffers, "index", at)?;
                let contents = get_array(node, "contents", at)?
                    .iter()
                    .enumerate()
                    .map(|(k, c)| self.node(c, &format!("{at}.contents[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                Layout::union(tags, index, contents)
            }
            "indexedoption" => {
                let index = self.buffer::<i64>(buffers, "index", at)?;
                let content = self.node(get(node, "content", at)?, &format!("{at}.content"))?;
                Layout::indexed_option(index, content)
            }
            "empty" => Layout::empty(),
            other => return format_error(format!("node {at} has unknown kind {other:?}")),
        };
        if layout.length() != length {
            return format_error(format!(
                "node {at} declares length {length} but its buffers give {}",
                layout.length()
            ));
        }
        Ok(if parameters.is_empty() {
            layout
        } else {
            layout.with_parameters(parameters)
        })
    }
}

/// Reads and validates the container at directory `path`.
pub fn read(path: impl AsRef<Path>) -> Result<Layout> {
    let dir = path.as_ref();
    let file = dir.join(MANIFEST);
    let text = fs::read_to_string(&file).map_err(|e| io_error(&file, e))?;
    let manifest: Json = serde_json::from_str(&text)
        .map_err(|e| StorageError::Format(format!("{MANIFEST} is not valid JSON: {e}")))?;
    let Some(manifest) = manifest.as_object() else {
        return format_error(format!("{MANIFEST} must hold an object"));
    };
    match manifest.get("version").and_then(Json::as_u64) {
        Some(VERSION) => {}
        Some(v) => return format_error(format!("unsupported version {v}")),
        None => return format_error("missing or invalid field \"version\""),
    }
    let length = get_usize(manifest, "length", "manifest")?;
    let layout = Reader { dir }.node(get(manifest, "root", "manifest")?, "root")?;
    if layout.length() != length {
        return format_error(format!(
            "manifest declares length {length} but the root node has {}",
            layout.length()
        ));
    }
    layout.validate()?;
    Ok(layout)
}
