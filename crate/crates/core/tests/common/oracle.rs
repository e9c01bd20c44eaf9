//! Brute-force interpreters over plain nested values, independent of the
//! layout machinery. They define the expected results of the columnar code.

use ragged::{ArrayType, PrimitiveType, Selector, Value};

/// Names of the first record met in a depth-first walk.
pub fn first_record_fields(value: &Value, names: &mut Vec<String>) -> bool {
    match value {
        Value::Record(fields) => {
            names.extend(fields.iter().map(|(n, _)| n.clone()));
            true
        }
        Value::List(items) => items.iter().any(|item| first_record_fields(item, names)),
        _ => false,
    }
}

/// Records which kinds (record, list) occur at each list depth above the
/// shallowest records.
fn kinds_by_depth(value: &Value, depth: usize, kinds: &mut Vec<(bool, bool)>) {
    if kinds.len() <= depth {
        kinds.resize(depth + 1, (false, false));
    }
    match value {
        Value::Record(_) => kinds[depth].0 = true,
        Value::List(items) => {
            kinds[depth].1 = true;
            items.iter().for_each(|item| kinds_by_depth(item, depth + 1, kinds));
        }
        _ => {}
    }
}

/// Projects field `name` from the shallowest records. The flag reports
/// whether any record was met at all. Records and lists side by side at one
/// depth form a union; when no records lie below those lists, the union
/// only partly carries the field and the projection is rejected.
pub fn project(value: &Value, name: &str) -> Result<(Value, bool), String> {
    let mut kinds = Vec::new();
    kinds_by_depth(value, 0, &mut kinds);
    for (depth, &(record, list)) in kinds.iter().enumerate() {
        if record && list && !kinds[depth + 1..].iter().any(|&(r, _)| r) {
            return Err(format!("field {name:?} below a union of records and record-free lists"));
        }
    }
    project_unchecked(value, name)
}

fn project_unchecked(value: &Value, name: &str) -> Result<(Value, bool), String> {
    match value {
        Value::Null => Ok((Value::Null, false)),
        Value::Record(fields) => match fields.iter().find(|(n, _)| n == name) {
            Some((_, v)) => Ok((v.clone(), true)),
            None => Err(format!("no field {name:?}")),
        },
        Value::List(items) => {
            let mut found = false;
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                let (v, f) = project_unchecked(item, name)?;
                found |= f;
                out.push(v);
            }
            Ok((Value::List(out), found))
        }
        other => Err(format!("no record at {other:?}")),
    }
}

/// Python slice semantics, spelled out.
pub fn py_slice(len: i64, start: Option<i64>, stop: Option<i64>, step: i64) -> Vec<usize> {
    assert!(step != 0);
    let norm = |x: i64, lo: i64, hi: i64| {
        let x = if x < 0 { x + len } else { x };
        x.clamp(lo, hi)
    };
    let mut out = Vec::new();
    if step > 0 {
        let mut i = start.map_or(0, |s| norm(s, 0, len));
        let end = stop.map_or(len, |s| norm(s, 0, len));
        while i < end {
            out.push(i as usize);
            i += step;
        }
    } else {
        let mut i = start.map_or(len - 1, |s| norm(s, -1, len - 1));
        let end = stop.map_or(-1, |s| norm(s, -1, len - 1));
        while i > end {
            out.push(i as usize);
            i += step;
        }
    }
    out
}

fn at(items: &[Value], i: i64) -> Result<&Value, String> {
    let len = items.len() as i64;
    let j = if i < 0 { i + len } else { i };
    if (0..len).contains(&j) {
        Ok(&items[j as usize])
    } else {
        Err(format!("index {i} out of range for length {len}"))
    }
}

/// List levels of a jagged selector value as the builder would type it.
fn list_depth(value: &Value) -> usize {
    match value {
        Value::List(items) => 1 + items.iter().map(list_depth).max().unwrap_or(0),
        _ => 0,
    }
}

enum Step<'a> {
    At(i64),
    Range(Option<i64>, Option<i64>, i64),
    Index(&'a [i64]),
    Mask(&'a [bool]),
    Jagged(&'a [Value], usize, bool),
}

/// Outcome of the interpreter.
pub struct Selected {
    pub value: Value,
    /// Some remaining selectors were never applied because nothing reached
    /// them (empty selections, missing values). Depth errors are detected
    /// from types by the columnar code, so such cases may legitimately fail
    /// there.
    pub vacuous: bool,
    /// A field was projected from an array without any record.
    pub no_record: bool,
}

pub fn getitem(array: &Value, selectors: &[Selector]) -> Result<Selected, String> {
    let mut target = array.clone();
    let mut no_record = false;
    let mut steps = Vec::new();
    let mut flat = 0;
    for selector in selectors {
        match selector {
            Selector::Field(name) => {
                let (projected, found) = project(&target, name)?;
                no_record |= !found;
                target = projected;
            }
            Selector::At(i) => steps.push(Step::At(*i)),
            Selector::Range { start, stop, step } => {
                let step = step.unwrap_or(1);
                if step == 0 {
                    return Err("zero step".into());
                }
                steps.push(Step::Range(*start, *stop, step));
            }
            Selector::FlatIndex(index) => {
                flat += 1;
                steps.push(Step::Index(index));
            }
            Selector::FlatMask(mask) => {
                flat += 1;
                steps.push(Step::Mask(mask));
            }
            Selector::JaggedIndex(v) | Selector::JaggedMask(v) => {
                let mask = matches!(selector, Selector::JaggedMask(_));
                let Value::List(entries) = v else {
                    return Err("jagged selector is not a list".into());
                };
                let depth = list_depth(v);
                if depth < 2 && !entries.is_empty() {
                    return Err("jagged selector is not a list of lists".into());
                }
                steps.push(Step::Jagged(entries, depth, mask));
            }
        }
    }
    if flat > 1 {
        return Err("several flat array selectors".into());
    }
    let mut vacuous = false;
    let value = apply(&target, &steps, &mut vacuous)?;
    Ok(Selected {
        value,
        vacuous,
        no_record,
    })
}

/// Applies `steps[0]` inside `value` (which should be a list), the rest
/// inside each selected element.
fn apply(value: &Value, steps: &[Step], vacuous: &mut bool) -> Result<Value, String> {
    let Some((head, tail)) = steps.split_first() else {
        return Ok(value.clone());
    };
    let items = match value {
        Value::List(items) => items,
        Value::Null => {
            if matches!(head, Step::At(_)) {
                return Err("At on a missing value".into());
            }
            *vacuous = true;
            return Ok(Value::Null);
        }
        Value::Record(fields) => {
            return Ok(Value::Record(
                fields
                    .iter()
                    .map(|(n, v)| Ok((n.clone(), apply(v, steps, vacuous)?)))
                    .collect::<Result<_, String>>()?,
            ))
        }
        _ => return Err("too many selectors".into()),
    };
    let chosen: Vec<&Value> = match head {
        Step::At(i) => return apply(at(items, *i)?, tail, vacuous),
        Step::Range(start, stop, step) => py_slice(items.len() as i64, *start, *stop, *step)
            .into_iter()
            .map(|i| &items[i])
            .collect(),
        Step::Index(index) => index.iter().map(|&i| at(items, i)).collect::<Result<_, _>>()?,
        Step::Mask(mask) => {
            if mask.len() != items.len() {
                return Err("mask length mismatch".into());
            }
            items.iter().zip(mask.iter()).filter(|(_, &m)| m).map(|(v, _)| v).collect()
        }
        Step::Jagged(entries, depth, mask) => {
            if entries.len() != items.len() {
                return Err("jagged selector length mismatch".into());
            }
            let out = items
                .iter()
                .zip(entries.iter())
                .map(|(item, entry)| apply_jagged(item, entry, depth - 1, *mask, tail, vacuous))
                .collect::<Result<_, String>>()?;
            return Ok(Value::List(out));
        }
    };
    if chosen.is_empty() && !tail.is_empty() {
        *vacuous = true;
    }
    Ok(Value::List(
        chosen
            .into_iter()
            .map(|v| apply(v, tail, vacuous))
            .collect::<Result<_, String>>()?,
    ))
}

/// Applies one selector entry (with `levels` list levels) inside `value`.
fn apply_jagged(
    value: &Value,
    entry: &Value,
    levels: usize,
    mask: bool,
    tail: &[Step],
    vacuous: &mut bool,
) -> Result<Value, String> {
    let items = match value {
        Value::Null => {
            *vacuous = true;
            return Ok(Value::Null);
        }
        Value::Record(fields) => {
            return Ok(Value::Record(
                fields
                    .iter()
                    .map(|(n, v)| Ok((n.clone(), apply_jagged(v, entry, levels, mask, tail, vacuous)?)))
                    .collect::<Result<_, String>>()?,
            ))
        }
        Value::List(items) => items,
        _ => return Err("too many selectors".into()),
    };
    let Value::List(sub) = entry else {
        return Err("selector entry is not a list".into());
    };
    if levels >= 2 {
        if sub.len() != items.len() {
            return Err("jagged structure mismatch".into());
        }
        let out = items
            .iter()
            .zip(sub.iter())
            .map(|(item, e)| apply_jagged(item, e, levels - 1, mask, tail, vacuous))
            .collect::<Result<_, String>>()?;
        return Ok(Value::List(out));
    }
    let chosen: Vec<&Value> = if mask {
        if sub.len() != items.len() {
            return Err("jagged mask length mismatch".into());
        }
        items
            .iter()
            .zip(sub.iter())
            .filter(|(_, m)| matches!(m, Value::Bool(true)))
            .map(|(v, _)| v)
            .collect()
    } else {
        sub.iter()
            .map(|i| match i {
                Value::Int(i) => at(items, *i),
                _ => Err("jagged index leaf is not an integer".into()),
            })
            .collect::<Result<_, _>>()?
    };
    if chosen.is_empty() && !tail.is_empty() {
        *vacuous = true;
    }
    Ok(Value::List(
        chosen
            .into_iter()
            .map(|v| apply(v, tail, vacuous))
            .collect::<Result<_, String>>()?,
    ))
}

/// Widens every integer to a float, as int-to-float promotion does.
pub fn promote(value: &Value) -> Value {
    match value {
        Value::Int(i) => Value::Float(*i as f64),
        Value::List(items) => Value::List(items.iter().map(promote).collect()),
        Value::Record(fields) => Value::Record(fields.iter().map(|(n, v)| (n.clone(), promote(v))).collect()),
        other => other.clone(),
    }
}

/// Applies `f` to every number, keeping structure and missing values.
pub fn map_numbers(value: &Value, f: &dyn Fn(f64) -> f64) -> Value {
    match value {
        Value::Int(i) => Value::Float(f(*i as f64)),
        Value::Float(x) => Value::Float(f(*x)),
        Value::List(items) => Value::List(items.iter().map(|v| map_numbers(v, f)).collect()),
        Value::Record(fields) => Value::Record(fields.iter().map(|(n, v)| (n.clone(), map_numbers(v, f))).collect()),
        other => other.clone(),
    }
}

/// `op(x, s)` on every number, with the dtype rule of scalar arithmetic:
/// integer with integer wraps and stays integer, anything else is a float.
pub fn map_scalar(value: &Value, multiply: bool, scalar: Value) -> Value {
    match (value, &scalar) {
        (Value::Int(x), Value::Int(s)) => Value::Int(if multiply { x.wrapping_mul(*s) } else { x.wrapping_add(*s) }),
        (Value::Int(_) | Value::Float(_), _) => {
            let x = match value {
                Value::Int(i) => *i as f64,
                Value::Float(f) => *f,
                _ => unreachable!(),
            };
            let s = match scalar {
                Value::Int(i) => i as f64,
                Value::Float(f) => f,
                _ => panic!("scalar must be a number"),
            };
            Value::Float(if multiply { x * s } else { x + s })
        }
        (Value::List(items), _) => Value::List(items.iter().map(|v| map_scalar(v, multiply, scalar.clone())).collect()),
        (Value::Record(fields), _) => Value::Record(
            fields
                .iter()
                .map(|(n, v)| (n.clone(), map_scalar(v, multiply, scalar.clone())))
                .collect(),
        ),
        (other, _) => other.clone(),
    }
}

/// Equality where numbers only need to agree within `tol`.
pub fn close(a: &Value, b: &Value, tol: f64) -> bool {
    let num = |v: &Value| match v {
        Value::Int(i) => Some(*i as f64),
        Value::Float(f) => Some(*f),
        _ => None,
    };
    match (a, b) {
        (Value::List(x), Value::List(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| close(p, q, tol)),
        (Value::Record(x), Value::Record(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|((n, p), (m, q))| n == m && close(p, q, tol))
        }
        _ => match (num(a), num(b)) {
            (Some(x), Some(y)) => x == y || (x - y).abs() <= tol,
            _ => a == b,
        },
    }
}

/// Equality up to int-to-float promotion and back-filled missing fields:
/// a field absent from `input` must read as null in `built`.
pub fn same_after_building(input: &Value, built: &Value) -> bool {
    match (input, built) {
        (Value::Int(i), Value::Float(f)) => *i as f64 == *f,
        (Value::List(x), Value::List(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| same_after_building(p, q)),
        (Value::Record(x), Value::Record(y)) => {
            x.iter().all(|(n, p)| y.iter().any(|(m, q)| n == m && same_after_building(p, q)))
                && y.iter().all(|(m, q)| x.iter().any(|(n, _)| n == m) || *q == Value::Null)
        }
        _ => input == built,
    }
}

/// Whether every value of type `a` is also a value of type `b`, reading the
/// promotion lattice: unknown below everything, int64 below float64, any
/// type below its option, members below a union, and records below records
/// with more (option-typed) fields.
pub fn embeds(a: &ArrayType, b: &ArrayType) -> bool {
    use ArrayType as T;
    if a == b || matches!(a, T::Unknown) {
        return true;
    }
    match (a, b) {
        (T::Primitive(PrimitiveType::Int64), T::Primitive(PrimitiveType::Float64)) => true,
        (T::Option(x), T::Option(y)) => embeds(x, y),
        (_, T::Option(y)) => embeds(a, y),
        (T::Union(xs), T::Union(_)) => xs.iter().all(|x| embeds(x, b)),
        (_, T::Union(ys)) => ys.iter().any(|y| embeds(a, y)),
        (T::VarList(x), T::VarList(y)) => embeds(x, y),
        (T::Record { fields: fa, display: da }, T::Record { fields: fb, display: db }) => {
            da == db
                && fa.iter().all(|(n, t)| {
                    fb.iter().any(|(m, u)| n == m && embeds(t, u))
                })
        }
        _ => false,
    }
}
