//! Seeded random types, values, JSON texts and selector tuples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ragged::{Selector, Value};

use super::oracle;

/// Shape of generated data, mirroring what the builder can discover.
#[derive(Clone, Debug)]
pub enum Ty {
    Bool,
    Int,
    Float,
    Str,
    List(Box<Ty>),
    Record(Vec<(String, Ty)>),
    Option(Box<Ty>),
    Union(Vec<Ty>),
}

impl Ty {
    /// Kinds the builder keeps apart; union variants must differ in class.
    fn class(&self) -> u8 {
        match self {
            Ty::Bool => 0,
            Ty::Int | Ty::Float => 1,
            Ty::Str => 2,
            Ty::List(_) => 3,
            Ty::Record(_) => 4,
            Ty::Option(_) | Ty::Union(_) => 5,
        }
    }
}

const FIELD_NAMES: [&str; 6] = ["x", "y", "z", "w", "two words", "ü"];
const CHARS: [char; 12] = ['a', 'b', 'z', ' ', '"', '\\', '\n', '\u{1}', 'é', '€', '😀', '/'];

pub struct Gen {
    pub rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn ty(&mut self, depth: usize) -> Ty {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.leaf_ty();
        }
        match self.rng.gen_range(0..4) {
            0 => Ty::List(Box::new(self.ty(depth - 1))),
            1 => self.record_ty(depth),
            2 => Ty::Option(Box::new(self.plain_ty(depth - 1))),
            _ => {
                let wanted = self.rng.gen_range(2..=3);
                let mut variants: Vec<Ty> = Vec::new();
                for _ in 0..8 {
                    let candidate = self.plain_ty(depth - 1);
                    if variants.iter().all(|v| v.class() != candidate.class()) {
                        variants.push(candidate);
                    }
                    if variants.len() == wanted {
                        break;
                    }
                }
                if variants.len() == 1 {
                    variants.pop().unwrap()
                } else {
                    Ty::Union(variants)
                }
            }
        }
    }

    fn leaf_ty(&mut self) -> Ty {
        match self.rng.gen_range(0..4) {
            0 => Ty::Bool,
            1 => Ty::Int,
            2 => Ty::Float,
            _ => Ty::Str,
        }
    }

    /// Neither an option nor a union.
    fn plain_ty(&mut self, depth: usize) -> Ty {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return self.leaf_ty();
        }
        if self.rng.gen_bool(0.5) {
            Ty::List(Box::new(self.ty(depth - 1)))
        } else {
            self.record_ty(depth)
        }
    }

    fn record_ty(&mut self, depth: usize) -> Ty {
        let count = self.rng.gen_range(1..=3);
        let mut names = FIELD_NAMES.to_vec();
        names.shuffle(&mut self.rng);
        Ty::Record(
            names[..count]
                .iter()
                .map(|name| (name.to_string(), self.ty(depth - 1)))
                .collect(),
        )
    }

    pub fn int(&mut self) -> i64 {
        match self.rng.gen_range(0..20) {
            0 => i64::MAX,
            1 => i64::MIN,
            2 => self.rng.gen(),
            _ => self.rng.gen_range(-1000..1000),
        }
    }

    pub fn float(&mut self) -> f64 {
        match self.rng.gen_range(0..10) {
            0 => self.rng.gen_range(-1000..1000) as f64,
            1 => *[0.0, -0.0, 1e-300, 5e-324, 1.7976931348623157e308, 0.1, 1e22, 123456789.125]
                .choose(&mut self.rng)
                .unwrap(),
            2 => f64::from_bits(self.rng.gen::<u64>() & !(0x7ffu64 << 52) | (self.rng.gen_range(1u64..0x7fe) << 52)),
            _ => (self.rng.gen_range(-100_000..100_000) as f64) / 1000.0,
        }
    }

    pub fn string(&mut self) -> String {
        let len = self.rng.gen_range(0..6);
        (0..len).map(|_| *CHARS.choose(&mut self.rng).unwrap()).collect()
    }

    pub fn value(&mut self, ty: &Ty) -> Value {
        match ty {
            Ty::Bool => Value::Bool(self.rng.gen()),
            Ty::Int => Value::Int(self.int()),
            Ty::Float => Value::Float(self.float()),
            Ty::Str => Value::Str(self.string()),
            Ty::List(item) => {
                let len = self.rng.gen_range(0..=4);
                Value::List((0..len).map(|_| self.value(item)).collect())
            }
            Ty::Record(fields) => Value::Record(
                fields
                    .iter()
                    .map(|(name, ty)| (name.clone(), self.value(ty)))
                    .collect(),
            ),
            Ty::Option(item) => {
                if self.rng.gen_bool(0.3) {
                    Value::Null
                } else {
                    self.value(item)
                }
            }
            Ty::Union(variants) => {
                let variant = variants.choose(&mut self.rng).unwrap().clone();
                self.value(&variant)
            }
        }
    }

    /// A top-level array (a list value) of up to `max_len` entries of one
    /// random type of nesting at most `depth`.
    pub fn array(&mut self, depth: usize, max_len: usize) -> (Ty, Value) {
        let ty = self.ty(depth);
        let len = self.rng.gen_range(0..=max_len);
        let items = (0..len).map(|_| self.value(&ty)).collect();
        (ty, Value::List(items))
    }

    /// Nested lists of numbers, `depth` levels including the outer one,
    /// roughly `leaves` numbers in total. Returns the value and its JSON text.
    pub fn numbers(&mut self, depth: usize, leaves: usize) -> Value {
        // mean fan-out so that the expected number of leaves is `leaves`
        let fanout = (leaves as f64).powf(1.0 / depth as f64).max(1.0);
        let style = self.rng.gen_range(0..3);
        self.numbers_level(depth, fanout, style)
    }

    fn numbers_level(&mut self, depth: usize, fanout: f64, style: u8) -> Value {
        let len = self.rng.gen_range(0..=(2.0 * fanout) as usize);
        if depth == 1 {
            let mut items = Vec::with_capacity(len);
            for _ in 0..len {
                let float = match style {
                    0 => false,
                    1 => true,
                    _ => self.rng.gen_bool(0.2),
                };
                items.push(if float {
                    Value::Float(self.float())
                } else {
                    Value::Int(self.int())
                });
            }
            Value::List(items)
        } else {
            Value::List((0..len).map(|_| self.numbers_level(depth - 1, fanout, style)).collect())
        }
    }

    /// JSON text for `value`, sometimes with extra whitespace.
    pub fn json_text(&mut self, value: &Value) -> String {
        let compact = value.to_json();
        if self.rng.gen_bool(0.5) {
            compact
        } else {
            let parsed: serde_json::Value = serde_json::from_str(&compact).unwrap();
            serde_json::to_string_pretty(&parsed).unwrap()
        }
    }

    /// A selector tuple for `array`, valid often but not always.
    pub fn selectors(&mut self, array: &Value) -> Vec<Selector> {
        let mut selectors = Vec::new();
        let mut target = array.clone();
        if self.rng.gen_bool(0.3) {
            let mut names = Vec::new();
            oracle::first_record_fields(array, &mut names);
            let name = match names.choose(&mut self.rng) {
                Some(name) if self.rng.gen_bool(0.9) => name.clone(),
                _ => "nope".to_owned(),
            };
            if let Ok((projected, _)) = oracle::project(array, &name) {
                target = projected;
            }
            selectors.push(Selector::Field(name));
        }
        let count = self.rng.gen_range(0..=4);
        let mut flat_used = false;
        for position in 0..count {
            let selector = match self.rng.gen_range(0..10) {
                0 | 1 => Selector::At(self.rng.gen_range(-3..3)),
                2..=4 => {
                    let bound = |rng: &mut ChaCha8Rng| rng.gen_bool(0.6).then(|| rng.gen_range(-4..5));
                    let start = bound(&mut self.rng);
                    let stop = bound(&mut self.rng);
                    let step = *[None, Some(1), Some(2), Some(-1), Some(-2), Some(3)]
                        .choose(&mut self.rng)
                        .unwrap();
                    Selector::Range { start, stop, step }
                }
                5 if !flat_used || self.rng.gen_bool(0.05) => {
                    flat_used = true;
                    let len = self.rng.gen_range(0..4);
                    Selector::FlatIndex((0..len).map(|_| self.rng.gen_range(-3..3)).collect())
                }
                6 if !flat_used || self.rng.gen_bool(0.05) => {
                    flat_used = true;
                    let len = match (position, &target) {
                        (0, Value::List(items)) if self.rng.gen_bool(0.7) => items.len(),
                        _ => self.rng.gen_range(0..5),
                    };
                    Selector::FlatMask((0..len).map(|_| self.rng.gen()).collect())
                }
                7..=9 if position == 0 => self.jagged(&target),
                _ => Selector::all(),
            };
            selectors.push(selector);
        }
        if self.rng.gen_bool(0.1) {
            selectors.shuffle(&mut self.rng);
        }
        selectors
    }

    /// An array whose entries are lists, and a selector tuple that starts
    /// with a jagged selector shaped after it.
    pub fn jagged_case(&mut self) -> (Value, Vec<Selector>) {
        let ty = Ty::List(Box::new(self.ty(3)));
        let len = self.rng.gen_range(0..=8);
        let array = Value::List((0..len).map(|_| self.value(&ty)).collect());
        let mut selectors = vec![self.jagged(&array)];
        match self.rng.gen_range(0..4) {
            0 => selectors.push(Selector::all()),
            1 => selectors.push(Selector::At(self.rng.gen_range(-1..1))),
            2 => selectors.push(Selector::range(Some(1), None, None)),
            _ => {}
        }
        (array, selectors)
    }

    /// A jagged selector shaped after the entries of `target`.
    fn jagged(&mut self, target: &Value) -> Selector {
        let entries: &[Value] = match target {
            Value::List(items) => items,
            _ => &[],
        };
        let mask = self.rng.gen_bool(0.4);
        let deep = self.rng.gen_bool(0.25);
        let mut selector: Vec<Value> = entries
            .iter()
            .map(|entry| self.jagged_entry(entry, mask, deep))
            .collect();
        if self.rng.gen_bool(0.05) {
            selector.push(Value::List(Vec::new()));
        }
        let value = Value::List(selector);
        if mask {
            Selector::JaggedMask(value)
        } else {
            Selector::JaggedIndex(value)
        }
    }

    fn jagged_entry(&mut self, entry: &Value, mask: bool, deep: bool) -> Value {
        let items: &[Value] = match entry {
            Value::List(items) => items,
            Value::Record(fields) if !fields.is_empty() => match &fields[0].1 {
                Value::List(items) => items,
                _ => &[],
            },
            _ => &[],
        };
        if deep {
            return Value::List(items.iter().map(|item| self.jagged_entry(item, mask, false)).collect());
        }
        if mask {
            let mut len = items.len();
            if self.rng.gen_bool(0.05) {
                len += 1;
            }
            Value::List((0..len).map(|_| Value::Bool(self.rng.gen())).collect())
        } else {
            let n = items.len() as i64;
            let count = self.rng.gen_range(0..=3);
            Value::List(
                (0..count)
                    .map(|_| {
                        if n > 0 && self.rng.gen_bool(0.95) {
                            Value::Int(self.rng.gen_range(-n..n))
                        } else {
                            Value::Int(self.rng.gen_range(-3..3))
                        }
                    })
                    .collect(),
            )
        }
    }
}
