//! Randomized equivalence checks shared by the property tests and the
//! acceptance suite. Each runs a fixed number of seeded cases and returns a
//! description of the first failure.

use rand::seq::SliceRandom;
use rand::Rng;
use ragged::kernels::{self, BinaryOp, UnaryOp};
use ragged::layout::Layout;
use ragged::{from_json, from_json_numbers, from_values, getitem, storage, to_json, ufunc, Builder, Selector, SliceError, Value};
use serde_json::json;

use super::gen::Gen;
use super::oracle;

pub type Check = Result<usize, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

/// `to_values(from_values(v)) == v` for values whose numbers do not mix
/// integers and reals in one position.
pub fn values_round_trip(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    for case in 0..cases {
        let (ty, value) = gen.array(4, 12);
        let layout = from_values(&value).map_err(|e| format!("case {case}: {e} for {ty:?}"))?;
        layout.validate().map_err(|e| format!("case {case}: invalid snapshot: {e}"))?;
        ensure!(layout.length() == value.as_list().unwrap().len(), "case {case}: length");
        let back = layout.to_values().map_err(|e| format!("case {case}: {e}"))?;
        ensure!(back == value, "case {case}: round trip of {}\n gave {}", value.to_json(), back.to_json());
    }
    Ok(cases)
}

/// `from_json(t)` equals the value tree of `t`, and `to_json` writes `t`
/// back in compact form.
pub fn json_round_trip(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    for case in 0..cases {
        let (_, value) = gen.array(4, 12);
        let text = gen.json_text(&value);
        let layout = from_json(text.as_bytes()).map_err(|e| format!("case {case}: {e} for {text}"))?;
        let back = layout.to_values().map_err(|e| format!("case {case}: {e}"))?;
        ensure!(back == value, "case {case}: values differ for {text}");
        let written = to_json(&layout).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(written == value.to_json(), "case {case}: wrote {written} for {text}");
        let reparsed: serde_json::Value = serde_json::from_str(&written).map_err(|e| e.to_string())?;
        ensure!(
            Value::from_json_value(&reparsed) == value,
            "case {case}: output is not the same JSON document"
        );
    }
    Ok(cases)
}

/// The numbers fast path and the general path agree on values and types.
/// Every tenth case holds about 10k leaves.
pub fn numbers_fast_path(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    for case in 0..cases {
        let depth = gen.rng.gen_range(1..=4);
        let leaves = if case % 10 == 0 { 10_000 } else { 30 };
        let value = gen.numbers(depth, leaves);
        let text = gen.json_text(&value);
        let fast = from_json_numbers(text.as_bytes(), depth).map_err(|e| format!("case {case}: {e}"))?;
        let general = from_json(text.as_bytes()).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(
            fast.type_string() == general.type_string(),
            "case {case}: types {} vs {}",
            fast.type_string(),
            general.type_string()
        );
        let (a, b) = (fast.to_values().unwrap(), general.to_values().unwrap());
        ensure!(a == b, "case {case}: values differ for {text}");
        let promoted = if general.type_string().ends_with("float64") {
            oracle::promote(&value)
        } else {
            value
        };
        ensure!(a == promoted, "case {case}: values differ from the input");
    }
    Ok(cases)
}

fn kind(e: &SliceError) -> &'static str {
    match e {
        SliceError::TooManySelectors { .. } => "too-many",
        SliceError::FieldNotFound { available, .. } if available.is_empty() => "no-record",
        _ => "other",
    }
}

/// `getitem` agrees with the nested-value interpreter. Returns the number of
/// cases with a successful selection (the rest agree on failing).
/// Every third case is built around a jagged selector.
pub fn slicing(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    let mut selected = 0;
    for case in 0..cases {
        let (value, selectors) = if case % 3 == 2 {
            gen.jagged_case()
        } else {
            let (_, value) = gen.array(4, if case % 4 == 0 { 50 } else { 8 });
            let selectors = gen.selectors(&value);
            (value, selectors)
        };
        let layout = from_values(&value).map_err(|e| e.to_string())?;
        let base = layout.to_values().map_err(|e| e.to_string())?;
        let got = getitem(&layout, &selectors);
        let expected = oracle::getitem(&base, &selectors);
        let context = || format!("case {case}: {selectors:?} on {}", base.to_json());
        match (got, expected) {
            (Ok(item), Ok(sel)) => {
                let value = item.to_value().map_err(|e| format!("{}: {e}", context()))?;
                ensure!(
                    value == sel.value,
                    "{}\n got {}\n expected {}",
                    context(),
                    value.to_json(),
                    sel.value.to_json()
                );
                if let Some(array) = item.as_array() {
                    array.validate().map_err(|e| format!("{}: {e}", context()))?;
                }
                selected += 1;
            }
            (Err(_), Err(_)) => {}
            (Err(e), Ok(sel)) => {
                let excused = match kind(&e) {
                    "too-many" => sel.vacuous,
                    "no-record" => sel.no_record,
                    _ => false,
                };
                ensure!(excused, "{}\n failed with {e}\n expected {}", context(), sel.value.to_json());
            }
            (Ok(item), Err(e)) => {
                return Err(format!("{}\n gave {:?}\n expected an error: {e}", context(), item.to_value()));
            }
        }
    }
    ensure!(selected * 5 > cases, "only {selected} of {cases} selections succeeded");
    Ok(cases)
}

fn rand_vec<T>(gen: &mut Gen, len: usize, mut f: impl FnMut(&mut Gen) -> T) -> Vec<T> {
    (0..len).map(|_| f(gen)).collect()
}

fn random_offsets(gen: &mut Gen, lists: usize, max_len: i64) -> Vec<i64> {
    let mut offsets = vec![0i64];
    for _ in 0..lists {
        let last = *offsets.last().unwrap();
        offsets.push(last + gen.rng.gen_range(0..=max_len));
    }
    offsets
}

fn same_f64(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// Every kernel against a direct loop, `cases` random inputs each; the
/// elementwise kernels also against their sequential and parallel variants.
pub fn kernels_vs_loops(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    let mut checked = 0;
    for case in 0..cases {
        // long inputs now and then, so that the thread-pool path runs
        let n = if case % 100 == 0 {
            kernels::PARALLEL_MIN_LEN + gen.rng.gen_range(0..1000)
        } else {
            gen.rng.gen_range(0..40)
        };
        let ints = rand_vec(&mut gen, n, |g| g.int());
        let floats = rand_vec(&mut gen, n, |g| g.float());

        // gather
        let m = if n > 1000 { n } else { gen.rng.gen_range(0..40) };
        let mut indices: Vec<i64> = rand_vec(&mut gen, m, |g| if n == 0 { 0 } else { g.rng.gen_range(0..n as i64) });
        let bad = m > 0 && gen.rng.gen_bool(0.1);
        if bad {
            let at = gen.rng.gen_range(0..m);
            indices[at] = if gen.rng.gen() { -1 } else { n as i64 };
        }
        let mut out = vec![0.0; m];
        let result = kernels::gather(&floats, &indices, &mut out);
        match indices.iter().position(|&i| i < 0 || i >= n as i64) {
            Some(p) => ensure!(result.map_err(|e| e.position) == Err(p), "gather error position"),
            None => {
                result.map_err(|e| e.to_string())?;
                let expected: Vec<f64> = indices.iter().map(|&i| floats[i as usize]).collect();
                ensure!(same_f64(&out, &expected), "gather, case {case}");
                let mut seq = vec![0.0; m];
                kernels::sequential::gather(&floats, &indices, &mut seq).unwrap();
                ensure!(same_f64(&seq, &expected), "sequential gather");
                #[cfg(feature = "parallel")]
                {
                    let mut par = vec![0.0; m];
                    kernels::parallel::gather(&floats, &indices, &mut par).unwrap();
                    ensure!(same_f64(&par, &expected), "parallel gather");
                }
            }
        }

        // int64_to_float64
        let mut widened = vec![0.0; n];
        kernels::int64_to_float64(&ints, &mut widened).unwrap();
        let expected: Vec<f64> = ints.iter().map(|&i| i as f64).collect();
        ensure!(same_f64(&widened, &expected), "int64_to_float64");

        // map_unary over both integer and float inputs
        for op in [UnaryOp::Sin, UnaryOp::Negate, UnaryOp::Abs, UnaryOp::Identity] {
            let f = |x: f64| match op {
                UnaryOp::Sin => x.sin(),
                UnaryOp::Negate => -x,
                UnaryOp::Abs => x.abs(),
                UnaryOp::Identity => x,
            };
            let mut out = vec![0.0; n];
            kernels::map_unary(op, &floats, &mut out).unwrap();
            ensure!(same_f64(&out, &floats.iter().map(|&x| f(x)).collect::<Vec<_>>()), "map_unary {op:?}");
            kernels::map_unary(op, &ints, &mut out).unwrap();
            ensure!(same_f64(&out, &ints.iter().map(|&x| f(x as f64)).collect::<Vec<_>>()), "map_unary int {op:?}");
            let mut seq = vec![0.0; n];
            kernels::sequential::map_unary(op, &floats, &mut seq).unwrap();
            kernels::map_unary(op, &floats, &mut out).unwrap();
            ensure!(same_f64(&out, &seq), "sequential map_unary {op:?}");
            #[cfg(feature = "parallel")]
            {
                let mut par = vec![0.0; n];
                kernels::parallel::map_unary(op, &floats, &mut par).unwrap();
                ensure!(same_f64(&par, &seq), "parallel map_unary {op:?}");
            }
        }

        // map_binary and map_binary_scalar
        let ints2 = rand_vec(&mut gen, n, |g| g.int());
        let floats2 = rand_vec(&mut gen, n, |g| g.float());
        for op in [BinaryOp::Add, BinaryOp::Multiply] {
            let mut out_i = vec![0i64; n];
            kernels::map_binary(op, &ints, &ints2, &mut out_i).unwrap();
            let expected: Vec<i64> = ints
                .iter()
                .zip(&ints2)
                .map(|(&a, &b)| match op {
                    BinaryOp::Add => a.wrapping_add(b),
                    BinaryOp::Multiply => a.wrapping_mul(b),
                })
                .collect();
            ensure!(out_i == expected, "map_binary int {op:?}");
            let mut out_f = vec![0.0; n];
            kernels::map_binary(op, &floats, &floats2, &mut out_f).unwrap();
            let expected: Vec<f64> = floats
                .iter()
                .zip(&floats2)
                .map(|(&a, &b)| match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Multiply => a * b,
                })
                .collect();
            ensure!(same_f64(&out_f, &expected), "map_binary float {op:?}");
            let scalar = gen.float();
            kernels::map_binary_scalar(op, &floats, scalar, &mut out_f).unwrap();
            let expected: Vec<f64> = floats
                .iter()
                .map(|&a| match op {
                    BinaryOp::Add => a + scalar,
                    BinaryOp::Multiply => a * scalar,
                })
                .collect();
            ensure!(same_f64(&out_f, &expected), "map_binary_scalar {op:?}");
            #[cfg(feature = "parallel")]
            {
                let mut par = vec![0.0; n];
                kernels::parallel::map_binary_scalar(op, &floats, scalar, &mut par).unwrap();
                ensure!(same_f64(&par, &expected), "parallel map_binary_scalar {op:?}");
                let mut par = vec![0i64; n];
                kernels::parallel::map_binary(op, &ints, &ints2, &mut par).unwrap();
                kernels::sequential::map_binary(op, &ints, &ints2, &mut out_i).unwrap();
                ensure!(par == out_i, "parallel map_binary {op:?}");
            }
        }

        // fill
        let value = gen.int();
        let mut filled = vec![0i64; n];
        kernels::fill(value, &mut filled).unwrap();
        ensure!(filled.iter().all(|&x| x == value), "fill");

        // little-endian images
        let mut bytes = vec![0u8; n * 8];
        kernels::encode_le(&floats, &mut bytes).unwrap();
        let expected: Vec<u8> = floats.iter().flat_map(|x| x.to_le_bytes()).collect();
        ensure!(bytes == expected, "encode_le");
        let mut decoded = vec![0.0; n];
        kernels::decode_le(&bytes, &mut decoded).unwrap();
        ensure!(same_f64(&decoded, &floats), "decode_le");
        let flags: Vec<u8> = rand_vec(&mut gen, n.min(40), |g| g.rng.gen_range(0..3));
        let mut bools = vec![false; flags.len()];
        let result = kernels::decode_le(&flags, &mut bools);
        match flags.iter().position(|&b| b > 1) {
            Some(p) => ensure!(result.map_err(|e| e.position) == Err(p), "decode_le bool position"),
            None => ensure!(bools.iter().zip(&flags).all(|(&b, &f)| b == (f == 1)), "decode_le bool"),
        }

        if n > 1000 {
            checked += 1;
            continue;
        }

        // nonzero
        let mask: Vec<bool> = rand_vec(&mut gen, n, |g| g.rng.gen());
        let mut positions = vec![0i64; kernels::nonzero_count(&mask)];
        kernels::nonzero(&mask, &mut positions).unwrap();
        let expected: Vec<i64> = (0..n as i64).filter(|&i| mask[i as usize]).collect();
        ensure!(positions == expected, "nonzero");

        // arange and tile_arange
        let mut range = vec![0i64; n];
        kernels::arange(&mut range).unwrap();
        ensure!(range.iter().enumerate().all(|(i, &x)| x == i as i64), "arange");
        let period = gen.rng.gen_range(1..5);
        kernels::tile_arange(period, &mut range).unwrap();
        ensure!(range.iter().enumerate().all(|(i, &x)| x == i as i64 % period), "tile_arange");

        // list kernels
        let lists = gen.rng.gen_range(0..12);
        let offsets = random_offsets(&mut gen, lists, 5);
        let lengths_of = |o: &[i64]| o.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>();
        let mut lengths = vec![0i64; lists];
        kernels::list_lengths(&offsets, &mut lengths).unwrap();
        ensure!(lengths == lengths_of(&offsets), "list_lengths");

        let total = *offsets.last().unwrap() as usize;
        ensure!(kernels::validate_offsets(&offsets, total).is_ok(), "validate_offsets ok");
        if lists > 0 && total > 0 {
            ensure!(
                kernels::validate_offsets(&offsets, total - 1).map_err(|e| e.position) == Err(lists),
                "validate_offsets short content"
            );
            let mut broken = offsets.clone();
            let at = gen.rng.gen_range(1..broken.len());
            broken[at] = broken[at - 1] - 1;
            let first = broken.windows(2).position(|w| w[1] < w[0]).unwrap();
            ensure!(
                kernels::validate_offsets(&broken, total).map_err(|e| e.position) == Err(first),
                "validate_offsets decreasing"
            );
        }

        // carry_list
        let carry_len = gen_len(&mut gen);
        let carry: Vec<i64> = rand_vec(&mut gen, carry_len, |g| {
            if lists == 0 {
                0
            } else {
                g.rng.gen_range(0..lists as i64)
            }
        });
        if lists > 0 {
            let count = kernels::carry_list_count(&offsets, &carry).unwrap();
            let mut nextoffsets = vec![0i64; carry.len() + 1];
            let mut nextcarry = vec![0i64; count];
            kernels::carry_list(&offsets, &carry, &mut nextoffsets, &mut nextcarry).unwrap();
            let mut expected_offsets = vec![0i64];
            let mut expected_carry = Vec::new();
            for &c in &carry {
                expected_carry.extend(offsets[c as usize]..offsets[c as usize + 1]);
                expected_offsets.push(expected_carry.len() as i64);
            }
            ensure!(nextoffsets == expected_offsets && nextcarry == expected_carry, "carry_list");
        }

        // range_per_list against Python slicing
        let bound = |g: &mut Gen| g.rng.gen_bool(0.6).then(|| g.rng.gen_range(-7..8));
        let (start, stop) = (bound(&mut gen), bound(&mut gen));
        let step = *[1i64, 2, 3, -1, -2, -3].choose(&mut gen.rng).unwrap();
        let count = kernels::range_per_list_count(&offsets, start, stop, step).unwrap();
        let mut nextoffsets = vec![0i64; lists + 1];
        let mut nextcarry = vec![0i64; count];
        kernels::range_per_list(&offsets, start, stop, step, &mut nextoffsets, &mut nextcarry).unwrap();
        let mut expected_offsets = vec![0i64];
        let mut expected_carry = Vec::new();
        for i in 0..lists {
            let len = offsets[i + 1] - offsets[i];
            expected_carry.extend(oracle::py_slice(len, start, stop, step).iter().map(|&j| offsets[i] + j as i64));
            expected_offsets.push(expected_carry.len() as i64);
        }
        ensure!(
            nextoffsets == expected_offsets && nextcarry == expected_carry,
            "range_per_list {start:?}:{stop:?}:{step} on {offsets:?}"
        );

        // list_at and carry_index
        let at = gen.rng.gen_range(-4..4);
        let mut picked = vec![0i64; lists];
        let result = kernels::list_at(&offsets, at, &mut picked);
        let normalize = |i: i64, len: i64| {
            let j = if i < 0 { i + len } else { i };
            (0..len).contains(&j).then_some(j)
        };
        let lens = lengths_of(&offsets);
        match lens.iter().position(|&len| normalize(at, len).is_none()) {
            Some(p) => ensure!(result.map_err(|e| e.position) == Err(p), "list_at error"),
            None => ensure!(
                picked.iter().enumerate().all(|(i, &x)| x == offsets[i] + normalize(at, lens[i]).unwrap()),
                "list_at"
            ),
        }
        let index_len = gen.rng.gen_range(0..4);
        let index: Vec<i64> = rand_vec(&mut gen, index_len, |g| g.rng.gen_range(-3..3));
        let mut nextoffsets = vec![0i64; lists + 1];
        let mut nextcarry = vec![0i64; lists * index.len()];
        let result = kernels::carry_index(&offsets, &index, &mut nextoffsets, &mut nextcarry);
        let flat: Vec<Option<i64>> = (0..lists)
            .flat_map(|i| index.iter().map(move |&j| (i, j)))
            .map(|(i, j)| normalize(j, lens[i]).map(|k| offsets[i] + k))
            .collect();
        match flat.iter().position(Option::is_none) {
            Some(p) => ensure!(result.map_err(|e| e.position) == Err(p), "carry_index error"),
            None => ensure!(
                nextcarry == flat.iter().map(|x| x.unwrap()).collect::<Vec<_>>(),
                "carry_index"
            ),
        }

        // jagged_carry and jagged_nonzero
        let jagged_offsets = random_offsets(&mut gen, lists, 3);
        let jagged_index: Vec<i64> = rand_vec(&mut gen, *jagged_offsets.last().unwrap() as usize, |g| {
            g.rng.gen_range(-3..3)
        });
        let mut nextcarry = vec![0i64; jagged_index.len()];
        let result = kernels::jagged_carry(&offsets, &jagged_offsets, &jagged_index, &mut nextcarry);
        let mut expected = Vec::new();
        let mut failure = None;
        for i in 0..lists {
            for j in jagged_offsets[i]..jagged_offsets[i + 1] {
                match normalize(jagged_index[j as usize], lens[i]) {
                    Some(k) => expected.push(offsets[i] + k),
                    None => {
                        failure.get_or_insert(j as usize);
                    }
                }
            }
        }
        match failure {
            Some(p) => ensure!(result.map_err(|e| e.position) == Err(p), "jagged_carry error"),
            None => ensure!(nextcarry == expected, "jagged_carry"),
        }
        let jmask: Vec<bool> = rand_vec(&mut gen, *jagged_offsets.last().unwrap() as usize, |g| g.rng.gen());
        let count = kernels::jagged_nonzero_count(&jagged_offsets, &jmask).unwrap();
        let mut nextoffsets = vec![0i64; lists + 1];
        let mut local = vec![0i64; count];
        kernels::jagged_nonzero(&jagged_offsets, &jmask, &mut nextoffsets, &mut local).unwrap();
        let mut expected_offsets = vec![0i64];
        let mut expected_local = Vec::new();
        for i in 0..lists {
            for j in jagged_offsets[i]..jagged_offsets[i + 1] {
                if jmask[j as usize] {
                    expected_local.push(j - jagged_offsets[i]);
                }
            }
            expected_offsets.push(expected_local.len() as i64);
        }
        ensure!(nextoffsets == expected_offsets && local == expected_local, "jagged_nonzero");

        // option kernels
        let option_index: Vec<i64> = rand_vec(&mut gen, n, |g| if g.rng.gen_bool(0.3) { -1 } else { g.rng.gen_range(0..50) });
        let present: Vec<usize> = (0..n).filter(|&i| option_index[i] >= 0).collect();
        ensure!(kernels::option_nonnull_count(&option_index) == present.len(), "option_nonnull_count");
        let mut nextcarry = vec![0i64; present.len()];
        let mut outindex = vec![0i64; n];
        kernels::option_nonnull(&option_index, &mut nextcarry, &mut outindex).unwrap();
        ensure!(
            nextcarry == present.iter().map(|&i| option_index[i]).collect::<Vec<_>>(),
            "option_nonnull carry"
        );
        let mut rank = 0;
        for i in 0..n {
            if option_index[i] >= 0 {
                ensure!(outindex[i] == rank, "option_nonnull rank");
                rank += 1;
            } else {
                ensure!(outindex[i] == -1, "option_nonnull missing");
            }
        }
        let mut positions = vec![0i64; present.len()];
        kernels::option_positions(&option_index, &mut positions).unwrap();
        ensure!(positions == present.iter().map(|&i| i as i64).collect::<Vec<_>>(), "option_positions");

        // union kernels
        let tags: Vec<i8> = rand_vec(&mut gen, n, |g| g.rng.gen_range(0..3));
        let union_index: Vec<i64> = rand_vec(&mut gen, n, |g| g.rng.gen_range(0..100));
        let mut local = vec![0i64; n];
        kernels::union_local_index(&tags, &mut local).unwrap();
        for i in 0..n {
            let earlier = tags[..i].iter().filter(|&&t| t == tags[i]).count() as i64;
            ensure!(local[i] == earlier, "union_local_index");
        }
        for which in 0..3i8 {
            let chosen: Vec<usize> = (0..n).filter(|&i| tags[i] == which).collect();
            ensure!(kernels::union_select_count(&tags, which) == chosen.len(), "union_select_count");
            let mut carry = vec![0i64; chosen.len()];
            kernels::union_select(&tags, &union_index, which, &mut carry).unwrap();
            ensure!(carry == chosen.iter().map(|&i| union_index[i]).collect::<Vec<_>>(), "union_select");
            kernels::union_positions(&tags, which, &mut carry).unwrap();
            ensure!(carry == chosen.iter().map(|&i| i as i64).collect::<Vec<_>>(), "union_positions");
        }
        checked += 1;
    }
    Ok(checked)
}

fn gen_len(gen: &mut Gen) -> usize {
    gen.rng.gen_range(0..10)
}

/// Adds random parameters to random nodes.
pub fn decorate(layout: &Layout, gen: &mut Gen) -> Layout {
    let rebuilt = match layout {
        Layout::ListOffset(l) => Layout::list_offset(l.offsets().clone(), decorate(l.content(), gen)),
        Layout::Record(r) => Layout::record(
            r.fields().iter().map(|(n, c)| (n.clone(), decorate(c, gen))).collect(),
            r.length(),
        ),
        Layout::Union(u) => Layout::union(
            u.tags().clone(),
            u.index().clone(),
            u.contents().iter().map(|c| decorate(c, gen)).collect(),
        ),
        Layout::IndexedOption(o) => Layout::indexed_option(o.index().clone(), decorate(o.content(), gen)),
        Layout::Numeric(_) | Layout::Empty(_) => layout.clone(),
    };
    let mut rebuilt = rebuilt.with_parameters(layout.parameters().clone());
    if !matches!(layout, Layout::Empty(_)) && gen.rng.gen_bool(0.3) {
        let note = match gen.rng.gen_range(0..3) {
            0 => json!(gen.int()),
            1 => json!(gen.string()),
            _ => json!({"z": [1, 2.5, null], "a": {"b": true}}),
        };
        rebuilt = rebuilt.set_parameter("note", note);
    }
    rebuilt
}

/// write/read round trip on random layouts, plus determinism of writing.
pub fn storage_round_trip(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for case in 0..cases {
        let (_, value) = gen.array(4, 50);
        let layout = decorate(&from_values(&value).map_err(|e| e.to_string())?, &mut gen);
        let path = dir.path().join(format!("c{case}"));
        storage::write(&layout, &path).map_err(|e| format!("case {case}: {e}"))?;
        let back = storage::read(&path).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(back.to_values().unwrap() == value, "case {case}: values");
        ensure!(back.type_string() == layout.type_string(), "case {case}: type");
        let mut written_params = Vec::new();
        layout.walk(&mut |node| written_params.push(node.parameters().clone()));
        let mut read_params = Vec::new();
        back.walk(&mut |node| read_params.push(node.parameters().clone()));
        ensure!(written_params == read_params, "case {case}: parameters");
        ensure!(back == layout, "case {case}: layouts differ");

        let again = dir.path().join(format!("d{case}"));
        storage::write(&back, &again).map_err(|e| e.to_string())?;
        let mut names: Vec<_> = std::fs::read_dir(&path)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        let mut names_again: Vec<_> = std::fs::read_dir(&again)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names_again.sort();
        ensure!(names == names_again, "case {case}: file sets differ");
        for name in names {
            ensure!(
                std::fs::read(path.join(&name)).unwrap() == std::fs::read(again.join(&name)).unwrap(),
                "case {case}: {name:?} differs between writes"
            );
        }
    }
    Ok(cases)
}

/// `FlatMask m` selects like `FlatIndex(nonzero(m))`, and fields commute with
/// positional selectors.
pub fn selector_equivalences(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    for case in 0..cases {
        let (_, value) = gen.array(3, 10);
        let layout = from_values(&value).map_err(|e| e.to_string())?;
        let n = layout.length();
        let mask: Vec<bool> = rand_vec(&mut gen, n, |g| g.rng.gen());
        let index: Vec<i64> = (0..n as i64).filter(|&i| mask[i as usize]).collect();
        let tail = if gen.rng.gen() { vec![] } else { vec![Selector::all()] };
        let with_mask: Vec<Selector> = [vec![Selector::FlatMask(mask)], tail.clone()].concat();
        let with_index: Vec<Selector> = [vec![Selector::FlatIndex(index)], tail].concat();
        let (a, b) = (getitem(&layout, &with_mask), getitem(&layout, &with_index));
        ensure!(
            a.as_ref().ok().map(|i| i.to_value().unwrap()) == b.as_ref().ok().map(|i| i.to_value().unwrap()),
            "case {case}: mask and index differ"
        );

        let empty = getitem(&layout, &[Selector::FlatIndex(vec![])]).map_err(|e| format!("case {case}: {e}"))?;
        let empty = empty.as_array().unwrap();
        ensure!(empty.length() == 0, "case {case}: empty selection has entries");
        let inner = |t: String| t.split_once(" * ").map(|(_, rest)| rest.to_owned());
        if n > 0 {
            ensure!(
                inner(empty.type_string()) == inner(layout.type_string()),
                "case {case}: empty selection changed the type: {} vs {}",
                empty.type_string(),
                layout.type_string()
            );
        }

        let mut names = Vec::new();
        oracle::first_record_fields(&value, &mut names);
        if let Some(name) = names.first() {
            if let Ok(projected) = layout.project_field(name) {
                let positional = vec![Selector::range(None, None, Some(-1)), Selector::all()];
                let together = getitem(&layout, &[vec![Selector::field(name)], positional.clone()].concat());
                let separately = getitem(&projected, &positional);
                let after = getitem(&layout, &[positional.clone(), vec![Selector::field(name)]].concat());
                let v = |r: &Result<ragged::Item, SliceError>| r.as_ref().ok().map(|i| i.to_value().unwrap());
                ensure!(v(&together) == v(&separately), "case {case}: field does not commute");
                ensure!(v(&together) == v(&after), "case {case}: field position matters");
            }
        }
    }
    Ok(cases)
}

/// Top-level items drawn from one to three random types, so that fills mix
/// kinds and trigger promotions, unions, options and back-filled fields.
fn mixed_items(gen: &mut Gen) -> Vec<Value> {
    let kinds = gen.rng.gen_range(1..=3);
    let types: Vec<_> = (0..kinds).map(|_| gen.ty(3)).collect();
    let len = gen.rng.gen_range(0..=12);
    (0..len)
        .map(|_| {
            let ty = types.choose(&mut gen.rng).unwrap().clone();
            if gen.rng.gen_bool(0.05) {
                Value::Null
            } else {
                gen.value(&ty)
            }
        })
        .collect()
}

/// Builder invariants over random fill sequences: snapshot validity, length
/// monotonicity, monotone types, prefix stability, immutability of earlier
/// snapshots, and the final values.
pub fn builder_invariants(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    for case in 0..cases {
        let items = mixed_items(&mut gen);
        let mut builder = Builder::new();
        let mut snapshots = vec![builder.snapshot().map_err(|e| e.to_string())?];
        let mut seen = vec![snapshots[0].to_values().unwrap()];
        for item in &items {
            builder.fill_value(item).map_err(|e| format!("case {case}: {e}"))?;
            let snap = builder.snapshot().map_err(|e| e.to_string())?;
            snap.validate().map_err(|e| format!("case {case}: invalid snapshot: {e}"))?;
            seen.push(snap.to_values().unwrap());
            snapshots.push(snap);
        }
        let last = snapshots.last().unwrap();
        let Value::List(final_items) = last.to_values().unwrap() else {
            return Err(format!("case {case}: snapshot is not a list"));
        };
        ensure!(
            oracle::same_after_building(&Value::List(items.clone()), &Value::List(final_items.clone())),
            "case {case}: values {:?} became {:?}",
            items,
            final_items
        );
        for (k, (snap, then)) in snapshots.iter().zip(&seen).enumerate() {
            ensure!(snap.length() == k, "case {case}: snapshot {k} has length {}", snap.length());
            ensure!(snap.to_values().unwrap() == *then, "case {case}: snapshot {k} changed after later fills");
            let Value::List(prefix) = then else { unreachable!() };
            ensure!(
                prefix.iter().zip(&final_items).all(|(p, q)| oracle::same_after_building(p, q)),
                "case {case}: snapshot {k} is not a prefix of the final array"
            );
        }
        for pair in snapshots.windows(2) {
            let (a, b) = (pair[0].array_type(), pair[1].array_type());
            ensure!(oracle::embeds(&a, &b), "case {case}: type went from {a:?} to {b:?}");
        }
    }
    Ok(cases)
}

fn union_nodes(layout: &Layout) -> Vec<usize> {
    let mut found = Vec::new();
    layout.walk(&mut |node| {
        if let Layout::Union(u) = node {
            found.push(u.contents().len());
        }
    });
    found
}

/// Number filling never builds a union and converts accumulated integers
/// once per promotion event; two incompatible kinds build exactly one
/// two-member union.
pub fn builder_promotions(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    for case in 0..cases {
        let len = gen.rng.gen_range(0..40);
        let reals: Vec<bool> = rand_vec(&mut gen, len, |g| g.rng.gen_bool(0.3));
        let mut builder = Builder::new();
        for &real in &reals {
            if real {
                builder.real(gen.float()).unwrap();
            } else {
                builder.integer(gen.int()).unwrap();
            }
        }
        let expected = match reals.iter().position(|&r| r) {
            Some(first) if first > 0 => 1,
            _ => 0,
        };
        ensure!(
            builder.promotions() == expected,
            "case {case}: {} promotions for {reals:?}",
            builder.promotions()
        );
        let layout = builder.snapshot().unwrap();
        ensure!(union_nodes(&layout).is_empty(), "case {case}: numbers built a union");

        // two kinds from different classes, each filled at least once
        let samples: [fn(&mut Gen) -> Value; 5] = [
            |g| Value::Bool(g.rng.gen()),
            |g| if g.rng.gen() { Value::Int(g.int()) } else { Value::Float(g.float()) },
            |g| Value::Str(g.string()),
            |g| Value::List(vec![Value::Int(g.int()); g.rng.gen_range(0..3)]),
            |g| Value::Record(vec![("x".into(), Value::Int(g.int()))]),
        ];
        let first = gen.rng.gen_range(0..5);
        let second = (first + gen.rng.gen_range(1..5)) % 5;
        let mut fills = vec![samples[first](&mut gen), samples[second](&mut gen)];
        for _ in 0..gen.rng.gen_range(0..10) {
            let pick = if gen.rng.gen() { first } else { second };
            fills.push(samples[pick](&mut gen));
        }
        fills.shuffle(&mut gen.rng);
        let layout = from_values(&Value::List(fills)).map_err(|e| e.to_string())?;
        ensure!(
            union_nodes(&layout) == vec![2],
            "case {case}: kinds {first} and {second} gave {}",
            layout.type_string()
        );
    }
    Ok(cases)
}

/// Offsets, union tags and indexes and option indexes, in walk order.
fn structure(layout: &Layout) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    layout.walk(&mut |node| match node {
        Layout::ListOffset(l) => out.push(l.offsets().to_vec()),
        Layout::Union(u) => {
            out.push(u.tags().iter().map(|&t| t as i64).collect());
            out.push(u.index().to_vec());
        }
        Layout::IndexedOption(o) => out.push(o.index().to_vec()),
        _ => {}
    });
    out
}

/// Elementwise functions against an interpreter on nested values: unary
/// functions (sin within 1e-12), structure preservation, scalar broadcast
/// against a constant layout, and rejection of non-numeric leaves.
pub fn ufunc_vs_values(seed: u64, cases: usize) -> Check {
    let mut gen = Gen::new(seed);
    let mut applied = 0;
    for case in 0..cases {
        let (_, value) = gen.array(3, 12);
        let layout = from_values(&value).map_err(|e| e.to_string())?;
        let values = layout.to_values().unwrap();
        let type_string = layout.type_string();
        let non_numeric = type_string.contains("bool") || type_string.contains("string");
        let op = *[UnaryOp::Sin, UnaryOp::Negate, UnaryOp::Abs].choose(&mut gen.rng).unwrap();
        let mapped = match ufunc::map_unary(op, &layout) {
            Ok(mapped) => mapped,
            Err(ufunc::UfuncError::NonNumericLeaf { .. }) if non_numeric => continue,
            Err(e) => return Err(format!("case {case}: {e} for {type_string}")),
        };
        ensure!(!non_numeric, "case {case}: {op:?} accepted {type_string}");
        applied += 1;
        let tol = if op == UnaryOp::Sin { 1e-12 } else { 0.0 };
        let reference: fn(f64) -> f64 = match op {
            UnaryOp::Sin => f64::sin,
            UnaryOp::Negate => |x| -x,
            _ => f64::abs,
        };
        let expected = oracle::map_numbers(&values, &reference);
        ensure!(
            oracle::close(&mapped.to_values().unwrap(), &expected, tol),
            "case {case}: {op:?} differs from the interpreter"
        );
        ensure!(structure(&mapped) == structure(&layout), "case {case}: {op:?} changed the structure");

        let multiply = gen.rng.gen();
        let scalar = if gen.rng.gen() { ufunc::Scalar::Int(gen.int()) } else { ufunc::Scalar::Float(gen.float()) };
        let scalar_value = match scalar {
            ufunc::Scalar::Int(i) => Value::Int(i),
            ufunc::Scalar::Float(f) => Value::Float(f),
        };
        let bop = if multiply { BinaryOp::Multiply } else { BinaryOp::Add };
        let broadcast = ufunc::map_binary_scalar(bop, &layout, scalar).map_err(|e| format!("case {case}: {e}"))?;
        let full = ufunc::full_like(&layout, scalar).map_err(|e| format!("case {case}: {e}"))?;
        let paired = ufunc::map_binary(bop, &layout, &full).map_err(|e| format!("case {case}: {e}"))?;
        let got = broadcast.to_values().unwrap();
        ensure!(got == paired.to_values().unwrap(), "case {case}: scalar and full_like differ");
        ensure!(
            got == oracle::map_scalar(&values, multiply, scalar_value),
            "case {case}: {bop:?} differs from the interpreter"
        );
        ensure!(structure(&broadcast) == structure(&layout), "case {case}: {bop:?} changed the structure");
    }
    ensure!(applied * 5 >= cases, "only {applied} of {cases} cases were numeric");
    Ok(cases)
}
