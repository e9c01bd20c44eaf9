mod expr;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use ragged::json::{from_json_numbers_reader, from_json_reader};
use ragged::{getitem, storage, to_json, JsonError, JsonOptions, Layout};

#[derive(Parser)]
#[command(name = "ragged", version, about = "Convert, inspect, slice and benchmark jagged columnar arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert JSON to a container directory and print its type.
    Convert {
        input: PathBuf,
        output: PathBuf,
        /// Read one JSON value per line.
        #[arg(long)]
        ndjson: bool,
        /// Use the numbers fast path for lists nested to this depth.
        #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
        numbers_depth: Option<u64>,
    },
    /// Print the type of a container or JSON file.
    Type { input: PathBuf },
    /// Slice a container or JSON file and print the result as JSON.
    Slice {
        input: PathBuf,
        /// Comma-separated selectors, e.g. '"y", [0, 2], :, 1:'.
        #[arg(allow_hyphen_values = true)]
        expression: String,
        /// Read INPUT as a JSON file.
        #[arg(long)]
        json: bool,
    },
    /// Print a container or JSON file as compact JSON.
    Tojson { input: PathBuf },
    /// Time repeated conversions and report throughput in MB/s.
    Bench {
        input: PathBuf,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        repeat: u64,
        #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
        numbers_depth: Option<u64>,
        #[arg(long)]
        ndjson: bool,
    },
}

/// A diagnostic and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

const PARSE_OR_SLICE: u8 = 1;
const IO_OR_FORMAT: u8 = 2;
const SYNTAX: u8 = 3;

fn fail<T>(code: u8, message: impl ToString) -> Result<T, Failure> {
    Err(Failure {
        code,
        message: message.to_string(),
    })
}

fn json_failure(path: &Path, e: JsonError) -> Failure {
    let code = match e {
        JsonError::Io(_) => IO_OR_FORMAT,
        _ => PARSE_OR_SLICE,
    };
    Failure {
        code,
        message: format!("{}: {e}", path.display()),
    }
}

fn convert_reader<R: std::io::Read>(reader: R, numbers_depth: Option<u64>, ndjson: bool) -> Result<Layout, JsonError> {
    match numbers_depth {
        Some(depth) => from_json_numbers_reader(reader, depth as usize),
        None => from_json_reader(
            reader,
            JsonOptions {
                ndjson,
                ..JsonOptions::default()
            },
        ),
    }
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).or_else(|e| fail(IO_OR_FORMAT, format!("{}: {e}", path.display())))
}

/// Loads a container directory, or a JSON file when `path` is a file.
fn load(path: &Path, force_json: bool) -> Result<Layout, Failure> {
    if path.is_dir() && !force_json {
        return storage::read(path).or_else(|e| fail(IO_OR_FORMAT, format!("{}: {e}", path.display())));
    }
    let file = open(path)?;
    if path.is_dir() {
        return fail(IO_OR_FORMAT, format!("{}: is a directory, not a JSON file", path.display()));
    }
    convert_reader(file, None, false).map_err(|e| json_failure(path, e))
}

fn print(out: &mut impl Write, text: &str) -> Result<(), Failure> {
    writeln!(out, "{text}").or_else(|e| fail(IO_OR_FORMAT, format!("writing output: {e}")))
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Convert {
            input,
            output,
            ndjson,
            numbers_depth,
        } => {
            let layout = convert_reader(open(&input)?, numbers_depth, ndjson).map_err(|e| json_failure(&input, e))?;
            storage::write(&layout, &output).or_else(|e| fail(IO_OR_FORMAT, format!("{}: {e}", output.display())))?;
            print(out, &layout.type_string())
        }
        Command::Type { input } => {
            // any unreadable or invalid input is an input problem here
            let layout = load(&input, false).map_err(|f| Failure {
                code: IO_OR_FORMAT,
                ..f
            })?;
            print(out, &layout.type_string())
        }
        Command::Slice { input, expression, json } => {
            let selectors = expr::parse(&expression).or_else(|e| fail(SYNTAX, e))?;
            let layout = load(&input, json)?;
            let item = getitem(&layout, &selectors).or_else(|e| fail(PARSE_OR_SLICE, e))?;
            let text = match item.as_array() {
                Some(array) => to_json(array),
                None => item.to_json(),
            };
            print(out, &text.or_else(|e| fail(IO_OR_FORMAT, e))?)
        }
        Command::Tojson { input } => {
            let layout = load(&input, false)?;
            print(out, &to_json(&layout).or_else(|e| fail(IO_OR_FORMAT, e))?)
        }
        Command::Bench {
            input,
            repeat,
            numbers_depth,
            ndjson,
        } => {
            let bytes = std::fs::read(&input).or_else(|e| fail(IO_OR_FORMAT, format!("{}: {e}", input.display())))?;
            // untimed first run: rejects bad input before any timing output
            convert_reader(&bytes[..], numbers_depth, ndjson).map_err(|e| json_failure(&input, e))?;
            let megabytes = bytes.len() as f64 / 1e6;
            let mut rates = Vec::with_capacity(repeat as usize);
            for run in 1..=repeat {
                let start = Instant::now();
                let layout =
                    convert_reader(&bytes[..], numbers_depth, ndjson).map_err(|e| json_failure(&input, e))?;
                let seconds = start.elapsed().as_secs_f64();
                drop(layout);
                let rate = megabytes / seconds.max(1e-9);
                print(out, &format!("run={run} seconds={seconds:.6} mbps={rate:.3}"))?;
                rates.push(rate);
            }
            print(out, &format!("median_mbps={:.3}", median(&mut rates)))
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
