//! Command-line surface: encode, query, sample, sweep, table.
//!
//! Exit codes: 0 on success, 1 on domain errors (reported by [`run`]'s
//! caller), 2 on usage errors (clap). Human output prints percentages to
//! two decimals; `--format csv` and `--format json-lines` switch to
//! machine output with full-precision values.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::query::{apply_query, euclidean_distance, zero_group_probabilities, QueryTarget};
use crate::sampling::{sample, MeasurementHistogram};
use crate::sensor::{normalize_frame, RangePolicy, RawFrame, SensorConfig};
use crate::state::{bitstring, bloch_coordinates, product_state, NormalizedInput, StateVector};
use crate::sweep::{
    default_table_rows, render_table, reproduce_table, run_sweep, write_sweep_csv,
    write_sweep_jsonl, write_table_csv, write_table_jsonl, GridAnchor, SweepMetadata, SweepMode,
    SweepSpec,
};

/// Default sampling seed for paper-style reproduction runs.
pub const DEFAULT_SEED: u64 = 42;

/// Environment variable holding a default sensor config path.
pub const CONFIG_ENV: &str = "QPERCEPTION_CONFIG";

#[derive(Debug, Parser)]
#[command(
    name = "qperception",
    version,
    about = "Quantum-like multi-sensor perception: encode sensor frames as qubit rotations, query beliefs, sample measurements, sweep the input space"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a frame and print amplitudes, probabilities, and Bloch coordinates
    Encode(EncodeArgs),
    /// Change basis toward a target frame and report belief probabilities
    Query(QueryArgs),
    /// Simulate measurement shots and print the histogram
    Sample(SampleArgs),
    /// Evaluate the whole input grid and emit the CSV dataset
    Sweep(SweepArgs),
    /// Exact-versus-sampled probability table for a set of rows
    Table(TableArgs),
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Sensor config file (TOML); falls back to $QPERCEPTION_CONFIG, then the bundled RGB config
    #[arg(long)]
    config: Option<PathBuf>,

    /// Write output to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,

    /// Machine-readable output format
    #[arg(long, value_enum)]
    format: Option<MachineFormat>,

    /// Clamp out-of-range readings to the nearest bound instead of failing
    #[arg(long)]
    clamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MachineFormat {
    Csv,
    JsonLines,
}

/// Exactly one input source: raw readings or an already-normalized vector.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct InputSelection {
    /// Raw readings, comma separated, normalized through the sensor config
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..)]
    frame: Option<Vec<i64>>,

    /// Normalized values in [0, 1], comma separated
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    x: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[command(flatten)]
    input: InputSelection,

    /// Rotation divisor; 1 encodes a single reading instant
    #[arg(long, default_value_t = 1.0)]
    tau: f64,

    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Input frame, raw readings comma separated
    #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..)]
    frame: Vec<i64>,

    /// Target frame, raw readings comma separated
    #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..)]
    target: Vec<i64>,

    /// Also simulate this many measurement shots
    #[arg(long)]
    shots: Option<u64>,

    /// Sampling seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[arg(long, default_value_t = 1.0)]
    tau: f64,

    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    input: InputSelection,

    /// Optional query target applied before sampling
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..)]
    target: Option<Vec<i64>>,

    /// Number of measurement shots
    #[arg(long)]
    shots: u64,

    /// Sampling seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[arg(long, default_value_t = 1.0)]
    tau: f64,

    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Grid stride in domain units
    #[arg(long)]
    step: i64,

    /// Optional query target frame
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..)]
    target: Option<Vec<i64>>,

    /// Grid anchoring within the sensor bounds
    #[arg(long, value_enum, default_value = "lower")]
    grid: GridFlag,

    /// Simulate shot frequencies per grid point instead of exact probabilities
    #[arg(long)]
    sampled: bool,

    /// Shots per grid point (sampled mode)
    #[arg(long, requires = "sampled")]
    shots: Option<u64>,

    /// Base seed for sampled mode; per-point streams derive from it
    #[arg(long, requires = "sampled")]
    seed: Option<u64>,

    #[arg(long, default_value_t = 1.0)]
    tau: f64,

    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GridFlag {
    /// {lower, lower+step, ...} strictly below the upper bound
    Lower,
    /// {lower+step, ...} up to and including the upper bound
    Upper,
}

impl From<GridFlag> for GridAnchor {
    fn from(flag: GridFlag) -> Self {
        match flag {
            GridFlag::Lower => GridAnchor::LowerInclusive,
            GridFlag::Upper => GridAnchor::UpperInclusive,
        }
    }
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Rows file with one `r,g,b` or `r,g,b,tr,tg,tb` line per row;
    /// defaults to the bundled showcase rows
    #[arg(long)]
    rows: Option<PathBuf>,

    /// Shots for the sampled column of each row
    #[arg(long, default_value_t = 1_000_000)]
    shots: u64,

    /// Base sampling seed; each row uses its own stream
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[arg(long, default_value_t = 1.0)]
    tau: f64,

    #[command(flatten)]
    io: IoArgs,
}

/// Parses process arguments and executes the selected command against
/// stdout.
pub fn run() -> Result<()> {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    execute(cli, &mut out)
}

/// Executes a parsed invocation, writing to `default_out` unless the
/// command carries `--output`.
pub fn execute(cli: Cli, default_out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Encode(args) => cmd_encode(args, default_out),
        Command::Query(args) => cmd_query(args, default_out),
        Command::Sample(args) => cmd_sample(args, default_out),
        Command::Sweep(args) => cmd_sweep(args, default_out),
        Command::Table(args) => cmd_table(args, default_out),
    }
}

fn load_config(explicit: Option<&Path>) -> Result<SensorConfig> {
    if let Some(path) = explicit {
        return SensorConfig::from_path(path);
    }
    if let Some(path) = std::env::var_os(CONFIG_ENV) {
        return SensorConfig::from_path(path);
    }
    Ok(SensorConfig::default_rgb())
}

fn policy(io: &IoArgs) -> RangePolicy {
    if io.clamp {
        RangePolicy::Clamp
    } else {
        RangePolicy::Reject
    }
}

fn with_writer(
    output: Option<&Path>,
    fallback: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match output {
        Some(path) => {
            let mut writer = io::BufWriter::new(fs::File::create(path)?);
            f(&mut writer)?;
            writer.flush()?;
            Ok(())
        }
        None => f(fallback),
    }
}

fn resolve_input(
    sel: &InputSelection,
    config: &SensorConfig,
    policy: RangePolicy,
) -> Result<(Option<RawFrame>, NormalizedInput)> {
    match (&sel.frame, &sel.x) {
        (Some(readings), None) => {
            let frame = RawFrame::new(readings.clone());
            let input = normalize_frame(&frame, config, policy)?;
            Ok((Some(frame), input))
        }
        (None, Some(values)) => {
            if values.len() != config.len() {
                return Err(Error::LengthMismatch {
                    expected: config.len(),
                    actual: values.len(),
                });
            }
            Ok((None, NormalizedInput::new(values.clone())?))
        }
        _ => unreachable!("clap enforces exactly one input source"),
    }
}

fn cmd_encode(args: EncodeArgs, default_out: &mut dyn Write) -> Result<()> {
    let config = load_config(args.io.config.as_deref())?;
    let (frame, input) = resolve_input(&args.input, &config, policy(&args.io))?;
    let state = product_state(&input, args.tau)?;
    with_writer(args.io.output.as_deref(), default_out, |out| {
        match args.io.format {
            None => write_encode_human(out, frame.as_ref(), &input, &state, &config, args.tau),
            Some(MachineFormat::Csv) => write_encode_csv(out, &input, &state, &config),
            Some(MachineFormat::JsonLines) => write_encode_jsonl(out, &input, &state, &config),
        }
    })
}

fn write_encode_human(
    out: &mut dyn Write,
    frame: Option<&RawFrame>,
    input: &NormalizedInput,
    state: &StateVector,
    config: &SensorConfig,
    tau: f64,
) -> Result<()> {
    if let Some(frame) = frame {
        writeln!(out, "frame: {frame}")?;
    }
    let xs: Vec<String> = input.values().iter().map(|v| format!("{v:.6}")).collect();
    writeln!(out, "x: [{}]", xs.join(", "))?;
    writeln!(out, "tau: {tau}")?;
    writeln!(out)?;
    writeln!(out, "state  amplitude  probability")?;
    let n = state.n();
    for (b, c) in state.amplitudes().iter().enumerate() {
        writeln!(
            out,
            "{:<6} {:>9.6} {:>11.2}%",
            bitstring(b, n),
            c,
            c * c * 100.0
        )?;
    }
    writeln!(out)?;
    writeln!(out, "qubit  sensor  x         bloch_x    bloch_y    bloch_z")?;
    for (i, (&x, sensor)) in input.values().iter().zip(config.sensors()).enumerate() {
        let p = bloch_coordinates(x)?;
        writeln!(
            out,
            "{:<6} {:<7} {:<9.6} {:>9.6} {:>10.6} {:>10.6}",
            i + 1,
            sensor.name(),
            x,
            p.x,
            p.y,
            p.z
        )?;
    }
    Ok(())
}

fn write_encode_csv(
    out: &mut dyn Write,
    input: &NormalizedInput,
    state: &StateVector,
    config: &SensorConfig,
) -> Result<()> {
    writeln!(out, "state,amplitude,probability")?;
    let n = state.n();
    for (b, c) in state.amplitudes().iter().enumerate() {
        writeln!(out, "{},{},{}", bitstring(b, n), c, c * c)?;
    }
    writeln!(out)?;
    writeln!(out, "qubit,sensor,x,bloch_x,bloch_y,bloch_z")?;
    for (i, (&x, sensor)) in input.values().iter().zip(config.sensors()).enumerate() {
        let p = bloch_coordinates(x)?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            i + 1,
            sensor.name(),
            x,
            p.x,
            p.y,
            p.z
        )?;
    }
    Ok(())
}

fn write_encode_jsonl(
    out: &mut dyn Write,
    input: &NormalizedInput,
    state: &StateVector,
    config: &SensorConfig,
) -> Result<()> {
    let n = state.n();
    for (b, c) in state.amplitudes().iter().enumerate() {
        let value = serde_json::json!({
            "record": "state",
            "state": bitstring(b, n),
            "amplitude": c,
            "probability": c * c,
        });
        writeln!(out, "{value}")?;
    }
    for (i, (&x, sensor)) in input.values().iter().zip(config.sensors()).enumerate() {
        let p = bloch_coordinates(x)?;
        let value = serde_json::json!({
            "record": "bloch",
            "qubit": i + 1,
            "sensor": sensor.name(),
            "x": x,
            "bloch_x": p.x,
            "bloch_y": p.y,
            "bloch_z": p.z,
        });
        writeln!(out, "{value}")?;
    }
    Ok(())
}

fn cmd_query(args: QueryArgs, default_out: &mut dyn Write) -> Result<()> {
    let config = load_config(args.io.config.as_deref())?;
    let policy = policy(&args.io);
    let frame = RawFrame::new(args.frame.clone());
    let target_frame = RawFrame::new(args.target.clone());
    let input = normalize_frame(&frame, &config, policy)?;
    let target = QueryTarget::from(normalize_frame(&target_frame, &config, policy)?);
    let state = apply_query(&input, &target, args.tau)?;
    let probs = state.probabilities();
    let groups = zero_group_probabilities(&probs, config.len())?;
    let distance = euclidean_distance(&frame, &target_frame)?;
    let hist = args
        .shots
        .map(|shots| sample(&probs, shots, args.seed))
        .transpose()?;

    let n = config.len();
    with_writer(args.io.output.as_deref(), default_out, |out| {
        match args.io.format {
            None => {
                writeln!(out, "input:    {frame}")?;
                writeln!(out, "target:   {target_frame}")?;
                writeln!(out, "distance: {distance:.2}")?;
                writeln!(out)?;
                writeln!(out, "state  probability")?;
                for (b, p) in probs.iter().enumerate() {
                    writeln!(out, "{:<6} {:>10.2}%", bitstring(b, n), p * 100.0)?;
                }
                writeln!(out)?;
                writeln!(out, "zeros  probability")?;
                for zeros in (0..=n).rev() {
                    writeln!(out, "{:<6} {:>10.2}%", zeros, groups.mass(zeros) * 100.0)?;
                }
                if let Some(hist) = &hist {
                    writeln!(out)?;
                    writeln!(out, "sampled shots={} seed={}", hist.shots(), hist.seed())?;
                    writeln!(out, "state  count        frequency")?;
                    for (b, &c) in hist.counts().iter().enumerate() {
                        writeln!(
                            out,
                            "{:<6} {:<12} {}",
                            bitstring(b, n),
                            c,
                            c as f64 / hist.shots() as f64
                        )?;
                    }
                }
                Ok(())
            }
            Some(MachineFormat::Csv) => {
                writeln!(out, "state,probability,count,frequency")?;
                for (b, p) in probs.iter().enumerate() {
                    match &hist {
                        Some(h) => writeln!(
                            out,
                            "{},{},{},{}",
                            bitstring(b, n),
                            p,
                            h.count(b),
                            h.count(b) as f64 / h.shots() as f64
                        )?,
                        None => writeln!(out, "{},{},,", bitstring(b, n), p)?,
                    }
                }
                writeln!(out)?;
                writeln!(out, "zeros,probability")?;
                for zeros in (0..=n).rev() {
                    writeln!(out, "{},{}", zeros, groups.mass(zeros))?;
                }
                writeln!(out)?;
                writeln!(out, "distance")?;
                writeln!(out, "{distance}")?;
                Ok(())
            }
            Some(MachineFormat::JsonLines) => {
                for (b, p) in probs.iter().enumerate() {
                    let value = serde_json::json!({
                        "record": "state",
                        "state": bitstring(b, n),
                        "probability": p,
                        "count": hist.as_ref().map(|h| h.count(b)),
                        "frequency": hist.as_ref().map(|h| h.count(b) as f64 / h.shots() as f64),
                    });
                    writeln!(out, "{value}")?;
                }
                for zeros in (0..=n).rev() {
                    let value = serde_json::json!({
                        "record": "zeros",
                        "zeros": zeros,
                        "probability": groups.mass(zeros),
                    });
                    writeln!(out, "{value}")?;
                }
                let value = serde_json::json!({
                    "record": "distance",
                    "distance": distance,
                });
                writeln!(out, "{value}")?;
                if let Some(h) = &hist {
                    let value = serde_json::json!({
                        "record": "sampling",
                        "shots": h.shots(),
                        "seed": h.seed(),
                    });
                    writeln!(out, "{value}")?;
                }
                Ok(())
            }
        }
    })
}

fn cmd_sample(args: SampleArgs, default_out: &mut dyn Write) -> Result<()> {
    let config = load_config(args.io.config.as_deref())?;
    let policy = policy(&args.io);
    let (_, input) = resolve_input(&args.input, &config, policy)?;
    let state = match &args.target {
        Some(readings) => {
            let target_frame = RawFrame::new(readings.clone());
            let target = QueryTarget::from(normalize_frame(&target_frame, &config, policy)?);
            apply_query(&input, &target, args.tau)?
        }
        None => product_state(&input, args.tau)?,
    };
    let hist = sample(&state.probabilities(), args.shots, args.seed)?;
    with_writer(args.io.output.as_deref(), default_out, |out| {
        write_histogram(out, &hist, args.io.format)
    })
}

fn write_histogram(
    out: &mut dyn Write,
    hist: &MeasurementHistogram,
    format: Option<MachineFormat>,
) -> Result<()> {
    match format {
        None => write!(out, "{}", hist.to_text())?,
        Some(MachineFormat::Csv) => {
            writeln!(out, "bitstring,count,frequency")?;
            write!(out, "{}", hist.to_text())?;
        }
        Some(MachineFormat::JsonLines) => {
            let n = hist.n_qubits();
            for (b, &c) in hist.counts().iter().enumerate() {
                let value = serde_json::json!({
                    "state": bitstring(b, n),
                    "count": c,
                    "frequency": c as f64 / hist.shots() as f64,
                });
                writeln!(out, "{value}")?;
            }
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs, default_out: &mut dyn Write) -> Result<()> {
    let config = load_config(args.io.config.as_deref())?;
    let mode = if args.sampled {
        SweepMode::Sampled {
            shots: args.shots.unwrap_or(1_000_000),
            base_seed: args.seed.unwrap_or(DEFAULT_SEED),
        }
    } else {
        SweepMode::Exact
    };
    let spec = SweepSpec {
        step: args.step,
        target: args.target.clone().map(RawFrame::new),
        mode,
        anchor: args.grid.into(),
        tau: args.tau,
    };
    let records = run_sweep(&spec, &config)?;
    with_writer(args.io.output.as_deref(), default_out, |out| {
        match args.io.format {
            Some(MachineFormat::JsonLines) => write_sweep_jsonl(&records, out),
            _ => write_sweep_csv(&records, &config, out),
        }
    })?;
    if let Some(path) = &args.io.output {
        let meta = SweepMetadata::new(&spec, &config, records.len());
        let mut writer = io::BufWriter::new(fs::File::create(metadata_path(path))?);
        meta.write(&mut writer)?;
        writer.flush()?;
    }
    Ok(())
}

fn metadata_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn cmd_table(args: TableArgs, default_out: &mut dyn Write) -> Result<()> {
    let config = load_config(args.io.config.as_deref())?;
    let rows = match &args.rows {
        Some(path) => parse_rows_file(&fs::read_to_string(path)?, config.len())?,
        None => default_table_rows(),
    };
    let table = reproduce_table(&rows, &config, args.shots, args.seed, args.tau)?;
    with_writer(args.io.output.as_deref(), default_out, |out| {
        match args.io.format {
            None => {
                write!(out, "{}", render_table(&table))?;
                Ok(())
            }
            Some(MachineFormat::Csv) => write_table_csv(&table, &config, out),
            Some(MachineFormat::JsonLines) => write_table_jsonl(&table, out),
        }
    })
}

fn parse_rows_file(text: &str, n: usize) -> Result<Vec<(RawFrame, Option<RawFrame>)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<i64>().map_err(|e| Error::InvalidRow {
                    reason: format!("line {}: {e}", idx + 1),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() == n {
            rows.push((RawFrame::new(values), None));
        } else if values.len() == 2 * n {
            rows.push((
                RawFrame::new(values[..n].to_vec()),
                Some(RawFrame::new(values[n..].to_vec())),
            ));
        } else {
            return Err(Error::InvalidRow {
                reason: format!(
                    "line {}: expected {} or {} values, got {}",
                    idx + 1,
                    n,
                    2 * n,
                    values.len()
                ),
            });
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidRow {
            reason: "no rows found".into(),
        });
    }
    Ok(rows)
}
