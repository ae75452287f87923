//! Exhaustive input sweeps and the case-study comparison table.
//!
//! A sweep evaluates the model over a stride grid of raw inputs, in
//! lexicographic order, producing one [`SweepRecord`] per grid point with
//! exact (or optionally sampled) outcome probabilities, zero-count group
//! masses, and the Euclidean distance to a reference frame. Grid points
//! are independent, so evaluation is parallel, but output order is always
//! the lexicographic one regardless of scheduling.
//!
//! Grid definition: the default anchor starts at each sensor's lower bound
//! and steps while strictly below the upper bound, so `[0, 255]` with step
//! 5 gives the 51 values `{0, 5, ..., 250}` and a 3-channel sweep has
//! 51^3 = 132651 points. The alternative anchor `{5, ..., 255}` keeps the
//! upper endpoint instead; both are 51 values per axis at step 5.
//!
//! The CSV dataset has a header line and one row per record:
//! `r,g,b,distance,p_000,...,p_111,g3,g2,g1,g0` (column names follow the
//! configured sensors; state columns are MSB-first bitstrings). Floats are
//! printed with 12 significant digits.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::query::{apply_query, euclidean_distance, zero_group_probabilities, QueryTarget, ZeroGroupSummary};
use crate::sampling::{sample_with_stream, MeasurementHistogram};
use crate::sensor::{normalize_frame, RangePolicy, RawFrame, SensorConfig, SensorSpec};
use crate::state::{bitstring, product_state};

/// How grid values are anchored within each sensor's bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridAnchor {
    /// `{lower, lower+step, ...}` strictly below the upper bound.
    #[default]
    LowerInclusive,
    /// `{lower+step, ...}` up to and including the upper bound.
    UpperInclusive,
}

/// Exact closed-form probabilities, or simulated shot frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    Exact,
    Sampled { shots: u64, base_seed: u64 },
}

/// Parameters of one sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub step: i64,
    pub target: Option<RawFrame>,
    pub mode: SweepMode,
    pub anchor: GridAnchor,
    pub tau: f64,
}

impl SweepSpec {
    /// Exact-mode sweep with the default grid anchor and `tau = 1`.
    pub fn exact(step: i64) -> Self {
        Self {
            step,
            target: None,
            mode: SweepMode::Exact,
            anchor: GridAnchor::default(),
            tau: 1.0,
        }
    }
}

/// Model evaluation at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub raw_input: RawFrame,
    pub distance: f64,
    pub probs: Vec<f64>,
    pub groups: ZeroGroupSummary,
}

/// Grid values for one sensor axis.
fn grid_axis(sensor: &SensorSpec, step: i64, anchor: GridAnchor) -> Result<Vec<i64>> {
    if step <= 0 {
        return Err(Error::InvalidStride { step });
    }
    let mut values = Vec::new();
    match anchor {
        GridAnchor::LowerInclusive => {
            let mut v = sensor.lower();
            while v < sensor.upper() {
                values.push(v);
                v += step;
            }
        }
        GridAnchor::UpperInclusive => {
            let mut v = sensor.lower() + step;
            while v <= sensor.upper() {
                values.push(v);
                v += step;
            }
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyGrid {
            name: sensor.name().to_string(),
        });
    }
    Ok(values)
}

/// Runs the sweep, returning one record per grid point in lexicographic
/// order of the raw inputs. With a target, the query operator is applied
/// before computing probabilities and distances are measured against the
/// target frame; otherwise distances are measured against the all-lower
/// -bound frame. In sampled mode each grid point draws from its own
/// deterministic stream, indexed by grid position.
pub fn run_sweep(spec: &SweepSpec, config: &SensorConfig) -> Result<Vec<SweepRecord>> {
    let axes = config
        .sensors()
        .iter()
        .map(|s| grid_axis(s, spec.step, spec.anchor))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = axes.iter().map(Vec::len).product();
    let n = config.len();

    let reference = match &spec.target {
        Some(t) => t.clone(),
        None => config.lower_bound_frame(),
    };
    let target = spec
        .target
        .as_ref()
        .map(|t| normalize_frame(t, config, RangePolicy::Reject).map(QueryTarget::from))
        .transpose()?;

    (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut rem = idx;
            let mut readings = vec![0i64; n];
            for axis in (0..n).rev() {
                let len = axes[axis].len();
                readings[axis] = axes[axis][rem % len];
                rem /= len;
            }
            let frame = RawFrame::new(readings);
            let input = normalize_frame(&frame, config, RangePolicy::Reject)?;
            let state = match &target {
                Some(t) => apply_query(&input, t, spec.tau)?,
                None => product_state(&input, spec.tau)?,
            };
            let exact = state.probabilities();
            let probs = match spec.mode {
                SweepMode::Exact => exact,
                SweepMode::Sampled { shots, base_seed } => {
                    sample_with_stream(&exact, shots, base_seed, idx as u64)?.frequencies()
                }
            };
            let groups = zero_group_probabilities(&probs, n)?;
            let distance = euclidean_distance(&frame, &reference)?;
            Ok(SweepRecord {
                raw_input: frame,
                distance,
                probs,
                groups,
            })
        })
        .collect()
}

/// One point of the distance/belief curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub distance: f64,
    pub groups: ZeroGroupSummary,
}

/// Projects sweep records onto (distance, grouped probabilities), ordered
/// by distance ascending with ties broken by lexicographic raw input.
pub fn confidence_curve(records: &[SweepRecord]) -> Vec<CurvePoint> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        records[a]
            .distance
            .partial_cmp(&records[b].distance)
            .expect("distances are finite")
            .then_with(|| records[a].raw_input.readings().cmp(records[b].raw_input.readings()))
    });
    order
        .into_iter()
        .map(|i| CurvePoint {
            distance: records[i].distance,
            groups: records[i].groups.clone(),
        })
        .collect()
}

/// One comparison-table row: exact probabilities next to a sampled run.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub input: RawFrame,
    pub target: Option<RawFrame>,
    pub distance: Option<f64>,
    pub exact: Vec<f64>,
    pub sampled: MeasurementHistogram,
}

/// Evaluates each `(input, optional target)` row exactly and with `shots`
/// simulated measurements (row index selects the sampling stream). With a
/// target the Euclidean distance between the raw frames is reported.
pub fn reproduce_table(
    rows: &[(RawFrame, Option<RawFrame>)],
    config: &SensorConfig,
    shots: u64,
    seed: u64,
    tau: f64,
) -> Result<Vec<TableRow>> {
    rows.iter()
        .enumerate()
        .map(|(i, (frame, target))| {
            let input = normalize_frame(frame, config, RangePolicy::Reject)?;
            let (state, distance) = match target {
                Some(t) => {
                    let tn =
                        QueryTarget::from(normalize_frame(t, config, RangePolicy::Reject)?);
                    (
                        apply_query(&input, &tn, tau)?,
                        Some(euclidean_distance(frame, t)?),
                    )
                }
                None => (product_state(&input, tau)?, None),
            };
            let exact = state.probabilities();
            let sampled = sample_with_stream(&exact, shots, seed, i as u64)?;
            Ok(TableRow {
                input: frame.clone(),
                target: target.clone(),
                distance,
                exact,
                sampled,
            })
        })
        .collect()
}

/// The bundled RGB showcase rows: six canonical-basis inputs and four
/// queries against the target (132, 35, 107).
pub fn default_table_rows() -> Vec<(RawFrame, Option<RawFrame>)> {
    let target = RawFrame::new(vec![132, 35, 107]);
    let canonical = [
        [0, 25, 0],
        [55, 0, 210],
        [10, 75, 125],
        [0, 200, 200],
        [230, 15, 230],
        [215, 225, 220],
    ];
    let queried = [[102, 18, 124], [84, 48, 38], [36, 101, 84], [239, 239, 110]];
    let mut rows: Vec<(RawFrame, Option<RawFrame>)> = canonical
        .iter()
        .map(|r| (RawFrame::new(r.to_vec()), None))
        .collect();
    rows.extend(
        queried
            .iter()
            .map(|r| (RawFrame::new(r.to_vec()), Some(target.clone()))),
    );
    rows
}

/// 12 significant digits, the sweep dataset float format.
pub(crate) fn fmt_sig(v: f64) -> String {
    format!("{v:.11e}")
}

/// Writes the sweep CSV dataset: header, then one row per record in the
/// given order.
pub fn write_sweep_csv<W: Write + ?Sized>(
    records: &[SweepRecord],
    config: &SensorConfig,
    out: &mut W,
) -> Result<()> {
    let n = config.len();
    let mut header = config
        .sensors()
        .iter()
        .map(|s| s.name().to_lowercase())
        .collect::<Vec<_>>()
        .join(",");
    header.push_str(",distance");
    for b in 0..1usize << n {
        header.push_str(",p_");
        header.push_str(&bitstring(b, n));
    }
    for zeros in (0..=n).rev() {
        header.push_str(&format!(",g{zeros}"));
    }
    writeln!(out, "{header}")?;

    let mut line = String::new();
    for record in records {
        line.clear();
        for (i, r) in record.raw_input.readings().iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&r.to_string());
        }
        line.push(',');
        line.push_str(&fmt_sig(record.distance));
        for p in &record.probs {
            line.push(',');
            line.push_str(&fmt_sig(*p));
        }
        for zeros in (0..=n).rev() {
            line.push(',');
            line.push_str(&fmt_sig(record.groups.mass(zeros)));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Writes sweep records as JSON lines.
pub fn write_sweep_jsonl<W: Write + ?Sized>(records: &[SweepRecord], out: &mut W) -> Result<()> {
    for record in records {
        let value = serde_json::json!({
            "input": record.raw_input.readings(),
            "distance": record.distance,
            "probabilities": record.probs,
            "zero_groups": record.groups.masses(),
        });
        writeln!(out, "{value}")?;
    }
    Ok(())
}

/// Companion metadata describing how a sweep dataset was produced.
#[derive(Debug, Serialize)]
pub struct SweepMetadata<'a> {
    pub step: i64,
    pub grid: GridAnchor,
    pub mode: SweepMode,
    pub target: Option<&'a [i64]>,
    pub tau: f64,
    pub sensors: Vec<SensorSummary>,
    pub record_count: usize,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct SensorSummary {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
}

impl<'a> SweepMetadata<'a> {
    pub fn new(spec: &'a SweepSpec, config: &SensorConfig, record_count: usize) -> Self {
        Self {
            step: spec.step,
            grid: spec.anchor,
            mode: spec.mode,
            target: spec.target.as_ref().map(RawFrame::readings),
            tau: spec.tau,
            sensors: config
                .sensors()
                .iter()
                .map(|s| SensorSummary {
                    name: s.name().to_string(),
                    lower: s.lower(),
                    upper: s.upper(),
                })
                .collect(),
            record_count,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn write<W: Write + ?Sized>(&self, out: &mut W) -> Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)?;
        Ok(())
    }
}

/// Human-readable comparison table: one `exact` and one `sampled` line per
/// row, percentages to two decimals.
pub fn render_table(rows: &[TableRow]) -> String {
    let n = rows.first().map(|r| r.exact.len().trailing_zeros() as usize);
    let Some(n) = n else {
        return String::new();
    };
    let mut out = String::new();
    let mut push_row = |cells: &[String]| {
        let widths = [15usize, 15, 9, 8];
        let mut row = String::new();
        for (i, cell) in cells.iter().enumerate() {
            let w = widths.get(i).copied().unwrap_or(8);
            row.push_str(&format!("{cell:<w$} "));
        }
        out.push_str(row.trim_end());
        out.push('\n');
    };

    let mut header = vec![
        "input".to_string(),
        "target".to_string(),
        "d".to_string(),
        "source".to_string(),
    ];
    header.extend((0..1usize << n).map(|b| bitstring(b, n)));
    push_row(&header);

    for row in rows {
        let input = row.input.to_string();
        let target = row
            .target
            .as_ref()
            .map_or_else(|| "-".to_string(), ToString::to_string);
        let d = row
            .distance
            .map_or_else(|| "-".to_string(), |d| format!("{d:.2}"));
        let mut exact = vec![input.clone(), target.clone(), d.clone(), "exact".into()];
        exact.extend(row.exact.iter().map(|p| format!("{:.2}%", p * 100.0)));
        push_row(&exact);
        let mut sampled = vec![input, target, d, "sampled".into()];
        sampled.extend(
            row.sampled
                .frequencies()
                .iter()
                .map(|f| format!("{:.2}%", f * 100.0)),
        );
        push_row(&sampled);
    }
    out
}

/// Machine CSV for the comparison table, full-precision values.
pub fn write_table_csv<W: Write + ?Sized>(
    rows: &[TableRow],
    config: &SensorConfig,
    out: &mut W,
) -> Result<()> {
    let n = config.len();
    let names: Vec<String> = config
        .sensors()
        .iter()
        .map(|s| s.name().to_lowercase())
        .collect();
    let mut header: Vec<String> = names.iter().map(|s| format!("input_{s}")).collect();
    header.extend(names.iter().map(|s| format!("target_{s}")));
    header.push("distance".into());
    header.push("source".into());
    header.extend((0..1usize << n).map(|b| format!("p_{}", bitstring(b, n))));
    writeln!(out, "{}", header.join(","))?;

    for row in rows {
        let mut prefix: Vec<String> = row
            .input
            .readings()
            .iter()
            .map(ToString::to_string)
            .collect();
        match &row.target {
            Some(t) => prefix.extend(t.readings().iter().map(ToString::to_string)),
            None => prefix.extend(std::iter::repeat_n(String::new(), n)),
        }
        prefix.push(row.distance.map_or_else(String::new, |d| d.to_string()));

        let mut exact = prefix.clone();
        exact.push("exact".into());
        exact.extend(row.exact.iter().map(ToString::to_string));
        writeln!(out, "{}", exact.join(","))?;

        let mut sampled = prefix;
        sampled.push("sampled".into());
        sampled.extend(row.sampled.frequencies().iter().map(ToString::to_string));
        writeln!(out, "{}", sampled.join(","))?;
    }
    Ok(())
}

/// Machine JSON lines for the comparison table.
pub fn write_table_jsonl<W: Write + ?Sized>(rows: &[TableRow], out: &mut W) -> Result<()> {
    for row in rows {
        let value = serde_json::json!({
            "input": row.input.readings(),
            "target": row.target.as_ref().map(RawFrame::readings),
            "distance": row.distance,
            "exact": row.exact,
            "sampled_frequency": row.sampled.frequencies(),
            "shots": row.sampled.shots(),
            "seed": row.sampled.seed(),
        });
        writeln!(out, "{value}")?;
    }
    Ok(())
}
