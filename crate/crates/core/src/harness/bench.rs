use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::time::{Duration, Instant};

use crate::footprint::{compute_footprint, Footprint, FootprintError, FootprintResult, MethodTag};

use super::Instance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BenchStatus {
    Ok,
    Top,
    /// The method refused or failed; the error text.
    Error(String),
}

impl fmt::Display for BenchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchStatus::Ok => f.write_str("ok"),
            BenchStatus::Top => f.write_str("top"),
            BenchStatus::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub method: MethodTag,
    pub footprint_size: Option<usize>,
    /// Median over the repetitions.
    pub micros: f64,
    pub status: BenchStatus,
    pub result: Result<FootprintResult, FootprintError>,
}

fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort();
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2
    }
}

/// Runs the footprint computation `reps` times after one warm-up run and
/// reports the median time.
pub fn time_footprint(inst: &Instance, method: MethodTag, reps: usize) -> BenchRow {
    let result = compute_footprint(&inst.before, &inst.after, method);
    let samples = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            let r = compute_footprint(&inst.before, &inst.after, method);
            let elapsed = start.elapsed();
            let _ = std::hint::black_box(r);
            elapsed
        })
        .collect();
    let (footprint_size, status) = match &result {
        Ok(FootprintResult {
            footprint: Footprint::Nodes(y),
            ..
        }) => (Some(y.len()), BenchStatus::Ok),
        Ok(_) => (None, BenchStatus::Top),
        Err(e) => (None, BenchStatus::Error(e.to_string())),
    };
    BenchRow {
        instance: inst.label.clone(),
        method,
        footprint_size,
        micros: median(samples).as_secs_f64() * 1e6,
        status,
        result,
    }
}

/// Times every method on every instance. Rows come out in instance order,
/// methods in the given order; the methods of one instance run back to back
/// so drift affects them alike.
pub fn run_bench(instances: &[Instance], methods: &[MethodTag], reps: usize) -> Vec<BenchRow> {
    instances
        .iter()
        .flat_map(|inst| methods.iter().map(move |&m| time_footprint(inst, m, reps)))
        .collect()
}

/// Writes `instance,method,footprint_size,micros,status`.
pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "method", "footprint_size", "micros", "status"])?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.method.to_string(),
            r.footprint_size.map(|n| n.to_string()).unwrap_or_default(),
            format!("{:.3}", r.micros),
            r.status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-method sums of median times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchTotals {
    pub micros: BTreeMap<MethodTag, f64>,
    pub ok: BTreeMap<MethodTag, usize>,
    pub top: BTreeMap<MethodTag, usize>,
    pub errors: BTreeMap<MethodTag, usize>,
}

impl BenchTotals {
    pub fn of(rows: &[BenchRow]) -> BenchTotals {
        let mut t = BenchTotals::default();
        for r in rows {
            *t.micros.entry(r.method).or_default() += r.micros;
            let bucket = match r.status {
                BenchStatus::Ok => &mut t.ok,
                BenchStatus::Top => &mut t.top,
                BenchStatus::Error(_) => &mut t.errors,
            };
            *bucket.entry(r.method).or_default() += 1;
        }
        t
    }
}
