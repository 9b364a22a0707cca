//! `flowfoot`: compute flow footprints, check the composition laws, and time
//! the footprint methods.
//!
//! Exit status: 0 on success, 1 when the answer is negative (no footprint
//! found, or a law failed), 2 on errors, 64 on usage errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use flowfoot_core::footprint::{compute_footprint, verify_footprint, VerifyMode};
use flowfoot_core::harness::{self, BenchStatus, BenchTotals, Instance};
use flowfoot_core::oracle::{check_separation_laws, LawReport};
use flowfoot_core::{EnumBudget, Footprint, MethodTag, MonoidTag, NodeId, NodeSet};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_USAGE: u8 = 64;
const SEED_VAR: &str = "FLOWFOOT_SEED";

#[derive(Parser)]
#[command(name = "flowfoot", version, about = "Flow footprints of flow graph updates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Verify {
    Oracle,
    Algebraic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    ListUpdates,
    Cyclic,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the footprint of the update in an instance file.
    Footprint {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "new")]
        method: MethodTag,
        /// Re-check a found footprint.
        #[arg(long)]
        verify: Option<Verify>,
        #[arg(long)]
        json: bool,
    },
    /// Check unit, commutativity and associativity of composition on random
    /// graphs.
    Laws {
        #[arg(long)]
        monoid: MonoidTag,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where witnesses of failed laws are written.
        #[arg(long, default_value = ".")]
        witness_dir: PathBuf,
    },
    /// Time the footprint methods on a generated suite.
    Bench {
        #[arg(long, value_enum, default_value = "list-updates")]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "naive,dist,new")]
        methods: Vec<MethodTag>,
        #[arg(long)]
        csv: PathBuf,
        /// Timed repetitions per instance and method; the median is reported.
        #[arg(long, default_value_t = 100)]
        reps: usize,
        /// Re-check every found footprint by inflow enumeration.
        #[arg(long)]
        verify: Option<Verify>,
    },
}

/// A failure with its exit status.
struct Failure(u8, String);

impl Failure {
    fn error(msg: impl ToString) -> Failure {
        Failure(EXIT_ERROR, msg.to_string())
    }
}

fn seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure(EXIT_USAGE, format!("{SEED_VAR}={v:?} is not a seed"))),
        Err(_) => Ok(flag),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn names(inst: &Instance, set: &NodeSet) -> String {
    let parts: Vec<String> = set.iter().map(|x| inst.name(*x)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn ids(set: &NodeSet) -> Vec<u32> {
    set.iter().map(|NodeId(x)| *x).collect()
}

fn mode(v: Verify) -> VerifyMode {
    match v {
        Verify::Oracle => VerifyMode::Oracle(EnumBudget::default()),
        Verify::Algebraic => VerifyMode::Algebraic,
    }
}

fn footprint(input: &Path, method: MethodTag, verify: Option<Verify>, as_json: bool) -> Result<u8, Failure> {
    let inst = harness::parse_instance(&read(input)?)
        .map_err(|e| Failure::error(format!("{}: {e}", input.display())))?;
    let start = Instant::now();
    let res = compute_footprint(&inst.before, &inst.after, method).map_err(Failure::error)?;
    let micros = start.elapsed().as_micros();

    let verified = match (&res.footprint, verify) {
        (Footprint::Nodes(y), Some(v)) => {
            Some(verify_footprint(&inst.before, &inst.after, y, &mode(v)).map_err(Failure::error)?)
        }
        _ => None,
    };

    let mut out = String::new();
    if as_json {
        let fp = match &res.footprint {
            Footprint::Nodes(y) => json!(ids(y)),
            Footprint::Top => json!("TOP"),
        };
        let mut doc = json!({
            "footprint": fp,
            "trace": res.trace.iter().map(ids).collect::<Vec<_>>(),
            "method": method,
            "micros": micros,
        });
        if let Some(ok) = verified {
            doc["verified"] = json!(ok);
        }
        writeln!(out, "{doc}").unwrap();
    } else {
        match &res.footprint {
            Footprint::Nodes(y) => writeln!(out, "footprint: {}", names(&inst, y)).unwrap(),
            Footprint::Top => writeln!(out, "footprint: TOP").unwrap(),
        }
        let trace: Vec<String> = res.trace.iter().map(|z| names(&inst, z)).collect();
        writeln!(out, "trace: {}", trace.join(" -> ")).unwrap();
        writeln!(out, "method: {method} ({micros} µs)").unwrap();
        if let Some(ok) = verified {
            writeln!(out, "verified: {}", if ok { "yes" } else { "NO" }).unwrap();
        }
    }
    print!("{out}");

    match (res.footprint, verified) {
        (_, Some(false)) => Err(Failure::error("the footprint failed verification")),
        (Footprint::Top, _) => Ok(EXIT_NEGATIVE),
        _ => Ok(0),
    }
}

fn write_witness(dir: &Path, tag: MonoidTag, report: &LawReport, law: &str) -> Result<String, Failure> {
    let failures: Vec<_> = report
        .failures
        .iter()
        .filter(|f| f.law == law)
        .map(|f| {
            json!({
                "detail": f.detail,
                "graphs": f.graphs.iter().map(harness::serialize_graph).collect::<Vec<_>>(),
            })
        })
        .collect();
    fs::create_dir_all(dir).map_err(|e| Failure::error(format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("law-{tag}-{law}.json"));
    let doc = json!({ "law": law, "monoid": tag, "failures": failures });
    let text = serde_json::to_string_pretty(&doc).expect("witnesses serialize");
    fs::write(&path, text + "\n").map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

fn laws(tag: MonoidTag, iters: usize, seed: u64, witness_dir: &Path) -> Result<u8, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = check_separation_laws(tag, iters, &mut rng);
    for law in LawReport::LAWS {
        if report.passed(law) {
            println!("LAW {law} PASS -");
        } else {
            let path = write_witness(witness_dir, tag, &report, law)?;
            println!("LAW {law} FAIL {path}");
        }
    }
    let checked: Vec<String> = report.checked.iter().map(|(k, n)| format!("{k} {n}")).collect();
    println!("checked: {} (monoid {tag}, seed {seed})", checked.join(", "));
    Ok(if report.is_clean() { 0 } else { EXIT_NEGATIVE })
}

#[allow(clippy::too_many_arguments)]
fn bench(
    suite: Suite,
    count: usize,
    seed: u64,
    methods: &[MethodTag],
    csv: &Path,
    reps: usize,
    verify: Option<Verify>,
) -> Result<u8, Failure> {
    let instances = match suite {
        Suite::ListUpdates => harness::list_suite(count, seed),
        Suite::Cyclic => harness::cyclic_suite(count, seed),
    };
    let mut rows = harness::run_bench(&instances, methods, reps);
    let mut unverified = 0;
    if let Some(v) = verify {
        let mode = mode(v);
        for (row, inst) in rows
            .iter_mut()
            .zip(instances.iter().flat_map(|i| methods.iter().map(move |_| i)))
        {
            let Ok(res) = &row.result else { continue };
            let Some(y) = res.nodes() else { continue };
            match verify_footprint(&inst.before, &inst.after, y, &mode) {
                Ok(true) => {}
                Ok(false) => {
                    unverified += 1;
                    row.status = BenchStatus::Error("footprint failed verification".into());
                }
                // too large to enumerate: leave the row as computed
                Err(_) => {}
            }
        }
    }
    let file = fs::File::create(csv).map_err(|e| Failure::error(format!("{}: {e}", csv.display())))?;
    harness::write_csv(&rows, file).map_err(|e| Failure::error(format!("{}: {e}", csv.display())))?;

    let totals = BenchTotals::of(&rows);
    for m in methods {
        let get = |t: &std::collections::BTreeMap<MethodTag, usize>| t.get(m).copied().unwrap_or(0);
        println!(
            "{m}: total {:.1} µs over {} instances (ok {}, top {}, errors {})",
            totals.micros.get(m).copied().unwrap_or(0.0),
            instances.len(),
            get(&totals.ok),
            get(&totals.top),
            get(&totals.errors),
        );
    }
    println!("wrote {}", csv.display());
    if unverified > 0 {
        return Err(Failure::error(format!(
            "{unverified} footprints failed verification"
        )));
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Footprint {
            input,
            method,
            verify,
            json,
        } => footprint(&input, method, verify, json),
        Command::Laws {
            monoid,
            iters,
            seed: s,
            witness_dir,
        } => laws(monoid, iters, seed(s)?, &witness_dir),
        Command::Bench {
            suite,
            count,
            seed: s,
            methods,
            csv,
            reps,
            verify,
        } => bench(suite, count, seed(s)?, &methods, &csv, reps, verify),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("flowfoot: {msg}");
            ExitCode::from(code)
        }
    }
}
