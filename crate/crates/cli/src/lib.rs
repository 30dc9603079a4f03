//! Command-line front end. [`run`] parses arguments, executes one command
//! and returns the process exit code: 0 when the check holds, 1 when it
//! fails (a witness is printed), 2 for usage, input or parse errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ksmin::compose::{sync_compose, sync_compose_reachable};
use ksmin::kripke::{KripkeStructure, NormalizeOptions, NormalizeReport};
use ksmin::oracles::{
    ltl_bounded_verdict, stutter_trace_equivalent_with, trace_equivalent_with, Ltl, LtlVerdict,
    OracleOptions,
};
use ksmin::selftest::{run_all, Config};
use ksmin::wkme::{is_wkme_with, wkme_quotient, wkme_reduce_with, WeakMode};
use ksmin::{
    div_stutter_bisim_partition, gen_random, is_kme, kme_quotient, kme_reduce, parse_ks,
    parse_partition, strong_bisim_partition, Error, Partition, Strategy, Verdict,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "ksmin", version, about = "Kripke structure minimization and equivalence checking")]
struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check whether a partition is a (weak) Kripke minimization equivalence.
    Check {
        #[arg(long, value_enum)]
        mode: CheckMode,
        ks: PathBuf,
        partition: PathBuf,
        #[command(flatten)]
        norm: NormFlag,
    },
    /// Write the quotient of a structure under an accepted partition.
    Quotient {
        #[arg(long, value_enum)]
        mode: CheckMode,
        ks: PathBuf,
        partition: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        norm: NormFlag,
    },
    /// Compute a small partition with a baseline or a reducer.
    Minimize {
        #[arg(long, value_enum)]
        mode: MinimizeMode,
        #[arg(long, value_enum, default_value_t = StrategyArg::Greedy)]
        strategy: StrategyArg,
        ks: PathBuf,
        /// Write the partition to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        norm: NormFlag,
    },
    /// Decide trace or stutter-trace equivalence of two structures.
    Equiv {
        #[arg(long, value_enum)]
        semantics: Semantics,
        ks1: PathBuf,
        ks2: PathBuf,
        /// Keep the initial-state marker atom in the compared labels.
        #[arg(long)]
        keep_marker: bool,
    },
    /// Synchronous product of two structures.
    Compose {
        ks1: PathBuf,
        ks2: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Keep only the states reachable from the initial pair.
        #[arg(long)]
        reachable: bool,
    },
    /// Evaluate an LTL formula on every lasso within the bounds.
    Ltl {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 6)]
        stem: usize,
        #[arg(long = "loop", default_value_t = 3)]
        loop_bound: usize,
        ks: PathBuf,
    },
    /// Generate a seeded random structure.
    Gen {
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 1)]
        aps: usize,
        #[arg(long, default_value_t = 0.2)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the property suites on seeded random structures.
    Selftest {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct NormFlag {
    /// Use the structure as given instead of adding the auxiliary
    /// predecessor state and the initial marker.
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckMode {
    Kme,
    Wkme,
    /// WKME that also requires every outside predecessor of a block with an
    /// in-block cycle to be able to stay in it.
    WkmeDc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MinimizeMode {
    Bisim,
    StutterBisim,
    Kme,
    Wkme,
    WkmeDc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Greedy,
    Exhaustive,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Greedy => Strategy::Greedy,
            StrategyArg::Exhaustive => Strategy::Exhaustive,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Semantics {
    Trace,
    StutterTrace,
}

/// A failure that ends the command with exit code 2.
struct Fatal(String);

impl From<Error> for Fatal {
    fn from(e: Error) -> Self {
        Fatal(e.to_string())
    }
}

/// What a command produced: the verdict decides the exit code, `text` is
/// printed in text mode and `fields` extend the JSON report.
struct Outcome {
    ok: bool,
    text: String,
    fields: Map<String, Value>,
}

struct Timer {
    phases: Map<String, Value>,
}

impl Timer {
    fn new() -> Self {
        Timer { phases: Map::new() }
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        let total = ms + self.phases.get(phase).and_then(Value::as_f64).unwrap_or(0.0);
        self.phases.insert(phase.to_string(), json!((total * 1000.0).round() / 1000.0));
        out
    }
}

fn read(path: &Path) -> Result<String, Fatal> {
    std::fs::read_to_string(path).map_err(|e| Fatal(format!("cannot read {}: {e}", path.display())))
}

fn write_or_collect(path: Option<&Path>, content: &str, text: &mut String) -> Result<(), Fatal> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Fatal(format!("cannot write {}: {e}", p.display()))),
        None => {
            text.push_str(content);
            Ok(())
        }
    }
}

fn load(path: &Path, timer: &mut Timer) -> Result<KripkeStructure, Fatal> {
    let text = read(path)?;
    timer
        .time("parse", || parse_ks(&text))
        .map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

/// Structure as checked, plus the normalization report (absent with
/// `--no-normalize`).
fn prepare(
    ks: KripkeStructure,
    norm: &NormFlag,
) -> Result<(KripkeStructure, Option<NormalizeReport>), Fatal> {
    if norm.no_normalize {
        return Ok((ks, None));
    }
    let (k, r) = ks.normalize_reported(NormalizeOptions::default())?;
    Ok((k, Some(r)))
}

fn normalization_json(ks: &KripkeStructure, r: &Option<NormalizeReport>) -> Value {
    match r {
        None => Value::Null,
        Some(r) => json!({
            "addedState": r.added_state.map(|s| ks.name(s)),
            "fedStates": r.fed_states.iter().map(|&s| ks.name(s)).collect::<Vec<_>>(),
            "markedInitial": r.marked_initial,
        }),
    }
}

fn normalization_text(ks: &KripkeStructure, r: &Option<NormalizeReport>) -> String {
    match r {
        Some(r) if r.changed() => {
            let mut parts = Vec::new();
            if let Some(s) = r.added_state {
                let fed: Vec<&str> = r.fed_states.iter().map(|&t| ks.name(t)).collect();
                parts.push(format!("added {} feeding {}", ks.name(s), fed.join(" ")));
            }
            if r.marked_initial {
                parts.push(format!("marked {} as initial", ks.name(ks.initial())));
            }
            format!("normalized: {}\n", parts.join("; "))
        }
        _ => String::new(),
    }
}

fn weak_mode(mode: CheckMode) -> Option<WeakMode> {
    match mode {
        CheckMode::Kme => None,
        CheckMode::Wkme => Some(WeakMode::Literal),
        CheckMode::WkmeDc => Some(WeakMode::DivergenceConsistent),
    }
}

fn check_partition(
    ks: &KripkeStructure,
    part: &Partition,
    mode: CheckMode,
) -> Result<Verdict, Fatal> {
    Ok(match weak_mode(mode) {
        None => is_kme(ks, part)?,
        Some(m) => is_wkme_with(ks, part, m)?,
    })
}

fn verdict_fields(ks: &KripkeStructure, part: &Partition, v: &Verdict) -> (String, Map<String, Value>) {
    let mut fields = Map::new();
    let text = match v.witness() {
        None => {
            fields.insert("witness".into(), Value::Null);
            format!("accepted: {} blocks\n", part.visible_blocks(ks))
        }
        Some(w) => {
            let report = w.report(ks, part);
            let text = format!("rejected: {report}\n");
            fields.insert("witness".into(), json!(report));
            text
        }
    };
    fields.insert("blocks".into(), json!(part.report(ks).blocks));
    (text, fields)
}

fn load_with_partition(
    ks_path: &Path,
    part_path: &Path,
    norm: &NormFlag,
    timer: &mut Timer,
) -> Result<(KripkeStructure, Option<NormalizeReport>, Partition), Fatal> {
    let (ks, report) = prepare(load(ks_path, timer)?, norm)?;
    let text = read(part_path)?;
    let part = parse_partition(&text, &ks).map_err(|e| Fatal(format!("{}: {e}", part_path.display())))?;
    Ok((ks, report, part))
}

fn execute(command: &Command, timer: &mut Timer) -> Result<Outcome, Fatal> {
    match command {
        Command::Check { mode, ks, partition, norm } => {
            let (ks, report, part) = load_with_partition(ks, partition, norm, timer)?;
            let v = timer.time("check", || check_partition(&ks, &part, *mode))?;
            let (text, mut fields) = verdict_fields(&ks, &part, &v);
            fields.insert("normalization".into(), normalization_json(&ks, &report));
            Ok(Outcome {
                ok: v.accepted(),
                text: normalization_text(&ks, &report) + &text,
                fields,
            })
        }
        Command::Quotient { mode, ks, partition, output, norm } => {
            let (ks, report, part) = load_with_partition(ks, partition, norm, timer)?;
            let v = timer.time("check", || check_partition(&ks, &part, *mode))?;
            let (mut text, mut fields) = verdict_fields(&ks, &part, &v);
            text = normalization_text(&ks, &report) + &text;
            fields.insert("normalization".into(), normalization_json(&ks, &report));
            if v.accepted() {
                let q = timer.time("quotient", || match mode {
                    CheckMode::Kme => kme_quotient(&ks, &part),
                    _ => wkme_quotient(&ks, &part),
                })?;
                let q = q.denormalize();
                fields.insert("quotientStates".into(), json!(q.num_states()));
                if output.is_none() {
                    text.clear();
                }
                write_or_collect(output.as_deref(), &q.to_text(), &mut text)?;
            }
            Ok(Outcome { ok: v.accepted(), text, fields })
        }
        Command::Minimize { mode, strategy, ks, output, norm } => {
            let (ks, report) = prepare(load(ks, timer)?, norm)?;
            let strategy = Strategy::from(*strategy);
            let part = timer.time("minimize", || -> ksmin::Result<Partition> {
                match mode {
                    MinimizeMode::Bisim => Ok(strong_bisim_partition(&ks)),
                    MinimizeMode::StutterBisim => Ok(div_stutter_bisim_partition(&ks)),
                    MinimizeMode::Kme => kme_reduce(&ks, strategy),
                    MinimizeMode::Wkme => wkme_reduce_with(&ks, strategy, WeakMode::Literal),
                    MinimizeMode::WkmeDc => {
                        wkme_reduce_with(&ks, strategy, WeakMode::DivergenceConsistent)
                    }
                }
            })?;
            let count = part.visible_blocks(&ks);
            let mut text = normalization_text(&ks, &report);
            text.push_str(&format!("blocks: {count}\n"));
            let listing = part.to_text(&ks);
            match output {
                Some(p) => write_or_collect(Some(p), &listing, &mut text)?,
                None => text.push_str(&listing),
            }
            let mut fields = Map::new();
            fields.insert("blocks".into(), json!(part.report(&ks).blocks));
            fields.insert("blockCount".into(), json!(count));
            fields.insert("witness".into(), Value::Null);
            fields.insert("normalization".into(), normalization_json(&ks, &report));
            Ok(Outcome { ok: true, text, fields })
        }
        Command::Equiv { semantics, ks1, ks2, keep_marker } => {
            let a = load(ks1, timer)?;
            let b = load(ks2, timer)?;
            let opts = OracleOptions { keep_marker: *keep_marker };
            let r = timer.time("decide", || match semantics {
                Semantics::Trace => trace_equivalent_with(&a, &b, opts),
                Semantics::StutterTrace => stutter_trace_equivalent_with(&a, &b, opts),
            });
            let text = match &r.witness {
                None => "equivalent\n".to_string(),
                Some(w) => format!("not equivalent: {w}\n"),
            };
            let mut fields = Map::new();
            fields.insert("witness".into(), json!(r.witness));
            fields.insert("blocks".into(), Value::Null);
            Ok(Outcome { ok: r.equivalent, text, fields })
        }
        Command::Compose { ks1, ks2, output, reachable } => {
            let a = load(ks1, timer)?;
            let b = load(ks2, timer)?;
            let p = timer.time("compose", || {
                if *reachable {
                    sync_compose_reachable(&a, &b)
                } else {
                    sync_compose(&a, &b)
                }
            });
            let mut text = String::new();
            write_or_collect(output.as_deref(), &p.to_text(), &mut text)?;
            if output.is_some() {
                text = format!("states: {}\ntransitions: {}\n", p.num_states(), p.num_transitions());
            }
            let mut fields = Map::new();
            fields.insert("states".into(), json!(p.num_states()));
            fields.insert("transitions".into(), json!(p.num_transitions()));
            fields.insert("witness".into(), Value::Null);
            fields.insert("blocks".into(), Value::Null);
            Ok(Outcome { ok: true, text, fields })
        }
        Command::Ltl { formula, stem, loop_bound, ks } => {
            let k = load(ks, timer)?;
            let f = Ltl::parse(formula)?;
            let v = timer.time("evaluate", || ltl_bounded_verdict(&k, &f, *stem, *loop_bound))?;
            let mut fields = Map::new();
            fields.insert("formula".into(), json!(f.to_string()));
            fields.insert("bounds".into(), json!({"stem": stem, "loop": loop_bound}));
            fields.insert("blocks".into(), Value::Null);
            let (ok, text) = match &v {
                LtlVerdict::HoldsOnAllEnumerated { checked } => {
                    fields.insert("witness".into(), Value::Null);
                    fields.insert("lassos".into(), json!(checked));
                    (
                        true,
                        format!("holds on all {checked} lassos within stem {stem}, loop {loop_bound}\n"),
                    )
                }
                LtlVerdict::Counterexample { lasso } => {
                    let names = |v: &[ksmin::StateId]| v.iter().map(|&s| k.name(s)).collect::<Vec<_>>();
                    fields.insert(
                        "witness".into(),
                        json!({
                            "stem": names(&lasso.stem),
                            "loop": names(&lasso.cycle),
                            "trace": lasso.trace(&k).to_string(),
                        }),
                    );
                    (
                        false,
                        format!(
                            "counterexample: {}\ntrace: {}\n",
                            lasso.display(&k),
                            lasso.trace(&k)
                        ),
                    )
                }
            };
            Ok(Outcome { ok, text, fields })
        }
        Command::Gen { states, aps, density, seed, output } => {
            let k = timer.time("generate", || gen_random(*states, *aps, *density, *seed))?;
            let mut text = String::new();
            write_or_collect(output.as_deref(), &k.to_text(), &mut text)?;
            let mut fields = Map::new();
            fields.insert("states".into(), json!(k.num_states()));
            fields.insert("transitions".into(), json!(k.num_transitions()));
            fields.insert("witness".into(), Value::Null);
            fields.insert("blocks".into(), Value::Null);
            Ok(Outcome { ok: true, text, fields })
        }
        Command::Selftest { cases, seed } => {
            let results = timer.time("suites", || run_all(Config { cases: *cases, seed: *seed }));
            let mut text = String::new();
            for r in &results {
                text.push_str(&format!("{r}\n"));
                for v in r.violations.iter().take(1) {
                    text.push_str(&format!("  first violation: {}\n", v.lines().next().unwrap_or("")));
                }
            }
            let suites: Vec<Value> = results
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "cases": r.cases,
                        "passed": r.passed(),
                        "violations": r.violations,
                    })
                })
                .collect();
            let mut fields = Map::new();
            fields.insert("suites".into(), json!(suites));
            fields.insert("witness".into(), Value::Null);
            fields.insert("blocks".into(), Value::Null);
            Ok(Outcome {
                ok: results.iter().all(|r| r.passed()),
                text,
                fields,
            })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Quotient { .. } => "quotient",
        Command::Minimize { .. } => "minimize",
        Command::Equiv { .. } => "equiv",
        Command::Compose { .. } => "compose",
        Command::Ltl { .. } => "ltl",
        Command::Gen { .. } => "gen",
        Command::Selftest { .. } => "selftest",
    }
}

/// Runs one command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut timer = Timer::new();
    let result = execute(&cli.command, &mut timer);
    let name = command_name(&cli.command);
    match result {
        Ok(outcome) => {
            let code = if outcome.ok { 0 } else { 1 };
            if cli.json {
                let mut report = Map::new();
                report.insert("schema".into(), json!(SCHEMA_VERSION));
                report.insert("command".into(), json!(name));
                report.insert("verdict".into(), json!(if outcome.ok { "pass" } else { "fail" }));
                report.extend(outcome.fields);
                report.insert("timings_ms".into(), Value::Object(timer.phases));
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&Value::Object(report)).unwrap());
            } else {
                let _ = write!(out, "{}", outcome.text);
            }
            code
        }
        Err(Fatal(message)) => {
            if cli.json {
                let report = json!({
                    "schema": SCHEMA_VERSION,
                    "command": name,
                    "verdict": "error",
                    "error": message,
                });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap());
            }
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}
