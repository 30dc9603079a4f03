//! Property suites over seeded random structures. Each suite returns the
//! number of cases and every violation found; the CLI `selftest` command
//! and the acceptance tests both run them.

pub mod brute;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compose::compositionality_check;
use crate::gen::gen_random;
use crate::kme::{is_kme, kme_quotient, kme_reduce, strong_bisim_partition};
use crate::kripke::{KripkeStructure, NormalizeOptions};
use crate::oracles::{stutter_trace_equivalent, trace_equivalent};
use crate::partition::Partition;
use crate::reduce::Strategy;
use crate::wkme::{div_stutter_bisim_partition, is_wkme_with, wkme_quotient, wkme_reduce_with, WeakMode};

#[derive(Debug, Clone, Copy)]
pub struct Config {
    pub cases: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub violations: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {}: {} cases, {} violations",
            self.name,
            self.cases,
            self.violations.len()
        )
    }
}

/// Random structure with 1 to `max_states` states and up to two atoms;
/// parameters are drawn from a stream seeded by `seed` and `case`.
pub fn random_instance(seed: u64, case: usize, max_states: usize) -> KripkeStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (case as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let n = rng.random_range(1..=max_states);
    let aps = rng.random_range(0..=2);
    let density = [0.0, 0.1, 0.2, 0.35][rng.random_range(0..4)];
    gen_random(n, aps, density, rng.random()).expect("valid generator arguments")
}

fn normalized(ks: &KripkeStructure) -> KripkeStructure {
    ks.normalize(NormalizeOptions::default())
        .expect("random structures normalize")
}

struct Log<'a> {
    case: usize,
    ks: &'a KripkeStructure,
    out: &'a mut Vec<String>,
}

impl Log<'_> {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.out.push(format!("case {}: {}\n{}", self.case, what(), self.ks));
        }
    }
}

fn accepted_kme(ks: &KripkeStructure, p: &Partition) -> bool {
    is_kme(ks, p).map(|v| v.accepted()).unwrap_or(false)
}

fn accepted_wkme(ks: &KripkeStructure, p: &Partition, mode: WeakMode) -> bool {
    is_wkme_with(ks, p, mode).map(|v| v.accepted()).unwrap_or(false)
}

/// Partition-level properties: trivial and baseline partitions pass their
/// checks, quotients preserve (stutter-)traces, and the reducers are at
/// least as coarse as the baselines. `mode` selects the weak check used by
/// the WKME reducers.
pub fn partition_suite(cfg: Config, mode: WeakMode) -> SuiteResult {
    let mut violations = Vec::new();
    for case in 0..cfg.cases {
        let ks = normalized(&random_instance(cfg.seed, case, 8));
        let mut log = Log { case, ks: &ks, out: &mut violations };
        let identity = Partition::identity(ks.num_states());
        log.check(accepted_kme(&ks, &identity), || "identity rejected by is_kme".into());
        log.check(accepted_wkme(&ks, &identity, mode), || "identity rejected by is_wkme".into());

        let bisim = strong_bisim_partition(&ks);
        let stutter = div_stutter_bisim_partition(&ks);
        log.check(accepted_kme(&ks, &bisim), || "bisimulation rejected by is_kme".into());
        log.check(accepted_wkme(&ks, &stutter, mode), || "stutter bisimulation rejected by is_wkme".into());

        let mut strong = vec![("bisimulation", bisim.clone())];
        let mut weak = vec![("stutter bisimulation", stutter.clone())];
        let mut counts = Vec::new();
        for strategy in [Strategy::Greedy, Strategy::Exhaustive] {
            match (kme_reduce(&ks, strategy), wkme_reduce_with(&ks, strategy, mode)) {
                (Ok(k), Ok(w)) => {
                    counts.push((strategy, k.len(), w.len()));
                    strong.push((if strategy == Strategy::Greedy { "greedy KME" } else { "exhaustive KME" }, k));
                    weak.push((if strategy == Strategy::Greedy { "greedy WKME" } else { "exhaustive WKME" }, w));
                }
                (k, w) => log.check(false, || format!("{strategy:?} reduction failed: {k:?} {w:?}")),
            }
        }
        if let [(_, gk, gw), (_, ek, ew)] = counts[..] {
            log.check(gk <= bisim.len(), || format!("greedy KME {gk} > bisimulation {}", bisim.len()));
            log.check(gw <= stutter.len(), || format!("greedy WKME {gw} > stutter bisimulation {}", stutter.len()));
            log.check(ek <= gk, || format!("exhaustive KME {ek} > greedy {gk}"));
            log.check(ew <= gw, || format!("exhaustive WKME {ew} > greedy {gw}"));
        }

        for (name, p) in &strong {
            log.check(accepted_kme(&ks, p), || format!("{name} partition rejected by is_kme"));
            match kme_quotient(&ks, p) {
                Ok(q) => {
                    let r = trace_equivalent(&ks, &q);
                    log.check(r.equivalent, || {
                        format!("{name} quotient not trace equivalent: {}\n{}", r.witness.as_ref().unwrap(), p.to_text(&ks))
                    });
                }
                Err(e) => log.check(false, || format!("{name} quotient failed: {e}")),
            }
        }
        for (name, p) in &weak {
            log.check(accepted_wkme(&ks, p, mode), || format!("{name} partition rejected by is_wkme"));
            match wkme_quotient(&ks, p) {
                Ok(q) => {
                    let r = stutter_trace_equivalent(&ks, &q);
                    log.check(r.equivalent, || {
                        format!(
                            "{name} quotient not stutter-trace equivalent: {}\n{}",
                            r.witness.as_ref().unwrap(),
                            p.to_text(&ks)
                        )
                    });
                }
                Err(e) => log.check(false, || format!("{name} quotient failed: {e}")),
            }
        }
    }
    SuiteResult {
        name: match mode {
            WeakMode::Literal => "partitions and quotients",
            WeakMode::DivergenceConsistent => "partitions and quotients (divergence-consistent WKME)",
        },
        cases: cfg.cases,
        violations,
    }
}

/// Pairs for the oracle suite: a structure with one of its quotients, or
/// two unrelated structures.
fn oracle_pair(seed: u64, case: usize) -> (KripkeStructure, KripkeStructure) {
    let a = random_instance(seed, 2 * case, 6);
    let na = normalized(&a);
    match case % 4 {
        0 => {
            let p = kme_reduce(&na, Strategy::Greedy).expect("greedy always succeeds");
            (a, kme_quotient(&na, &p).expect("greedy result is a KME").denormalize())
        }
        1 => {
            let p = div_stutter_bisim_partition(&na);
            (a, wkme_quotient(&na, &p).expect("baseline is a WKME").denormalize())
        }
        _ => (a, random_instance(seed, 2 * case + 1, 6)),
    }
}

/// Longest distinguishing prefix the bounded trace oracle needs.
pub fn prefix_bound(k1: &KripkeStructure, k2: &KripkeStructure) -> usize {
    2 * k1.num_states() * k2.num_states() + 1
}

/// Word bounds for the bounded stutter oracle.
pub const STUTTER_STEM_BOUND: usize = 6;
pub const STUTTER_CYCLE_BOUND: usize = 3;

/// The exact equivalence oracles agree with bounded brute force.
pub fn oracle_suite(cfg: Config) -> SuiteResult {
    let mut violations = Vec::new();
    for case in 0..cfg.cases {
        let (a, b) = oracle_pair(cfg.seed, case);
        let exact = trace_equivalent(&a, &b).equivalent;
        let bounded = brute::bounded_prefix_equal(&a, &b, prefix_bound(&a, &b));
        if exact != bounded {
            violations.push(format!("case {case}: trace oracle {exact}, bounded {bounded}\n{a}\n{b}"));
        }
        let exact = stutter_trace_equivalent(&a, &b);
        let diff = brute::bounded_stutter_difference(&a, &b, STUTTER_STEM_BOUND, STUTTER_CYCLE_BOUND);
        if exact.equivalent != diff.is_none() {
            violations.push(format!(
                "case {case}: stutter oracle {:?}, bounded difference {:?}\n{a}\n{b}",
                exact.witness.map(|w| w.to_string()),
                diff.map(|w| w.to_string())
            ));
        }
    }
    SuiteResult {
        name: "oracle cross-validation",
        cases: cfg.cases,
        violations,
    }
}

/// Composing with a third structure preserves the KME relationship, checked
/// both by traces and by the strict pairing.
pub fn composition_suite(cfg: Config) -> SuiteResult {
    let mut violations = Vec::new();
    for case in 0..cfg.cases {
        let ks = normalized(&random_instance(cfg.seed, 2 * case, 5));
        let other = random_instance(cfg.seed, 2 * case + 1, 5);
        let p = kme_reduce(&ks, Strategy::Greedy).expect("greedy always succeeds");
        match compositionality_check(&ks, &p, &other) {
            Ok(r) if r.holds() => {}
            Ok(r) => violations.push(format!(
                "case {case}: trace {}, strict {}\n{}\n{}\n{}",
                r.trace.equivalent,
                r.strict,
                ks,
                p.to_text(&ks),
                other
            )),
            Err(e) => violations.push(format!("case {case}: {e}")),
        }
    }
    SuiteResult {
        name: "compositionality",
        cases: cfg.cases,
        violations,
    }
}

/// Every suite, the literal partition suite first.
pub fn run_all(cfg: Config) -> Vec<SuiteResult> {
    vec![
        partition_suite(cfg, WeakMode::Literal),
        partition_suite(cfg, WeakMode::DivergenceConsistent),
        oracle_suite(cfg),
        composition_suite(cfg),
    ]
}
