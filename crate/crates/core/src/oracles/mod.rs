//! Exact trace and stutter-trace equivalence, lasso enumeration and LTL on
//! ultimately periodic words.
//!
//! Both equivalences start at the initial state and compare labels with
//! reserved atoms projected out, so an auxiliary predecessor state never
//! contributes. For a total finite structure the infinite trace set is the
//! safety closure of its finite prefixes (König's lemma), so comparing
//! prefix languages decides trace equality.

mod automaton;
mod lasso;
mod ltl;

use std::fmt;

use serde::Serialize;

pub use automaton::{PrefixAutomaton, Side};
pub use lasso::enumerate_lassos;
pub use ltl::{eval_lasso, ltl_bounded_verdict, Ltl, LtlVerdict};

use crate::kripke::{fmt_label, KripkeStructure, Label, StateId, MARKER};
use crate::trace::TraceWord;

/// Oracle alphabet options.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleOptions {
    /// Keep the initial-state marker atom in labels.
    pub keep_marker: bool,
}

fn oracle_label(ks: &KripkeStructure, s: StateId, opts: OracleOptions) -> Label {
    let mut l = ks.user_label(s);
    if opts.keep_marker && ks.label(s).contains(MARKER) {
        l.insert(MARKER.to_string());
    }
    l
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    /// A finite trace of one structure only.
    Prefix,
    /// A block word after which only one structure can stay in the last
    /// label forever.
    Divergence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceWitness {
    pub kind: WitnessKind,
    pub word: Vec<Label>,
    /// The structure that realizes the word.
    pub realized_by: Side,
}

impl TraceWitness {
    /// For a divergence witness, the infinite word that stays in the last
    /// letter forever.
    pub fn as_lasso_word(&self) -> Option<TraceWord> {
        match self.kind {
            WitnessKind::Prefix => None,
            WitnessKind::Divergence => {
                let (last, stem) = self.word.split_last()?;
                Some(TraceWord::new(stem.to_vec(), vec![last.clone()]))
            }
        }
    }
}

impl fmt::Display for TraceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.realized_by {
            Side::First => "first",
            Side::Second => "second",
        };
        match self.as_lasso_word() {
            Some(w) => write!(f, "divergence {w} (only in {side})"),
            None => {
                let letters: Vec<String> = self.word.iter().map(fmt_label).collect();
                write!(f, "prefix {} (only in {side})", letters.join(" "))
            }
        }
    }
}

impl Serialize for TraceWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let word: Vec<Vec<&str>> = self
            .word
            .iter()
            .map(|l| l.iter().map(String::as_str).collect())
            .collect();
        let mut st = s.serialize_struct("TraceWitness", 4)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("word", &word)?;
        st.serialize_field("realizedBy", &self.realized_by)?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub witness: Option<TraceWitness>,
}

impl Equivalence {
    fn from_witness(w: Option<TraceWitness>) -> Self {
        Equivalence {
            equivalent: w.is_none(),
            witness: w,
        }
    }
}

/// Automaton of finite traces from the initial state.
pub fn trace_automaton(ks: &KripkeStructure, opts: OracleOptions) -> PrefixAutomaton {
    PrefixAutomaton::determinize(
        &[ks.initial().index()],
        |n| oracle_label(ks, StateId(n), opts),
        |n| ks.successors(StateId(n)).iter().map(|t| t.index()).collect(),
        |_| true,
    )
}

pub fn trace_equivalent(k1: &KripkeStructure, k2: &KripkeStructure) -> Equivalence {
    trace_equivalent_with(k1, k2, OracleOptions::default())
}

/// Equality of trace sets; the witness is a shortest finite trace of one
/// structure only.
pub fn trace_equivalent_with(
    k1: &KripkeStructure,
    k2: &KripkeStructure,
    opts: OracleOptions,
) -> Equivalence {
    let w = trace_automaton(k1, opts)
        .distinguish(&trace_automaton(k2, opts))
        .map(|(word, side)| TraceWitness {
            kind: WitnessKind::Prefix,
            word,
            realized_by: side,
        });
    Equivalence::from_witness(w)
}

/// Stutter-collapsed view of a structure: `s => t` iff `s` reaches `t`
/// through states labeled like `s` followed by one step that changes the
/// label. A node is divergent if it can stay in its label forever.
struct Collapsed {
    labels: Vec<Label>,
    jumps: Vec<Vec<usize>>,
    divergent: Vec<bool>,
}

impl Collapsed {
    fn new(ks: &KripkeStructure, opts: OracleOptions) -> Self {
        let n = ks.num_states();
        let labels: Vec<Label> = ks.states().map(|s| oracle_label(ks, s, opts)).collect();
        let same = |a: usize, b: usize| labels[a] == labels[b];
        // in-label reachability (zero or more steps)
        let closure: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                let mut seen = vec![false; n];
                seen[s] = true;
                let mut stack = vec![s];
                while let Some(u) = stack.pop() {
                    for t in ks.successors(StateId(u)) {
                        let t = t.index();
                        if same(s, t) && !seen[t] {
                            seen[t] = true;
                            stack.push(t);
                        }
                    }
                }
                (0..n).filter(|&u| seen[u]).collect()
            })
            .collect();
        let on_cycle: Vec<bool> = (0..n)
            .map(|s| {
                ks.successors(StateId(s))
                    .iter()
                    .any(|t| same(s, t.index()) && closure[t.index()].contains(&s))
            })
            .collect();
        let mut jumps = Vec::with_capacity(n);
        let mut divergent = Vec::with_capacity(n);
        for (s, reach) in closure.iter().enumerate() {
            let mut out: Vec<usize> = reach
                .iter()
                .flat_map(|&u| ks.successors(StateId(u)).iter().map(|t| t.index()))
                .filter(|&t| !same(s, t))
                .collect();
            out.sort_unstable();
            out.dedup();
            jumps.push(out);
            divergent.push(reach.iter().any(|&u| on_cycle[u]));
        }
        Collapsed {
            labels,
            jumps,
            divergent,
        }
    }

    fn automaton(&self, start: usize, divergence: bool) -> PrefixAutomaton {
        PrefixAutomaton::determinize(
            &[start],
            |n| self.labels[n].clone(),
            |n| self.jumps[n].clone(),
            |n| !divergence || self.divergent[n],
        )
    }
}

/// Automata for the prefix block-language and the divergence block-language.
pub fn stutter_automata(
    ks: &KripkeStructure,
    opts: OracleOptions,
) -> (PrefixAutomaton, PrefixAutomaton) {
    let c = Collapsed::new(ks, opts);
    let start = ks.initial().index();
    (c.automaton(start, false), c.automaton(start, true))
}

pub fn stutter_trace_equivalent(k1: &KripkeStructure, k2: &KripkeStructure) -> Equivalence {
    stutter_trace_equivalent_with(k1, k2, OracleOptions::default())
}

/// Equality of stutter-closed trace sets, decided on block words (maximal
/// runs of equal labels collapsed). Infinite block words are covered by the
/// prefix languages; words that end in a constant tail by the divergence
/// languages.
pub fn stutter_trace_equivalent_with(
    k1: &KripkeStructure,
    k2: &KripkeStructure,
    opts: OracleOptions,
) -> Equivalence {
    let (p1, d1) = stutter_automata(k1, opts);
    let (p2, d2) = stutter_automata(k2, opts);
    let w = p1
        .distinguish(&p2)
        .map(|(word, side)| (WitnessKind::Prefix, word, side))
        .or_else(|| {
            d1.distinguish(&d2)
                .map(|(word, side)| (WitnessKind::Divergence, word, side))
        })
        .map(|(kind, word, realized_by)| TraceWitness {
            kind,
            word,
            realized_by,
        });
    Equivalence::from_witness(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kme::kme_quotient;
    use crate::kripke::{parse_ks, NormalizeOptions};
    use crate::partition::parse_partition;
    use crate::wkme::wkme_quotient;

    const FIG2: &str = include_str!("../../../../fixtures/fig2.ks");
    const FIG2_Q: &str = include_str!("../../../../fixtures/fig2_quotient.ks");
    const FIG3: &str = include_str!("../../../../fixtures/fig3.ks");
    const FIG3_Q: &str = include_str!("../../../../fixtures/fig3_quotient.ks");
    const FIG2_PART: &str = include_str!("../../../../fixtures/fig2.part");
    const FIG3_PART: &str = include_str!("../../../../fixtures/fig3.part");

    fn l(atoms: &[&str]) -> Label {
        atoms.iter().map(|a| a.to_string()).collect()
    }

    #[test]
    fn fig2_matches_its_quotient() {
        let k = parse_ks(FIG2).unwrap();
        let q = parse_ks(FIG2_Q).unwrap();
        assert!(trace_equivalent(&k, &q).equivalent);
        assert!(trace_equivalent(&k, &k).equivalent);
    }

    #[test]
    fn computed_quotients_are_equivalent() {
        let k = parse_ks(FIG2).unwrap().normalize(NormalizeOptions::default()).unwrap();
        let q = kme_quotient(&k, &parse_partition(FIG2_PART, &k).unwrap()).unwrap();
        assert!(trace_equivalent(&k, &q).equivalent);
        let k = parse_ks(FIG3).unwrap().normalize(NormalizeOptions::default()).unwrap();
        let q = wkme_quotient(&k, &parse_partition(FIG3_PART, &k).unwrap()).unwrap();
        assert!(stutter_trace_equivalent(&k, &q).equivalent);
    }

    #[test]
    fn fig2_and_fig3_differ_on_a_short_trace() {
        let f2 = parse_ks(FIG2).unwrap();
        let f3 = parse_ks(FIG3).unwrap();
        let r = trace_equivalent(&f2, &f3);
        let w = r.witness.unwrap();
        assert_eq!(w.word, vec![l(&["a"]), l(&[]), l(&["a"]), l(&["a"])]);
        assert_eq!(w.realized_by, Side::Second);
        assert_eq!(w.to_string(), "prefix {a} {} {a} {a} (only in second)");
    }

    #[test]
    fn fig3_matches_its_quotient_up_to_stutter() {
        let k = parse_ks(FIG3).unwrap();
        let q = parse_ks(FIG3_Q).unwrap();
        assert!(stutter_trace_equivalent(&k, &q).equivalent);
        assert!(stutter_trace_equivalent(&k, &k).equivalent);
        assert!(!trace_equivalent(&k, &q).equivalent);
    }

    #[test]
    fn fig3_diverges_where_fig2_cannot() {
        let f3 = parse_ks(FIG3).unwrap();
        let f2 = parse_ks(FIG2).unwrap();
        let r = stutter_trace_equivalent(&f3, &f2);
        let w = r.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::Divergence);
        assert_eq!(w.word, vec![l(&["a"]), l(&[]), l(&["a"])]);
        assert_eq!(w.realized_by, Side::First);
        assert_eq!(w.to_string(), "divergence {a} {} | loop: {a} (only in first)");
    }

    #[test]
    fn marker_option_separates_initial_revisits() {
        // u -> v -> u versus u -> v -> w, all unlabeled apart from the marker
        let a = parse_ks("states u v\ninit u\ntrans u v\ntrans v u\n")
            .unwrap()
            .normalize(NormalizeOptions::default())
            .unwrap();
        let b = parse_ks("states u v w\ninit u\ntrans u v\ntrans v w\ntrans w v\n")
            .unwrap()
            .normalize(NormalizeOptions::default())
            .unwrap();
        assert!(trace_equivalent(&a, &b).equivalent);
        let keep = OracleOptions { keep_marker: true };
        assert!(!trace_equivalent_with(&a, &b, keep).equivalent);
    }

    #[test]
    fn stutter_equivalence_ignores_repetition_counts() {
        let a = parse_ks("aps p\nstates x y\ninit x\nlabel y p\ntrans x y\ntrans y y\n").unwrap();
        let b = parse_ks("aps p\nstates x x2 y\ninit x\nlabel y p\ntrans x x2\ntrans x2 y\ntrans y y\n")
            .unwrap();
        assert!(stutter_trace_equivalent(&a, &b).equivalent);
        assert!(!trace_equivalent(&a, &b).equivalent);
    }
}
