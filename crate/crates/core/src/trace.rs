use std::fmt;

use serde::Serialize;

use crate::kripke::{fmt_label, KripkeStructure, Label, StateId};

/// An ultimately periodic word `stem · cycle^ω` over label sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceWord {
    pub stem: Vec<Label>,
    pub cycle: Vec<Label>,
}

impl TraceWord {
    pub fn new(stem: Vec<Label>, cycle: Vec<Label>) -> Self {
        assert!(!cycle.is_empty(), "cycle of a trace word must be non-empty");
        TraceWord { stem, cycle }
    }

    /// Number of distinct positions (stem plus one period).
    pub fn positions(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn at(&self, i: usize) -> &Label {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Position following `i` within `0..positions()`.
    pub fn next(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.stem.len()
        }
    }
}

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stem: Vec<String> = self.stem.iter().map(fmt_label).collect();
        let cycle: Vec<String> = self.cycle.iter().map(fmt_label).collect();
        if stem.is_empty() {
            write!(f, "| loop: {}", cycle.join(" "))
        } else {
            write!(f, "{} | loop: {}", stem.join(" "), cycle.join(" "))
        }
    }
}

/// Canonical representative of the stutter class of an ultimately periodic
/// word: adjacent repetitions removed (across the stem/cycle seam too), the
/// cycle reduced to its primitive root, and the stem as short as possible.
/// Two words are stutter equivalent iff their normal forms are equal.
pub fn stutter_normalize(w: &TraceWord) -> TraceWord {
    let (u, v) = (w.stem.len(), w.cycle.len());
    // After one full period the set of kept positions repeats with period |v|.
    let mut stem: Vec<Label> = Vec::new();
    let mut cycle: Vec<Label> = Vec::new();
    for i in 0..u + 2 * v {
        let keep = i == 0 || w.at(i) != w.at(i - 1);
        if keep {
            if i < u + v {
                stem.push(w.at(i).clone());
            } else {
                cycle.push(w.at(i).clone());
            }
        }
    }
    if cycle.is_empty() {
        // Eventually constant: the last kept letter repeats forever.
        let last = stem.pop().expect("a word has at least one letter");
        return TraceWord::new(stem, vec![last]);
    }
    let period = (1..=cycle.len())
        .find(|&p| cycle.len().is_multiple_of(p) && (p..cycle.len()).all(|i| cycle[i] == cycle[i - p]))
        .expect("the full length is always a period");
    cycle.truncate(period);
    while stem.last().is_some() && stem.last() == cycle.last() {
        stem.pop();
        cycle.rotate_right(1);
    }
    TraceWord::new(stem, cycle)
}

/// An ultimately periodic path `stem · cycle^ω`; the stem starts at the
/// initial state and both parts are non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Lasso {
    pub stem: Vec<StateId>,
    pub cycle: Vec<StateId>,
}

impl Lasso {
    pub fn is_path_of(&self, ks: &KripkeStructure) -> bool {
        if self.cycle.is_empty() {
            return false;
        }
        let seq: Vec<StateId> = self
            .stem
            .iter()
            .chain(self.cycle.iter())
            .chain(std::iter::once(&self.cycle[0]))
            .copied()
            .collect();
        seq.windows(2).all(|w| ks.has_edge(w[0], w[1]))
    }

    /// Trace word with reserved atoms projected out.
    pub fn trace(&self, ks: &KripkeStructure) -> TraceWord {
        TraceWord::new(
            self.stem.iter().map(|&s| ks.user_label(s)).collect(),
            self.cycle.iter().map(|&s| ks.user_label(s)).collect(),
        )
    }

    pub fn display(&self, ks: &KripkeStructure) -> String {
        let names = |v: &[StateId]| v.iter().map(|&s| ks.name(s)).collect::<Vec<_>>().join(" ");
        format!("{} | loop: {}", names(&self.stem), names(&self.cycle))
    }
}
