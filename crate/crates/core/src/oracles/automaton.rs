use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::kripke::Label;

/// Deterministic automaton over label-set letters, obtained by subset
/// construction from a state-labeled graph. Reading a letter means moving
/// to a node carrying that label; a missing transition rejects.
///
/// Automaton state 0 sits before the first letter. A state is marked when
/// its subset contains a marked graph node; for plain prefix languages every
/// node is marked, so every non-initial state accepts.
#[derive(Debug, Clone)]
pub struct PrefixAutomaton {
    subsets: Vec<Vec<usize>>,
    delta: Vec<BTreeMap<Label, usize>>,
    accepting: Vec<bool>,
}

/// Which of two compared automata accepts a distinguishing word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

impl PrefixAutomaton {
    /// Determinizes the graph with nodes `0..n`, entered at `start`.
    pub fn determinize(
        start: &[usize],
        letter: impl Fn(usize) -> Label,
        succ: impl Fn(usize) -> Vec<usize>,
        marked: impl Fn(usize) -> bool,
    ) -> Self {
        let mut aut = PrefixAutomaton {
            subsets: vec![Vec::new()],
            delta: vec![BTreeMap::new()],
            accepting: vec![false],
        };
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            let targets: BTreeSet<usize> = if q == 0 {
                start.iter().copied().collect()
            } else {
                aut.subsets[q].iter().flat_map(|&n| succ(n)).collect()
            };
            let mut by_letter: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
            for t in targets {
                by_letter.entry(letter(t)).or_default().push(t);
            }
            for (a, subset) in by_letter {
                let next = match index.get(&subset) {
                    Some(&i) => i,
                    None => {
                        let i = aut.subsets.len();
                        aut.accepting.push(subset.iter().any(|&n| marked(n)));
                        aut.subsets.push(subset.clone());
                        aut.delta.push(BTreeMap::new());
                        index.insert(subset, i);
                        queue.push_back(i);
                        i
                    }
                };
                aut.delta[q].insert(a, next);
            }
        }
        aut
    }

    pub fn num_states(&self) -> usize {
        self.subsets.len()
    }

    /// Letters occurring on some transition.
    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.delta.iter().flat_map(|m| m.keys().cloned()).collect()
    }

    /// Whether `word` leads to an accepting state.
    pub fn accepts(&self, word: &[Label]) -> bool {
        let mut q = 0;
        for a in word {
            match self.delta[q].get(a) {
                Some(&n) => q = n,
                None => return false,
            }
        }
        self.accepting[q]
    }

    /// A shortest word accepted by exactly one of the two automata, found by
    /// breadth-first search over the product with letters in sorted order.
    pub fn distinguish(&self, other: &PrefixAutomaton) -> Option<(Vec<Label>, Side)> {
        type Pair = (Option<usize>, Option<usize>);
        let start: Pair = (Some(0), Some(0));
        let mut parent: HashMap<Pair, Option<(Pair, Label)>> = HashMap::from([(start, None)]);
        let mut queue = VecDeque::from([start]);
        while let Some(pair @ (a, b)) = queue.pop_front() {
            let acc_a = a.is_some_and(|q| self.accepting[q]);
            let acc_b = b.is_some_and(|q| other.accepting[q]);
            if acc_a != acc_b {
                let mut word = Vec::new();
                let mut cur = pair;
                while let Some(Some((prev, letter))) = parent.get(&cur) {
                    word.push(letter.clone());
                    cur = *prev;
                }
                word.reverse();
                let side = if acc_a { Side::First } else { Side::Second };
                return Some((word, side));
            }
            let mut letters: BTreeSet<&Label> = BTreeSet::new();
            if let Some(q) = a {
                letters.extend(self.delta[q].keys());
            }
            if let Some(q) = b {
                letters.extend(other.delta[q].keys());
            }
            for letter in letters {
                let next = (
                    a.and_then(|q| self.delta[q].get(letter).copied()),
                    b.and_then(|q| other.delta[q].get(letter).copied()),
                );
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some((pair, letter.clone())));
                    queue.push_back(next);
                }
            }
        }
        None
    }
}
