//! Brute-force reference checks, written independently of the automata in
//! `oracles` and used only to cross-validate them.

use std::collections::BTreeSet;

use crate::kripke::{KripkeStructure, Label, StateId};
use crate::trace::TraceWord;

fn bits(set: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| set & (1 << i) != 0)
}

/// Splits a successor set by label. `None` as input stands for the state
/// before the first letter.
fn steps(ks: &KripkeStructure, from: Option<u64>) -> Vec<(Label, u64)> {
    let targets: Vec<StateId> = match from {
        None => vec![ks.initial()],
        Some(set) => bits(set)
            .flat_map(|s| ks.successors(StateId(s)).iter().copied())
            .collect(),
    };
    let mut out: Vec<(Label, u64)> = Vec::new();
    for t in targets {
        let l = ks.user_label(t);
        match out.iter_mut().find(|(x, _)| *x == l) {
            Some((_, m)) => *m |= 1 << t.index(),
            None => out.push((l, 1 << t.index())),
        }
    }
    out
}

/// Whether the two structures have the same finite traces of length at
/// most `len`, explored level by level over pairs of reachable state sets.
/// Structures must have at most 64 states.
pub fn bounded_prefix_equal(k1: &KripkeStructure, k2: &KripkeStructure, len: usize) -> bool {
    assert!(k1.num_states() <= 64 && k2.num_states() <= 64);
    let mut level: BTreeSet<(Option<u64>, Option<u64>)> = BTreeSet::from([(None, None)]);
    let mut seen = level.clone();
    for _ in 0..len {
        let mut next = BTreeSet::new();
        for &(a, b) in &level {
            let sa = steps(k1, a);
            let sb = steps(k2, b);
            for (l, m) in &sa {
                match sb.iter().find(|(x, _)| x == l) {
                    Some((_, m2)) => {
                        let pair = (Some(*m), Some(*m2));
                        if seen.insert(pair) {
                            next.insert(pair);
                        }
                    }
                    None => return false,
                }
            }
            if sb.iter().any(|(l, _)| !sa.iter().any(|(x, _)| x == l)) {
                return false;
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    true
}

/// Whether some path from the initial state has a trace stutter equivalent
/// to `w`. `w` must have no two equal neighbours (the last cycle letter
/// counting as a neighbour of the first) unless its cycle has one letter.
///
/// Walks the product of the structure with the positions of `w`: a step
/// either stays on the current position (a stutter step) or advances to the
/// next one. The word is realized iff a reachable cycle of the product keeps
/// advancing, or, for a one-letter cycle, any reachable cycle sits on it.
pub fn realizes_up_to_stutter(ks: &KripkeStructure, w: &TraceWord) -> bool {
    let n = ks.num_states();
    let m = w.positions();
    let constant_tail = w.cycle.len() == 1;
    let node = |s: usize, i: usize| s * m + i;
    let fits = |s: usize, i: usize| ks.user_label(StateId(s)) == *w.at(i);
    let s0 = ks.initial().index();
    if !fits(s0, 0) {
        return false;
    }
    // edges of the product: (target, advances)
    let edges = |v: usize| -> Vec<(usize, bool)> {
        let (s, i) = (v / m, v % m);
        let mut out = Vec::new();
        for t in ks.successors(StateId(s)) {
            let t = t.index();
            if fits(t, i) {
                out.push((node(t, i), false));
            } else if fits(t, w.next(i)) {
                out.push((node(t, w.next(i)), true));
            }
        }
        out
    };
    let mut reach = vec![false; n * m];
    let mut stack = vec![node(s0, 0)];
    reach[node(s0, 0)] = true;
    while let Some(v) = stack.pop() {
        for (t, _) in edges(v) {
            if !reach[t] {
                reach[t] = true;
                stack.push(t);
            }
        }
    }
    let reaches = |from: usize, to: usize| -> bool {
        let mut seen = vec![false; n * m];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for (t, _) in edges(v) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        false
    };
    let last = m - 1;
    (0..n * m).filter(|&v| reach[v]).any(|v| {
        edges(v).into_iter().any(|(t, advances)| {
            let good = if constant_tail { v % m == last } else { advances };
            good && reaches(t, v)
        })
    })
}

/// Ultimately periodic words over `alphabet` with at most `stem` stem
/// letters and `cycle` cycle letters, with no two equal neighbours
/// (cycles of one letter excepted).
pub fn candidate_words(alphabet: &[Label], stem: usize, cycle: usize) -> Vec<TraceWord> {
    let mut seqs: Vec<Vec<usize>> = vec![Vec::new()];
    let mut all: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..stem + cycle {
        let mut next = Vec::new();
        for s in &seqs {
            for a in 0..alphabet.len() {
                if s.last() != Some(&a) {
                    let mut t = s.clone();
                    t.push(a);
                    next.push(t);
                }
            }
        }
        all.extend(next.iter().cloned());
        seqs = next;
    }
    let mut out = Vec::new();
    for seq in &all {
        for c in 1..=cycle.min(seq.len()) {
            let split = seq.len() - c;
            if split > stem {
                continue;
            }
            let cyc = &seq[split..];
            if c > 1 && cyc.first() == cyc.last() {
                continue;
            }
            out.push(TraceWord::new(
                seq[..split].iter().map(|&a| alphabet[a].clone()).collect(),
                cyc.iter().map(|&a| alphabet[a].clone()).collect(),
            ));
        }
    }
    out
}

/// Compares the two structures on every candidate word; returns a word
/// realized by exactly one of them.
pub fn bounded_stutter_difference(
    k1: &KripkeStructure,
    k2: &KripkeStructure,
    stem: usize,
    cycle: usize,
) -> Option<TraceWord> {
    let alphabet: Vec<Label> = k1
        .states()
        .map(|s| k1.user_label(s))
        .chain(k2.states().map(|s| k2.user_label(s)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    candidate_words(&alphabet, stem, cycle)
        .into_iter()
        .find(|w| realizes_up_to_stutter(k1, w) != realizes_up_to_stutter(k2, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::parse_ks;

    const FIG2: &str = include_str!("../../../../fixtures/fig2.ks");
    const FIG3: &str = include_str!("../../../../fixtures/fig3.ks");

    fn l(atoms: &[&str]) -> Label {
        atoms.iter().map(|a| a.to_string()).collect()
    }

    #[test]
    fn prefix_sets() {
        let f2 = parse_ks(FIG2).unwrap();
        let f3 = parse_ks(FIG3).unwrap();
        assert!(bounded_prefix_equal(&f2, &f2, 20));
        assert!(bounded_prefix_equal(&f2, &f3, 3));
        assert!(!bounded_prefix_equal(&f2, &f3, 4));
    }

    #[test]
    fn stutter_membership() {
        let f2 = parse_ks(FIG2).unwrap();
        let f3 = parse_ks(FIG3).unwrap();
        let diverge = TraceWord::new(vec![l(&["a"]), l(&[])], vec![l(&["a"])]);
        assert!(realizes_up_to_stutter(&f3, &diverge));
        assert!(!realizes_up_to_stutter(&f2, &diverge));
        let to_b = TraceWord::new(vec![l(&["a"]), l(&[]), l(&["a"])], vec![l(&["b"])]);
        assert!(realizes_up_to_stutter(&f2, &to_b));
        assert!(realizes_up_to_stutter(&f3, &to_b));
        assert!(bounded_stutter_difference(&f2, &f3, 3, 1).is_some());
    }

    #[test]
    fn candidate_counts() {
        let alphabet = [l(&[]), l(&["a"])];
        // over two letters every alternating sequence is fixed by its first
        // letter: (stem, cycle) lengths (0,1) (1,1) (0,2) (1,2), two each
        let words = candidate_words(&alphabet, 1, 2);
        assert!(words.iter().all(|w| w.stem.len() <= 1 && w.cycle.len() <= 2));
        assert_eq!(words.len(), 8);
    }
}
