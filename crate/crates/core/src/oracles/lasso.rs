use crate::error::{Error, Result};
use crate::kripke::{KripkeStructure, StateId};
use crate::trace::Lasso;

/// Paths of exactly `len` states starting at `from`, in lexicographic order.
fn paths_from(ks: &KripkeStructure, from: StateId, len: usize, out: &mut Vec<Vec<StateId>>) {
    fn go(ks: &KripkeStructure, cur: &mut Vec<StateId>, len: usize, out: &mut Vec<Vec<StateId>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().expect("paths are non-empty");
        for &t in ks.successors(last) {
            cur.push(t);
            go(ks, cur, len, out);
            cur.pop();
        }
    }
    go(ks, &mut vec![from], len, out);
}

/// All lassos with a stem of 1 to `stem_bound` states starting at the
/// initial state and a loop of 1 to `loop_bound` states. Ordered by stem
/// length, stem, loop length, loop.
pub fn enumerate_lassos(
    ks: &KripkeStructure,
    stem_bound: usize,
    loop_bound: usize,
) -> Result<Vec<Lasso>> {
    if stem_bound == 0 || loop_bound == 0 {
        return Err(Error::Argument("lasso bounds must be at least 1".into()));
    }
    let mut out = Vec::new();
    for stem_len in 1..=stem_bound {
        let mut stems = Vec::new();
        paths_from(ks, ks.initial(), stem_len, &mut stems);
        for stem in stems {
            let last = *stem.last().expect("stems are non-empty");
            for loop_len in 1..=loop_bound {
                for &entry in ks.successors(last) {
                    let mut cycles = Vec::new();
                    paths_from(ks, entry, loop_len, &mut cycles);
                    for cycle in cycles {
                        let back = *cycle.last().expect("cycles are non-empty");
                        if ks.has_edge(back, entry) {
                            out.push(Lasso {
                                stem: stem.clone(),
                                cycle,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::parse_ks;

    const FIG2: &str = include_str!("../../../../fixtures/fig2.ks");

    #[test]
    fn single_self_loop() {
        let ks = parse_ks("states s\ninit s\ntrans s s\n").unwrap();
        let all = enumerate_lassos(&ks, 1, 1).unwrap();
        let s = ks.state("s").unwrap();
        assert_eq!(all, vec![Lasso { stem: vec![s], cycle: vec![s] }]);
    }

    #[test]
    fn fig2_contains_example_paths() {
        let ks = parse_ks(FIG2).unwrap();
        let all = enumerate_lassos(&ks, 4, 1).unwrap();
        let ids = |names: &[&str]| -> Vec<StateId> {
            names.iter().map(|n| ks.state(n).unwrap()).collect()
        };
        for (stem, cycle) in [(&["s0", "s1", "s4"][..], "s6"), (&["s0", "s1", "s3"][..], "s7")] {
            let lasso = Lasso { stem: ids(stem), cycle: ids(&[cycle]) };
            assert!(all.contains(&lasso));
        }
        assert!(all.iter().all(|l| l.is_path_of(&ks)));
    }

    /// Independent count: every stem path of length k ending in a state `x`
    /// contributes one lasso per cycle through a successor of `x`.
    #[test]
    fn fig2_count_matches_dfs() {
        let ks = parse_ks(FIG2).unwrap();
        let n = ks.num_states();
        let mut expected = 0;
        // walks[k][s]: number of paths with k states from init ending in s
        let mut walks = vec![0usize; n];
        walks[ks.initial().index()] = 1;
        for _ in 0..4 {
            for x in ks.states() {
                // loops of one state: successor y of x with y -> y
                expected += walks[x.index()]
                    * ks.successors(x).iter().filter(|&&y| ks.has_edge(y, y)).count();
            }
            let mut next = vec![0usize; n];
            for (a, b) in ks.edges() {
                next[b.index()] += walks[a.index()];
            }
            walks = next;
        }
        assert_eq!(enumerate_lassos(&ks, 4, 1).unwrap().len(), expected);
    }

    #[test]
    fn zero_bound_is_rejected() {
        let ks = parse_ks(FIG2).unwrap();
        assert!(enumerate_lassos(&ks, 0, 1).is_err());
    }
}
