//! The signature-refinement baselines against the relational definitions,
//! checked over every label-respecting partition of small random structures.

use ksmin::kripke::{KripkeStructure, NormalizeOptions, StateId};
use ksmin::selftest::random_instance;
use ksmin::{div_stutter_bisim_partition, strong_bisim_partition, Partition};

/// Every partition of the states that keeps differently labeled states apart.
fn label_respecting(ks: &KripkeStructure) -> Vec<Vec<usize>> {
    fn go(ks: &KripkeStructure, i: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == ks.num_states() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            let fits = (0..i).all(|j| cur[j] != b || ks.label(StateId(j)) == ks.label(StateId(i)));
            if fits {
                cur.push(b);
                go(ks, i + 1, cur, blocks.max(b + 1), out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(ks, 0, &mut Vec::new(), 0, &mut out);
    out
}

fn is_bisimulation(ks: &KripkeStructure, r: &[usize]) -> bool {
    let rel = |a: StateId, b: StateId| r[a.0] == r[b.0];
    ks.states().all(|s1| {
        ks.states().filter(|&s2| rel(s1, s2)).all(|s2| {
            ks.successors(s1)
                .iter()
                .all(|&t1| ks.successors(s2).iter().any(|&t2| rel(t1, t2)))
        })
    })
}

/// Some infinite path from `s` stays related to `s` after the first state.
fn diverges(ks: &KripkeStructure, r: &[usize], s: StateId) -> bool {
    // states of the class with an infinite path inside it: repeatedly drop
    // those without a successor among the remaining ones
    let mut alive: Vec<StateId> = ks.states().filter(|&t| r[t.0] == r[s.0]).collect();
    loop {
        let next: Vec<StateId> = alive
            .iter()
            .copied()
            .filter(|&t| ks.successors(t).iter().any(|u| alive.contains(u)))
            .collect();
        if next.len() == alive.len() {
            break;
        }
        alive = next;
    }
    ks.successors(s).iter().any(|u| alive.contains(u))
}

fn is_div_stutter_bisimulation(ks: &KripkeStructure, r: &[usize]) -> bool {
    let rel = |a: StateId, b: StateId| r[a.0] == r[b.0];
    let div: Vec<bool> = ks.states().map(|s| diverges(ks, r, s)).collect();
    ks.states().all(|s1| {
        ks.states().filter(|&s2| rel(s1, s2)).all(|s2| {
            if div[s1.0] != div[s2.0] {
                return false;
            }
            ks.successors(s1).iter().all(|&t1| {
                if rel(t1, s2) {
                    return true;
                }
                // s2 -> u1 -> ... -> un -> t2 with every ui related to s1
                let mut frontier = vec![s2];
                let mut seen = vec![s2];
                while let Some(u) = frontier.pop() {
                    for &t2 in ks.successors(u) {
                        if rel(t1, t2) {
                            return true;
                        }
                        if rel(s1, t2) && !seen.contains(&t2) {
                            seen.push(t2);
                            frontier.push(t2);
                        }
                    }
                }
                false
            })
        })
    })
}

fn assert_coarsest(ks: &KripkeStructure, found: &Partition, holds: impl Fn(&[usize]) -> bool) {
    assert!(holds(found.assignment()), "result is not a relation of the required kind\n{ks}");
    for r in label_respecting(ks).into_iter().filter(|r| holds(r)) {
        let p = Partition::from_assignment(&r);
        assert!(p.refines(found), "{:?} is not refined by the result\n{ks}", p.blocks());
    }
}

#[test]
fn strong_bisimulation_is_coarsest() {
    for case in 0..60 {
        let ks = random_instance(5, case, 6).normalize(NormalizeOptions::default()).unwrap();
        assert_coarsest(&ks, &strong_bisim_partition(&ks), |r| is_bisimulation(&ks, r));
    }
}

#[test]
fn stutter_bisimulation_is_coarsest() {
    for case in 0..60 {
        let ks = random_instance(6, case, 6).normalize(NormalizeOptions::default()).unwrap();
        assert_coarsest(&ks, &div_stutter_bisim_partition(&ks), |r| {
            is_div_stutter_bisimulation(&ks, r)
        });
    }
}
