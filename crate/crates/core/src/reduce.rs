//! Search strategies shared by the KME and WKME reducers.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kripke::{KripkeStructure, Label, StateId};
use crate::partition::Partition;

/// Largest label class the exhaustive search will enumerate.
pub const EXHAUSTIVE_CLASS_LIMIT: usize = 12;

/// Largest group of blocks the greedy search tries to merge at once.
pub const GREEDY_GROUP_LIMIT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Merge groups of equally labeled blocks while the check still passes.
    Greedy,
    /// Enumerate every label-respecting partition and keep a smallest one.
    Exhaustive,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Strategy::Greedy),
            "exhaustive" => Ok(Strategy::Exhaustive),
            other => Err(Error::Argument(format!("unknown strategy `{other}`"))),
        }
    }
}

pub(crate) fn reduce(
    ks: &KripkeStructure,
    seed: Partition,
    strategy: Strategy,
    accepts: impl Fn(&Partition) -> bool,
) -> Result<Partition> {
    match strategy {
        Strategy::Greedy => Ok(greedy(ks, seed, &accepts)),
        Strategy::Exhaustive => exhaustive(ks, &accepts),
    }
}

/// Deterministic greedy merging. Blocks are ordered by smallest member;
/// groups of equally labeled blocks are tried by size (pairs first), each
/// size in lexicographic order. An accepted merge restarts the scan.
fn greedy(ks: &KripkeStructure, seed: Partition, accepts: &dyn Fn(&Partition) -> bool) -> Partition {
    let mut part = if accepts(&seed) {
        seed
    } else {
        Partition::identity(ks.num_states())
    };
    'restart: loop {
        let mut by_label: BTreeMap<&Label, Vec<usize>> = BTreeMap::new();
        for (i, b) in part.blocks().iter().enumerate() {
            by_label.entry(ks.label(b[0])).or_default().push(i);
        }
        let mut classes: Vec<Vec<usize>> = by_label.into_values().filter(|c| c.len() > 1).collect();
        classes.sort();
        for size in 2..=GREEDY_GROUP_LIMIT {
            let mut groups: Vec<Vec<usize>> = classes
                .iter()
                .flat_map(|c| combinations(c, size))
                .collect();
            groups.sort();
            for g in groups {
                let candidate = part.merge(&g);
                if accepts(&candidate) {
                    part = candidate;
                    continue 'restart;
                }
            }
        }
        return part;
    }
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Advances a restricted growth string to the next set partition in
/// lexicographic order; returns false after the last one.
fn next_rgs(a: &mut [usize]) -> bool {
    for i in (1..a.len()).rev() {
        let m = a[..i].iter().copied().max().unwrap_or(0);
        if a[i] <= m {
            a[i] += 1;
            a[i + 1..].iter_mut().for_each(|x| *x = 0);
            return true;
        }
    }
    false
}

/// Smallest accepted label-respecting partition; ties go to the
/// lexicographically least block list.
fn exhaustive(ks: &KripkeStructure, accepts: &dyn Fn(&Partition) -> bool) -> Result<Partition> {
    let mut classes: BTreeMap<&Label, Vec<StateId>> = BTreeMap::new();
    for s in ks.states() {
        classes.entry(ks.label(s)).or_default().push(s);
    }
    let classes: Vec<Vec<StateId>> = classes.into_values().collect();
    if let Some(big) = classes.iter().find(|c| c.len() > EXHAUSTIVE_CLASS_LIMIT) {
        return Err(Error::SizeLimit {
            size: big.len(),
            limit: EXHAUSTIVE_CLASS_LIMIT,
        });
    }
    let mut rgs: Vec<Vec<usize>> = classes.iter().map(|c| vec![0; c.len()]).collect();
    let mut best: Option<Partition> = None;
    loop {
        let blocks: usize = rgs
            .iter()
            .map(|r| r.iter().max().map_or(0, |m| m + 1))
            .sum();
        if best.as_ref().is_none_or(|b| blocks <= b.len()) {
            let mut keys = vec![(0usize, 0usize); ks.num_states()];
            for (ci, class) in classes.iter().enumerate() {
                for (j, &s) in class.iter().enumerate() {
                    keys[s.0] = (ci, rgs[ci][j]);
                }
            }
            let candidate = Partition::from_assignment(&keys);
            let better = match &best {
                None => true,
                Some(b) => (candidate.len(), candidate.blocks()) < (b.len(), b.blocks()),
            };
            if better && accepts(&candidate) {
                best = Some(candidate);
            }
        }
        // odometer over the classes
        let mut i = 0;
        loop {
            if i == rgs.len() {
                return best.ok_or_else(|| {
                    Error::Argument("no label-respecting partition passes the check".into())
                });
            }
            if next_rgs(&mut rgs[i]) {
                break;
            }
            rgs[i].iter_mut().for_each(|x| *x = 0);
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell: Vec<usize> = (1..9)
            .map(|n| {
                let mut a = vec![0; n];
                let mut count = 1;
                while next_rgs(&mut a) {
                    count += 1;
                }
                count
            })
            .collect();
        assert_eq!(bell, vec![1, 2, 5, 15, 52, 203, 877, 4140]);
    }

    #[test]
    fn combinations_in_order() {
        assert_eq!(
            combinations(&[1, 4, 6], 2),
            vec![vec![1, 4], vec![1, 6], vec![4, 6]]
        );
        assert_eq!(combinations(&[1, 4], 3), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn strategy_parse() {
        assert_eq!("greedy".parse::<Strategy>().unwrap(), Strategy::Greedy);
        assert!("fast".parse::<Strategy>().is_err());
    }
}
