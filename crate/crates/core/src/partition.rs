use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kripke::{KripkeStructure, Label, StateId, StateSet};

/// Disjoint, covering blocks of states. Blocks are kept in canonical order:
/// members ascending, blocks ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<StateId>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn from_blocks(num_states: usize, blocks: Vec<Vec<StateId>>) -> Result<Self> {
        let mut owner = vec![None; num_states];
        for (b, block) in blocks.iter().enumerate() {
            for s in block {
                if s.0 >= num_states {
                    return Err(Error::PartitionSize {
                        expected: num_states,
                        found: s.0 + 1,
                    });
                }
                if owner[s.0].replace(b).is_some() {
                    return Err(Error::DuplicateState(s.to_string()));
                }
            }
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(Error::MissingState(StateId(i).to_string()));
        }
        Ok(Self::from_assignment(
            &owner.into_iter().map(Option::unwrap).collect::<Vec<_>>(),
        ))
    }

    /// Builds the partition in which states with equal keys share a block.
    pub fn from_assignment<K: Ord + Clone>(keys: &[K]) -> Self {
        let mut groups: BTreeMap<K, Vec<StateId>> = BTreeMap::new();
        for (i, k) in keys.iter().enumerate() {
            groups.entry(k.clone()).or_default().push(StateId(i));
        }
        let mut blocks: Vec<Vec<StateId>> = groups.into_values().collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        let mut block_of = vec![0; keys.len()];
        for (i, b) in blocks.iter().enumerate() {
            for s in b {
                block_of[s.0] = i;
            }
        }
        Partition { blocks, block_of }
    }

    pub fn identity(num_states: usize) -> Self {
        Self::from_assignment(&(0..num_states).collect::<Vec<_>>())
    }

    /// States grouped by their full label (reserved atoms included).
    pub fn by_label(ks: &KripkeStructure) -> Self {
        let keys: Vec<&Label> = ks.states().map(|s| ks.label(s)).collect();
        Self::from_assignment(&keys)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[StateId] {
        &self.blocks[i]
    }

    pub fn block_set(&self, i: usize) -> StateSet {
        self.blocks[i].iter().copied().collect()
    }

    pub fn block_of(&self, s: StateId) -> usize {
        self.block_of[s.0]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.block_of
    }

    pub fn same_block(&self, a: StateId, b: StateId) -> bool {
        self.block_of[a.0] == self.block_of[b.0]
    }

    /// Partition with the given blocks merged into one.
    pub fn merge(&self, group: &[usize]) -> Partition {
        let target = group[0];
        let keys: Vec<usize> = self
            .block_of
            .iter()
            .map(|&b| if group.contains(&b) { target } else { b })
            .collect();
        Self::from_assignment(&keys)
    }

    /// True iff every block of `self` is contained in a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&s| coarser.same_block(s, b[0])))
    }

    /// Blocks that contain at least one non-auxiliary state.
    pub fn visible_blocks(&self, ks: &KripkeStructure) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.iter().any(|&s| !ks.is_aux(s)))
            .count()
    }

    /// Lifts a partition of `ks.denormalize()` to `ks`: states are matched by
    /// name and auxiliary states become singletons.
    pub fn lift_to(&self, user: &KripkeStructure, ks: &KripkeStructure) -> Result<Partition> {
        let mut keys = vec![usize::MAX; ks.num_states()];
        for (i, b) in self.blocks.iter().enumerate() {
            for &s in b {
                keys[ks.state_named(user.name(s))?.0] = i;
            }
        }
        let mut next = self.blocks.len();
        for (i, k) in keys.iter_mut().enumerate() {
            if *k == usize::MAX {
                if !ks.is_aux(StateId(i)) {
                    return Err(Error::MissingState(ks.name(StateId(i)).to_string()));
                }
                *k = next;
                next += 1;
            }
        }
        Ok(Self::from_assignment(&keys))
    }

    /// One block per line. Auxiliary states are omitted.
    pub fn to_text(&self, ks: &KripkeStructure) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let names: Vec<&str> = b
                .iter()
                .filter(|&&s| !ks.is_aux(s))
                .map(|&s| ks.name(s))
                .collect();
            if !names.is_empty() {
                let _ = writeln!(out, "{}", names.join(" "));
            }
        }
        out
    }

    pub fn to_named(&self, ks: &KripkeStructure) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&s| ks.name(s).to_string()).collect())
            .collect()
    }

    pub fn report(&self, ks: &KripkeStructure) -> PartitionReport {
        PartitionReport {
            blocks: self
                .blocks
                .iter()
                .filter(|b| b.iter().any(|&s| !ks.is_aux(s)))
                .map(|b| b.iter().map(|&s| ks.name(s).to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PartitionReport {
    pub blocks: Vec<Vec<String>>,
}

/// Parses the partition format: one block per line, states separated by
/// whitespace; `{a b}{c}` brace groups are also accepted. Auxiliary states
/// that are not mentioned become singleton blocks.
pub fn parse_partition(text: &str, ks: &KripkeStructure) -> Result<Partition> {
    let mut blocks: Vec<Vec<StateId>> = Vec::new();
    let mut seen = BTreeSet::new();
    for line in text.lines() {
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let groups: Vec<&str> = if content.contains('{') {
            content
                .split(['{', '}'])
                .filter(|g| !g.trim().is_empty())
                .collect()
        } else {
            vec![content]
        };
        for g in groups {
            let mut block = Vec::new();
            for name in g.split_whitespace() {
                let s = ks.state_named(name)?;
                if !seen.insert(s) {
                    return Err(Error::DuplicateState(name.to_string()));
                }
                block.push(s);
            }
            if !block.is_empty() {
                blocks.push(block);
            }
        }
    }
    for s in ks.states() {
        if !seen.contains(&s) {
            if ks.is_aux(s) {
                blocks.push(vec![s]);
            } else {
                return Err(Error::MissingState(ks.name(s).to_string()));
            }
        }
    }
    Partition::from_blocks(ks.num_states(), blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{parse_ks, NormalizeOptions};

    const FIG2: &str = include_str!("../../../fixtures/fig2.ks");

    #[test]
    fn example_partition_has_six_blocks() {
        let ks = parse_ks(FIG2).unwrap();
        let p = parse_partition("{s0}{s1}{s2}{s3 s4 s5}{s6}{s7}", &ks).unwrap();
        assert_eq!(p.len(), 6);
        let q = parse_partition(include_str!("../../../fixtures/fig2.part"), &ks).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn one_block_per_state_is_identity() {
        let ks = parse_ks(FIG2).unwrap();
        let text: String = ks.names().iter().map(|n| format!("{n}\n")).collect();
        assert_eq!(parse_partition(&text, &ks).unwrap(), Partition::identity(8));
    }

    #[test]
    fn errors() {
        let ks = parse_ks(FIG2).unwrap();
        assert_eq!(
            parse_partition("s0\ns1\ns2\ns3 s4 s5\ns6\n", &ks),
            Err(Error::MissingState("s7".into()))
        );
        assert_eq!(
            parse_partition("s0 s0\ns1\ns2\ns3 s4 s5\ns6\ns7\n", &ks),
            Err(Error::DuplicateState("s0".into()))
        );
        assert_eq!(
            parse_partition("s0\ns9\n", &ks),
            Err(Error::UnknownState("s9".into()))
        );
    }

    #[test]
    fn aux_state_defaults_to_singleton() {
        let ks = parse_ks(FIG2)
            .unwrap()
            .normalize(NormalizeOptions::default())
            .unwrap();
        let p = parse_partition(include_str!("../../../fixtures/fig2.part"), &ks).unwrap();
        assert_eq!(p.len(), 7);
        assert_eq!(p.visible_blocks(&ks), 6);
        assert_eq!(p.to_text(&ks), "s0\ns1\ns2\ns3 s4 s5\ns6\ns7\n");
    }

    #[test]
    fn canonical_order() {
        let p = Partition::from_assignment(&[5, 3, 5, 1]);
        assert_eq!(
            p.blocks(),
            &[vec![StateId(0), StateId(2)], vec![StateId(1)], vec![StateId(3)]]
        );
        assert_eq!(p.merge(&[1, 2]).len(), 2);
    }
}
