//! Kripke minimization equivalence: two-step predecessor-based reachability,
//! partition checking, quotienting and the strong-bisimulation baseline.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::kripke::{fresh_name, KripkeStructure, StateId, StateSet};
use crate::partition::Partition;
use crate::reduce::{reduce, Strategy};
use crate::verdict::{first_disagreement, label_witness, Verdict, Witness};

/// `Pbr(s, C, D)`: some `C`-successor of `s` has a `D`-successor.
pub fn pbr(ks: &KripkeStructure, s: StateId, c: &StateSet, d: &StateSet) -> bool {
    ks.successors(s)
        .iter()
        .filter(|x| c.contains(x))
        .any(|&x| ks.successors(x).iter().any(|y| d.contains(y)))
}

/// For predecessor `p` of block `c`, the blocks `D` with `Pbr(p, C, D) = 1`.
fn pbr_targets(ks: &KripkeStructure, part: &Partition, p: StateId, c: usize) -> Vec<bool> {
    let mut out = vec![false; part.len()];
    for &x in ks.successors(p) {
        if part.block_of(x) == c {
            for &y in ks.successors(x) {
                out[part.block_of(y)] = true;
            }
        }
    }
    out
}

pub(crate) fn check_size(ks: &KripkeStructure, part: &Partition) -> Result<()> {
    if part.num_states() != ks.num_states() {
        return Err(Error::PartitionSize {
            expected: ks.num_states(),
            found: part.num_states(),
        });
    }
    Ok(())
}

/// Checks whether `part` is a KME on `ks`: blocks are label-uniform and all
/// predecessors of a block agree on `Pbr` for every target block. Expects a
/// normalized structure.
pub fn is_kme(ks: &KripkeStructure, part: &Partition) -> Result<Verdict> {
    check_size(ks, part)?;
    if let Some(w) = label_witness(ks, part) {
        return Ok(Verdict::reject(w));
    }
    for c in 0..part.len() {
        let preds = ks.pred_of(&part.block_set(c));
        let per_pred: Vec<(StateId, Vec<bool>)> = preds
            .iter()
            .map(|&p| (p, pbr_targets(ks, part, p, c)))
            .collect();
        if let Some((d, pred_a, pred_b)) = first_disagreement(&per_pred) {
            return Ok(Verdict::reject(Witness::PbrMismatch {
                c,
                d,
                pred_a,
                pred_b,
            }));
        }
    }
    Ok(Verdict::accept())
}

/// Readable, unique state names for quotient blocks: a singleton keeps its
/// member's name, larger blocks join member names with `_`.
pub(crate) fn block_names(ks: &KripkeStructure, part: &Partition) -> Vec<String> {
    let mut taken: HashMap<String, ()> = HashMap::new();
    part.blocks()
        .iter()
        .map(|b| {
            let base = b.iter().map(|&s| ks.name(s)).collect::<Vec<_>>().join("_");
            let name = fresh_name(&taken, &base);
            taken.insert(name.clone(), ());
            name
        })
        .collect()
}

/// Quotient under a KME: one state per block, `C -> D` iff `Pbr(p, C, D)`
/// for a predecessor `p` of `C`. State `i` of the result is block `i`.
pub fn kme_quotient(ks: &KripkeStructure, part: &Partition) -> Result<KripkeStructure> {
    if !is_kme(ks, part)?.accepted() {
        return Err(Error::NotAnEquivalence("KME"));
    }
    let names = block_names(ks, part);
    let mut edges = Vec::new();
    for (c, name) in names.iter().enumerate() {
        let preds = ks.pred_of(&part.block_set(c));
        let Some(&p) = preds.first() else {
            return Err(Error::Argument(format!(
                "block `{name}` has no predecessor; normalize the structure first"
            )));
        };
        for (d, hit) in pbr_targets(ks, part, p, c).into_iter().enumerate() {
            if hit {
                edges.push((StateId(c), StateId(d)));
            }
        }
    }
    let labels = part.blocks().iter().map(|b| ks.label(b[0]).clone()).collect();
    KripkeStructure::new(
        names,
        ks.aps().clone(),
        labels,
        edges,
        StateId(part.block_of(ks.initial())),
    )
    .map_err(|e| match e {
        Error::Invalid(v) => Error::QuotientNotTotal(
            v.first().map(|x| x.to_string()).unwrap_or_default(),
        ),
        other => other,
    })
}

/// Coarsest strong bisimulation, by iterated signature splitting starting
/// from the label partition.
pub fn strong_bisim_partition(ks: &KripkeStructure) -> Partition {
    let mut part = Partition::by_label(ks);
    loop {
        let keys: Vec<(usize, BTreeSet<usize>)> = ks
            .states()
            .map(|s| {
                let succ_blocks = ks.successors(s).iter().map(|&t| part.block_of(t)).collect();
                (part.block_of(s), succ_blocks)
            })
            .collect();
        let next = Partition::from_assignment(&keys);
        if next.len() == part.len() {
            return next;
        }
        part = next;
    }
}

/// A KME found by `strategy`; greedy starts from the coarsest strong
/// bisimulation.
pub fn kme_reduce(ks: &KripkeStructure, strategy: Strategy) -> Result<Partition> {
    reduce(ks, strong_bisim_partition(ks), strategy, |p| {
        is_kme(ks, p).map(|v| v.accepted()).unwrap_or(false)
    })
}

/// Builds the disjoint union of `ks` and `quotient` (state `i` of the
/// quotient standing for block `i`), pairing every block with its quotient
/// state.
pub(crate) fn pairing(
    ks: &KripkeStructure,
    part: &Partition,
    quotient: &KripkeStructure,
) -> Result<(KripkeStructure, Partition)> {
    if quotient.num_states() != part.len() {
        return Err(Error::Argument(format!(
            "quotient has {} states but the partition has {} blocks",
            quotient.num_states(),
            part.len()
        )));
    }
    let union = ks.disjoint_union(quotient);
    let keys: Vec<usize> = part
        .assignment()
        .iter()
        .copied()
        .chain(0..part.len())
        .collect();
    Ok((union, Partition::from_assignment(&keys)))
}

/// Checks the pairing of `ks` with a candidate quotient as a KME on their
/// disjoint union.
pub fn star_pairing(
    ks: &KripkeStructure,
    part: &Partition,
    quotient: &KripkeStructure,
) -> Result<Verdict> {
    let (union, pairs) = pairing(ks, part, quotient)?;
    is_kme(&union, &pairs)
}

/// `K ⋆ K/R`: the block/quotient-state pairing is a KME on the disjoint union.
pub fn star_equivalent(ks: &KripkeStructure, part: &Partition) -> Result<bool> {
    let q = kme_quotient(ks, part)?;
    Ok(star_pairing(ks, part, &q)?.accepted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{parse_ks, NormalizeOptions};
    use crate::partition::parse_partition;

    const FIG2: &str = include_str!("../../../fixtures/fig2.ks");
    const FIG2_PART: &str = include_str!("../../../fixtures/fig2.part");
    const FIG2_Q: &str = include_str!("../../../fixtures/fig2_quotient.ks");

    fn fig2() -> KripkeStructure {
        parse_ks(FIG2)
            .unwrap()
            .normalize(NormalizeOptions::default())
            .unwrap()
    }

    fn names(ks: &KripkeStructure, p: &Partition) -> Vec<Vec<String>> {
        p.report(ks).blocks
    }

    /// Brute force over the KME definition, quantifying over every pair of blocks and
    /// every pair of predecessors, independent of `pbr_targets`.
    fn brute_force_kme(ks: &KripkeStructure, p: &Partition) -> bool {
        let blocks: Vec<StateSet> = (0..p.len()).map(|i| p.block_set(i)).collect();
        for b in &blocks {
            let first = *b.iter().next().unwrap();
            if b.iter().any(|&s| ks.label(s) != ks.label(first)) {
                return false;
            }
        }
        for c in &blocks {
            let preds: Vec<StateId> = ks
                .states()
                .filter(|&s| ks.successors(s).iter().any(|t| c.contains(t)))
                .collect();
            for d in &blocks {
                for &x in &preds {
                    for &y in &preds {
                        if pbr(ks, x, c, d) != pbr(ks, y, c, d) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn pbr_examples() {
        let ks = parse_ks(FIG2).unwrap();
        let c = ks.set_of(&["s3", "s4", "s5"]).unwrap();
        let d = ks.set_of(&["s7"]).unwrap();
        let s = |n| ks.state(n).unwrap();
        assert!(pbr(&ks, s("s1"), &c, &d));
        assert!(pbr(&ks, s("s2"), &c, &d));
        assert!(!pbr(&ks, s("s1"), &c, &c));
    }

    #[test]
    fn example_partition_is_kme() {
        let ks = fig2();
        let p = parse_partition(FIG2_PART, &ks).unwrap();
        assert!(is_kme(&ks, &p).unwrap().accepted());
        assert!(brute_force_kme(&ks, &p));
        assert!(is_kme(&ks, &Partition::identity(ks.num_states())).unwrap().accepted());
    }

    #[test]
    fn merging_s3_s4_is_rejected() {
        let ks = fig2();
        let p = parse_partition("s0\ns1\ns2\ns3 s4\ns5\ns6\ns7\n", &ks).unwrap();
        assert!(!brute_force_kme(&ks, &p));
        let v = is_kme(&ks, &p).unwrap();
        let w = v.witness().unwrap().report(&ks, &p);
        assert_eq!(w.kind, "pbr-mismatch");
        assert_eq!(w.block_c, vec!["s3", "s4"]);
        assert_eq!(w.block_d, Some(vec!["s7".to_string()]));
        assert_eq!((w.pred_a.as_str(), w.pred_b.as_str()), ("s1", "s2"));
    }

    #[test]
    fn label_mismatch_witness() {
        let ks = fig2();
        let p = parse_partition("s0\ns1 s2\ns3 s4 s5\ns6\ns7\n", &ks).unwrap();
        let w = is_kme(&ks, &p).unwrap();
        assert_eq!(w.witness().unwrap().kind(), "label-mismatch");
    }

    #[test]
    fn quotient_matches_reference() {
        let ks = fig2();
        let p = parse_partition(FIG2_PART, &ks).unwrap();
        let q = kme_quotient(&ks, &p).unwrap();
        let reference = parse_ks(FIG2_Q).unwrap();
        assert!(q.denormalize().is_isomorphic(&reference));
        let c = q.state("s3_s4_s5").unwrap();
        assert!(!q.has_edge(c, c));
        assert!(q.has_edge(c, q.state("s7").unwrap()));
        assert!(q.has_edge(c, q.state("s6").unwrap()));
        // identity quotient reproduces its input
        let qq = kme_quotient(&q, &Partition::identity(q.num_states())).unwrap();
        assert!(qq.is_isomorphic(&q));
    }

    #[test]
    fn identity_quotient_is_isomorphic() {
        let ks = fig2();
        let q = kme_quotient(&ks, &Partition::identity(ks.num_states())).unwrap();
        assert!(q.is_isomorphic(&ks));
    }

    #[test]
    fn quotient_rejects_non_kme() {
        let ks = fig2();
        let p = parse_partition("s0\ns1\ns2\ns3 s4\ns5\ns6\ns7\n", &ks).unwrap();
        assert_eq!(kme_quotient(&ks, &p), Err(Error::NotAnEquivalence("KME")));
    }

    #[test]
    fn strong_bisim_on_fig2() {
        let ks = fig2();
        let p = strong_bisim_partition(&ks);
        assert_eq!(p.visible_blocks(&ks), 7);
        let expected: Vec<Vec<String>> = [
            vec!["s0"],
            vec!["s1"],
            vec!["s2"],
            vec!["s3", "s5"],
            vec!["s4"],
            vec!["s6"],
            vec!["s7"],
        ]
        .iter()
        .map(|b| b.iter().map(|s| s.to_string()).collect())
        .collect();
        assert_eq!(names(&ks, &p), expected);
        assert!(is_kme(&ks, &p).unwrap().accepted());
    }

    #[test]
    fn strong_bisim_small_cases() {
        let one = parse_ks("states s\ninit s\ntrans s s\n").unwrap();
        assert_eq!(strong_bisim_partition(&one).len(), 1);
        let two = parse_ks("states u v w\ninit w\ntrans u u\ntrans v v\ntrans w u\ntrans w v\n")
            .unwrap()
            .normalize(NormalizeOptions {
                add_pred_state: true,
                mark_initial: false,
            })
            .unwrap();
        let p = strong_bisim_partition(&two);
        assert!(p.same_block(two.state("u").unwrap(), two.state("v").unwrap()));
    }

    #[test]
    fn greedy_reproduces_example_partition() {
        let ks = fig2();
        let p = kme_reduce(&ks, Strategy::Greedy).unwrap();
        assert_eq!(p, parse_partition(FIG2_PART, &ks).unwrap());
    }

    #[test]
    fn exhaustive_finds_six_blocks() {
        let ks = fig2();
        let p = kme_reduce(&ks, Strategy::Exhaustive).unwrap();
        assert_eq!(p.visible_blocks(&ks), 6);
        assert!(brute_force_kme(&ks, &p));
    }

    #[test]
    fn exhaustive_on_minimal_quotient_stays_six() {
        let ks = fig2();
        let q = kme_quotient(&ks, &parse_partition(FIG2_PART, &ks).unwrap()).unwrap();
        let p = kme_reduce(&q, Strategy::Exhaustive).unwrap();
        assert_eq!(p.visible_blocks(&q), 6);
    }

    /// The twenty label-respecting partitions of fig2: none with five
    /// visible blocks is a KME.
    #[test]
    fn no_five_block_kme_exists() {
        let ks = fig2();
        let s = |n| ks.state(n).unwrap();
        let a_splits: [&[&[&str]]; 5] = [
            &[&["s3", "s4", "s5"]],
            &[&["s3", "s4"], &["s5"]],
            &[&["s3", "s5"], &["s4"]],
            &[&["s4", "s5"], &["s3"]],
            &[&["s3"], &["s4"], &["s5"]],
        ];
        let mut count = 0;
        let mut best = usize::MAX;
        for merge_17 in [false, true] {
            for merge_26 in [false, true] {
                for split in a_splits {
                    let mut blocks: Vec<Vec<StateId>> =
                        vec![vec![s("s0")], vec![ks.aux_states()[0]]];
                    if merge_17 {
                        blocks.push(vec![s("s1"), s("s7")]);
                    } else {
                        blocks.push(vec![s("s1")]);
                        blocks.push(vec![s("s7")]);
                    }
                    if merge_26 {
                        blocks.push(vec![s("s2"), s("s6")]);
                    } else {
                        blocks.push(vec![s("s2")]);
                        blocks.push(vec![s("s6")]);
                    }
                    for b in split {
                        blocks.push(b.iter().map(|n| s(n)).collect());
                    }
                    let p = Partition::from_blocks(ks.num_states(), blocks).unwrap();
                    count += 1;
                    let ok = brute_force_kme(&ks, &p);
                    assert_eq!(ok, is_kme(&ks, &p).unwrap().accepted());
                    if ok {
                        best = best.min(p.visible_blocks(&ks));
                    }
                }
            }
        }
        assert_eq!(count, 20);
        assert_eq!(best, 6);
    }

    #[test]
    fn star_equivalence() {
        let ks = fig2();
        let p = parse_partition(FIG2_PART, &ks).unwrap();
        assert!(star_equivalent(&ks, &p).unwrap());
        assert!(star_equivalent(&ks, &Partition::identity(ks.num_states())).unwrap());

        let q = kme_quotient(&ks, &p).unwrap();
        let c = q.state("s3_s4_s5").unwrap();
        let corrupted = q.without_edge(c, q.state("s6").unwrap()).unwrap();
        assert!(!star_pairing(&ks, &p, &corrupted).unwrap().accepted());
    }

    #[test]
    fn pbr_monotone_in_target() {
        let ks = fig2();
        let all: Vec<StateId> = ks.states().collect();
        let c = ks.set_of(&["s3", "s4", "s5"]).unwrap();
        for mask in 0u32..(1 << all.len()) {
            let d: StateSet = all.iter().copied().filter(|s| mask >> s.0 & 1 == 1).collect();
            for extra in &all {
                let mut d2 = d.clone();
                d2.insert(*extra);
                for &s in &all {
                    assert!(pbr(&ks, s, &c, &d) <= pbr(&ks, s, &c, &d2));
                }
            }
        }
    }
}
