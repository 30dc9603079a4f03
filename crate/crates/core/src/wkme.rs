//! Weak Kripke minimization equivalence. Stutter steps inside a block are
//! invisible: a predecessor of `C` may wander through `C` before the single
//! step into the target block.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::kme::{block_names, check_size, pairing};
use crate::kripke::{KripkeStructure, StateId, StateSet};
use crate::partition::Partition;
use crate::reduce::{reduce, Strategy};
use crate::verdict::{first_disagreement, label_witness, Verdict, Witness};

/// States reachable from `from` in zero or more steps without leaving `c`.
fn closure_within(
    ks: &KripkeStructure,
    from: impl IntoIterator<Item = StateId>,
    inside: impl Fn(StateId) -> bool,
) -> StateSet {
    let mut seen: StateSet = StateSet::new();
    let mut queue: VecDeque<StateId> = VecDeque::new();
    for s in from {
        if inside(s) && seen.insert(s) {
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &t in ks.successors(s) {
            if inside(t) && seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    seen
}

/// `WPbr(s, C, D)`: some `C`-successor of `s` reaches, through states of `C`
/// only, a state with a successor in `D`.
pub fn wpbr(ks: &KripkeStructure, s: StateId, c: &StateSet, d: &StateSet) -> bool {
    let entries = ks.successors(s).iter().copied();
    closure_within(ks, entries, |x| c.contains(&x))
        .into_iter()
        .any(|u| ks.successors(u).iter().any(|t| d.contains(t)))
}

/// Members of `c` lying on a cycle (length at least one) inside `c`.
pub fn block_divergent(ks: &KripkeStructure, c: &StateSet) -> StateSet {
    c.iter()
        .copied()
        .filter(|&s| {
            let after_one = ks.successors(s).iter().copied();
            closure_within(ks, after_one, |x| c.contains(&x)).contains(&s)
        })
        .collect()
}

/// Per-block sets of states on an in-block cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergenceInfo {
    pub per_block: Vec<StateSet>,
}

impl DivergenceInfo {
    pub fn compute(ks: &KripkeStructure, part: &Partition) -> Self {
        DivergenceInfo {
            per_block: (0..part.len())
                .map(|i| block_divergent(ks, &part.block_set(i)))
                .collect(),
        }
    }

    pub fn is_divergent(&self, block: usize) -> bool {
        !self.per_block[block].is_empty()
    }
}

/// For every state, the blocks other than its own that it can step into
/// after zero or more steps inside its own block.
fn stutter_exits(ks: &KripkeStructure, part: &Partition) -> Vec<Vec<bool>> {
    ks.states()
        .map(|s| {
            let home = part.block_of(s);
            let mut out = vec![false; part.len()];
            for u in closure_within(ks, [s], |x| part.block_of(x) == home) {
                for &t in ks.successors(u) {
                    let b = part.block_of(t);
                    if b != home {
                        out[b] = true;
                    }
                }
            }
            out
        })
        .collect()
}

fn wpbr_targets(
    ks: &KripkeStructure,
    part: &Partition,
    exits: &[Vec<bool>],
    p: StateId,
    c: usize,
) -> Vec<bool> {
    let mut out = vec![false; part.len()];
    for &x in ks.successors(p) {
        if part.block_of(x) == c {
            for (d, &hit) in exits[x.0].iter().enumerate() {
                out[d] |= hit;
            }
        }
    }
    out
}

fn external_preds(ks: &KripkeStructure, part: &Partition, c: usize) -> Vec<StateId> {
    ks.pred_of(&part.block_set(c))
        .into_iter()
        .filter(|&p| part.block_of(p) != c)
        .collect()
}

/// Which weak check to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeakMode {
    /// Label uniformity and `WPbr` agreement, nothing more.
    #[default]
    Literal,
    /// Additionally, when a block has a member on an in-block cycle, every
    /// outside predecessor must be able to enter it and stay forever. The
    /// literal check lets the quotient's self-loop create runs that stay in
    /// a block the original can only pass through.
    DivergenceConsistent,
}

/// Checks whether `part` is a WKME on `ks`: blocks are label-uniform and all
/// predecessors outside a block agree on `WPbr` for every other block.
pub fn is_wkme(ks: &KripkeStructure, part: &Partition) -> Result<Verdict> {
    is_wkme_with(ks, part, WeakMode::Literal)
}

pub fn is_wkme_with(ks: &KripkeStructure, part: &Partition, mode: WeakMode) -> Result<Verdict> {
    check_size(ks, part)?;
    if let Some(w) = label_witness(ks, part) {
        return Ok(Verdict::reject(w));
    }
    let exits = stutter_exits(ks, part);
    for c in 0..part.len() {
        let per_pred: Vec<(StateId, Vec<bool>)> = external_preds(ks, part, c)
            .into_iter()
            .map(|p| (p, wpbr_targets(ks, part, &exits, p, c)))
            .collect();
        if let Some((d, pred_a, pred_b)) = first_disagreement(&per_pred) {
            return Ok(Verdict::reject(Witness::WpbrMismatch {
                c,
                d,
                pred_a,
                pred_b,
            }));
        }
    }
    if mode == WeakMode::DivergenceConsistent {
        if let Some(w) = divergence_witness(ks, part) {
            return Ok(Verdict::reject(w));
        }
    }
    Ok(Verdict::accept())
}

fn divergence_witness(ks: &KripkeStructure, part: &Partition) -> Option<Witness> {
    let cycles = DivergenceInfo::compute(ks, part);
    (0..part.len()).find_map(|c| {
        let &cycling = cycles.per_block[c].iter().next()?;
        external_preds(ks, part, c).into_iter().find_map(|pred| {
            let entries = ks.successors(pred).iter().copied();
            let stay = closure_within(ks, entries, |x| part.block_of(x) == c);
            stay.is_disjoint(&cycles.per_block[c])
                .then_some(Witness::DivergenceMismatch { c, pred, cycling })
        })
    })
}

/// A weak quotient together with the blocks whose predecessors all lie
/// inside the block; their outgoing edges come from internal predecessors.
#[derive(Debug, Clone)]
pub struct WeakQuotient {
    pub ks: KripkeStructure,
    pub internal_only: Vec<usize>,
}

pub fn wkme_quotient(ks: &KripkeStructure, part: &Partition) -> Result<KripkeStructure> {
    wkme_quotient_reported(ks, part).map(|q| q.ks)
}

/// Quotient under a WKME: `C -> D` for `C ≠ D` iff `WPbr(p, C, D)` for an
/// outside predecessor `p`, and `C -> C` iff some member of `C` lies on a
/// cycle inside `C`. State `i` of the result is block `i`.
pub fn wkme_quotient_reported(ks: &KripkeStructure, part: &Partition) -> Result<WeakQuotient> {
    if !is_wkme(ks, part)?.accepted() {
        return Err(Error::NotAnEquivalence("WKME"));
    }
    let names = block_names(ks, part);
    let exits = stutter_exits(ks, part);
    let divergence = DivergenceInfo::compute(ks, part);
    let mut edges = Vec::new();
    let mut internal_only = Vec::new();
    for c in 0..part.len() {
        let outside = external_preds(ks, part, c);
        let targets = match outside.first() {
            Some(&p) => wpbr_targets(ks, part, &exits, p, c),
            None => {
                // every predecessor is a member of C
                internal_only.push(c);
                let mut acc = vec![false; part.len()];
                for p in ks.pred_of(&part.block_set(c)) {
                    for (d, hit) in wpbr_targets(ks, part, &exits, p, c).into_iter().enumerate() {
                        acc[d] |= hit;
                    }
                }
                acc
            }
        };
        for (d, hit) in targets.into_iter().enumerate() {
            if hit && d != c {
                edges.push((StateId(c), StateId(d)));
            }
        }
        if divergence.is_divergent(c) {
            edges.push((StateId(c), StateId(c)));
        }
    }
    let mut has_succ = vec![false; part.len()];
    for &(a, _) in &edges {
        has_succ[a.0] = true;
    }
    if let Some(c) = has_succ.iter().position(|&x| !x) {
        return Err(Error::QuotientNotTotal(names[c].clone()));
    }
    let labels = part.blocks().iter().map(|b| ks.label(b[0]).clone()).collect();
    let ks = KripkeStructure::new(
        names,
        ks.aps().clone(),
        labels,
        edges,
        StateId(part.block_of(ks.initial())),
    )?;
    Ok(WeakQuotient { ks, internal_only })
}

/// Coarsest divergence-sensitive stutter bisimulation by signature
/// refinement: a state's signature is its divergence flag together with the
/// blocks it can step into after stuttering inside its own block.
pub fn div_stutter_bisim_partition(ks: &KripkeStructure) -> Partition {
    let mut part = Partition::by_label(ks);
    loop {
        let exits = stutter_exits(ks, &part);
        let cycles = DivergenceInfo::compute(ks, &part);
        let keys: Vec<(usize, bool, BTreeSet<usize>)> = ks
            .states()
            .map(|s| {
                let home = part.block_of(s);
                let stay = closure_within(ks, [s], |x| part.block_of(x) == home);
                let divergent = stay.iter().any(|u| cycles.per_block[home].contains(u));
                let targets = exits[s.0]
                    .iter()
                    .enumerate()
                    .filter_map(|(b, &hit)| hit.then_some(b))
                    .collect();
                (home, divergent, targets)
            })
            .collect();
        let next = Partition::from_assignment(&keys);
        if next.len() == part.len() {
            return next;
        }
        part = next;
    }
}

/// A WKME found by `strategy`; greedy starts from the coarsest
/// divergence-sensitive stutter bisimulation.
pub fn wkme_reduce(ks: &KripkeStructure, strategy: Strategy) -> Result<Partition> {
    wkme_reduce_with(ks, strategy, WeakMode::Literal)
}

pub fn wkme_reduce_with(ks: &KripkeStructure, strategy: Strategy, mode: WeakMode) -> Result<Partition> {
    reduce(ks, div_stutter_bisim_partition(ks), strategy, |p| {
        is_wkme_with(ks, p, mode).map(|v| v.accepted()).unwrap_or(false)
    })
}

/// Checks the pairing of `ks` with a candidate weak quotient as a WKME on
/// their disjoint union.
pub fn odot_pairing(
    ks: &KripkeStructure,
    part: &Partition,
    quotient: &KripkeStructure,
) -> Result<Verdict> {
    let (union, pairs) = pairing(ks, part, quotient)?;
    is_wkme(&union, &pairs)
}

/// `K ⊙ K/R`: the block/quotient-state pairing is a WKME on the disjoint union.
pub fn odot_equivalent(ks: &KripkeStructure, part: &Partition) -> Result<bool> {
    let q = wkme_quotient(ks, part)?;
    Ok(odot_pairing(ks, part, &q)?.accepted())
}
