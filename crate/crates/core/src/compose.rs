//! Synchronous parallel composition and the compositionality harness.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kme::{is_kme, kme_quotient};
use crate::kripke::{KripkeStructure, NormalizeOptions, StateId};
use crate::oracles::{trace_equivalent, Equivalence};
use crate::partition::Partition;

/// A product structure with the component pair behind each state.
#[derive(Debug, Clone)]
pub struct Product {
    pub ks: KripkeStructure,
    pub pairs: Vec<(StateId, StateId)>,
}

/// Lock-step product: `(s, t) -> (s', t')` iff `s -> s'` and `t -> t'`;
/// labels are unions. Both inputs are used as given. With `reachable_only`
/// the states not reachable from the initial pair are dropped.
pub fn sync_product(k1: &KripkeStructure, k2: &KripkeStructure, reachable_only: bool) -> Product {
    let n2 = k2.num_states();
    let all: Vec<(StateId, StateId)> = k1
        .states()
        .flat_map(|s| k2.states().map(move |t| (s, t)))
        .collect();
    let full_index = |(s, t): (StateId, StateId)| s.index() * n2 + t.index();
    let build = |keep: &[bool]| -> Product {
        let mut index = vec![usize::MAX; all.len()];
        let mut pairs = Vec::new();
        for (i, &p) in all.iter().enumerate() {
            if keep[i] {
                index[i] = pairs.len();
                pairs.push(p);
            }
        }
        let names = pairs
            .iter()
            .map(|&(s, t)| format!("{}__{}", k1.name(s), k2.name(t)))
            .collect();
        let labels = pairs
            .iter()
            .map(|&(s, t)| k1.label(s).union(k2.label(t)).cloned().collect())
            .collect();
        let mut edges = Vec::new();
        for (i, &(s, t)) in pairs.iter().enumerate() {
            for &s2 in k1.successors(s) {
                for &t2 in k2.successors(t) {
                    edges.push((StateId(i), StateId(index[full_index((s2, t2))])));
                }
            }
        }
        let init = StateId(index[full_index((k1.initial(), k2.initial()))]);
        let ks = KripkeStructure::new(
            names,
            k1.aps().union(k2.aps()).cloned().collect(),
            labels,
            edges,
            init,
        )
        .expect("product of total structures is total");
        Product { ks, pairs }
    };
    if !reachable_only {
        return build(&vec![true; all.len()]);
    }
    let mut keep = vec![false; all.len()];
    let start = (k1.initial(), k2.initial());
    keep[full_index(start)] = true;
    let mut stack = vec![start];
    while let Some((s, t)) = stack.pop() {
        for &s2 in k1.successors(s) {
            for &t2 in k2.successors(t) {
                let i = full_index((s2, t2));
                if !keep[i] {
                    keep[i] = true;
                    stack.push((s2, t2));
                }
            }
        }
    }
    build(&keep)
}

/// Product of the user parts of two structures: auxiliary states and
/// reserved atoms are removed from both sides first, so markers of the two
/// components never mix.
pub fn sync_compose(k1: &KripkeStructure, k2: &KripkeStructure) -> KripkeStructure {
    sync_product(&k1.denormalize(), &k2.denormalize(), false).ks
}

pub fn sync_compose_reachable(k1: &KripkeStructure, k2: &KripkeStructure) -> KripkeStructure {
    sync_product(&k1.denormalize(), &k2.denormalize(), true).ks
}

/// Result of comparing `K ⊗ K1` with `K/R ⊗ K1`.
#[derive(Debug, Clone, Serialize)]
pub struct CompositionReport {
    /// Trace equivalence of the two products.
    pub trace: Equivalence,
    /// Whether pairing `(s, t)` with `([s], t)` is a KME on the disjoint
    /// union of the two products.
    pub strict: bool,
    pub product_states: usize,
    pub quotient_product_states: usize,
}

impl CompositionReport {
    pub fn holds(&self) -> bool {
        self.trace.equivalent && self.strict
    }
}

/// `ks` must be normalized and `part` a KME on it.
pub fn compositionality_check(
    ks: &KripkeStructure,
    part: &Partition,
    k1: &KripkeStructure,
) -> Result<CompositionReport> {
    if !is_kme(ks, part)?.accepted() {
        return Err(Error::NotAnEquivalence("KME"));
    }
    let quotient = kme_quotient(ks, part)?;
    let other = k1.denormalize();
    let (user, user_q) = (ks.denormalize(), quotient.denormalize());
    let a = sync_product(&user, &other, false);
    let b = sync_product(&user_q, &other, false);
    let trace = trace_equivalent(
        &a.ks.normalize(NormalizeOptions::default())?,
        &b.ks.normalize(NormalizeOptions::default())?,
    );

    // Pair the two products on their disjoint union, fed by one auxiliary
    // predecessor state and without an initial marker.
    let union = a.ks.disjoint_union(&b.ks).normalize(NormalizeOptions {
        add_pred_state: true,
        mark_initial: false,
    })?;
    let block_of_user = |s: StateId| part.block_of(ks.state(user.name(s)).expect("user state"));
    let block_of_quotient = |c: StateId| quotient.state(user_q.name(c)).expect("block").index();
    let offset = a.pairs.len();
    let keys: Vec<(usize, usize, usize)> = union
        .states()
        .map(|u| {
            let i = u.index();
            if union.is_aux(u) {
                (1, i, 0)
            } else if i < offset {
                let (s, t) = a.pairs[i];
                (0, block_of_user(s), t.index())
            } else {
                let (c, t) = b.pairs[i - offset];
                (0, block_of_quotient(c), t.index())
            }
        })
        .collect();
    let pairing = Partition::from_assignment(&keys);
    let strict = is_kme(&union, &pairing)?.accepted();
    Ok(CompositionReport {
        trace,
        strict,
        product_states: a.ks.num_states(),
        quotient_product_states: b.ks.num_states(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::parse_ks;
    use crate::partition::parse_partition;

    const FIG2: &str = include_str!("../../../fixtures/fig2.ks");
    const FIG2_PART: &str = include_str!("../../../fixtures/fig2.part");
    const TOGGLER: &str = include_str!("../../../fixtures/toggler.ks");

    fn unit_p() -> KripkeStructure {
        parse_ks("aps p\nstates u\ninit u\nlabel u p\ntrans u u\n").unwrap()
    }

    #[test]
    fn unit_component_only_adds_labels() {
        let f2 = parse_ks(FIG2).unwrap();
        let prod = sync_compose(&unit_p(), &f2);
        let mut expected = f2.to_raw();
        expected.aps.push("p".into());
        for s in &expected.states {
            if !expected.labels.iter().any(|(n, _)| n == s) {
                expected.labels.push((s.clone(), Vec::new()));
            }
        }
        for (_, atoms) in expected.labels.iter_mut() {
            atoms.push("p".into());
        }
        let expected = KripkeStructure::from_raw(&expected).unwrap();
        assert!(prod.is_isomorphic(&expected));
    }

    #[test]
    fn toggler_product_sizes() {
        let f2 = parse_ks(FIG2).unwrap();
        let tog = parse_ks(TOGGLER).unwrap();
        let full = sync_compose(&tog, &f2);
        assert_eq!(full.num_states(), 16);
        let reach = sync_compose_reachable(&tog, &f2);
        assert!(reach.num_states() <= 16);
        // p alternates along every path
        for (a, b) in reach.edges() {
            assert_ne!(reach.label(a).contains("p"), reach.label(b).contains("p"));
        }
        assert!(!reach.label(reach.initial()).contains("p"));
    }

    #[test]
    fn composition_commutes_up_to_isomorphism() {
        let f2 = parse_ks(FIG2).unwrap();
        let tog = parse_ks(TOGGLER).unwrap();
        assert!(sync_compose(&tog, &f2).is_isomorphic(&sync_compose(&f2, &tog)));
    }

    #[test]
    fn labels_are_unions() {
        let f2 = parse_ks(FIG2).unwrap();
        let tog = parse_ks(TOGGLER).unwrap();
        let p = sync_product(&f2, &tog, false);
        for (i, &(s, t)) in p.pairs.iter().enumerate() {
            let expected: std::collections::BTreeSet<String> =
                f2.label(s).union(tog.label(t)).cloned().collect();
            assert_eq!(p.ks.label(StateId(i)), &expected);
        }
    }

    #[test]
    fn example_partition_composes() {
        let ks = parse_ks(FIG2).unwrap().normalize(NormalizeOptions::default()).unwrap();
        let part = parse_partition(FIG2_PART, &ks).unwrap();
        let tog = parse_ks(TOGGLER).unwrap();
        let r = compositionality_check(&ks, &part, &tog).unwrap();
        assert!(r.trace.equivalent);
        assert!(r.strict);
        assert_eq!(r.product_states, 16);
        assert_eq!(r.quotient_product_states, 12);
        assert!(compositionality_check(&ks, &part, &unit_p()).unwrap().holds());
    }

    #[test]
    fn non_kme_is_a_precondition_error() {
        let ks = parse_ks(FIG2).unwrap().normalize(NormalizeOptions::default()).unwrap();
        let bad = parse_partition("s0\ns1\ns2\ns3 s4\ns5\ns6\ns7\n", &ks).unwrap();
        let tog = parse_ks(TOGGLER).unwrap();
        assert_eq!(
            compositionality_check(&ks, &bad, &tog).unwrap_err(),
            Error::NotAnEquivalence("KME")
        );
    }
}
