use serde::Serialize;

use crate::kripke::{KripkeStructure, StateId};
use crate::partition::Partition;

/// Why a partition was rejected. Block indices refer to the checked partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Two states of one block carry different labels.
    LabelMismatch {
        block: usize,
        a: StateId,
        b: StateId,
    },
    /// `pred_a` reaches `d` through `c` in two steps, `pred_b` does not.
    PbrMismatch {
        c: usize,
        d: usize,
        pred_a: StateId,
        pred_b: StateId,
    },
    /// Like `PbrMismatch`, with stutter steps inside `c` allowed.
    WpbrMismatch {
        c: usize,
        d: usize,
        pred_a: StateId,
        pred_b: StateId,
    },
    /// `c` has a member on an in-block cycle, so its quotient state loops,
    /// but predecessor `pred` can only enter `c` at members that must leave.
    DivergenceMismatch {
        c: usize,
        pred: StateId,
        cycling: StateId,
    },
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::LabelMismatch { .. } => "label-mismatch",
            Witness::PbrMismatch { .. } => "pbr-mismatch",
            Witness::WpbrMismatch { .. } => "wpbr-mismatch",
            Witness::DivergenceMismatch { .. } => "divergence-mismatch",
        }
    }

    pub fn report(&self, ks: &KripkeStructure, p: &Partition) -> WitnessReport {
        let block = |i: usize| -> Vec<String> {
            p.block(i).iter().map(|&s| ks.name(s).to_string()).collect()
        };
        match *self {
            Witness::LabelMismatch { block: c, a, b } => WitnessReport {
                kind: self.kind(),
                block_c: block(c),
                block_d: None,
                pred_a: ks.name(a).to_string(),
                pred_b: ks.name(b).to_string(),
            },
            Witness::PbrMismatch {
                c,
                d,
                pred_a,
                pred_b,
            }
            | Witness::WpbrMismatch {
                c,
                d,
                pred_a,
                pred_b,
            } => WitnessReport {
                kind: self.kind(),
                block_c: block(c),
                block_d: Some(block(d)),
                pred_a: ks.name(pred_a).to_string(),
                pred_b: ks.name(pred_b).to_string(),
            },
            Witness::DivergenceMismatch { c, pred, cycling } => WitnessReport {
                kind: self.kind(),
                block_c: block(c),
                block_d: None,
                pred_a: ks.name(pred).to_string(),
                pred_b: ks.name(cycling).to_string(),
            },
        }
    }
}

/// Machine-readable witness. For `label-mismatch`, `predA`/`predB` are the
/// two differently labeled members of `blockC`; for `divergence-mismatch`,
/// `predA` is the predecessor that cannot stay in `blockC` and `predB` a
/// member of `blockC` on an in-block cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub kind: &'static str,
    #[serde(rename = "blockC")]
    pub block_c: Vec<String>,
    #[serde(rename = "blockD")]
    pub block_d: Option<Vec<String>>,
    #[serde(rename = "predA")]
    pub pred_a: String,
    #[serde(rename = "predB")]
    pub pred_b: String,
}

impl std::fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} C={{{}}}", self.kind, self.block_c.join(" "))?;
        if let Some(d) = &self.block_d {
            write!(f, " D={{{}}}", d.join(" "))?;
        }
        write!(f, " predA={} predB={}", self.pred_a, self.pred_b)
    }
}

/// Outcome of a partition check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    witness: Option<Witness>,
}

impl Verdict {
    pub fn accept() -> Self {
        Verdict { witness: None }
    }

    pub fn reject(w: Witness) -> Self {
        Verdict { witness: Some(w) }
    }

    pub fn accepted(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }
}

/// First label-mismatch in block order, if any.
pub(crate) fn label_witness(ks: &KripkeStructure, p: &Partition) -> Option<Witness> {
    p.blocks().iter().enumerate().find_map(|(i, b)| {
        let first = b[0];
        b.iter()
            .find(|&&s| ks.label(s) != ks.label(first))
            .map(|&s| Witness::LabelMismatch {
                block: i,
                a: first,
                b: s,
            })
    })
}

/// Given each predecessor's set of target blocks (ascending by predecessor),
/// finds the smallest target block on which two predecessors disagree.
pub(crate) fn first_disagreement(
    per_pred: &[(StateId, Vec<bool>)],
) -> Option<(usize, StateId, StateId)> {
    let (_, first) = per_pred.first()?;
    let width = first.len();
    (0..width).find_map(|d| {
        let yes = per_pred.iter().find(|(_, v)| v[d]).map(|(s, _)| *s);
        let no = per_pred.iter().find(|(_, v)| !v[d]).map(|(s, _)| *s);
        match (yes, no) {
            (Some(a), Some(b)) => Some((d, a, b)),
            _ => None,
        }
    })
}
