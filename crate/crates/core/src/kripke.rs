//! Kripke structures: data model, text format, normalization and the
//! successor/predecessor primitives every other module builds on.
//!
//! Text format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! aps a b              # once
//! states s0 s1 s2      # once
//! init s0              # once
//! label s0 a           # absent label line means the empty label
//! trans s0 s1          # repeatable
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use petgraph::graph::DiGraph;

use crate::error::{Error, Result};

/// Label of the auxiliary predecessor state added by [`KripkeStructure::normalize`].
pub const BOTTOM: &str = "⊥";
/// Marker atom that makes the initial state uniquely labeled.
pub const MARKER: &str = "$";

pub type Label = BTreeSet<String>;
pub type StateSet = BTreeSet<StateId>;

/// Index of a state inside one [`KripkeStructure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct StateId(pub usize);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub fn is_reserved(atom: &str) -> bool {
    atom.starts_with('$') || atom.starts_with('⊥')
}

pub fn is_identifier(token: &str) -> bool {
    !token.is_empty()
        && token
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Drops reserved atoms from a label.
pub fn project(label: &Label) -> Label {
    label.iter().filter(|a| !is_reserved(a)).cloned().collect()
}

/// Renders a label as `{a b}`.
pub fn fmt_label(label: &Label) -> String {
    let inner: Vec<&str> = label.iter().map(String::as_str).collect();
    format!("{{{}}}", inner.join(" "))
}

/// A structural problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    MissingInit,
    DuplicateState(String),
    UnknownState { context: &'static str, name: String },
    UndeclaredAtom { state: String, atom: String },
    ReservedAtom(String),
    Totality(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "no-states"),
            Violation::MissingInit => write!(f, "missing-init"),
            Violation::DuplicateState(s) => write!(f, "duplicate-state({s})"),
            Violation::UnknownState { context, name } => {
                write!(f, "unknown-state({name} in {context})")
            }
            Violation::UndeclaredAtom { state, atom } => {
                write!(f, "undeclared-atom({atom} on {state})")
            }
            Violation::ReservedAtom(a) => write!(f, "reserved-atom({a})"),
            Violation::Totality(s) => write!(f, "totality({s})"),
        }
    }
}

/// A Kripke structure as written in a file, before any cross-reference
/// checking. States are referred to by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawKripke {
    pub aps: Vec<String>,
    pub states: Vec<String>,
    pub init: Option<String>,
    pub labels: Vec<(String, Vec<String>)>,
    pub transitions: Vec<(String, String)>,
}

impl RawKripke {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawKripke::default();
        let mut seen_aps = false;
        let mut seen_states = false;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("");
            let mut tokens = content.split_whitespace();
            let Some(keyword) = tokens.next() else {
                continue;
            };
            let args: Vec<&str> = tokens.collect();
            let syntax = |message: String| Error::Syntax {
                line: line_no,
                message,
            };
            match keyword {
                "aps" => {
                    if seen_aps {
                        return Err(syntax("`aps` declared twice".into()));
                    }
                    seen_aps = true;
                    for a in &args {
                        if is_reserved(a) {
                            return Err(Error::ReservedAtom((*a).to_string()));
                        }
                        if !is_identifier(a) {
                            return Err(syntax(format!("invalid atom `{a}`")));
                        }
                        raw.aps.push((*a).to_string());
                    }
                }
                "states" => {
                    if seen_states {
                        return Err(syntax("`states` declared twice".into()));
                    }
                    seen_states = true;
                    for s in &args {
                        if !is_identifier(s) {
                            return Err(syntax(format!("invalid state identifier `{s}`")));
                        }
                        raw.states.push((*s).to_string());
                    }
                }
                "init" => {
                    if raw.init.is_some() {
                        return Err(Error::DuplicateInit(line_no));
                    }
                    match args.as_slice() {
                        [s] if is_identifier(s) => raw.init = Some((*s).to_string()),
                        _ => return Err(syntax("`init` takes exactly one state".into())),
                    }
                }
                "label" => {
                    let Some((state, atoms)) = args.split_first() else {
                        return Err(syntax("`label` needs a state".into()));
                    };
                    if !is_identifier(state) {
                        return Err(syntax(format!("invalid state identifier `{state}`")));
                    }
                    for a in atoms {
                        if !(is_identifier(a) || *a == MARKER || *a == BOTTOM) {
                            return Err(syntax(format!("invalid atom `{a}`")));
                        }
                    }
                    raw.labels.push((
                        (*state).to_string(),
                        atoms.iter().map(|a| (*a).to_string()).collect(),
                    ));
                }
                "trans" => match args.as_slice() {
                    [from, to] if is_identifier(from) && is_identifier(to) => raw
                        .transitions
                        .push(((*from).to_string(), (*to).to_string())),
                    _ => return Err(syntax("`trans` takes exactly two states".into())),
                },
                other => return Err(syntax(format!("unknown declaration `{other}`"))),
            }
        }
        Ok(raw)
    }
}

/// Checks every structural invariant of a described structure. An empty
/// result means [`KripkeStructure::from_raw`] will succeed.
pub fn validate(raw: &RawKripke) -> Vec<Violation> {
    let mut out = Vec::new();
    if raw.states.is_empty() {
        out.push(Violation::NoStates);
    }
    let mut known = BTreeSet::new();
    for s in &raw.states {
        if !known.insert(s.as_str()) {
            out.push(Violation::DuplicateState(s.clone()));
        }
    }
    for a in &raw.aps {
        if is_reserved(a) {
            out.push(Violation::ReservedAtom(a.clone()));
        }
    }
    match &raw.init {
        None => out.push(Violation::MissingInit),
        Some(s) if !known.contains(s.as_str()) => out.push(Violation::UnknownState {
            context: "init",
            name: s.clone(),
        }),
        Some(_) => {}
    }
    let aps: BTreeSet<&str> = raw.aps.iter().map(String::as_str).collect();
    for (state, atoms) in &raw.labels {
        if !known.contains(state.as_str()) {
            out.push(Violation::UnknownState {
                context: "label",
                name: state.clone(),
            });
        }
        for a in atoms {
            if !is_reserved(a) && !aps.contains(a.as_str()) {
                out.push(Violation::UndeclaredAtom {
                    state: state.clone(),
                    atom: a.clone(),
                });
            }
        }
    }
    let mut has_succ = BTreeSet::new();
    for (from, to) in &raw.transitions {
        for name in [from, to] {
            if !known.contains(name.as_str()) {
                out.push(Violation::UnknownState {
                    context: "trans",
                    name: name.clone(),
                });
            }
        }
        has_succ.insert(from.as_str());
    }
    let mut reported = BTreeSet::new();
    for s in &raw.states {
        if !has_succ.contains(s.as_str()) && reported.insert(s.as_str()) {
            out.push(Violation::Totality(s.clone()));
        }
    }
    out
}

/// Options for [`KripkeStructure::normalize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizeOptions {
    pub add_pred_state: bool,
    pub mark_initial: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            add_pred_state: true,
            mark_initial: true,
        }
    }
}

/// What [`KripkeStructure::normalize_reported`] changed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizeReport {
    /// The auxiliary predecessor state, when one was created.
    pub added_state: Option<StateId>,
    /// States that received an edge from the auxiliary state.
    pub fed_states: Vec<StateId>,
    pub marked_initial: bool,
}

impl NormalizeReport {
    pub fn changed(&self) -> bool {
        self.added_state.is_some() || !self.fed_states.is_empty() || self.marked_initial
    }
}

/// A finite Kripke structure with a total transition relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    names: Vec<String>,
    index: HashMap<String, StateId>,
    aps: BTreeSet<String>,
    labels: Vec<Label>,
    succ: Vec<Vec<StateId>>,
    pred: Vec<Vec<StateId>>,
    initial: StateId,
}

impl KripkeStructure {
    /// Builds a structure from parts. Edges may repeat; totality is checked.
    pub fn new(
        names: Vec<String>,
        aps: BTreeSet<String>,
        labels: Vec<Label>,
        edges: impl IntoIterator<Item = (StateId, StateId)>,
        initial: StateId,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Invalid(vec![Violation::NoStates]));
        }
        assert_eq!(labels.len(), n, "one label per state");
        assert!(initial.0 < n, "initial state out of range");
        if let Some(a) = aps.iter().find(|a| is_reserved(a)) {
            return Err(Error::ReservedAtom(a.clone()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), StateId(i)).is_some() {
                return Err(Error::Invalid(vec![Violation::DuplicateState(name.clone())]));
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (a, b) in edges {
            assert!(a.0 < n && b.0 < n, "edge endpoint out of range");
            succ[a.0].push(b);
            pred[b.0].push(a);
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        let dead: Vec<Violation> = (0..n)
            .filter(|&i| succ[i].is_empty())
            .map(|i| Violation::Totality(names[i].clone()))
            .collect();
        if !dead.is_empty() {
            return Err(Error::Invalid(dead));
        }
        Ok(KripkeStructure {
            names,
            index,
            aps,
            labels,
            succ,
            pred,
            initial,
        })
    }

    pub fn from_raw(raw: &RawKripke) -> Result<Self> {
        let violations = validate(raw);
        if let Some(first) = violations.first() {
            return Err(match first {
                Violation::UnknownState { name, .. } => Error::UnknownState(name.clone()),
                Violation::UndeclaredAtom { state, atom } => Error::UndeclaredAtom {
                    state: state.clone(),
                    atom: atom.clone(),
                },
                Violation::ReservedAtom(a) => Error::ReservedAtom(a.clone()),
                _ => Error::Invalid(violations),
            });
        }
        let index: HashMap<&str, StateId> = raw
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), StateId(i)))
            .collect();
        let mut labels = vec![Label::new(); raw.states.len()];
        for (state, atoms) in &raw.labels {
            labels[index[state.as_str()].0].extend(atoms.iter().cloned());
        }
        let edges: Vec<_> = raw
            .transitions
            .iter()
            .map(|(a, b)| (index[a.as_str()], index[b.as_str()]))
            .collect();
        let initial = index[raw.init.as_deref().expect("validated")];
        KripkeStructure::new(
            raw.states.clone(),
            raw.aps.iter().cloned().collect(),
            labels,
            edges,
            initial,
        )
    }

    pub fn to_raw(&self) -> RawKripke {
        RawKripke {
            aps: self.aps.iter().cloned().collect(),
            states: self.names.clone(),
            init: Some(self.names[self.initial.0].clone()),
            labels: self
                .states()
                .map(|s| (self.name(s).to_string(), self.labels[s.0].iter().cloned().collect()))
                .collect(),
            transitions: self
                .edges()
                .map(|(a, b)| (self.name(a).to_string(), self.name(b).to_string()))
                .collect(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.names.len()).map(StateId)
    }

    pub fn edges(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |&t| (StateId(i), t)))
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    /// Looks up a state by name, failing with [`Error::UnknownState`].
    pub fn state_named(&self, name: &str) -> Result<StateId> {
        self.state(name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn set_of(&self, names: &[&str]) -> Result<StateSet> {
        names.iter().map(|n| self.state_named(n)).collect()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn aps(&self) -> &BTreeSet<String> {
        &self.aps
    }

    pub fn label(&self, s: StateId) -> &Label {
        &self.labels[s.0]
    }

    pub fn successors(&self, s: StateId) -> &[StateId] {
        &self.succ[s.0]
    }

    pub fn predecessors(&self, s: StateId) -> &[StateId] {
        &self.pred[s.0]
    }

    pub fn has_edge(&self, a: StateId, b: StateId) -> bool {
        self.succ[a.0].binary_search(&b).is_ok()
    }

    /// `Post(s, C)`: the successors of `s` that lie in `c`.
    pub fn post_in(&self, s: StateId, c: &StateSet) -> StateSet {
        self.succ[s.0].iter().copied().filter(|t| c.contains(t)).collect()
    }

    /// `pred(C)`: every state with at least one successor in `c`.
    pub fn pred_of(&self, c: &StateSet) -> StateSet {
        c.iter()
            .flat_map(|t| self.pred[t.0].iter().copied())
            .collect()
    }

    /// True iff the transition `s -> t` keeps the label unchanged.
    pub fn is_stutter_step(&self, s: StateId, t: StateId) -> Result<bool> {
        if !self.has_edge(s, t) {
            return Err(Error::Argument(format!(
                "{} -> {} is not a transition",
                self.name(s),
                self.name(t)
            )));
        }
        Ok(self.labels[s.0] == self.labels[t.0])
    }

    /// States carrying the auxiliary-predecessor label.
    pub fn aux_states(&self) -> Vec<StateId> {
        self.states()
            .filter(|s| self.labels[s.0].contains(BOTTOM))
            .collect()
    }

    pub fn is_aux(&self, s: StateId) -> bool {
        self.labels[s.0].contains(BOTTOM)
    }

    pub fn unreached_by_any(&self) -> Vec<StateId> {
        self.states().filter(|s| self.pred[s.0].is_empty()).collect()
    }

    /// Label with reserved atoms removed.
    pub fn user_label(&self, s: StateId) -> Label {
        project(&self.labels[s.0])
    }

    pub fn normalize(&self, opts: NormalizeOptions) -> Result<KripkeStructure> {
        self.normalize_reported(opts).map(|(k, _)| k)
    }

    /// Adds an auxiliary predecessor state labeled `⊥` feeding every state
    /// without predecessors, and marks the initial state with `$`.
    /// Applying it twice changes nothing.
    pub fn normalize_reported(
        &self,
        opts: NormalizeOptions,
    ) -> Result<(KripkeStructure, NormalizeReport)> {
        if let Some(a) = self.aps.iter().find(|a| is_reserved(a)) {
            return Err(Error::ReservedAtom(a.clone()));
        }
        let mut report = NormalizeReport::default();
        let mut names = self.names.clone();
        let mut labels = self.labels.clone();
        let mut edges: Vec<(StateId, StateId)> = self.edges().collect();

        if opts.add_pred_state {
            let orphans = self.unreached_by_any();
            if !orphans.is_empty() {
                let aux = match self.aux_states().first() {
                    Some(&a) => a,
                    None => {
                        let id = StateId(names.len());
                        names.push(fresh_name(&self.index, "s_hat"));
                        labels.push(Label::from([BOTTOM.to_string()]));
                        edges.push((id, id));
                        report.added_state = Some(id);
                        id
                    }
                };
                for o in orphans {
                    if o != aux {
                        edges.push((aux, o));
                        report.fed_states.push(o);
                    }
                }
            }
        }
        if opts.mark_initial && !labels[self.initial.0].contains(MARKER) {
            labels[self.initial.0].insert(MARKER.to_string());
            report.marked_initial = true;
        }
        let ks = KripkeStructure::new(names, self.aps.clone(), labels, edges, self.initial)?;
        Ok((ks, report))
    }

    /// Removes auxiliary states and every reserved atom.
    pub fn denormalize(&self) -> KripkeStructure {
        let keep: Vec<StateId> = self.states().filter(|&s| !self.is_aux(s)).collect();
        if keep.len() == self.num_states()
            && self.labels.iter().all(|l| l.iter().all(|a| !is_reserved(a)))
        {
            return self.clone();
        }
        let mut remap = vec![None; self.num_states()];
        for (i, s) in keep.iter().enumerate() {
            remap[s.0] = Some(StateId(i));
        }
        let edges: Vec<_> = self
            .edges()
            .filter_map(|(a, b)| Some((remap[a.0]?, remap[b.0]?)))
            .collect();
        KripkeStructure::new(
            keep.iter().map(|s| self.names[s.0].clone()).collect(),
            self.aps.clone(),
            keep.iter().map(|&s| self.user_label(s)).collect(),
            edges,
            remap[self.initial.0].expect("initial state is never auxiliary"),
        )
        .expect("auxiliary states are never the only successor of a user state")
    }

    /// Copy with the transition `from -> to` removed.
    pub fn without_edge(&self, from: StateId, to: StateId) -> Result<KripkeStructure> {
        if self.succ[from.0] == [to] {
            return Err(Error::WouldBreakTotality {
                from: self.name(from).to_string(),
                to: self.name(to).to_string(),
            });
        }
        KripkeStructure::new(
            self.names.clone(),
            self.aps.clone(),
            self.labels.clone(),
            self.edges().filter(|&e| e != (from, to)),
            self.initial,
        )
    }

    /// Disjoint union; states of `self` come first, names get `l_`/`r_`
    /// prefixes. The initial state is that of `self`.
    pub fn disjoint_union(&self, other: &KripkeStructure) -> KripkeStructure {
        let offset = self.num_states();
        let names = self
            .names
            .iter()
            .map(|n| format!("l_{n}"))
            .chain(other.names.iter().map(|n| format!("r_{n}")))
            .collect();
        let labels = self.labels.iter().chain(other.labels.iter()).cloned().collect();
        let edges = self
            .edges()
            .chain(other.edges().map(|(a, b)| (StateId(a.0 + offset), StateId(b.0 + offset))));
        KripkeStructure::new(
            names,
            self.aps.union(&other.aps).cloned().collect(),
            labels,
            edges,
            self.initial,
        )
        .expect("union of total structures is total")
    }

    /// States reachable from the initial state, in BFS order.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial.0] = true;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            i += 1;
            for &t in &self.succ[s.0] {
                if !seen[t.0] {
                    seen[t.0] = true;
                    order.push(t);
                }
            }
        }
        order
    }

    /// Label- and initial-preserving graph isomorphism.
    pub fn is_isomorphic(&self, other: &KripkeStructure) -> bool {
        if self.num_states() != other.num_states()
            || self.num_transitions() != other.num_transitions()
        {
            return false;
        }
        let a = self.as_graph();
        let b = other.as_graph();
        petgraph::algo::is_isomorphic_matching(&a, &b, |x, y| x == y, |_, _| true)
    }

    fn as_graph(&self) -> DiGraph<(Label, bool), ()> {
        let mut g = DiGraph::new();
        let nodes: Vec<_> = self
            .states()
            .map(|s| g.add_node((self.labels[s.0].clone(), s == self.initial)))
            .collect();
        for (a, b) in self.edges() {
            g.add_edge(nodes[a.0], nodes[b.0], ());
        }
        g
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for KripkeStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "aps")?;
        for a in &self.aps {
            write!(f, " {a}")?;
        }
        writeln!(f)?;
        writeln!(f, "states {}", self.names.join(" "))?;
        writeln!(f, "init {}", self.names[self.initial.0])?;
        for s in self.states() {
            write!(f, "label {}", self.name(s))?;
            for a in &self.labels[s.0] {
                write!(f, " {a}")?;
            }
            writeln!(f)?;
        }
        for (a, b) in self.edges() {
            writeln!(f, "trans {} {}", self.name(a), self.name(b))?;
        }
        Ok(())
    }
}

/// Parses and validates a structure in the text format.
pub fn parse_ks(text: &str) -> Result<KripkeStructure> {
    KripkeStructure::from_raw(&RawKripke::parse(text)?)
}

pub fn serialize_ks(ks: &KripkeStructure) -> String {
    ks.to_string()
}

pub(crate) fn fresh_name<V>(taken: &HashMap<String, V>, base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains_key(&name) {
        name.push('\'');
    }
    name
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = include_str!("../../../fixtures/fig2.ks");
    const FIG3: &str = include_str!("../../../fixtures/fig3.ks");

    fn set(ks: &KripkeStructure, names: &[&str]) -> StateSet {
        ks.set_of(names).unwrap()
    }

    #[test]
    fn parses_fig2() {
        let ks = parse_ks(FIG2).unwrap();
        assert_eq!(ks.num_states(), 8);
        let edges: BTreeSet<(String, String)> = ks
            .edges()
            .map(|(a, b)| (ks.name(a).to_string(), ks.name(b).to_string()))
            .collect();
        let expected: BTreeSet<(String, String)> = [
            ("s0", "s1"),
            ("s0", "s2"),
            ("s1", "s3"),
            ("s1", "s4"),
            ("s2", "s4"),
            ("s2", "s5"),
            ("s3", "s7"),
            ("s4", "s6"),
            ("s5", "s7"),
            ("s6", "s6"),
            ("s7", "s7"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        assert_eq!(edges, expected);
        let label = |n: &str| fmt_label(ks.label(ks.state(n).unwrap()));
        assert_eq!(label("s0"), "{a}");
        assert_eq!(label("s1"), "{}");
        assert_eq!(label("s2"), "{b}");
        assert_eq!(label("s5"), "{a}");
        assert_eq!(label("s6"), "{b}");
        assert_eq!(label("s7"), "{}");
    }

    #[test]
    fn one_state_file() {
        let ks = parse_ks("states s\ninit s\ntrans s s\n").unwrap();
        assert_eq!(ks.num_states(), 1);
        assert!(ks.label(StateId(0)).is_empty());
        assert!(ks.has_edge(StateId(0), StateId(0)));
    }

    #[test]
    fn fig3_has_stutter_loop() {
        let ks = parse_ks(FIG3).unwrap();
        let s4 = ks.state("s4").unwrap();
        assert_eq!(ks.num_states(), 8);
        assert!(ks.has_edge(s4, s4));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_ks("states s\ninit s\nfrob s\n"),
            Err(Error::Syntax { line: 3, .. })
        ));
        assert_eq!(
            parse_ks("states s\ninit s\ntrans s t\n"),
            Err(Error::UnknownState("t".into()))
        );
        assert_eq!(
            parse_ks("states s\ninit s\ninit s\ntrans s s\n"),
            Err(Error::DuplicateInit(3))
        );
        assert_eq!(
            parse_ks("aps a\nstates s\ninit s\nlabel s b\ntrans s s\n"),
            Err(Error::UndeclaredAtom {
                state: "s".into(),
                atom: "b".into()
            })
        );
        assert!(matches!(
            parse_ks("aps $\nstates s\ninit s\ntrans s s\n"),
            Err(Error::ReservedAtom(_))
        ));
        assert!(matches!(
            parse_ks("states s t\ninit s\ntrans s t\n"),
            Err(Error::Invalid(v)) if v == vec![Violation::Totality("t".into())]
        ));
    }

    #[test]
    fn validate_reports() {
        let raw = RawKripke::parse(FIG2).unwrap();
        assert!(validate(&raw).is_empty());

        let raw = RawKripke::parse("states s t\ninit s\ntrans s t\n").unwrap();
        assert_eq!(validate(&raw), vec![Violation::Totality("t".into())]);

        let raw = RawKripke::parse("states s\ninit s\ntrans s s\ntrans s u\n").unwrap();
        assert_eq!(
            validate(&raw),
            vec![Violation::UnknownState {
                context: "trans",
                name: "u".into()
            }]
        );
    }

    #[test]
    fn normalize_fig2() {
        let ks = parse_ks(FIG2).unwrap();
        let (n, report) = ks.normalize_reported(NormalizeOptions::default()).unwrap();
        assert_eq!(n.num_states(), 9);
        let hat = report.added_state.unwrap();
        let s0 = n.state("s0").unwrap();
        assert_eq!(n.successors(hat), &[s0, hat]);
        assert_eq!(n.label(hat), &Label::from([BOTTOM.to_string()]));
        assert_eq!(fmt_label(n.label(s0)), "{$ a}");
        assert!(n.states().all(|s| !n.predecessors(s).is_empty()));
        assert_eq!(n.pred_of(&set(&n, &["s0"])), StateSet::from([hat]));
        // idempotent
        assert_eq!(n.normalize(NormalizeOptions::default()).unwrap(), n);
        // and reversible
        assert_eq!(n.denormalize(), ks);
    }

    #[test]
    fn normalize_mark_only() {
        let ks = parse_ks("aps p\nstates u v\ninit u\nlabel v p\ntrans u v\ntrans v u\n").unwrap();
        let (n, report) = ks.normalize_reported(NormalizeOptions::default()).unwrap();
        assert_eq!(report.added_state, None);
        assert!(report.marked_initial);
        assert_eq!(n.num_states(), 2);
        assert!(n.label(n.initial()).contains(MARKER));
    }

    #[test]
    fn post_and_pred() {
        let f2 = parse_ks(FIG2).unwrap();
        let c = set(&f2, &["s3", "s4", "s5"]);
        assert_eq!(
            f2.post_in(f2.state("s1").unwrap(), &c),
            set(&f2, &["s3", "s4"])
        );
        assert!(f2.post_in(f2.state("s1").unwrap(), &StateSet::new()).is_empty());
        assert_eq!(f2.pred_of(&c), set(&f2, &["s1", "s2"]));

        let f3 = parse_ks(FIG3).unwrap();
        let c = set(&f3, &["s3", "s4", "s5"]);
        let s4 = f3.state("s4").unwrap();
        assert_eq!(f3.post_in(s4, &c), set(&f3, &["s4"]));
        assert_eq!(f3.pred_of(&c), set(&f3, &["s1", "s2", "s3", "s4"]));
    }

    #[test]
    fn stutter_steps() {
        let f3 = parse_ks(FIG3).unwrap();
        let s = |n| f3.state(n).unwrap();
        assert!(f3.is_stutter_step(s("s3"), s("s4")).unwrap());
        assert!(!f3.is_stutter_step(s("s4"), s("s6")).unwrap());
        assert!(f3.is_stutter_step(s("s7"), s("s7")).unwrap());
        assert!(f3.is_stutter_step(s("s0"), s("s7")).is_err());
    }

    #[test]
    fn round_trip_with_reserved_atoms() {
        let n = parse_ks(FIG2)
            .unwrap()
            .normalize(NormalizeOptions::default())
            .unwrap();
        assert_eq!(parse_ks(&n.to_text()).unwrap(), n);
    }

    #[test]
    fn isomorphism_ignores_names() {
        let a = parse_ks("aps p\nstates x y\ninit x\nlabel y p\ntrans x y\ntrans y y\n").unwrap();
        let b = parse_ks("aps p\nstates q r\ninit r\nlabel q p\ntrans r q\ntrans q q\n").unwrap();
        let c = parse_ks("aps p\nstates q r\ninit q\nlabel q p\ntrans r q\ntrans q q\n").unwrap();
        assert!(a.is_isomorphic(&b));
        assert!(!a.is_isomorphic(&c));
    }

    #[test]
    fn without_edge_keeps_totality() {
        let f2 = parse_ks(FIG2).unwrap();
        let s = |n| f2.state(n).unwrap();
        assert!(f2.without_edge(s("s0"), s("s1")).is_ok());
        assert!(matches!(
            f2.without_edge(s("s6"), s("s6")),
            Err(Error::WouldBreakTotality { .. })
        ));
    }
}
