use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kripke::{is_identifier, KripkeStructure};
use crate::oracles::lasso::enumerate_lassos;
use crate::trace::{Lasso, TraceWord};

/// LTL over atoms. `false`, `->`, `F`, `G` and `R` are rewritten into this
/// core while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ltl {
    True,
    Atom(String),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn parse(text: &str) -> Result<Ltl> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, end: text.len() };
        let f = p.implication()?;
        match p.tokens.get(p.pos) {
            None => Ok(f),
            Some((offset, t)) => Err(Error::Formula {
                offset: *offset,
                message: format!("unexpected `{t}`"),
            }),
        }
    }

    pub fn negate(f: Ltl) -> Ltl {
        Ltl::Not(Box::new(f))
    }

    pub fn eventually(f: Ltl) -> Ltl {
        Ltl::Until(Box::new(Ltl::True), Box::new(f))
    }

    pub fn globally(f: Ltl) -> Ltl {
        Ltl::negate(Ltl::eventually(Ltl::negate(f)))
    }

    /// Stutter-insensitive fragment: no next operator.
    pub fn is_next_free(&self) -> bool {
        match self {
            Ltl::True | Ltl::Atom(_) => true,
            Ltl::Next(_) => false,
            Ltl::Not(a) => a.is_next_free(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) => a.is_next_free() && b.is_next_free(),
        }
    }

    pub fn until_count(&self) -> usize {
        match self {
            Ltl::True | Ltl::Atom(_) => 0,
            Ltl::Not(a) | Ltl::Next(a) => a.until_count(),
            Ltl::And(a, b) | Ltl::Or(a, b) => a.until_count() + b.until_count(),
            Ltl::Until(a, b) => 1 + a.until_count() + b.until_count(),
        }
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::Atom(a) => write!(f, "{a}"),
            Ltl::Not(a) => write!(f, "!{a}"),
            Ltl::And(a, b) => write!(f, "({a} & {b})"),
            Ltl::Or(a, b) => write!(f, "({a} | {b})"),
            Ltl::Next(a) => write!(f, "X {a}"),
            Ltl::Until(a, b) => write!(f, "({a} U {b})"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if "!&|()".contains(c) {
            out.push((i, c.to_string()));
            chars.next();
        } else if c == '-' {
            chars.next();
            match chars.next() {
                Some((_, '>')) => out.push((i, "->".into())),
                _ => {
                    return Err(Error::Formula {
                        offset: i,
                        message: "expected `->`".into(),
                    })
                }
            }
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    word.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((i, word));
        } else {
            return Err(Error::Formula {
                offset: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, String)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(|(_, t)| t.as_str())
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, t: &str) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Ltl> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication()?;
            return Ok(Ltl::Or(Box::new(Ltl::negate(lhs)), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Ltl> {
        let mut f = self.conjunction()?;
        while self.eat("|") {
            f = Ltl::Or(Box::new(f), Box::new(self.conjunction()?));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Ltl> {
        let mut f = self.binary_temporal()?;
        while self.eat("&") {
            f = Ltl::And(Box::new(f), Box::new(self.binary_temporal()?));
        }
        Ok(f)
    }

    fn binary_temporal(&mut self) -> Result<Ltl> {
        let lhs = self.unary()?;
        if self.eat("U") {
            let rhs = self.binary_temporal()?;
            return Ok(Ltl::Until(Box::new(lhs), Box::new(rhs)));
        }
        if self.eat("R") {
            let rhs = self.binary_temporal()?;
            return Ok(Ltl::negate(Ltl::Until(
                Box::new(Ltl::negate(lhs)),
                Box::new(Ltl::negate(rhs)),
            )));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ltl> {
        if self.eat("!") {
            return Ok(Ltl::negate(self.unary()?));
        }
        if self.eat("X") {
            return Ok(Ltl::Next(Box::new(self.unary()?)));
        }
        if self.eat("F") {
            return Ok(Ltl::eventually(self.unary()?));
        }
        if self.eat("G") {
            return Ok(Ltl::globally(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ltl> {
        let offset = self.offset();
        let err = |message: String| Error::Formula { offset, message };
        let Some(t) = self.peek().map(str::to_string) else {
            return Err(err("unexpected end of formula".into()));
        };
        self.pos += 1;
        match t.as_str() {
            "(" => {
                let f = self.implication()?;
                if !self.eat(")") {
                    return Err(Error::Formula {
                        offset: self.offset(),
                        message: "expected `)`".into(),
                    });
                }
                Ok(f)
            }
            "true" => Ok(Ltl::True),
            "false" => Ok(Ltl::negate(Ltl::True)),
            "U" | "R" | "X" | "F" | "G" | ")" | "&" | "|" | "->" => {
                Err(err(format!("unexpected `{t}`")))
            }
            atom if is_identifier(atom) => Ok(Ltl::Atom(atom.to_string())),
            other => Err(err(format!("unexpected `{other}`"))),
        }
    }
}

/// Satisfaction at position 0 of an ultimately periodic word. Every
/// subformula is evaluated at each stem and loop position; `U` is the least
/// fixpoint of its one-step unfolding.
pub fn eval_lasso(f: &Ltl, w: &TraceWord) -> bool {
    eval_all(f, w)[0]
}

fn eval_all(f: &Ltl, w: &TraceWord) -> Vec<bool> {
    let n = w.positions();
    match f {
        Ltl::True => vec![true; n],
        Ltl::Atom(a) => (0..n).map(|i| w.at(i).contains(a)).collect(),
        Ltl::Not(a) => eval_all(a, w).into_iter().map(|x| !x).collect(),
        Ltl::And(a, b) => {
            let (x, y) = (eval_all(a, w), eval_all(b, w));
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        Ltl::Or(a, b) => {
            let (x, y) = (eval_all(a, w), eval_all(b, w));
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        Ltl::Next(a) => {
            let x = eval_all(a, w);
            (0..n).map(|i| x[w.next(i)]).collect()
        }
        Ltl::Until(a, b) => {
            let (x, y) = (eval_all(a, w), eval_all(b, w));
            let mut sat = y.clone();
            loop {
                let mut changed = false;
                for i in (0..n).rev() {
                    if !sat[i] && x[i] && sat[w.next(i)] {
                        sat[i] = true;
                        changed = true;
                    }
                }
                if !changed {
                    return sat;
                }
            }
        }
    }
}

/// Outcome of checking a formula on every lasso within the bounds. A
/// `Holds` verdict says nothing about longer lassos.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LtlVerdict {
    HoldsOnAllEnumerated { checked: usize },
    Counterexample { lasso: Lasso },
}

impl LtlVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, LtlVerdict::HoldsOnAllEnumerated { .. })
    }
}

/// Evaluates `f` on the trace of every enumerated lasso (reserved atoms
/// projected out) and reports the first failure.
pub fn ltl_bounded_verdict(
    ks: &KripkeStructure,
    f: &Ltl,
    stem_bound: usize,
    loop_bound: usize,
) -> Result<LtlVerdict> {
    let lassos = enumerate_lassos(ks, stem_bound, loop_bound)?;
    let checked = lassos.len();
    for lasso in lassos {
        if !eval_lasso(f, &lasso.trace(ks)) {
            return Ok(LtlVerdict::Counterexample { lasso });
        }
    }
    Ok(LtlVerdict::HoldsOnAllEnumerated { checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{parse_ks, Label};
    use proptest::prelude::*;

    const FIG2: &str = include_str!("../../../../fixtures/fig2.ks");
    const FIG2_Q: &str = include_str!("../../../../fixtures/fig2_quotient.ks");

    fn l(atoms: &[&str]) -> Label {
        atoms.iter().map(|a| a.to_string()).collect()
    }

    fn holds(f: &str, w: &TraceWord) -> bool {
        eval_lasso(&Ltl::parse(f).unwrap(), w)
    }

    #[test]
    fn simple_words() {
        let w = TraceWord::new(vec![l(&["a"])], vec![l(&["b"])]);
        assert!(holds("F b", &w));
        assert!(!holds("G a", &w));
        assert!(holds("a & X b", &w));
        assert!(holds("a U b", &w));
        assert!(holds("G F b", &w));
    }

    #[test]
    fn example_path_word() {
        let w = TraceWord::new(vec![l(&["a"]), l(&[]), l(&["a"])], vec![l(&["b"])]);
        assert!(!holds("a U b", &w));
        assert!(holds("F G b", &w));
        assert!(holds("b R true", &w));
        assert!(!holds("false", &w));
        assert!(holds("a -> X !a", &w));
    }

    #[test]
    fn precedence() {
        let p = |s: &str| Ltl::parse(s).unwrap();
        assert_eq!(p("a | b & c"), p("a | (b & c)"));
        assert_eq!(p("a & b U c"), p("a & (b U c)"));
        assert_eq!(p("a U b U c"), p("a U (b U c)"));
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
        assert_eq!(p("!a U b"), p("(!a) U b"));
        assert!(p("F a").is_next_free());
        assert!(!p("a & X a").is_next_free());
        assert_eq!(p("a U (b R c)").until_count(), 2);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        for (text, offset) in [("a &", 3), ("(a", 2), ("a $ b", 2), ("a - b", 2), ("a b", 2), ("U a", 0)] {
            match Ltl::parse(text) {
                Err(Error::Formula { offset: o, .. }) => assert_eq!(o, offset, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn tautology_holds_on_fig2() {
        let ks = parse_ks(FIG2).unwrap();
        let f = Ltl::parse("G(a | b | !a)").unwrap();
        assert!(ltl_bounded_verdict(&ks, &f, 4, 2).unwrap().holds());
    }

    #[test]
    fn persistence_fails_through_s2() {
        let ks = parse_ks(FIG2).unwrap();
        let f = Ltl::parse("G(b -> G b)").unwrap();
        let LtlVerdict::Counterexample { lasso } = ltl_bounded_verdict(&ks, &f, 4, 2).unwrap() else {
            panic!("expected a counterexample");
        };
        assert_eq!(lasso.display(&ks), "s0 s2 s4 | loop: s6");
    }

    #[test]
    fn fig2_and_quotient_agree() {
        let k = parse_ks(FIG2).unwrap();
        let q = parse_ks(FIG2_Q).unwrap();
        for f in ["F b", "G(b -> G b)", "a U b", "G F b", "X X a", "F G !a"] {
            let f = Ltl::parse(f).unwrap();
            let a = ltl_bounded_verdict(&k, &f, 5, 2).unwrap().holds();
            let b = ltl_bounded_verdict(&q, &f, 5, 2).unwrap().holds();
            assert_eq!(a, b, "{f}");
        }
    }

    /// Direct semantics on the infinite word: the first witness for `U` from
    /// position `i` lies within one period past `max(i, stem)`.
    fn naive(f: &Ltl, w: &TraceWord, i: usize) -> bool {
        match f {
            Ltl::True => true,
            Ltl::Atom(a) => w.at(i).contains(a),
            Ltl::Not(a) => !naive(a, w, i),
            Ltl::And(a, b) => naive(a, w, i) && naive(b, w, i),
            Ltl::Or(a, b) => naive(a, w, i) || naive(b, w, i),
            Ltl::Next(a) => naive(a, w, i + 1),
            Ltl::Until(a, b) => {
                let horizon = i.max(w.stem.len()) + w.cycle.len();
                for j in i..=horizon {
                    if naive(b, w, j) {
                        return true;
                    }
                    if !naive(a, w, j) {
                        return false;
                    }
                }
                false
            }
        }
    }

    fn arb_formula() -> impl Strategy<Value = Ltl> {
        let leaf = prop_oneof![
            Just(Ltl::True),
            Just(Ltl::Atom("a".into())),
            Just(Ltl::Atom("b".into())),
        ];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Ltl::negate),
                inner.clone().prop_map(|f| Ltl::Next(Box::new(f))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::And(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::Or(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| Ltl::Until(Box::new(a), Box::new(b))),
            ]
        })
    }

    fn arb_word() -> impl Strategy<Value = TraceWord> {
        let letter = prop_oneof![Just(l(&[])), Just(l(&["a"])), Just(l(&["b"])), Just(l(&["a", "b"]))];
        (
            prop::collection::vec(letter.clone(), 0..4),
            prop::collection::vec(letter, 1..4),
        )
            .prop_map(|(s, c)| TraceWord::new(s, c))
    }

    proptest! {
        #[test]
        fn fixpoint_matches_direct_semantics(f in arb_formula(), w in arb_word()) {
            prop_assert_eq!(eval_lasso(&f, &w), naive(&f, &w, 0));
        }

        #[test]
        fn display_round_trips(f in arb_formula()) {
            prop_assert_eq!(Ltl::parse(&f.to_string()).unwrap(), f);
        }
    }
}
