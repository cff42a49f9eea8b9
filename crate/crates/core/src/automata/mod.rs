//! Data model and generic algorithms for Buchi/safety/co-safety/weak
//! acceptors and weighted omega-automata.
//!
//! Weak acceptance is the common normal form here: safety and co-safety
//! acceptors embed into it (two blocks, sink lowest), which lets emptiness
//! and products share one code path.

mod emptiness;
mod format;
mod membership;
mod minimize;
mod product;

pub use emptiness::{bounded_lasso_search, bounded_lassos_agree, nonemptiness};
pub(crate) use emptiness::{search_accepting_lasso, SccCondition};
pub use format::{emit_dot_acceptor, emit_dot_weighted, parse_wa, serialize_acceptor, serialize_weighted, ParseError, WaFile, WaSymbol};
pub use membership::lasso_membership;
pub use minimize::minimize_deterministic;
pub use product::intersect_safety_cosafety;

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use thiserror::Error;

pub type StateId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("state {0} out of range")]
    BadState(StateId),
    #[error("symbol not in alphabet: {0}")]
    UnknownSymbol(String),
    #[error("alphabet mismatch between operands")]
    AlphabetMismatch,
    #[error("automaton is not complete: state {state} has no transition on symbol index {symbol}")]
    Incomplete { state: StateId, symbol: usize },
    #[error("transition weight {weight} exceeds bound {bound}")]
    WeightOutOfBound { weight: i64, bound: i64 },
    #[error("expected a deterministic automaton")]
    NotDeterministic,
    #[error("operation unsupported for general Buchi acceptance")]
    BuchiUnsupported,
    #[error("expected acceptance class {0}")]
    WrongAcceptance(&'static str),
    #[error("structural violation: {0}")]
    Structure(String),
}

/// Weak partition: every state sits in a block, blocks are uniformly
/// accepting or rejecting, and transitions may only stay in a block or
/// descend in the declared partial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakPartition {
    pub block_of: Vec<usize>,
    pub block_accepting: Vec<bool>,
    /// Pairs `(lo, hi)` meaning block `lo` is strictly below `hi`.
    pub order: BTreeSet<(usize, usize)>,
}

impl WeakPartition {
    pub fn block_count(&self) -> usize {
        self.block_accepting.len()
    }

    /// Reflexive-transitive "lo is reachable downward from hi" relation.
    fn below(&self, lo: usize, hi: usize) -> bool {
        if lo == hi {
            return true;
        }
        let n = self.block_count();
        let mut seen = vec![false; n];
        let mut stack = vec![hi];
        while let Some(b) = stack.pop() {
            if b == lo {
                return true;
            }
            for &(l, h) in &self.order {
                if h == b && !seen[l] {
                    seen[l] = true;
                    stack.push(l);
                }
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Acceptance {
    /// All states accepting except a set of absorbing rejecting sinks.
    Safety { rejecting: BTreeSet<StateId> },
    /// Only a set of absorbing accepting sinks is accepting.
    CoSafety { accepting: BTreeSet<StateId> },
    Weak(WeakPartition),
    Buchi { accepting: BTreeSet<StateId> },
}

impl Acceptance {
    pub fn class_name(&self) -> &'static str {
        match self {
            Acceptance::Safety { .. } => "safety",
            Acceptance::CoSafety { .. } => "cosafety",
            Acceptance::Weak(_) => "weak",
            Acceptance::Buchi { .. } => "buchi",
        }
    }
}

/// Finite-state acceptor of infinite words over an arbitrary symbol type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaAcceptor<S> {
    pub alphabet: Vec<S>,
    pub state_count: usize,
    pub initial: StateId,
    /// Per-state adjacency: (symbol index, destination).
    pub edges: Vec<Vec<(usize, StateId)>>,
    pub acceptance: Acceptance,
    pub deterministic: bool,
}

impl<S: Clone + Eq + Hash> OmegaAcceptor<S> {
    pub fn symbol_index(&self, s: &S) -> Option<usize> {
        self.alphabet.iter().position(|a| a == s)
    }
}

impl<S> OmegaAcceptor<S> {
    pub fn state_accepting(&self, s: StateId) -> bool {
        match &self.acceptance {
            Acceptance::Safety { rejecting } => !rejecting.contains(&s),
            Acceptance::CoSafety { accepting } => accepting.contains(&s),
            Acceptance::Weak(p) => p.block_accepting[p.block_of[s]],
            Acceptance::Buchi { accepting } => accepting.contains(&s),
        }
    }

    pub fn transition_count(&self) -> usize {
        self.edges.iter().map(|e| e.len()).sum()
    }

    /// Recomputes the deterministic flag from the transition relation.
    pub fn check_deterministic(&self) -> bool {
        self.edges.iter().all(|es| {
            let mut seen = std::collections::HashSet::new();
            es.iter().all(|(sym, _)| seen.insert(*sym))
        })
    }

    pub fn is_complete(&self) -> bool {
        self.edges.iter().all(|es| {
            let syms: std::collections::HashSet<usize> = es.iter().map(|(s, _)| *s).collect();
            syms.len() == self.alphabet.len()
        })
    }

    /// Structural validation of the declared acceptance class.
    pub fn validate(&self) -> Result<(), AutomatonError> {
        if self.initial >= self.state_count {
            return Err(AutomatonError::BadState(self.initial));
        }
        for (src, es) in self.edges.iter().enumerate() {
            for &(sym, dst) in es {
                if dst >= self.state_count {
                    return Err(AutomatonError::BadState(dst));
                }
                if sym >= self.alphabet.len() {
                    return Err(AutomatonError::Structure(format!(
                        "transition from {src} uses symbol index {sym} outside alphabet"
                    )));
                }
            }
        }
        if self.deterministic && !self.check_deterministic() {
            return Err(AutomatonError::NotDeterministic);
        }
        match &self.acceptance {
            Acceptance::Safety { rejecting } => {
                for &s in rejecting {
                    for &(_, dst) in &self.edges[s] {
                        if !rejecting.contains(&dst) {
                            return Err(AutomatonError::Structure(format!(
                                "rejecting sink {s} escapes to {dst}"
                            )));
                        }
                    }
                }
            }
            Acceptance::CoSafety { accepting } => {
                for &s in accepting {
                    for &(_, dst) in &self.edges[s] {
                        if !accepting.contains(&dst) {
                            return Err(AutomatonError::Structure(format!(
                                "accepting sink {s} escapes to {dst}"
                            )));
                        }
                    }
                }
            }
            Acceptance::Weak(p) => {
                if p.block_of.len() != self.state_count {
                    return Err(AutomatonError::Structure("partition size mismatch".into()));
                }
                for (src, es) in self.edges.iter().enumerate() {
                    let bs = p.block_of[src];
                    for &(_, dst) in es {
                        let bd = p.block_of[dst];
                        if !p.below(bd, bs) {
                            return Err(AutomatonError::Structure(format!(
                                "transition {src}->{dst} ascends from block {bs} to block {bd}"
                            )));
                        }
                    }
                }
            }
            Acceptance::Buchi { .. } => {}
        }
        Ok(())
    }

    /// Completes the transition relation by adding one absorbing
    /// non-accepting sink, if any transition is missing.
    pub fn complete_with_sink(&mut self) {
        if self.is_complete() {
            return;
        }
        let sink = self.state_count;
        self.state_count += 1;
        self.edges.push((0..self.alphabet.len()).map(|i| (i, sink)).collect());
        for s in 0..sink {
            let present: std::collections::HashSet<usize> =
                self.edges[s].iter().map(|(i, _)| *i).collect();
            for i in 0..self.alphabet.len() {
                if !present.contains(&i) {
                    self.edges[s].push((i, sink));
                }
            }
        }
        match &mut self.acceptance {
            Acceptance::Safety { rejecting } => {
                rejecting.insert(sink);
            }
            Acceptance::CoSafety { .. } => {}
            Acceptance::Weak(p) => {
                let b = p.block_accepting.len();
                p.block_accepting.push(false);
                p.block_of.push(b);
                for other in 0..b {
                    p.order.insert((b, other));
                }
            }
            Acceptance::Buchi { .. } => {}
        }
    }
}

/// A transition of a weighted automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WTransition {
    pub src: StateId,
    pub letter: usize,
    pub weight: i64,
    pub dst: StateId,
}

/// Nondeterministic complete weighted omega-automaton with all states
/// accepting; the weight of a word is the supremum over its runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedOmegaAutomaton {
    pub alphabet: Vec<String>,
    pub state_count: usize,
    pub initial: StateId,
    pub transitions: Vec<WTransition>,
    pub weight_bound: i64,
    /// Per-state indices into `transitions`.
    edges: Vec<Vec<usize>>,
}

impl WeightedOmegaAutomaton {
    pub fn new(
        alphabet: Vec<String>,
        state_count: usize,
        initial: StateId,
        transitions: Vec<WTransition>,
        weight_bound: i64,
    ) -> Result<Self, AutomatonError> {
        let mut edges = vec![Vec::new(); state_count];
        for (i, t) in transitions.iter().enumerate() {
            if t.src >= state_count {
                return Err(AutomatonError::BadState(t.src));
            }
            if t.dst >= state_count {
                return Err(AutomatonError::BadState(t.dst));
            }
            if t.letter >= alphabet.len() {
                return Err(AutomatonError::UnknownSymbol(format!("letter index {}", t.letter)));
            }
            edges[t.src].push(i);
        }
        let wa = WeightedOmegaAutomaton { alphabet, state_count, initial, transitions, weight_bound, edges };
        wa.validate()?;
        Ok(wa)
    }

    pub fn validate(&self) -> Result<(), AutomatonError> {
        if self.initial >= self.state_count {
            return Err(AutomatonError::BadState(self.initial));
        }
        for t in &self.transitions {
            if t.weight.abs() > self.weight_bound {
                return Err(AutomatonError::WeightOutOfBound { weight: t.weight, bound: self.weight_bound });
            }
        }
        for s in 0..self.state_count {
            for letter in 0..self.alphabet.len() {
                if !self.edges[s].iter().any(|&i| self.transitions[i].letter == letter) {
                    return Err(AutomatonError::Incomplete { state: s, symbol: letter });
                }
            }
        }
        Ok(())
    }

    pub fn letter_index(&self, letter: &str) -> Option<usize> {
        self.alphabet.iter().position(|l| l == letter)
    }

    pub fn transitions_from(&self, s: StateId) -> impl Iterator<Item = &WTransition> + '_ {
        self.edges[s].iter().map(move |&i| &self.transitions[i])
    }

    pub fn transition_ids_from(&self, s: StateId) -> &[usize] {
        &self.edges[s]
    }
}

/// Alphabet symbol of an annotated automaton: base letter, transition
/// weight, and a label unique to the originating transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnnSymbol {
    pub letter: usize,
    pub weight: i64,
    pub label: usize,
}

/// Safety Buchi automaton whose words are in bijection with the runs of the
/// source weighted automaton. Labels are the source transition indices in
/// input order, so builds are reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedAutomaton {
    pub letter_names: Vec<String>,
    pub state_count: usize,
    pub initial: StateId,
    pub alphabet: Vec<AnnSymbol>,
    pub edges: Vec<Vec<(AnnSymbol, StateId)>>,
}

/// Converts each weighted transition (s, a, w, t) with fresh label l into the
/// annotated transition (s, (a, w, l), t); all states accepting.
pub fn annotate(w: &WeightedOmegaAutomaton) -> AnnotatedAutomaton {
    let mut alphabet = Vec::with_capacity(w.transitions.len());
    let mut edges = vec![Vec::new(); w.state_count];
    for (label, t) in w.transitions.iter().enumerate() {
        let sym = AnnSymbol { letter: t.letter, weight: t.weight, label };
        alphabet.push(sym);
        edges[t.src].push((sym, t.dst));
    }
    AnnotatedAutomaton {
        letter_names: w.alphabet.clone(),
        state_count: w.state_count,
        initial: w.initial,
        alphabet,
        edges,
    }
}

impl AnnotatedAutomaton {
    /// Views the annotated automaton as a safety acceptor over its annotated
    /// alphabet (no rejecting states; partial transition relation).
    pub fn as_acceptor(&self) -> OmegaAcceptor<AnnSymbol> {
        let index: HashMap<AnnSymbol, usize> =
            self.alphabet.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let edges = self
            .edges
            .iter()
            .map(|es| es.iter().map(|(sym, dst)| (index[sym], *dst)).collect())
            .collect();
        OmegaAcceptor {
            alphabet: self.alphabet.clone(),
            state_count: self.state_count,
            initial: self.initial,
            edges,
            acceptance: Acceptance::Safety { rejecting: BTreeSet::new() },
            deterministic: true,
        }
    }
}

/// Deterministic complete finite-word acceptor over integer symbols; the
/// shape shared by the gap DFA and the rounded-gap comparators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub symbols: Vec<i64>,
    pub state_count: usize,
    pub initial: StateId,
    /// delta[state][symbol index] = successor.
    pub delta: Vec<Vec<StateId>>,
    pub accepting: Vec<bool>,
}

impl Dfa {
    pub fn symbol_index(&self, v: i64) -> Option<usize> {
        self.symbols.iter().position(|&s| s == v)
    }

    pub fn step(&self, state: StateId, v: i64) -> Option<StateId> {
        Some(self.delta[state][self.symbol_index(v)?])
    }

    pub fn run(&self, word: &[i64]) -> Option<StateId> {
        let mut s = self.initial;
        for &v in word {
            s = self.step(s, v)?;
        }
        Some(s)
    }

    pub fn accepts(&self, word: &[i64]) -> Option<bool> {
        self.run(word).map(|s| self.accepting[s])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_weighted() -> WeightedOmegaAutomaton {
        WeightedOmegaAutomaton::new(
            vec!["a".into()],
            1,
            0,
            vec![WTransition { src: 0, letter: 0, weight: 3, dst: 0 }],
            5,
        )
        .unwrap()
    }

    #[test]
    fn annotate_self_loop() {
        let w = tiny_weighted();
        let ann = annotate(&w);
        assert_eq!(ann.state_count, 1);
        assert_eq!(ann.alphabet, vec![AnnSymbol { letter: 0, weight: 3, label: 0 }]);
    }

    #[test]
    fn annotate_labels_unique() {
        let w = WeightedOmegaAutomaton::new(
            vec!["a".into(), "b".into()],
            2,
            0,
            vec![
                WTransition { src: 0, letter: 0, weight: 1, dst: 1 },
                WTransition { src: 0, letter: 1, weight: 0, dst: 0 },
                WTransition { src: 1, letter: 0, weight: 2, dst: 1 },
                WTransition { src: 1, letter: 1, weight: 0, dst: 0 },
            ],
            2,
        )
        .unwrap();
        let ann = annotate(&w);
        assert_eq!(ann.alphabet.len(), w.transitions.len());
        let labels: std::collections::HashSet<usize> =
            ann.alphabet.iter().map(|s| s.label).collect();
        assert_eq!(labels.len(), w.transitions.len());
    }

    /// Enumerates run prefixes of the weighted automaton and word prefixes of
    /// the annotated automaton and checks they are in bijection.
    #[test]
    fn annotate_run_word_bijection() {
        let w = WeightedOmegaAutomaton::new(
            vec!["a".into(), "b".into()],
            2,
            0,
            vec![
                WTransition { src: 0, letter: 0, weight: 1, dst: 1 },
                WTransition { src: 0, letter: 0, weight: 2, dst: 0 },
                WTransition { src: 0, letter: 1, weight: 0, dst: 0 },
                WTransition { src: 1, letter: 0, weight: 2, dst: 1 },
                WTransition { src: 1, letter: 1, weight: 0, dst: 0 },
            ],
            2,
        )
        .unwrap();
        let ann = annotate(&w);
        // Enumerate all length-4 run prefixes of w as transition sequences.
        let mut runs: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..4 {
            let mut next = Vec::new();
            for r in &runs {
                let state = r.last().map_or(w.initial, |&i| w.transitions[i].dst);
                for &i in w.transition_ids_from(state) {
                    let mut e = r.clone();
                    e.push(i);
                    next.push(e);
                }
            }
            runs = next;
        }
        // Enumerate all length-4 words of the annotated automaton.
        let mut words: Vec<Vec<AnnSymbol>> = vec![vec![]];
        for _ in 0..4 {
            let mut next = Vec::new();
            for word in &words {
                let mut state = ann.initial;
                let mut ok = true;
                for sym in word {
                    match ann.edges[state].iter().find(|(s, _)| s == sym) {
                        Some((_, dst)) => state = *dst,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                for (sym, _) in &ann.edges[state] {
                    let mut e = word.clone();
                    e.push(*sym);
                    next.push(e);
                }
            }
            words = next;
        }
        // Bijection: the label sequences coincide.
        let mut run_labels: Vec<Vec<usize>> = runs;
        let mut word_labels: Vec<Vec<usize>> =
            words.iter().map(|w| w.iter().map(|s| s.label).collect()).collect();
        run_labels.sort();
        word_labels.sort();
        assert_eq!(run_labels, word_labels);
    }

    #[test]
    fn weighted_rejects_incomplete() {
        let r = WeightedOmegaAutomaton::new(
            vec!["a".into(), "b".into()],
            1,
            0,
            vec![WTransition { src: 0, letter: 0, weight: 0, dst: 0 }],
            1,
        );
        assert!(matches!(r, Err(AutomatonError::Incomplete { .. })));
    }

    #[test]
    fn weighted_rejects_overweight() {
        let r = WeightedOmegaAutomaton::new(
            vec!["a".into()],
            1,
            0,
            vec![WTransition { src: 0, letter: 0, weight: 9, dst: 0 }],
            5,
        );
        assert!(matches!(r, Err(AutomatonError::WeightOutOfBound { .. })));
    }

    #[test]
    fn complete_with_sink_adds_one_state() {
        let mut acc = OmegaAcceptor {
            alphabet: vec!["a".to_string(), "b".to_string()],
            state_count: 1,
            initial: 0,
            edges: vec![vec![(0, 0)]],
            acceptance: Acceptance::Safety { rejecting: BTreeSet::new() },
            deterministic: true,
        };
        acc.complete_with_sink();
        assert_eq!(acc.state_count, 2);
        assert!(acc.is_complete());
        assert!(acc.validate().is_ok());
        assert!(!acc.state_accepting(1));
    }
}
