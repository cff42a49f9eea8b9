//! Discounted-sum inclusion between nondeterministic weighted
//! omega-automata, via safety/co-safety comparators: the maximal automaton
//! tracks every alternative run of Q through a subset construction paired
//! with comparator states, the counterexample automaton intersects it with
//! annotated P and a comparator on the weight difference, and emptiness is
//! decided on the fly.

use std::collections::HashMap;

use thiserror::Error;

use crate::automata::{
    search_accepting_lasso, Acceptance, AnnSymbol, OmegaAcceptor, SccCondition, StateId,
    WeakPartition, WeightedOmegaAutomaton,
};
use crate::comparator::{build_ds_comparator, build_gap_dfa, ComparatorParams, GapDfa, Relation};
use crate::exact::{integer, ExactNumber};
use crate::games::one_player_optimal_values;
use crate::lasso::{LassoWeights, LassoWord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InclusionError {
    #[error("alphabet mismatch between the automata")]
    AlphabetMismatch,
    #[error("discount factor must be an integer >= 2")]
    BadDiscount,
    #[error("lasso uses letter `{0}` missing from the alphabet")]
    UnknownLetter(String),
    #[error("internal error: witness failed exact verification")]
    WitnessVerification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// Counterexamples are runs of P with weight strictly above Q's word
    /// weight; their absence proves P subset-or-equal Q.
    NonStrict,
    /// Counterexamples reach Q's word weight; their absence proves strict
    /// inclusion.
    Strict,
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    /// The witness word.
    pub word: LassoWord<String>,
    /// The weights of the violating run of P along the witness.
    pub run_weights: LassoWeights,
    /// Exact word weight in P (sup over runs).
    pub wt_p: ExactNumber,
    /// Exact word weight in Q.
    pub wt_q: ExactNumber,
}

#[derive(Debug, Clone)]
pub enum InclusionVerdict {
    Included,
    Counterexample(Box<Counterexample>),
}

/// Shared lazy state machinery: Q's maximal-run tracker. A state is a pair
/// (candidate run state, map from alternative run state to the gap of
/// (alternative weights - candidate weights)); the candidate stops being
/// maximal exactly when some tracked gap overflows into the bad sink.
///
/// The gap transition is monotone and only the largest gap per alternative
/// state can reach the sink first, so the map keeps that one alone.
struct MaximalExplorer<'q> {
    q: &'q WeightedOmegaAutomaton,
    gap: GapDfa,
    states: Vec<(StateId, Vec<(StateId, StateId)>)>,
    ids: HashMap<(StateId, Vec<(StateId, StateId)>), usize>,
}

impl<'q> MaximalExplorer<'q> {
    fn new(q: &'q WeightedOmegaAutomaton, d: i64) -> Result<Self, InclusionError> {
        if d < 2 {
            return Err(InclusionError::BadDiscount);
        }
        // Differences of weights bounded by mu span [-2mu, 2mu].
        let gap = build_gap_dfa(2 * q.weight_bound.max(1), d)
            .map_err(|_| InclusionError::BadDiscount)?;
        let mut ex = MaximalExplorer { q, gap, states: Vec::new(), ids: HashMap::new() };
        let init_gap = ex.gap.dfa.initial;
        let init = (q.initial, vec![(q.initial, init_gap)]);
        ex.intern(init);
        Ok(ex)
    }

    fn intern(&mut self, key: (StateId, Vec<(StateId, StateId)>)) -> usize {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.states.len();
        self.states.push(key.clone());
        self.ids.insert(key, id);
        id
    }

    /// Total "danger" order on gap states: veryGood below all tracked gaps,
    /// bad above them; gap ids are already ascending in between.
    fn gap_key(&self, c: StateId) -> i64 {
        if c == self.gap.bad {
            i64::MAX
        } else if c == self.gap.very_good {
            i64::MIN
        } else {
            c as i64
        }
    }

    /// Advances a tracked gap of (alternative - candidate) when the
    /// candidate reads `weight` and the alternative reads `alt_weight`.
    fn gap_step(&self, c: StateId, alt_weight: i64, weight: i64) -> StateId {
        self.gap
            .dfa
            .step(c, alt_weight - weight)
            .expect("difference within the gap alphabet")
    }

    /// The map image on reading annotated letter (letter, weight): every
    /// alternative continues on any of its (letter, w') transitions, and
    /// per target state only the most dangerous gap is kept.
    fn image(&self, mid: usize, letter: usize, weight: i64) -> Vec<(StateId, StateId)> {
        let (_, ref set) = self.states[mid];
        let mut next: Vec<(StateId, StateId)> = Vec::new();
        for &(t, c) in set {
            for tr in self.q.transitions_from(t) {
                if tr.letter != letter {
                    continue;
                }
                let cn = self.gap_step(c, tr.weight, weight);
                match next.binary_search_by_key(&tr.dst, |&(q, _)| q) {
                    Ok(pos) => {
                        if self.gap_key(cn) > self.gap_key(next[pos].1) {
                            next[pos].1 = cn;
                        }
                    }
                    Err(pos) => next.insert(pos, (tr.dst, cn)),
                }
            }
        }
        next
    }

    /// Successors of a maximal-automaton state on (letter, weight): one per
    /// matching candidate transition.
    fn step(&mut self, mid: usize, letter: usize, weight: i64) -> Vec<usize> {
        let (qs, _) = self.states[mid];
        let image = self.image(mid, letter, weight);
        let mut out = Vec::new();
        let dsts: Vec<StateId> = self
            .q
            .transitions_from(qs)
            .filter(|tr| tr.letter == letter && tr.weight == weight)
            .map(|tr| tr.dst)
            .collect();
        for dst in dsts {
            out.push(self.intern((dst, image.clone())));
        }
        out
    }

    /// A state is accepting while no alternative strictly dominates the
    /// candidate, i.e. no tracked gap has reached the bad sink.
    fn accepting(&self, mid: usize) -> bool {
        self.states[mid].1.iter().all(|&(_, c)| c != self.gap.bad)
    }
}

/// The maximal automaton of Q: accepts an annotated word (w, wt) iff wt is
/// the supremum weight sequence of w in Q. Safety; materialized on the
/// reachable part only.
pub struct MaximalAutomaton {
    pub acceptor: OmegaAcceptor<(usize, i64)>,
    pub letters: Vec<String>,
}

pub fn maximal_automaton(
    q: &WeightedOmegaAutomaton,
    d: i64,
) -> Result<MaximalAutomaton, InclusionError> {
    let mut ex = MaximalExplorer::new(q, d)?;
    // Annotated alphabet: distinct (letter, weight) pairs of Q.
    let mut alphabet: Vec<(usize, i64)> = Vec::new();
    for t in &q.transitions {
        let sym = (t.letter, t.weight);
        if !alphabet.contains(&sym) {
            alphabet.push(sym);
        }
    }
    alphabet.sort_unstable();
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    let mut next = 0usize;
    while next < ex.states.len() {
        let mut out = Vec::new();
        for (si, &(letter, weight)) in alphabet.iter().enumerate() {
            for dst in ex.step(next, letter, weight) {
                out.push((si, dst));
            }
        }
        edges.resize(ex.states.len().max(edges.len()), Vec::new());
        edges[next] = out;
        next += 1;
    }
    edges.resize(ex.states.len(), Vec::new());
    let rejecting = (0..ex.states.len()).filter(|&s| !ex.accepting(s)).collect();
    let acceptor = OmegaAcceptor {
        alphabet,
        state_count: ex.states.len(),
        initial: 0,
        edges,
        acceptance: Acceptance::Safety { rejecting },
        deterministic: false,
    };
    acceptor.validate().map_err(|_| InclusionError::WitnessVerification)?;
    Ok(MaximalAutomaton { acceptor, letters: q.alphabet.clone() })
}

/// One exploration state of the counterexample automaton.
type CexKey = (StateId, usize, StateId); // (annotated-P state, maximal id, outer comparator state)

struct CexExplorer<'a> {
    p: &'a WeightedOmegaAutomaton,
    maximal: MaximalExplorer<'a>,
    outer: OmegaAcceptor<i64>,
    outer_sym: HashMap<i64, usize>,
    letter_map: Vec<usize>, // P letter index -> Q letter index
    states: Vec<CexKey>,
    ids: HashMap<CexKey, usize>,
    /// Edge labels: annotated-P symbols, one per distinct P transition.
    edge_syms: Vec<AnnSymbol>,
}

impl<'a> CexExplorer<'a> {
    fn new(
        p: &'a WeightedOmegaAutomaton,
        q: &'a WeightedOmegaAutomaton,
        d: i64,
        strictness: Strictness,
    ) -> Result<Self, InclusionError> {
        if p.alphabet.len() != q.alphabet.len() {
            return Err(InclusionError::AlphabetMismatch);
        }
        let letter_map: Vec<usize> = p
            .alphabet
            .iter()
            .map(|l| q.letter_index(l).ok_or(InclusionError::AlphabetMismatch))
            .collect::<Result<_, _>>()?;
        let maximal = MaximalExplorer::new(q, d)?;
        let mu = 2 * p.weight_bound.max(q.weight_bound).max(1);
        let rel = match strictness {
            Strictness::Strict => Relation::Ge,
            Strictness::NonStrict => Relation::Gt,
        };
        let outer = build_ds_comparator(&ComparatorParams::new(mu, d, rel))
            .map_err(|_| InclusionError::BadDiscount)?;
        let outer_sym = outer.alphabet.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edge_syms = p
            .transitions
            .iter()
            .enumerate()
            .map(|(label, t)| AnnSymbol { letter: t.letter, weight: t.weight, label })
            .collect();
        let mut ex = CexExplorer {
            p,
            maximal,
            outer,
            outer_sym,
            letter_map,
            states: Vec::new(),
            ids: HashMap::new(),
            edge_syms,
        };
        let root = (p.initial, 0usize, ex.outer.initial);
        ex.states.push(root);
        ex.ids.insert(root, 0);
        Ok(ex)
    }

    fn outer_step(&self, c: StateId, diff: i64) -> StateId {
        let sym = self.outer_sym[&diff];
        self.outer.edges[c]
            .iter()
            .find(|(s, _)| *s == sym)
            .map(|&(_, d)| d)
            .expect("comparator is complete")
    }

    /// Successor states with their edge tags (P transition labels).
    fn succs(&mut self, id: usize) -> Vec<(usize, usize)> {
        let (ps, mid, oc) = self.states[id];
        let mut out = Vec::new();
        let p_edges: Vec<usize> = self.p.transition_ids_from(ps).to_vec();
        for label in p_edges {
            let tr = self.p.transitions[label];
            let q_letter = self.letter_map[tr.letter];
            // Q-side annotated moves on the same base letter, any weight
            // available from the candidate state.
            let weights: Vec<i64> = {
                let q_state = self.maximal.states[mid].0;
                let mut ws: Vec<i64> = self
                    .maximal
                    .q
                    .transitions_from(q_state)
                    .filter(|t| t.letter == q_letter)
                    .map(|t| t.weight)
                    .collect();
                ws.sort_unstable();
                ws.dedup();
                ws
            };
            for wq in weights {
                let mids = self.maximal.step(mid, q_letter, wq);
                let on = self.outer_step(oc, tr.weight - wq);
                for m in mids {
                    let key = (tr.dst, m, on);
                    let nid = *self.ids.entry(key).or_insert_with(|| {
                        self.states.push(key);
                        self.states.len() - 1
                    });
                    out.push((label, nid));
                }
            }
        }
        out
    }

    /// Is the state accepting for the chosen strictness?
    fn accepting(&self, id: usize) -> bool {
        let (_, mid, oc) = self.states[id];
        self.maximal.accepting(mid) && self.outer.state_accepting(oc)
    }

    /// 0..3 block id for the weak view: (maximal alive, outer got).
    fn block(&self, id: usize) -> usize {
        let (_, mid, oc) = self.states[id];
        let alive = self.maximal.accepting(mid);
        let got = self.outer.state_accepting(oc);
        match (alive, got) {
            (true, false) => 3,
            (true, true) => 2,
            (false, false) => 1,
            (false, true) => 0,
        }
    }
}

/// The counterexample automaton, materialized on its reachable part.
/// Strict queries give a safety automaton, non-strict ones a weak automaton
/// with the four-block partition of a safety and co-safety intersection.
pub struct CexAutomaton {
    pub acceptor: OmegaAcceptor<AnnSymbol>,
    pub letters: Vec<String>,
}

pub fn counterexample_automaton(
    p: &WeightedOmegaAutomaton,
    q: &WeightedOmegaAutomaton,
    d: i64,
    strictness: Strictness,
) -> Result<CexAutomaton, InclusionError> {
    let mut ex = CexExplorer::new(p, q, d, strictness)?;
    let mut edges_by_label: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut next = 0usize;
    while next < ex.states.len() {
        let out = ex.succs(next);
        edges_by_label.resize(ex.states.len().max(edges_by_label.len()), Vec::new());
        edges_by_label[next] = out;
        next += 1;
    }
    edges_by_label.resize(ex.states.len(), Vec::new());
    let n = ex.states.len();
    // Alphabet = annotated-P symbols; edge tag is already the P transition
    // label, which doubles as the symbol index.
    let alphabet = ex.edge_syms.clone();
    let acceptance = match strictness {
        Strictness::Strict => Acceptance::Safety {
            rejecting: (0..n).filter(|&s| !ex.accepting(s)).collect(),
        },
        Strictness::NonStrict => {
            let block_of: Vec<usize> = (0..n).map(|s| ex.block(s)).collect();
            let mut order = std::collections::BTreeSet::new();
            order.insert((2, 3));
            order.insert((1, 3));
            order.insert((0, 2));
            order.insert((0, 1));
            Acceptance::Weak(WeakPartition {
                block_of,
                block_accepting: vec![false, false, true, false],
                order,
            })
        }
    };
    let acceptor = OmegaAcceptor {
        alphabet,
        state_count: n,
        initial: 0,
        edges: edges_by_label,
        acceptance,
        deterministic: false,
    };
    acceptor.validate().map_err(|_| InclusionError::WitnessVerification)?;
    Ok(CexAutomaton { acceptor, letters: p.alphabet.clone() })
}

/// Exact word weights of a lasso word in both automata, as the sup over the
/// lasso-shaped runs of the product with the word's position graph, solved
/// by one-player policy iteration.
pub fn verify_witness(
    p: &WeightedOmegaAutomaton,
    q: &WeightedOmegaAutomaton,
    d: i64,
    word: &LassoWord<String>,
) -> Result<(ExactNumber, ExactNumber), InclusionError> {
    Ok((word_weight(p, d, word)?, word_weight(q, d, word)?))
}

/// Supremum run weight of an ultimately periodic word in a weighted
/// automaton, computed exactly.
pub fn word_weight(
    a: &WeightedOmegaAutomaton,
    d: i64,
    word: &LassoWord<String>,
) -> Result<ExactNumber, InclusionError> {
    let to_idx = |l: &String| a.letter_index(l).ok_or_else(|| InclusionError::UnknownLetter(l.clone()));
    let head: Vec<usize> = word.head.iter().map(to_idx).collect::<Result<_, _>>()?;
    let cycle: Vec<usize> = word.cycle.iter().map(to_idx).collect::<Result<_, _>>()?;
    let total = head.len() + cycle.len();
    let letter_at = |pos: usize| if pos < head.len() { head[pos] } else { cycle[pos - head.len()] };
    let next_pos = |pos: usize| if pos + 1 < total { pos + 1 } else { head.len() };
    // Product nodes (state, pos); completeness of the automaton makes every
    // node live.
    let n = a.state_count * total.max(1);
    let node = |s: usize, pos: usize| s * total + pos;
    let mut edges: Vec<Vec<(usize, ExactNumber)>> = vec![Vec::new(); n];
    for s in 0..a.state_count {
        for pos in 0..total {
            let letter = letter_at(pos);
            for t in a.transitions_from(s) {
                if t.letter == letter {
                    edges[node(s, pos)].push((node(t.dst, next_pos(pos)), integer(t.weight)));
                }
            }
        }
    }
    let values = one_player_optimal_values(&edges, &integer(d), true);
    Ok(values[node(a.initial, 0)].clone())
}

/// Decides DS inclusion on the fly: explores the counterexample automaton
/// lazily depth-first and stops at the first accepting lasso; the witness
/// is re-verified against the exact word weights before it is returned.
pub fn check_inclusion(
    p: &WeightedOmegaAutomaton,
    q: &WeightedOmegaAutomaton,
    d: i64,
    strictness: Strictness,
) -> Result<InclusionVerdict, InclusionError> {
    let ex = std::cell::RefCell::new(CexExplorer::new(p, q, d, strictness)?);
    let found = search_accepting_lasso(
        0,
        |v| ex.borrow_mut().succs(v),
        |v| ex.borrow().accepting(v),
        SccCondition::AllAccepting,
    );
    let Some(found) = found else {
        return Ok(InclusionVerdict::Included);
    };
    let labels_head: Vec<usize> = found.head.iter().map(|&(_, tag)| tag).collect();
    let labels_cycle: Vec<usize> = found.cycle.iter().map(|&(_, tag)| tag).collect();
    let word = LassoWord::new(
        labels_head.iter().map(|&l| p.alphabet[p.transitions[l].letter].clone()).collect(),
        labels_cycle.iter().map(|&l| p.alphabet[p.transitions[l].letter].clone()).collect(),
    )
    .expect("cycle nonempty");
    let run_weights = LassoWeights {
        head: labels_head.iter().map(|&l| p.transitions[l].weight).collect(),
        cycle: labels_cycle.iter().map(|&l| p.transitions[l].weight).collect(),
    };
    let (wt_p, wt_q) = verify_witness(p, q, d, &word)?;
    let violated = match strictness {
        Strictness::NonStrict => wt_p > wt_q,
        Strictness::Strict => wt_p >= wt_q,
    };
    if !violated {
        return Err(InclusionError::WitnessVerification);
    }
    Ok(InclusionVerdict::Counterexample(Box::new(Counterexample {
        word,
        run_weights,
        wt_p,
        wt_q,
    })))
}
