//! Intersection of a safety acceptor with a co-safety acceptor.
//!
//! The plain product (no cyclic counter) suffices: acceptance is state-based
//! on both sides, and the result is a weak automaton with four blocks.

use super::{Acceptance, AutomatonError, OmegaAcceptor, WeakPartition};
use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

/// Block indices of the product. Higher value = higher in the order.
const BLOCK_DEAD_GOT: usize = 0; // safety sink reached, co-safety sink reached
const BLOCK_DEAD: usize = 1; // safety sink reached only
const BLOCK_GOT: usize = 2; // co-safety sink reached only; the accepting block
const BLOCK_LIVE: usize = 3; // neither

/// Language intersection L(S) and L(C) for safety S and co-safety C over the
/// same alphabet. The accepting block is (non-sink of S) x (accepting sink
/// of C).
pub fn intersect_safety_cosafety<S: Clone + Eq + Hash>(
    safety: &OmegaAcceptor<S>,
    cosafety: &OmegaAcceptor<S>,
) -> Result<OmegaAcceptor<S>, AutomatonError> {
    if !matches!(safety.acceptance, Acceptance::Safety { .. }) {
        return Err(AutomatonError::WrongAcceptance("safety"));
    }
    if !matches!(cosafety.acceptance, Acceptance::CoSafety { .. }) {
        return Err(AutomatonError::WrongAcceptance("cosafety"));
    }
    // Shared alphabet: map co-safety symbol indices onto the safety alphabet.
    let mut co_sym = Vec::with_capacity(cosafety.alphabet.len());
    for s in &cosafety.alphabet {
        co_sym.push(safety.symbol_index(s).ok_or(AutomatonError::AlphabetMismatch)?);
    }
    if safety.alphabet.len() != cosafety.alphabet.len() {
        return Err(AutomatonError::AlphabetMismatch);
    }
    // Reachable product.
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
    let root = (safety.initial, cosafety.initial);
    ids.insert(root, 0);
    nodes.push(root);
    edges.push(Vec::new());
    let mut next = 0usize;
    while next < nodes.len() {
        let (qs, qc) = nodes[next];
        let mut out = Vec::new();
        for &(sym_s, dst_s) in &safety.edges[qs] {
            for (ci, &(sym_c, dst_c)) in cosafety.edges[qc].iter().enumerate() {
                let _ = ci;
                if co_sym[sym_c] != sym_s {
                    continue;
                }
                let key = (dst_s, dst_c);
                let id = *ids.entry(key).or_insert_with(|| {
                    nodes.push(key);
                    edges.push(Vec::new());
                    nodes.len() - 1
                });
                out.push((sym_s, id));
            }
        }
        edges[next] = out;
        next += 1;
    }
    let block_of: Vec<usize> = nodes
        .iter()
        .map(|&(qs, qc)| {
            let live = safety.state_accepting(qs);
            let got = cosafety.state_accepting(qc);
            match (live, got) {
                (true, false) => BLOCK_LIVE,
                (true, true) => BLOCK_GOT,
                (false, false) => BLOCK_DEAD,
                (false, true) => BLOCK_DEAD_GOT,
            }
        })
        .collect();
    let mut order = BTreeSet::new();
    order.insert((BLOCK_GOT, BLOCK_LIVE));
    order.insert((BLOCK_DEAD, BLOCK_LIVE));
    order.insert((BLOCK_DEAD_GOT, BLOCK_GOT));
    order.insert((BLOCK_DEAD_GOT, BLOCK_DEAD));
    let acceptance = Acceptance::Weak(WeakPartition {
        block_of,
        block_accepting: vec![false, false, true, false],
        order,
    });
    let det = safety.deterministic && cosafety.deterministic;
    let out = OmegaAcceptor {
        alphabet: safety.alphabet.clone(),
        state_count: nodes.len(),
        initial: 0,
        edges,
        acceptance,
        deterministic: det,
    };
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{bounded_lassos_agree, lasso_membership};
    use crate::benchgen::Xorshift64Star;
    use crate::lasso::LassoWord;

    fn accept_all_cosafety() -> OmegaAcceptor<char> {
        OmegaAcceptor {
            alphabet: vec!['a', 'b'],
            state_count: 1,
            initial: 0,
            edges: vec![vec![(0, 0), (1, 0)]],
            acceptance: Acceptance::CoSafety { accepting: BTreeSet::from([0]) },
            deterministic: true,
        }
    }

    fn random_safety(rng: &mut Xorshift64Star, states: usize) -> OmegaAcceptor<char> {
        let sink = states - 1;
        let mut edges = vec![Vec::new(); states];
        for s in 0..states {
            for sym in 0..2usize {
                let dst = if s == sink {
                    sink
                } else {
                    rng.next_range(states as u64) as usize
                };
                edges[s].push((sym, dst));
            }
        }
        OmegaAcceptor {
            alphabet: vec!['a', 'b'],
            state_count: states,
            initial: 0,
            edges,
            acceptance: Acceptance::Safety { rejecting: BTreeSet::from([sink]) },
            deterministic: true,
        }
    }

    fn random_cosafety(rng: &mut Xorshift64Star, states: usize) -> OmegaAcceptor<char> {
        let sink = states - 1;
        let mut edges = vec![Vec::new(); states];
        for s in 0..states {
            for sym in 0..2usize {
                let dst = if s == sink {
                    sink
                } else {
                    rng.next_range(states as u64) as usize
                };
                edges[s].push((sym, dst));
            }
        }
        OmegaAcceptor {
            alphabet: vec!['a', 'b'],
            state_count: states,
            initial: 0,
            edges,
            acceptance: Acceptance::CoSafety { accepting: BTreeSet::from([sink]) },
            deterministic: true,
        }
    }

    #[test]
    fn intersect_with_full_cosafety_is_identity() {
        let mut rng = Xorshift64Star::new(8);
        for _ in 0..20 {
            let s = random_safety(&mut rng, 4);
            let c = accept_all_cosafety();
            let p = intersect_safety_cosafety(&s, &c).unwrap();
            assert!(bounded_lassos_agree(&s, &p, 5, 5));
        }
    }

    #[test]
    fn empty_safety_gives_empty_product() {
        let s = OmegaAcceptor {
            alphabet: vec!['a', 'b'],
            state_count: 1,
            initial: 0,
            edges: vec![vec![(0, 0), (1, 0)]],
            acceptance: Acceptance::Safety { rejecting: BTreeSet::from([0]) },
            deterministic: true,
        };
        let c = accept_all_cosafety();
        let p = intersect_safety_cosafety(&s, &c).unwrap();
        let w = LassoWord::new(vec![], vec!['a']).unwrap();
        assert!(!lasso_membership(&p, &w).unwrap());
        assert!(crate::automata::nonemptiness(&p).unwrap().is_none());
    }

    #[test]
    fn random_pairs_language_equality() {
        let mut rng = Xorshift64Star::new(77);
        for _ in 0..25 {
            let ns = 2 + rng.next_range(5) as usize;
            let s = random_safety(&mut rng, ns);
            let nc = 2 + rng.next_range(5) as usize;
            let c = random_cosafety(&mut rng, nc);
            let p = intersect_safety_cosafety(&s, &c).unwrap();
            p.validate().unwrap();
            // Language of the product = conjunction of memberships.
            for hl in 0..=4usize {
                for cl in 1..=4usize {
                    for pat in 0..(1u32 << (hl + cl)) {
                        let bits: Vec<char> = (0..hl + cl)
                            .map(|i| if pat >> i & 1 == 0 { 'a' } else { 'b' })
                            .collect();
                        let w = LassoWord::new(bits[..hl].to_vec(), bits[hl..].to_vec()).unwrap();
                        let expect = lasso_membership(&s, &w).unwrap()
                            && lasso_membership(&c, &w).unwrap();
                        let got = lasso_membership(&p, &w).unwrap();
                        assert_eq!(got, expect);
                    }
                }
            }
        }
    }
}
