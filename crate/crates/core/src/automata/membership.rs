//! Ultimately-periodic word membership.
//!
//! Deterministic acceptors are simulated directly with cycle detection on
//! (state, loop position); nondeterministic ones go through an SCC search on
//! the product of the acceptor with the lasso's position graph.

use super::emptiness::{search_accepting_lasso, SccCondition};
use super::{AutomatonError, OmegaAcceptor};
use crate::lasso::LassoWord;
use std::collections::HashMap;
use std::hash::Hash;

/// Does the acceptor accept head . cycle^omega?
pub fn lasso_membership<S: Clone + Eq + Hash>(
    acc: &OmegaAcceptor<S>,
    w: &LassoWord<S>,
) -> Result<bool, AutomatonError> {
    let to_index = |s: &S| {
        acc.symbol_index(s)
            .ok_or_else(|| AutomatonError::UnknownSymbol("symbol missing from alphabet".into()))
    };
    let head: Vec<usize> = w.head.iter().map(to_index).collect::<Result<_, _>>()?;
    let cycle: Vec<usize> = w.cycle.iter().map(to_index).collect::<Result<_, _>>()?;
    if acc.deterministic {
        Ok(membership_deterministic(acc, &head, &cycle))
    } else {
        Ok(membership_product(acc, &head, &cycle))
    }
}

/// Direct simulation: run the head, then iterate the loop until the
/// (state, loop position 0) configuration repeats; the visited loop states
/// between the two occurrences form the eventual cycle, which is accepting
/// under Buchi semantics iff it contains an accepting state. For safety,
/// co-safety and weak acceptors the cycle is uniform, so this evaluates all
/// four classes correctly.
fn membership_deterministic<S: Clone + Eq + Hash>(
    acc: &OmegaAcceptor<S>,
    head: &[usize],
    cycle: &[usize],
) -> bool {
    let step = |state: usize, sym: usize| -> Option<usize> {
        acc.edges[state]
            .iter()
            .find(|(s, _)| *s == sym)
            .map(|&(_, d)| d)
    };
    let mut state = acc.initial;
    for &sym in head {
        match step(state, sym) {
            Some(next) => state = next,
            None => return false,
        }
    }
    // States observed at loop position 0.
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut anchors: Vec<usize> = Vec::new();
    let mut trace: Vec<Vec<usize>> = Vec::new(); // states visited per loop round
    loop {
        if let Some(&first) = seen.get(&state) {
            // Cycle = rounds first..current.
            let accepting = trace[first..]
                .iter()
                .flatten()
                .any(|&s| acc.state_accepting(s));
            return accepting;
        }
        seen.insert(state, anchors.len());
        anchors.push(state);
        let mut round = Vec::new();
        for &sym in cycle {
            match step(state, sym) {
                Some(next) => {
                    state = next;
                    round.push(next);
                }
                None => return false,
            }
        }
        trace.push(round);
    }
}

/// Product of the acceptor with the lasso position graph, searched for a
/// reachable cycle through an accepting state.
fn membership_product<S: Clone + Eq + Hash>(
    acc: &OmegaAcceptor<S>,
    head: &[usize],
    cycle: &[usize],
) -> bool {
    let total = head.len() + cycle.len();
    let sym_at = |pos: usize| -> usize {
        if pos < head.len() {
            head[pos]
        } else {
            cycle[pos - head.len()]
        }
    };
    let next_pos = |pos: usize| -> usize {
        if pos + 1 < total {
            pos + 1
        } else {
            head.len()
        }
    };
    // Materialize the reachable product of (state, position) pairs.
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut adj: Vec<Vec<(usize, usize)>> = Vec::new();
    ids.insert((acc.initial, 0), 0);
    nodes.push((acc.initial, 0));
    adj.push(Vec::new());
    let mut next = 0usize;
    while next < nodes.len() {
        let (state, pos) = nodes[next];
        let sym = sym_at(pos);
        let np = next_pos(pos);
        let mut out = Vec::new();
        for &(s, dst) in &acc.edges[state] {
            if s != sym {
                continue;
            }
            let id = *ids.entry((dst, np)).or_insert_with(|| {
                nodes.push((dst, np));
                adj.push(Vec::new());
                nodes.len() - 1
            });
            out.push((0usize, id));
        }
        adj[next] = out;
        next += 1;
    }
    search_accepting_lasso(
        0,
        |v| adj[v].clone(),
        |v| acc.state_accepting(nodes[v].0),
        SccCondition::AnyAccepting,
    )
    .is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Acceptance, OmegaAcceptor};
    use crate::benchgen::Xorshift64Star;
    use std::collections::BTreeSet;

    fn word(head: &str, cycle: &str) -> LassoWord<char> {
        LassoWord::new(head.chars().collect(), cycle.chars().collect()).unwrap()
    }

    #[test]
    fn safety_without_reachable_sink_accepts_everything() {
        let acc = OmegaAcceptor {
            alphabet: vec!['a', 'b'],
            state_count: 2,
            initial: 0,
            edges: vec![vec![(0, 1), (1, 0)], vec![(0, 0), (1, 1)]],
            acceptance: Acceptance::Safety { rejecting: BTreeSet::new() },
            deterministic: true,
        };
        assert!(lasso_membership(&acc, &word("ab", "ba")).unwrap());
        assert!(lasso_membership(&acc, &word("", "a")).unwrap());
    }

    #[test]
    fn rejecting_absorbing_initial_rejects_everything() {
        let acc = OmegaAcceptor {
            alphabet: vec!['a'],
            state_count: 1,
            initial: 0,
            edges: vec![vec![(0, 0)]],
            acceptance: Acceptance::Safety { rejecting: BTreeSet::from([0]) },
            deterministic: true,
        };
        assert!(!lasso_membership(&acc, &word("a", "a")).unwrap());
    }

    #[test]
    fn alphabet_mismatch_is_error() {
        let acc = OmegaAcceptor {
            alphabet: vec!['a'],
            state_count: 1,
            initial: 0,
            edges: vec![vec![(0, 0)]],
            acceptance: Acceptance::Safety { rejecting: BTreeSet::new() },
            deterministic: true,
        };
        assert!(lasso_membership(&acc, &word("", "z")).is_err());
    }

    /// A random deterministic Buchi acceptor agrees with a long unrolled
    /// simulation that evaluates the final cycle explicitly.
    #[test]
    fn deterministic_agrees_with_unrolled_simulation() {
        let mut rng = Xorshift64Star::new(321);
        for _ in 0..120 {
            let states = 2 + rng.next_range(5) as usize;
            let mut edges = vec![Vec::new(); states];
            for s in 0..states {
                for sym in 0..2usize {
                    edges[s].push((sym, rng.next_range(states as u64) as usize));
                }
            }
            let accepting: BTreeSet<usize> =
                (0..states).filter(|_| rng.next_range(2) == 1).collect();
            let acc = OmegaAcceptor {
                alphabet: vec!['a', 'b'],
                state_count: states,
                initial: 0,
                edges,
                acceptance: Acceptance::Buchi { accepting },
                deterministic: true,
            };
            let hl = rng.next_range(4) as usize;
            let cl = 1 + rng.next_range(4) as usize;
            let mk = |rng: &mut Xorshift64Star, n: usize| -> Vec<char> {
                (0..n).map(|_| if rng.next_range(2) == 0 { 'a' } else { 'b' }).collect()
            };
            let w = LassoWord::new(mk(&mut rng, hl), mk(&mut rng, cl)).unwrap();
            // Unrolling oracle: simulate 4 * (|head| + |cycle| * states) steps;
            // past |head| + |cycle| * states steps the run is inside its final
            // cycle, so states visited after that determine acceptance.
            let steps = 4 * (hl + cl * states);
            let settle = hl + cl * states;
            let mut state = acc.initial;
            let mut visited_late = Vec::new();
            let mut alive = true;
            for i in 0..steps {
                let sym = if *w.at(i) == 'a' { 0 } else { 1 };
                match acc.edges[state].iter().find(|(s, _)| *s == sym) {
                    Some(&(_, d)) => state = d,
                    None => {
                        alive = false;
                        break;
                    }
                }
                if i >= settle {
                    visited_late.push(state);
                }
            }
            let oracle = alive && visited_late.iter().any(|&s| acc.state_accepting(s));
            let got = lasso_membership(&acc, &w).unwrap();
            assert_eq!(got, oracle, "membership mismatch");
            // The nondeterministic path must agree with the deterministic one.
            let mut nondet = acc.clone();
            nondet.deterministic = false;
            assert_eq!(lasso_membership(&nondet, &w).unwrap(), got);
        }
    }
}
