//! Emptiness via SCC decomposition over a lazily expanded graph.
//!
//! The search runs an iterative Tarjan pass and stops as soon as an SCC
//! satisfying the acceptance condition completes, so exploration never
//! materializes states that are not needed to reach a verdict.

use super::{Acceptance, AutomatonError, OmegaAcceptor};
use crate::automata::lasso_membership;
use crate::lasso::LassoWord;
use std::hash::Hash;

/// How an SCC qualifies as accepting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SccCondition {
    /// Every state on the cycle accepting: right for safety, co-safety and
    /// weak automata, whose SCCs are uniformly accepting or rejecting.
    AllAccepting,
    /// Some state on the cycle accepting: Buchi semantics.
    AnyAccepting,
}

/// An accepting lasso through a lazily expanded graph; entries are
/// (source node, edge tag) pairs in traversal order.
#[derive(Debug, Clone)]
pub(crate) struct FoundLasso {
    pub head: Vec<(usize, usize)>,
    pub cycle: Vec<(usize, usize)>,
}

/// Tarjan over the graph spanned by `succs` from `init`. Nodes are caller
/// interned dense indices; `succs` yields (edge tag, successor) pairs.
pub(crate) fn search_accepting_lasso(
    init: usize,
    mut succs: impl FnMut(usize) -> Vec<(usize, usize)>,
    accepting: impl Fn(usize) -> bool,
    cond: SccCondition,
) -> Option<FoundLasso> {
    struct Frame {
        node: usize,
        next_edge: usize,
    }
    let mut adj: Vec<Option<Vec<(usize, usize)>>> = Vec::new();
    let mut index: Vec<Option<usize>> = Vec::new();
    let mut low: Vec<usize> = Vec::new();
    let mut on_stack: Vec<bool> = Vec::new();
    let mut parent: Vec<Option<(usize, usize)>> = Vec::new();
    let mut scc_stack: Vec<usize> = Vec::new();
    let mut stack: Vec<Frame> = Vec::new();
    let mut next_index = 0usize;

    let ensure = |v: usize,
                  adj: &mut Vec<Option<Vec<(usize, usize)>>>,
                  index: &mut Vec<Option<usize>>,
                  low: &mut Vec<usize>,
                  on_stack: &mut Vec<bool>,
                  parent: &mut Vec<Option<(usize, usize)>>| {
        if v >= index.len() {
            adj.resize(v + 1, None);
            index.resize(v + 1, None);
            low.resize(v + 1, 0);
            on_stack.resize(v + 1, false);
            parent.resize(v + 1, None);
        }
    };

    ensure(init, &mut adj, &mut index, &mut low, &mut on_stack, &mut parent);
    index[init] = Some(next_index);
    low[init] = next_index;
    next_index += 1;
    on_stack[init] = true;
    scc_stack.push(init);
    adj[init] = Some(succs(init));
    stack.push(Frame { node: init, next_edge: 0 });

    while let Some(frame) = stack.last_mut() {
        let v = frame.node;
        let edges = adj[v].as_ref().unwrap();
        if frame.next_edge < edges.len() {
            let (tag, w) = edges[frame.next_edge];
            frame.next_edge += 1;
            ensure(w, &mut adj, &mut index, &mut low, &mut on_stack, &mut parent);
            if index[w].is_none() {
                index[w] = Some(next_index);
                low[w] = next_index;
                next_index += 1;
                on_stack[w] = true;
                scc_stack.push(w);
                parent[w] = Some((v, tag));
                adj[w] = Some(succs(w));
                stack.push(Frame { node: w, next_edge: 0 });
            } else if on_stack[w] {
                low[v] = low[v].min(index[w].unwrap());
            }
            continue;
        }
        // Node finished: maybe pop an SCC.
        let finished = stack.pop().unwrap().node;
        if let Some(&Frame { node: up, .. }) = stack.last() {
            low[up] = low[up].min(low[finished]);
        }
        if low[finished] == index[finished].unwrap() {
            let mut members = Vec::new();
            loop {
                let x = scc_stack.pop().unwrap();
                on_stack[x] = false;
                members.push(x);
                if x == finished {
                    break;
                }
            }
            if let Some(found) = check_scc(&members, &adj, &accepting, cond, &parent, init) {
                return Some(found);
            }
        }
    }
    None
}

fn check_scc(
    members: &[usize],
    adj: &[Option<Vec<(usize, usize)>>],
    accepting: &impl Fn(usize) -> bool,
    cond: SccCondition,
    parent: &[Option<(usize, usize)>],
    init: usize,
) -> Option<FoundLasso> {
    let member_set: std::collections::HashSet<usize> = members.iter().copied().collect();
    let internal_edge = members.iter().any(|&m| {
        adj[m]
            .as_ref()
            .unwrap()
            .iter()
            .any(|&(_, w)| member_set.contains(&w))
    });
    if !internal_edge {
        return None;
    }
    let target = match cond {
        SccCondition::AllAccepting => {
            if members.iter().all(|&m| accepting(m)) {
                // Any member that has an internal edge works as anchor.
                members
                    .iter()
                    .copied()
                    .find(|&m| adj[m].as_ref().unwrap().iter().any(|&(_, w)| member_set.contains(&w)))
            } else {
                None
            }
        }
        SccCondition::AnyAccepting => {
            // An accepting member on an internal cycle; any accepting member
            // works when the SCC is nontrivial, otherwise it must self-loop.
            members.iter().copied().find(|&m| {
                accepting(m)
                    && (members.len() > 1
                        || adj[m].as_ref().unwrap().iter().any(|&(_, w)| w == m))
            })
        }
    }?;

    // Head: DFS tree path from init to target.
    let mut head = Vec::new();
    let mut cur = target;
    while cur != init {
        let (p, tag) = parent[cur].expect("tree path to reached node");
        head.push((p, tag));
        cur = p;
    }
    head.reverse();

    // Cycle: BFS from target back to target inside the SCC.
    let mut pred: std::collections::HashMap<usize, (usize, usize)> = std::collections::HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(target);
    let mut closed = None;
    'bfs: while let Some(v) = queue.pop_front() {
        for &(tag, w) in adj[v].as_ref().unwrap() {
            if !member_set.contains(&w) {
                continue;
            }
            if w == target {
                closed = Some((v, tag));
                break 'bfs;
            }
            if let std::collections::hash_map::Entry::Vacant(e) = pred.entry(w) {
                e.insert((v, tag));
                queue.push_back(w);
            }
        }
    }
    let (last, last_tag) = closed.expect("SCC member with internal edge lies on a cycle");
    let mut cycle = vec![(last, last_tag)];
    let mut cur = last;
    while cur != target {
        let (p, tag) = pred[&cur];
        cycle.push((p, tag));
        cur = p;
    }
    cycle.reverse();
    Some(FoundLasso { head, cycle })
}

/// Returns an accepting lasso of the acceptor if its language is nonempty.
///
/// Supported acceptance classes: safety, co-safety and weak. The returned
/// witness is re-verified with `lasso_membership` before it is handed out.
pub fn nonemptiness<S: Clone + Eq + Hash>(
    acc: &OmegaAcceptor<S>,
) -> Result<Option<LassoWord<S>>, AutomatonError> {
    if matches!(acc.acceptance, Acceptance::Buchi { .. }) {
        return Err(AutomatonError::BuchiUnsupported);
    }
    let found = search_accepting_lasso(
        acc.initial,
        |v: usize| acc.edges[v].iter().map(|&(sym, dst)| (sym, dst)).collect(),
        |v: usize| acc.state_accepting(v),
        SccCondition::AllAccepting,
    );
    let Some(found) = found else { return Ok(None) };
    let head: Vec<S> = found.head.iter().map(|&(_, sym)| acc.alphabet[sym].clone()).collect();
    let cycle: Vec<S> = found.cycle.iter().map(|&(_, sym)| acc.alphabet[sym].clone()).collect();
    let word = LassoWord::new(head, cycle).expect("cycle nonempty");
    assert!(
        lasso_membership(acc, &word)?,
        "internal error: emptiness witness failed membership"
    );
    Ok(Some(word))
}

/// Do two acceptors agree on every lasso with bounded head and loop length?
/// Test oracle helper; assumes both share the first acceptor's alphabet.
pub fn bounded_lassos_agree<S: Clone + Eq + Hash>(
    a: &OmegaAcceptor<S>,
    b: &OmegaAcceptor<S>,
    max_head: usize,
    max_cycle: usize,
) -> bool {
    let symbols = a.alphabet.clone();
    for hl in 0..=max_head {
        for cl in 1..=max_cycle {
            let mut idx = vec![0usize; hl + cl];
            loop {
                let head: Vec<S> = idx[..hl].iter().map(|&i| symbols[i].clone()).collect();
                let cycle: Vec<S> = idx[hl..].iter().map(|&i| symbols[i].clone()).collect();
                let w = LassoWord::new(head, cycle).unwrap();
                let ma = lasso_membership(a, &w);
                let mb = lasso_membership(b, &w);
                match (ma, mb) {
                    (Ok(x), Ok(y)) if x == y => {}
                    _ => return false,
                }
                let mut pos = 0;
                loop {
                    if pos == idx.len() {
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] < symbols.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == idx.len() {
                    break;
                }
            }
        }
    }
    true
}

/// Brute-force oracle: enumerates all lassos with bounded head and loop
/// length and reports whether any is accepted. Test helper.
pub fn bounded_lasso_search<S: Clone + Eq + Hash>(
    acc: &OmegaAcceptor<S>,
    max_head: usize,
    max_cycle: usize,
) -> Result<Option<LassoWord<S>>, AutomatonError> {
    let symbols = acc.alphabet.clone();
    for hl in 0..=max_head {
        for cl in 1..=max_cycle {
            let mut idx = vec![0usize; hl + cl];
            loop {
                let head: Vec<S> = idx[..hl].iter().map(|&i| symbols[i].clone()).collect();
                let cycle: Vec<S> = idx[hl..].iter().map(|&i| symbols[i].clone()).collect();
                let w = LassoWord::new(head, cycle).unwrap();
                if lasso_membership(acc, &w)? {
                    return Ok(Some(w));
                }
                // Odometer increment.
                let mut pos = 0;
                loop {
                    if pos == idx.len() {
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] < symbols.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == idx.len() {
                    break;
                }
            }
        }
    }
    Ok(None)
}
