//! Two-player quantitative graph games under discounted-sum cost: exact
//! value iteration with rational recovery of the optimal value, and
//! comparator-based satisficing reduced to safety/reachability games.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::automata::{Acceptance, OmegaAcceptor, ParseError, StateId};
use crate::comparator::{build_threshold_comparator, ComparatorParams, Relation, ThresholdValue};
use crate::exact::{best_rational_in_interval, pow_rational, ExactNumber, RationalRecovery};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("state {0} out of range")]
    BadState(StateId),
    #[error("state {0} has no outgoing edge")]
    DeadEnd(StateId),
    #[error("discount factor must be > 1")]
    BadDiscount,
    #[error("satisficing needs integer costs; found {0}")]
    NonIntegerCost(String),
    #[error("satisficing relation must be <= or <")]
    BadRelation,
    #[error("comparator construction failed: {0}")]
    Comparator(String),
    #[error("objective automaton must be a deterministic safety acceptor")]
    BadObjective,
    #[error("state {0} has no label usable by the objective automaton")]
    MissingLabel(StateId),
    #[error("exact value recovery failed: {0}")]
    RecoveryFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    /// Maximizer.
    P0,
    /// Minimizer.
    P1,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P0 => Player::P1,
            Player::P1 => Player::P0,
        }
    }
}

/// Directed game graph with rational edge costs; every state has at least
/// one successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantGame {
    pub owner: Vec<Player>,
    pub initial: StateId,
    /// edges[s] = (successor, cost).
    pub edges: Vec<Vec<(StateId, ExactNumber)>>,
    /// Optional state labels for temporal objectives.
    pub labels: Vec<Option<String>>,
}

impl QuantGame {
    pub fn new(
        owner: Vec<Player>,
        initial: StateId,
        edges: Vec<Vec<(StateId, ExactNumber)>>,
    ) -> Result<QuantGame, GameError> {
        let n = owner.len();
        if initial >= n {
            return Err(GameError::BadState(initial));
        }
        for (s, es) in edges.iter().enumerate() {
            if es.is_empty() {
                return Err(GameError::DeadEnd(s));
            }
            for (t, _) in es {
                if *t >= n {
                    return Err(GameError::BadState(*t));
                }
            }
        }
        let labels = vec![None; n];
        Ok(QuantGame { owner, initial, edges, labels })
    }

    pub fn state_count(&self) -> usize {
        self.owner.len()
    }

    /// Maximum absolute edge cost.
    pub fn cost_bound(&self) -> ExactNumber {
        self.edges
            .iter()
            .flatten()
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(ExactNumber::zero)
    }

    /// All costs as machine integers, if the game is integer-costed.
    pub fn integer_costs(&self) -> Result<Vec<Vec<(StateId, i64)>>, GameError> {
        self.edges
            .iter()
            .map(|es| {
                es.iter()
                    .map(|(t, c)| {
                        if !c.is_integer() {
                            return Err(GameError::NonIntegerCost(c.to_string()));
                        }
                        let v: BigInt = c.to_integer();
                        let v = i64::try_from(v).map_err(|_| GameError::NonIntegerCost(c.to_string()))?;
                        Ok((*t, v))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Exact value-iteration table: wt_0 = 0, and
/// wt_{k+1}(v) = opt over edges of cost + wt_k(w)/d, where opt is max for P0
/// states and min for P1 states. Values are kept as big-integer numerators
/// over the common denominator p^(k-1) * L, so a round is pure integer
/// arithmetic.
pub struct ValueIteration<'g> {
    game: &'g QuantGame,
    p: BigInt,
    q: BigInt,
    /// Current common denominator p^(k-1) * L for k >= 1 (L at k = 0,
    /// where L is the lcm of the cost denominators).
    denom: BigInt,
    numer: Vec<BigInt>,
    round: u64,
}

impl<'g> ValueIteration<'g> {
    pub fn new(game: &'g QuantGame, d: &ExactNumber) -> Result<Self, GameError> {
        if *d <= ExactNumber::one() {
            return Err(GameError::BadDiscount);
        }
        let mut scale = BigInt::one();
        for (_, c) in game.edges.iter().flatten() {
            scale = scale.lcm(c.denom());
        }
        Ok(ValueIteration {
            game,
            p: d.numer().clone(),
            q: d.denom().clone(),
            denom: scale,
            numer: vec![BigInt::zero(); game.state_count()],
            round: 0,
        })
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Advances one round of the recurrence.
    pub fn step(&mut self) {
        let next_denom = if self.round == 0 { self.denom.clone() } else { &self.denom * &self.p };
        // cost contribution at the new denominator: cost * next_denom is an
        // integer because scale | next_denom.
        let mut next = Vec::with_capacity(self.numer.len());
        for (s, es) in self.game.edges.iter().enumerate() {
            let mut best: Option<BigInt> = None;
            for (t, c) in es {
                let cost_num = c.numer() * (&next_denom / c.denom());
                let future = if self.round == 0 {
                    BigInt::zero()
                } else {
                    &self.q * &self.numer[*t]
                };
                let cand = cost_num + future;
                let better = match &best {
                    None => true,
                    Some(b) => match self.game.owner[s] {
                        Player::P0 => cand > *b,
                        Player::P1 => cand < *b,
                    },
                };
                if better {
                    best = Some(cand);
                }
            }
            next.push(best.expect("no dead ends"));
        }
        self.numer = next;
        self.denom = next_denom;
        self.round += 1;
    }

    pub fn value(&self, s: StateId) -> ExactNumber {
        BigRational::new(self.numer[s].clone(), self.denom.clone())
    }

    pub fn values(&self) -> Vec<ExactNumber> {
        (0..self.numer.len()).map(|s| self.value(s)).collect()
    }

    /// The candidate value of one edge in the *next* round: cost +
    /// current_value(successor) / d.
    pub fn edge_candidate(&self, s: StateId, edge: usize) -> ExactNumber {
        let (t, c) = &self.game.edges[s][edge];
        let d = BigRational::new(self.p.clone(), self.q.clone());
        c + self.value(*t) / d
    }
}

/// Exact wt_rounds for every state.
pub fn value_iteration(
    game: &QuantGame,
    d: &ExactNumber,
    rounds: u64,
) -> Result<Vec<ExactNumber>, GameError> {
    let mut vi = ValueIteration::new(game, d)?;
    for _ in 0..rounds {
        vi.step();
    }
    Ok(vi.values())
}

/// Denominator and iteration bounds for exact optimal-value recovery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationBounds {
    /// The optimal value is a rational with denominator at most this:
    /// (p^|V| - q^|V|) * p^|V|.
    pub bound_w: BigInt,
    /// The minimal nonzero difference between candidate optimal values has
    /// denominator at most this: (p^(|V|^2) - q^(|V|^2)) * p^(|V|^2).
    pub bound_diff: BigInt,
    /// Least k with 2*mu / ((d-1) * d^(k-1)) < 1 / bound_diff.
    pub k_star: u64,
}

pub fn iteration_and_denominator_bounds(
    game: &QuantGame,
    d: &ExactNumber,
) -> Result<IterationBounds, GameError> {
    if *d <= ExactNumber::one() {
        return Err(GameError::BadDiscount);
    }
    let n = game.state_count() as u32;
    let p = d.numer();
    let q = d.denom();
    let bound_w = (p.pow(n) - q.pow(n)) * p.pow(n);
    let bound_diff = (p.pow(n * n) - q.pow(n * n)) * p.pow(n * n);
    let mu = game.cost_bound();
    let k_star = least_round_with_width_below(
        &mu,
        d,
        &BigRational::new(BigInt::one(), bound_diff.clone()),
    );
    Ok(IterationBounds { bound_w, bound_diff, k_star })
}

/// Least k >= 1 with 2*mu / ((d-1) * d^(k-1)) < threshold.
fn least_round_with_width_below(mu: &ExactNumber, d: &ExactNumber, threshold: &ExactNumber) -> u64 {
    let mut k = 1u64;
    let mut dk1 = ExactNumber::one(); // d^(k-1)
    loop {
        let width = BigRational::from_integer(BigInt::from(2)) * mu
            / ((d - ExactNumber::one()) * &dk1);
        if width < *threshold {
            return k;
        }
        k += 1;
        dk1 *= d;
    }
}

/// Interval half-width after k rounds: mu / ((d-1) * d^(k-1)).
pub fn interval_half_width(mu: &ExactNumber, d: &ExactNumber, k: u64) -> ExactNumber {
    mu / ((d - ExactNumber::one()) * pow_rational(d, (k - 1) as u32))
}

/// Exact optimal value of the game under memoryless strategies: runs value
/// iteration until the interval around wt_k isolates a unique rational with
/// denominator at most bound_w, then recovers it.
///
/// The round count is the spec bound k_star, raised if necessary so the
/// interval is also narrower than 1/bound_w^2; rationals with denominator
/// <= bound_w are spaced at least that far apart, so recovery cannot be
/// ambiguous.
pub fn optimal_value_exact(game: &QuantGame, d: &ExactNumber) -> Result<ExactNumber, GameError> {
    let bounds = iteration_and_denominator_bounds(game, d)?;
    let mu = game.cost_bound();
    let spacing = BigRational::new(BigInt::one(), &bounds.bound_w * &bounds.bound_w);
    let k_unique = least_round_with_width_below(&mu, d, &spacing);
    let k = bounds.k_star.max(k_unique);
    let mut vi = ValueIteration::new(game, d)?;
    for _ in 0..k {
        vi.step();
    }
    let center = vi.value(game.initial);
    let half = interval_half_width(&mu, d, k);
    let lo = &center - &half;
    let hi = &center + &half;
    match best_rational_in_interval(&lo, &hi, &bounds.bound_w)
        .map_err(|e| GameError::RecoveryFailed(e.to_string()))?
    {
        RationalRecovery::Unique(v) => Ok(v),
        RationalRecovery::Ambiguous(v) => Err(GameError::RecoveryFailed(format!(
            "interval [{lo}, {hi}] holds several candidates, e.g. {v}"
        ))),
        RationalRecovery::None => Err(GameError::RecoveryFailed(format!(
            "interval [{lo}, {hi}] holds no candidate value"
        ))),
    }
}

/// Exact optimum of a one-player discounted game by policy iteration: each
/// policy induces a functional graph whose values follow from the closed
/// form on its cycles; greedy switching strictly improves until optimal.
pub fn one_player_optimal_values(
    edges: &[Vec<(StateId, ExactNumber)>],
    d: &ExactNumber,
    maximize: bool,
) -> Vec<ExactNumber> {
    let n = edges.len();
    let mut policy: Vec<usize> = vec![0; n];
    loop {
        let values = evaluate_policy(edges, &policy, d);
        let mut changed = false;
        for s in 0..n {
            let mut best_idx = policy[s];
            let mut best_val = {
                let (t, c) = &edges[s][policy[s]];
                c + &values[*t] / d
            };
            for (i, (t, c)) in edges[s].iter().enumerate() {
                let cand = c + &values[*t] / d;
                let better = if maximize { cand > best_val } else { cand < best_val };
                if better || (cand == best_val && i < best_idx) {
                    best_idx = i;
                    best_val = cand;
                }
            }
            if best_idx != policy[s] {
                let current = &values[s];
                let strictly = if maximize { best_val > *current } else { best_val < *current };
                if strictly {
                    policy[s] = best_idx;
                    changed = true;
                }
            }
        }
        if !changed {
            return values;
        }
    }
}

fn evaluate_policy(
    edges: &[Vec<(StateId, ExactNumber)>],
    policy: &[usize],
    d: &ExactNumber,
) -> Vec<ExactNumber> {
    let n = edges.len();
    let succ: Vec<StateId> = (0..n).map(|s| edges[s][policy[s]].0).collect();
    let cost: Vec<&ExactNumber> = (0..n).map(|s| &edges[s][policy[s]].1).collect();
    let mut value: Vec<Option<ExactNumber>> = vec![None; n];
    for start in 0..n {
        if value[start].is_some() {
            continue;
        }
        // Walk the functional graph until a known value or a repeat.
        let mut path = Vec::new();
        let mut on_path: HashMap<usize, usize> = HashMap::new();
        let mut cur = start;
        while value[cur].is_none() && !on_path.contains_key(&cur) {
            on_path.insert(cur, path.len());
            path.push(cur);
            cur = succ[cur];
        }
        if value[cur].is_none() {
            // Found a fresh cycle starting at position on_path[&cur].
            let cstart = on_path[&cur];
            let cycle = &path[cstart..];
            let len = cycle.len() as u32;
            // DS of one period, then the geometric closure.
            let mut period = ExactNumber::zero();
            for (i, &s) in cycle.iter().enumerate() {
                period += cost[s] / pow_rational(d, i as u32);
            }
            let dl = pow_rational(d, len);
            let mut v = period * &dl / (&dl - ExactNumber::one());
            // v is the value at cycle[0]; walking forward,
            // value(succ) = (value(s) - cost(s)) * d.
            value[cycle[0]] = Some(v.clone());
            for i in 0..cycle.len() - 1 {
                let s = cycle[i];
                v = (v - cost[s]) * d;
                value[cycle[i + 1]] = Some(v.clone());
            }
        }
        // Unwind the tree part back from `cur`.
        let known_upto = on_path.get(&cur).copied().unwrap_or(path.len());
        for i in (0..known_upto.min(path.len())).rev() {
            let s = path[i];
            if value[s].is_none() {
                let v = cost[s] + value[succ[s]].as_ref().unwrap() / d;
                value[s] = Some(v);
            }
        }
    }
    value.into_iter().map(|v| v.unwrap()).collect()
}

/// Pure arena (costs abstracted away) for attractor computations.
#[derive(Debug, Clone)]
pub struct Arena {
    pub owner: Vec<Player>,
    pub succ: Vec<Vec<StateId>>,
}

#[derive(Debug, Clone)]
pub enum ArenaObjective {
    /// Protagonist wins a play iff it visits a target state.
    Reach { protagonist: Player, target: Vec<bool> },
    /// Protagonist wins a play iff it never visits a bad state.
    Avoid { protagonist: Player, bad: Vec<bool> },
    /// Protagonist wins a play iff the block it settles in is accepting.
    Weak {
        protagonist: Player,
        block_of: Vec<usize>,
        block_accepting: Vec<bool>,
        order: BTreeSet<(usize, usize)>,
    },
}

#[derive(Debug, Clone)]
pub struct GameSolution {
    pub winner: Player,
    /// States from which `winner` wins.
    pub winning_region: Vec<bool>,
    /// Positional strategy for the winner on its region.
    pub strategy: HashMap<StateId, StateId>,
}

/// Classical attractor of `player` towards `target` (within the whole
/// arena). Returns the attractor set and the rank-decreasing strategy for
/// `player` on it.
fn attractor(
    arena: &Arena,
    player: Player,
    target: &[bool],
) -> (Vec<bool>, HashMap<StateId, StateId>) {
    let n = arena.owner.len();
    let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (s, ts) in arena.succ.iter().enumerate() {
        for &t in ts {
            if !pred[t].contains(&s) {
                pred[t].push(s);
            }
        }
    }
    let mut inside: Vec<bool> = target.to_vec();
    let mut strategy = HashMap::new();
    let mut escape_count: Vec<usize> = arena.succ.iter().map(|ts| ts.len()).collect();
    let mut queue: Vec<StateId> = (0..n).filter(|&s| inside[s]).collect();
    let mut qi = 0;
    while qi < queue.len() {
        let t = queue[qi];
        qi += 1;
        for &s in &pred[t] {
            if inside[s] {
                continue;
            }
            if arena.owner[s] == player {
                inside[s] = true;
                strategy.insert(s, t);
                queue.push(s);
            } else {
                escape_count[s] -= arena.succ[s].iter().filter(|&&x| x == t).count();
                if escape_count[s] == 0 {
                    inside[s] = true;
                    queue.push(s);
                }
            }
        }
    }
    (inside, strategy)
}

/// Any successor staying outside `region` for each state outside it; the
/// complement of an attractor is a trap for the attracting player.
fn trap_strategy(arena: &Arena, region: &[bool], player: Player) -> HashMap<StateId, StateId> {
    let mut strategy = HashMap::new();
    for s in 0..arena.owner.len() {
        if region[s] || arena.owner[s] != player {
            continue;
        }
        if let Some(&t) = arena.succ[s].iter().find(|&&t| !region[t]) {
            strategy.insert(s, t);
        }
    }
    strategy
}

/// Solves safety / reachability / weak objectives by attractor fixpoints;
/// weak objectives are decided block by block along the partial order.
pub fn solve_attractor(arena: &Arena, objective: &ArenaObjective, initial: StateId) -> GameSolution {
    let n = arena.owner.len();
    let (prot, prot_wins, prot_strat, opp_strat) = match objective {
        ArenaObjective::Reach { protagonist, target } => {
            let (attr, strat) = attractor(arena, *protagonist, target);
            let opp = trap_strategy(arena, &attr, protagonist.opponent());
            (*protagonist, attr, strat, opp)
        }
        ArenaObjective::Avoid { protagonist, bad } => {
            let (attr, opp_strat) = attractor(arena, protagonist.opponent(), bad);
            let wins: Vec<bool> = (0..n).map(|s| !attr[s]).collect();
            let strat = trap_strategy(arena, &attr, *protagonist);
            (*protagonist, wins, strat, opp_strat)
        }
        ArenaObjective::Weak { protagonist, block_of, block_accepting, order } => {
            solve_weak(arena, *protagonist, block_of, block_accepting, order)
        }
    };
    if prot_wins[initial] {
        GameSolution { winner: prot, winning_region: prot_wins, strategy: prot_strat }
    } else {
        let region = prot_wins.iter().map(|w| !w).collect();
        GameSolution { winner: prot.opponent(), winning_region: region, strategy: opp_strat }
    }
}

type WeakOutcome = (Player, Vec<bool>, HashMap<StateId, StateId>, HashMap<StateId, StateId>);

fn solve_weak(
    arena: &Arena,
    protagonist: Player,
    block_of: &[usize],
    block_accepting: &[bool],
    order: &BTreeSet<(usize, usize)>,
) -> WeakOutcome {
    let n = arena.owner.len();
    let nblocks = block_accepting.len();
    // Topological order of blocks, lowest first: every edge either stays in
    // its block or descends, so lower blocks are already decided when a
    // block is processed.
    let mut indeg = vec![0usize; nblocks];
    for &(_, hi) in order {
        indeg[hi] += 1;
    }
    let mut topo: Vec<usize> = (0..nblocks).filter(|&b| indeg[b] == 0).collect();
    let mut i = 0;
    while i < topo.len() {
        let b = topo[i];
        i += 1;
        for &(lo, hi) in order {
            if lo == b {
                indeg[hi] -= 1;
                if indeg[hi] == 0 {
                    topo.push(hi);
                }
            }
        }
    }
    debug_assert_eq!(topo.len(), nblocks, "block order must be acyclic");

    let mut prot_wins = vec![false; n];
    let mut decided = vec![false; n];
    let mut prot_strat: HashMap<StateId, StateId> = HashMap::new();
    let mut opp_strat: HashMap<StateId, StateId> = HashMap::new();
    for &b in &topo {
        let members: Vec<StateId> = (0..n).filter(|&s| block_of[s] == b).collect();
        if members.is_empty() {
            continue;
        }
        // Subarena on the block with two virtual absorbing nodes: GOOD
        // (exits into already-decided protagonist wins) and BAD (exits into
        // decided opponent wins).
        let m = members.len();
        let good = m;
        let bad = m + 1;
        let local_of: HashMap<StateId, usize> =
            members.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); m + 2];
        let mut owner: Vec<Player> = members.iter().map(|&s| arena.owner[s]).collect();
        owner.push(protagonist);
        owner.push(protagonist);
        succ[good].push(good);
        succ[bad].push(bad);
        for (i, &s) in members.iter().enumerate() {
            for &t in &arena.succ[s] {
                if let Some(&j) = local_of.get(&t) {
                    succ[i].push(j);
                } else {
                    debug_assert!(decided[t], "exits go to already-processed blocks");
                    succ[i].push(if prot_wins[t] { good } else { bad });
                }
            }
        }
        let sub = Arena { owner, succ };
        let accepting = block_accepting[b];
        // Accepting block: protagonist wins by staying in the block forever
        // or escaping into GOOD, i.e. by avoiding BAD. Rejecting block:
        // protagonist must reach GOOD.
        let mut target = vec![false; m + 2];
        let (wins_local, strat_local, opp_local) = if accepting {
            target[bad] = true;
            let (attr, opp_s) = attractor(&sub, protagonist.opponent(), &target);
            let wins: Vec<bool> = (0..m).map(|i| !attr[i]).collect();
            let prot_s = trap_strategy(&sub, &attr, protagonist);
            (wins, prot_s, opp_s)
        } else {
            target[good] = true;
            let (attr, prot_s) = attractor(&sub, protagonist, &target);
            let wins: Vec<bool> = (0..m).map(|i| attr[i]).collect();
            let opp_s = trap_strategy(&sub, &attr, protagonist.opponent());
            (wins, prot_s, opp_s)
        };
        for (i, &s) in members.iter().enumerate() {
            decided[s] = true;
            prot_wins[s] = wins_local[i];
        }
        for (i, &s) in members.iter().enumerate() {
            let lift = |j: usize| -> StateId {
                if j < m {
                    return members[j];
                }
                // Virtual exit: pick a concrete decided successor of s with
                // the matching outcome.
                let want = j == good;
                *arena.succ[s]
                    .iter()
                    .find(|&&t| !local_of.contains_key(&t) && prot_wins[t] == want)
                    .expect("strategy exit has a concrete decided successor")
            };
            if let Some(&j) = strat_local.get(&i) {
                prot_strat.insert(s, lift(j));
            }
            if let Some(&j) = opp_local.get(&i) {
                opp_strat.insert(s, lift(j));
            }
        }
    }
    (protagonist, prot_wins, prot_strat, opp_strat)
}

/// Synchronized product of a game with a deterministic comparator or
/// objective automaton; states pair a game state with an automaton state.
#[derive(Debug, Clone)]
pub struct ProductGame {
    pub arena: Arena,
    /// (game state, automaton state) per product state.
    pub tags: Vec<(StateId, StateId)>,
    pub initial: StateId,
}

#[derive(Debug, Clone)]
pub struct SatisficeOutcome {
    pub p1_wins: bool,
    pub solution: GameSolution,
    pub product: ProductGame,
}

fn comparator_step(
    comp: &OmegaAcceptor<i64>,
    sym_index: &HashMap<i64, usize>,
    state: StateId,
    cost: i64,
) -> StateId {
    let sym = sym_index[&cost];
    comp.edges[state]
        .iter()
        .find(|(s, _)| *s == sym)
        .map(|&(_, d)| d)
        .expect("comparator is complete")
}

/// Does the minimizer have a strategy keeping the discounted cost R v?
/// Builds the threshold comparator, takes the synchronized product, and
/// solves the resulting safety (<=) or reachability (<) game by attractor.
pub fn satisfice(
    game: &QuantGame,
    d: i64,
    threshold: &ThresholdValue,
    relation: Relation,
) -> Result<SatisficeOutcome, GameError> {
    if !matches!(relation, Relation::Le | Relation::Lt) {
        return Err(GameError::BadRelation);
    }
    let costs = game.integer_costs()?;
    let mu = costs
        .iter()
        .flatten()
        .map(|(_, c)| c.abs())
        .max()
        .unwrap_or(0)
        .max(threshold.digits().bound())
        .max(1);
    let comp = build_threshold_comparator(&ComparatorParams {
        mu,
        d,
        relation,
        threshold: threshold.clone(),
    })
    .map_err(|e| GameError::Comparator(e.to_string()))?;
    let sym_index: HashMap<i64, usize> =
        comp.alphabet.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Reachable product.
    let mut ids: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut tags: Vec<(StateId, StateId)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let root = (game.initial, comp.initial);
    ids.insert(root, 0);
    tags.push(root);
    succ.push(Vec::new());
    let mut i = 0;
    while i < tags.len() {
        let (gs, cs) = tags[i];
        let mut out = Vec::new();
        for (t, cost) in &costs[gs] {
            let cn = comparator_step(&comp, &sym_index, cs, *cost);
            let key = (*t, cn);
            let id = *ids.entry(key).or_insert_with(|| {
                tags.push(key);
                succ.push(Vec::new());
                tags.len() - 1
            });
            out.push(id);
        }
        succ[i] = out;
        i += 1;
    }
    let owner: Vec<Player> = tags.iter().map(|&(gs, _)| game.owner[gs]).collect();
    let arena = Arena { owner, succ };
    let objective = match relation {
        Relation::Le => ArenaObjective::Avoid {
            protagonist: Player::P1,
            bad: tags.iter().map(|&(_, cs)| !comp.state_accepting(cs)).collect(),
        },
        Relation::Lt => ArenaObjective::Reach {
            protagonist: Player::P1,
            target: tags.iter().map(|&(_, cs)| comp.state_accepting(cs)).collect(),
        },
        _ => unreachable!(),
    };
    let solution = solve_attractor(&arena, &objective, 0);
    Ok(SatisficeOutcome {
        p1_wins: solution.winner == Player::P1,
        solution,
        product: ProductGame { arena, tags, initial: 0 },
    })
}

/// Satisficing under an additional temporal goal: a deterministic safety
/// acceptor over state labels must also accept the play. The objective
/// automaton reads the label of each state as it is entered, starting with
/// the initial state's label.
pub fn with_safety_objective(
    game: &QuantGame,
    d: i64,
    threshold: &ThresholdValue,
    relation: Relation,
    objective: &OmegaAcceptor<String>,
    labels: &[String],
) -> Result<SatisficeOutcome, GameError> {
    if !matches!(relation, Relation::Le | Relation::Lt) {
        return Err(GameError::BadRelation);
    }
    if !objective.deterministic || !matches!(objective.acceptance, Acceptance::Safety { .. }) {
        return Err(GameError::BadObjective);
    }
    let mut objective = objective.clone();
    objective.complete_with_sink();
    let costs = game.integer_costs()?;
    if labels.len() != game.state_count() {
        return Err(GameError::MissingLabel(labels.len()));
    }
    let label_sym: Vec<usize> = labels
        .iter()
        .enumerate()
        .map(|(s, l)| objective.symbol_index(l).ok_or(GameError::MissingLabel(s)))
        .collect::<Result<_, _>>()?;
    let obj_step = |o: StateId, s: StateId| -> StateId {
        objective.edges[o]
            .iter()
            .find(|(sym, _)| *sym == label_sym[s])
            .map(|&(_, d)| d)
            .expect("objective completed")
    };
    let mu = costs
        .iter()
        .flatten()
        .map(|(_, c)| c.abs())
        .max()
        .unwrap_or(0)
        .max(threshold.digits().bound())
        .max(1);
    let comp = build_threshold_comparator(&ComparatorParams {
        mu,
        d,
        relation,
        threshold: threshold.clone(),
    })
    .map_err(|e| GameError::Comparator(e.to_string()))?;
    let sym_index: HashMap<i64, usize> =
        comp.alphabet.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Product over (game, comparator, objective).
    let mut ids: HashMap<(StateId, StateId, StateId), usize> = HashMap::new();
    let mut trip: Vec<(StateId, StateId, StateId)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let o0 = obj_step(objective.initial, game.initial);
    let root = (game.initial, comp.initial, o0);
    ids.insert(root, 0);
    trip.push(root);
    succ.push(Vec::new());
    let mut i = 0;
    while i < trip.len() {
        let (gs, cs, os) = trip[i];
        let mut out = Vec::new();
        for (t, cost) in &costs[gs] {
            let cn = comparator_step(&comp, &sym_index, cs, *cost);
            let on = obj_step(os, *t);
            let key = (*t, cn, on);
            let id = *ids.entry(key).or_insert_with(|| {
                trip.push(key);
                succ.push(Vec::new());
                trip.len() - 1
            });
            out.push(id);
        }
        succ[i] = out;
        i += 1;
    }
    let owner: Vec<Player> = trip.iter().map(|&(gs, _, _)| game.owner[gs]).collect();
    let arena = Arena { owner, succ };
    let objective_arena = match relation {
        Relation::Le => ArenaObjective::Avoid {
            protagonist: Player::P1,
            bad: trip
                .iter()
                .map(|&(_, cs, os)| !comp.state_accepting(cs) || !objective.state_accepting(os))
                .collect(),
        },
        Relation::Lt => {
            // Co-safety comparator and safety temporal goal: a weak game
            // with four blocks, the accepting one being (goal alive,
            // comparator sink reached).
            let block_of: Vec<usize> = trip
                .iter()
                .map(|&(_, cs, os)| {
                    let got = comp.state_accepting(cs);
                    let alive = objective.state_accepting(os);
                    match (alive, got) {
                        (true, false) => 3,
                        (true, true) => 2,
                        (false, false) => 1,
                        (false, true) => 0,
                    }
                })
                .collect();
            let mut order = BTreeSet::new();
            order.insert((2, 3));
            order.insert((1, 3));
            order.insert((0, 2));
            order.insert((0, 1));
            ArenaObjective::Weak {
                protagonist: Player::P1,
                block_of,
                block_accepting: vec![false, false, true, false],
                order,
            }
        }
        _ => unreachable!(),
    };
    let solution = solve_attractor(&arena, &objective_arena, 0);
    let tags = trip.iter().map(|&(gs, cs, _)| (gs, cs)).collect();
    Ok(SatisficeOutcome {
        p1_wins: solution.winner == Player::P1,
        solution,
        product: ProductGame { arena, tags, initial: 0 },
    })
}

/// `.game` text format: `game v1`, `states N`, `init I`,
/// `owner S 0|1` per state, optional `label S name`, and
/// `edge SRC DST COST` with integer or `p/q` costs.
pub fn parse_game(text: &str) -> Result<QuantGame, ParseError> {
    let err = |line: usize, m: &str| ParseError { line, message: m.to_string() };
    let mut states: Option<usize> = None;
    let mut init: Option<usize> = None;
    let mut owner: Vec<Option<Player>> = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut edges: Vec<Vec<(StateId, ExactNumber)>> = Vec::new();
    let mut header = false;
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        match head {
            "game" => {
                if rest != ["v1"] {
                    return Err(err(ln, "expected header `game v1`"));
                }
                header = true;
            }
            "states" => {
                let n: usize =
                    rest.first().and_then(|v| v.parse().ok()).ok_or_else(|| err(ln, "bad states"))?;
                states = Some(n);
                owner = vec![None; n];
                labels = vec![None; n];
                edges = vec![Vec::new(); n];
            }
            "init" => {
                init = Some(
                    rest.first().and_then(|v| v.parse().ok()).ok_or_else(|| err(ln, "bad init"))?,
                );
            }
            "owner" => {
                if rest.len() != 2 {
                    return Err(err(ln, "owner needs STATE 0|1"));
                }
                let s: usize = rest[0].parse().map_err(|_| err(ln, "bad state"))?;
                if s >= owner.len() {
                    return Err(err(ln, "owner state out of range"));
                }
                owner[s] = Some(match rest[1] {
                    "0" => Player::P0,
                    "1" => Player::P1,
                    _ => return Err(err(ln, "owner must be 0 or 1")),
                });
            }
            "label" => {
                if rest.len() < 2 {
                    return Err(err(ln, "label needs STATE NAME"));
                }
                let s: usize = rest[0].parse().map_err(|_| err(ln, "bad state"))?;
                if s >= labels.len() {
                    return Err(err(ln, "label state out of range"));
                }
                labels[s] = Some(rest[1..].join(","));
            }
            "edge" => {
                if rest.len() != 3 {
                    return Err(err(ln, "edge needs SRC DST COST"));
                }
                let s: usize = rest[0].parse().map_err(|_| err(ln, "bad source"))?;
                let t: usize = rest[1].parse().map_err(|_| err(ln, "bad destination"))?;
                let c = crate::exact::parse_exact(rest[2]).ok_or_else(|| err(ln, "bad cost"))?;
                if s >= edges.len() {
                    return Err(err(ln, "edge source out of range"));
                }
                edges[s].push((t, c));
            }
            other => return Err(err(ln, &format!("unknown directive `{other}`"))),
        }
    }
    if !header {
        return Err(err(1, "missing header `game v1`"));
    }
    let n = states.ok_or_else(|| err(1, "missing `states`"))?;
    let init = init.ok_or_else(|| err(1, "missing `init`"))?;
    let owner: Vec<Player> = owner
        .into_iter()
        .enumerate()
        .map(|(s, o)| o.ok_or_else(|| err(1, &format!("state {s} has no owner"))))
        .collect::<Result<_, _>>()?;
    let mut game = QuantGame::new(owner, init, edges)
        .map_err(|e| err(1, &e.to_string()))?;
    game.labels = labels;
    let _ = n;
    Ok(game)
}

pub fn serialize_game(game: &QuantGame) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    s.push_str("game v1\n");
    let _ = writeln!(s, "states {}", game.state_count());
    let _ = writeln!(s, "init {}", game.initial);
    for (q, o) in game.owner.iter().enumerate() {
        let _ = writeln!(s, "owner {} {}", q, if *o == Player::P0 { 0 } else { 1 });
    }
    for (q, l) in game.labels.iter().enumerate() {
        if let Some(l) = l {
            let _ = writeln!(s, "label {} {}", q, l);
        }
    }
    for (q, es) in game.edges.iter().enumerate() {
        for (t, c) in es {
            let cost = if c.is_integer() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) };
            let _ = writeln!(s, "edge {} {} {}", q, t, cost);
        }
    }
    s
}
