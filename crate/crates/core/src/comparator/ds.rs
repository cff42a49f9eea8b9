//! Discounted-sum comparator automata for integer discount factors.
//!
//! Everything here derives from one machine: the DFA that tracks the
//! recoverable gap of the consumed prefix, with two absorbing states once
//! the gap leaves the window in which both futures (crossing the threshold
//! and staying under it) are still possible.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::automata::{Acceptance, Dfa, OmegaAcceptor, StateId};
use crate::exact::{ds_lasso, integer, rational, ExactNumber};
use crate::lasso::LassoWeights;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComparatorError {
    #[error("discount factor must be an integer >= 2, got {0}")]
    NonIntegerDiscount(String),
    #[error("weight bound must be positive")]
    BadBound,
    #[error("threshold digit {0} exceeds the weight bound")]
    ThresholdDigitOutOfRange(i64),
    #[error("threshold value out of the representable range (-mu*d/(d-1), mu*d/(d-1))")]
    ThresholdOutOfRange,
    #[error("empty threshold loop")]
    EmptyThresholdLoop,
}

/// Comparison relation against the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
}

impl Relation {
    pub fn all() -> [Relation; 6] {
        [Relation::Le, Relation::Lt, Relation::Ge, Relation::Gt, Relation::Eq, Relation::Ne]
    }

    /// {<=, >=, =} give safety languages; {<, >, !=} co-safety.
    pub fn is_safety(self) -> bool {
        matches!(self, Relation::Le | Relation::Ge | Relation::Eq)
    }

    pub fn parse(s: &str) -> Option<Relation> {
        Some(match s {
            "le" | "<=" => Relation::Le,
            "lt" | "<" => Relation::Lt,
            "ge" | ">=" => Relation::Ge,
            "gt" | ">" => Relation::Gt,
            "eq" | "=" | "==" => Relation::Eq,
            "ne" | "!=" => Relation::Ne,
            _ => return None,
        })
    }

    pub fn holds(self, lhs: &ExactNumber, rhs: &ExactNumber) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ne => lhs != rhs,
        }
    }
}

/// Ultimately periodic digit representation of a threshold value:
/// value = DS(head . loop^omega, d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdValue {
    pub head: Vec<i64>,
    pub cycle: Vec<i64>,
}

impl ThresholdValue {
    pub fn zero() -> ThresholdValue {
        ThresholdValue { head: vec![], cycle: vec![0] }
    }

    pub fn digits(&self) -> LassoWeights {
        LassoWeights { head: self.head.clone(), cycle: self.cycle.clone() }
    }

    pub fn value(&self, d: &ExactNumber) -> Result<ExactNumber, ComparatorError> {
        ds_lasso(&self.digits(), d).map_err(|_| ComparatorError::EmptyThresholdLoop)
    }

    pub fn negate(&self) -> ThresholdValue {
        ThresholdValue {
            head: self.head.iter().map(|v| -v).collect(),
            cycle: self.cycle.iter().map(|v| -v).collect(),
        }
    }
}

/// Parameters of a DS comparator.
#[derive(Debug, Clone)]
pub struct ComparatorParams {
    pub mu: i64,
    pub d: i64,
    pub relation: Relation,
    pub threshold: ThresholdValue,
}

impl ComparatorParams {
    pub fn new(mu: i64, d: i64, relation: Relation) -> ComparatorParams {
        ComparatorParams { mu, d, relation, threshold: ThresholdValue::zero() }
    }

    fn check(&self) -> Result<(), ComparatorError> {
        if self.d < 2 {
            return Err(ComparatorError::NonIntegerDiscount(self.d.to_string()));
        }
        if self.mu < 1 {
            return Err(ComparatorError::BadBound);
        }
        Ok(())
    }
}

/// Semantic name of a gap-DFA state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapState {
    Gap(i64),
    Bad,
    VeryGood,
}

/// The gap DFA together with the meaning of each state index.
#[derive(Debug, Clone)]
pub struct GapDfa {
    pub dfa: Dfa,
    pub names: Vec<GapState>,
    pub bad: StateId,
    pub very_good: StateId,
}

fn alphabet_range(mu: i64) -> Vec<i64> {
    (-mu..=mu).collect()
}

/// DFA of the bad prefixes of the zero-threshold comparison language for <=:
/// states are the integer gap values in (floor(-T), floor(T)] for
/// T = mu/(d-1), plus absorbing `bad` and `veryGood`; the single accepting
/// state is `bad`.
pub fn build_gap_dfa(mu: i64, d: i64) -> Result<GapDfa, ComparatorError> {
    ComparatorParams::new(mu, d, Relation::Le).check()?;
    let t_floor = mu.div_euclid(d - 1);
    let neg_t_floor = (-mu).div_euclid(d - 1);
    let lo = neg_t_floor + 1;
    let hi = t_floor;
    let gaps: Vec<i64> = (lo..=hi).collect();
    let bad = gaps.len();
    let very_good = gaps.len() + 1;
    let count = gaps.len() + 2;
    let idx_of_gap = |g: i64| (g - lo) as usize;
    let symbols = alphabet_range(mu);
    let mut delta = vec![vec![0usize; symbols.len()]; count];
    for (si, &a) in symbols.iter().enumerate() {
        for &g in &gaps {
            let v = d * g + a;
            delta[idx_of_gap(g)][si] = if v > hi {
                bad
            } else if v <= neg_t_floor {
                very_good
            } else {
                idx_of_gap(v)
            };
        }
        delta[bad][si] = bad;
        delta[very_good][si] = very_good;
    }
    let mut accepting = vec![false; count];
    accepting[bad] = true;
    let mut names: Vec<GapState> = gaps.iter().map(|&g| GapState::Gap(g)).collect();
    names.push(GapState::Bad);
    names.push(GapState::VeryGood);
    Ok(GapDfa {
        dfa: Dfa {
            symbols,
            state_count: count,
            initial: idx_of_gap(0),
            delta,
            accepting,
        },
        names,
        bad,
        very_good,
    })
}

fn dfa_to_acceptor(dfa: &Dfa, acceptance: Acceptance) -> OmegaAcceptor<i64> {
    let edges = dfa
        .delta
        .iter()
        .map(|row| row.iter().enumerate().map(|(sym, &dst)| (sym, dst)).collect())
        .collect();
    OmegaAcceptor {
        alphabet: dfa.symbols.clone(),
        state_count: dfa.state_count,
        initial: dfa.initial,
        edges,
        acceptance,
        deterministic: true,
    }
}

/// Relabels every transition on symbol v to fire on -v instead.
fn negate_alphabet(acc: &mut OmegaAcceptor<i64>) {
    let neg_index: Vec<usize> = acc
        .alphabet
        .iter()
        .map(|&v| acc.alphabet.iter().position(|&w| w == -v).expect("symmetric alphabet"))
        .collect();
    for es in &mut acc.edges {
        for e in es.iter_mut() {
            e.0 = neg_index[e.0];
        }
    }
}

/// Deterministic single-sequence comparator: accepts a weight sequence A
/// over {-mu..mu} iff DS(A, d) R 0.
///
/// {<=, >} come straight from the gap DFA; {>=, <} from it with the alphabet
/// negated. {=, !=} track gaps over the symmetric window [-floor(T),
/// floor(T)]: an extension reaching discounted sum exactly 0 exists from gap
/// g iff |g| <= T, so the window may only exclude gaps strictly beyond T.
pub fn build_ds_comparator(params: &ComparatorParams) -> Result<OmegaAcceptor<i64>, ComparatorError> {
    params.check()?;
    let (mu, d) = (params.mu, params.d);
    match params.relation {
        Relation::Gt => {
            let g = build_gap_dfa(mu, d)?;
            Ok(dfa_to_acceptor(&g.dfa, Acceptance::CoSafety { accepting: BTreeSet::from([g.bad]) }))
        }
        Relation::Le => {
            let g = build_gap_dfa(mu, d)?;
            Ok(dfa_to_acceptor(&g.dfa, Acceptance::Safety { rejecting: BTreeSet::from([g.bad]) }))
        }
        Relation::Lt => {
            let mut acc = build_ds_comparator(&ComparatorParams::new(mu, d, Relation::Gt))?;
            negate_alphabet(&mut acc);
            Ok(acc)
        }
        Relation::Ge => {
            let mut acc = build_ds_comparator(&ComparatorParams::new(mu, d, Relation::Le))?;
            negate_alphabet(&mut acc);
            Ok(acc)
        }
        Relation::Eq | Relation::Ne => {
            let t_floor = mu.div_euclid(d - 1);
            let gaps: Vec<i64> = (-t_floor..=t_floor).collect();
            let sink = gaps.len();
            let count = gaps.len() + 1;
            let idx_of_gap = |g: i64| (g + t_floor) as usize;
            let symbols = alphabet_range(mu);
            let mut edges: Vec<Vec<(usize, StateId)>> = vec![Vec::new(); count];
            for (si, &a) in symbols.iter().enumerate() {
                for &g in &gaps {
                    let v = d * g + a;
                    let dst = if v.abs() <= t_floor { idx_of_gap(v) } else { sink };
                    edges[idx_of_gap(g)].push((si, dst));
                }
                edges[sink].push((si, sink));
            }
            let acceptance = if params.relation == Relation::Eq {
                Acceptance::Safety { rejecting: BTreeSet::from([sink]) }
            } else {
                Acceptance::CoSafety { accepting: BTreeSet::from([sink]) }
            };
            Ok(OmegaAcceptor {
                alphabet: symbols,
                state_count: count,
                initial: idx_of_gap(0),
                edges,
                acceptance,
                deterministic: true,
            })
        }
    }
}

fn floor_to_i64(x: &ExactNumber) -> i64 {
    x.floor().to_integer().to_i64().expect("threshold bounds fit machine integers")
}

fn ceil_to_i64(x: &ExactNumber) -> i64 {
    x.ceil().to_integer().to_i64().expect("threshold bounds fit machine integers")
}

/// Deterministic comparator with an ultimately periodic threshold value:
/// accepts A iff DS(A, d) R value(v).
///
/// States are pairs (p, i): digits v[0..i-1] have been consumed and p is the
/// integer gap of (prefix - consumed digits). On input a the machine moves
/// to (d*p + a - v[i], next(i)), where the index wraps from the last digit
/// back to the loop start, and overflow/underflow against the bounds of the
/// *target* index send the run to the absorbing sinks.
pub fn build_threshold_comparator(
    params: &ComparatorParams,
) -> Result<OmegaAcceptor<i64>, ComparatorError> {
    params.check()?;
    match params.relation {
        Relation::Ge | Relation::Lt => {
            // DS(A) >= v  iff  DS(-A) <= -v.
            let flipped = ComparatorParams {
                mu: params.mu,
                d: params.d,
                relation: if params.relation == Relation::Ge { Relation::Le } else { Relation::Gt },
                threshold: params.threshold.negate(),
            };
            let mut acc = build_threshold_comparator(&flipped)?;
            negate_alphabet(&mut acc);
            return Ok(acc);
        }
        _ => {}
    }
    let (mu, d) = (params.mu, params.d);
    let v = &params.threshold;
    if v.cycle.is_empty() {
        return Err(ComparatorError::EmptyThresholdLoop);
    }
    for &digit in v.head.iter().chain(v.cycle.iter()) {
        if digit.abs() > mu {
            return Err(ComparatorError::ThresholdDigitOutOfRange(digit));
        }
    }
    let dr = integer(d);
    let max_ds = rational(mu, 1) * &dr / (&dr - integer(1));
    let value = v.value(&dr)?;
    if value.abs() >= max_ds {
        return Err(ComparatorError::ThresholdOutOfRange);
    }

    let digits: Vec<i64> = v.head.iter().chain(v.cycle.iter()).copied().collect();
    let loop_start = v.head.len();
    let len = digits.len();
    let next_index = |i: usize| if i + 1 < len { i + 1 } else { loop_start };
    // Per-index bounds: U_i = DS(post(v,i))/d + mu/(d-1), L_i = U_i - 2mu/(d-1).
    let slack = rational(mu, 1) / (&dr - integer(1));
    let mut upper = Vec::with_capacity(len);
    let mut lower = Vec::with_capacity(len);
    for i in 0..len {
        let suffix = LassoWeights {
            head: digits[i..].to_vec(),
            cycle: v.cycle.clone(),
        };
        let post = ds_lasso(&suffix, &dr).expect("loop nonempty");
        let u = &post / &dr + &slack;
        let l = &post / &dr - &slack;
        upper.push(u);
        lower.push(l);
    }
    let eq_family = matches!(params.relation, Relation::Eq | Relation::Ne);
    // Interior gap window per index: (floor(L_i), floor(U_i)] for the <=
    // family, [ceil(L_i), floor(U_i)] for the = family (the gap L_i itself
    // still admits an extension meeting the threshold exactly).
    let lo_of = |i: usize| -> i64 {
        if eq_family {
            ceil_to_i64(&lower[i])
        } else {
            floor_to_i64(&lower[i]) + 1
        }
    };
    let hi_of = |i: usize| -> i64 { floor_to_i64(&upper[i]) };

    let mut index: std::collections::HashMap<(i64, usize), usize> = std::collections::HashMap::new();
    let mut states: Vec<(i64, usize)> = Vec::new();
    for (i, _) in digits.iter().enumerate() {
        for p in lo_of(i)..=hi_of(i) {
            index.insert((p, i), states.len());
            states.push((p, i));
        }
    }
    let sink_hi = states.len(); // gap escaped above: every extension stays above v
    let sink_lo = states.len() + 1; // gap escaped below: every extension stays at or below v
    let count = states.len() + 2;
    let symbols = alphabet_range(mu);
    let mut edges: Vec<Vec<(usize, StateId)>> = vec![Vec::new(); count];
    for (si, &a) in symbols.iter().enumerate() {
        for (id, &(p, i)) in states.iter().enumerate() {
            let pn = d * p + a - digits[i];
            let j = next_index(i);
            let dst = if pn > hi_of(j) {
                sink_hi
            } else if pn < lo_of(j) {
                sink_lo
            } else {
                index[&(pn, j)]
            };
            edges[id].push((si, dst));
        }
        edges[sink_hi].push((si, sink_hi));
        edges[sink_lo].push((si, sink_lo));
    }
    let initial = *index.get(&(0, 0)).expect("zero gap lies inside the initial window");
    let acceptance = match params.relation {
        Relation::Le => Acceptance::Safety { rejecting: BTreeSet::from([sink_hi]) },
        Relation::Gt => Acceptance::CoSafety { accepting: BTreeSet::from([sink_hi]) },
        Relation::Eq => Acceptance::Safety { rejecting: BTreeSet::from([sink_hi, sink_lo]) },
        Relation::Ne => Acceptance::CoSafety { accepting: BTreeSet::from([sink_hi, sink_lo]) },
        Relation::Ge | Relation::Lt => unreachable!("handled by negation above"),
    };
    Ok(OmegaAcceptor {
        alphabet: symbols,
        state_count: count,
        initial,
        edges,
        acceptance,
        deterministic: true,
    })
}

/// Nondeterministic Buchi comparator over the pair alphabet {0..mu}^2 that
/// accepts (A, B) iff DS(A, d) < DS(B, d), by guessing the base-d difference
/// sequence C and carry sequence X with A[i] + C[i] + X[i] = B[i] + d*X[i-1].
pub fn build_xc_comparator(mu: i64, d: i64) -> Result<OmegaAcceptor<(i64, i64)>, ComparatorError> {
    ComparatorParams::new(mu, d, Relation::Lt).check()?;
    let max_x = 1 + mu.div_euclid(d - 1); // floor(1 + mu/(d-1))
    let max_c = (mu * d).div_euclid(d - 1); // floor(mu*d/(d-1))
    let xs: Vec<i64> = (-max_x..=max_x).collect();
    let xn = xs.len();
    // Layout: 0 = start, then (x, bot) block, then (x, c) block.
    let start = 0usize;
    let bot_base = 1usize;
    let f_base = bot_base + xn;
    let idx_bot = |x: i64| bot_base + (x + max_x) as usize;
    let idx_f = |x: i64, c: i64| f_base + (x + max_x) as usize * (max_c + 1) as usize + c as usize;
    let count = f_base + xn * (max_c + 1) as usize;
    let mut alphabet = Vec::new();
    for a in 0..=mu {
        for b in 0..=mu {
            alphabet.push((a, b));
        }
    }
    let mut edges: Vec<Vec<(usize, StateId)>> = vec![Vec::new(); count];
    for (si, &(a, b)) in alphabet.iter().enumerate() {
        // From the start state: index-0 equation a + x + c = b.
        for &x in &xs {
            let c = b - a - x;
            if c == 0 {
                edges[start].push((si, idx_bot(x)));
            } else if c > 0 && c <= max_c {
                edges[start].push((si, idx_f(x, c)));
            }
        }
        // Later positions: a + x' + c' = b + d*x.
        for &x in &xs {
            for &xp in &xs {
                let c = b + d * x - a - xp;
                if c == 0 {
                    edges[idx_bot(x)].push((si, idx_bot(xp)));
                }
                // Within the accepting block any 0 <= c' < d works; the jump
                // out of the bottom block needs c' > 0.
                if c >= 0 && c < d && c <= max_c {
                    if c > 0 {
                        edges[idx_bot(x)].push((si, idx_f(xp, c)));
                    }
                    for c_old in 0..=max_c {
                        edges[idx_f(x, c_old)].push((si, idx_f(xp, c)));
                    }
                }
            }
        }
    }
    let accepting: BTreeSet<StateId> = (f_base..count).collect();
    Ok(OmegaAcceptor {
        alphabet,
        state_count: count,
        initial: start,
        edges,
        acceptance: Acceptance::Buchi { accepting },
        deterministic: false,
    })
}

/// Lifts a single-sequence comparator over {-mu..mu} to the pair alphabet
/// {0..mu}^2 by relabeling each transition on v with every pair (a, b)
/// satisfying a - b = v. The language becomes {(A,B) : A - B in L(single)}.
pub fn pair_adapter(single: &OmegaAcceptor<i64>, mu: i64) -> OmegaAcceptor<(i64, i64)> {
    let mut alphabet = Vec::new();
    for a in 0..=mu {
        for b in 0..=mu {
            alphabet.push((a, b));
        }
    }
    let edges = single
        .edges
        .iter()
        .map(|es| {
            let mut out = Vec::new();
            for (si, &(a, b)) in alphabet.iter().enumerate() {
                let v = a - b;
                for &(sym, dst) in es {
                    if single.alphabet[sym] == v {
                        out.push((si, dst));
                    }
                }
            }
            out
        })
        .collect();
    OmegaAcceptor {
        alphabet,
        state_count: single.state_count,
        initial: single.initial,
        edges,
        acceptance: single.acceptance.clone(),
        deterministic: single.deterministic,
    }
}

/// Exact membership oracle: does DS(A, d) R value(threshold)? Used by every
/// comparator test as the independent route.
pub fn exact_relation_holds(
    l: &LassoWeights,
    d: i64,
    relation: Relation,
    threshold: &ThresholdValue,
) -> ExactOutcome {
    let dr = integer(d);
    let lhs = ds_lasso(l, &dr).expect("nonempty loop");
    let rhs = threshold.value(&dr).expect("nonempty threshold loop");
    ExactOutcome { holds: relation.holds(&lhs, &rhs), lhs, rhs }
}

pub struct ExactOutcome {
    pub holds: bool,
    pub lhs: ExactNumber,
    pub rhs: ExactNumber,
}

/// Denominator bound helper shared with the games module.
pub fn pow_bigint(base: i64, e: u32) -> BigInt {
    BigInt::from(base).pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{lasso_membership, minimize_deterministic};
    use crate::benchgen::Xorshift64Star;
    use crate::exact::gap;
    use crate::lasso::LassoWord;

    fn random_lasso(rng: &mut Xorshift64Star, mu: i64, max_len: usize) -> LassoWeights {
        let hl = rng.next_range(max_len as u64 + 1) as usize;
        let cl = 1 + rng.next_range(max_len as u64) as usize;
        let pick = |rng: &mut Xorshift64Star| rng.next_range(2 * mu as u64 + 1) as i64 - mu;
        LassoWeights {
            head: (0..hl).map(|_| pick(rng)).collect(),
            cycle: (0..cl).map(|_| pick(rng)).collect(),
        }
    }

    #[test]
    fn gap_dfa_size_and_example() {
        let g = build_gap_dfa(5, 2).unwrap();
        assert_eq!(g.dfa.state_count, 12); // {-4..5} plus bad, veryGood
        // [5,5] has gap 15 > 5, so it reaches bad.
        assert_eq!(g.dfa.run(&[5, 5]).unwrap(), g.bad);
        assert!(g.dfa.accepts(&[5, 5]).unwrap());
    }

    #[test]
    fn gap_dfa_accepts_exactly_gap_overflow() {
        let mut rng = Xorshift64Star::new(6);
        for (mu, d) in [(5i64, 2i64), (3, 2), (4, 3)] {
            let g = build_gap_dfa(mu, d).unwrap();
            let t_floor = mu.div_euclid(d - 1);
            let dr = integer(d);
            for _ in 0..2500 {
                let n = 1 + rng.next_range(9) as usize;
                let w: Vec<i64> =
                    (0..n).map(|_| rng.next_range(2 * mu as u64 + 1) as i64 - mu).collect();
                let accepted = g.dfa.accepts(&w).unwrap();
                let oracle = gap(&w, &dr).unwrap() > integer(t_floor);
                assert_eq!(accepted, oracle, "word {w:?} mu={mu} d={d}");
            }
        }
    }

    #[test]
    fn zero_sequence_relations() {
        let word = LassoWord::new(vec![], vec![0]).unwrap();
        for rel in Relation::all() {
            let acc = build_ds_comparator(&ComparatorParams::new(3, 2, rel)).unwrap();
            let expect = matches!(rel, Relation::Eq | Relation::Le | Relation::Ge);
            assert_eq!(lasso_membership(&acc, &word).unwrap(), expect, "{rel:?}");
        }
    }

    #[test]
    fn negative_head_accepted_by_lt() {
        let acc = build_ds_comparator(&ComparatorParams::new(3, 2, Relation::Lt)).unwrap();
        let word = LassoWord::new(vec![-1], vec![0]).unwrap();
        assert!(lasso_membership(&acc, &word).unwrap());
    }

    /// All six relations agree with the exact DS oracle on random lassos.
    #[test]
    fn comparator_matches_exact_oracle() {
        let mut rng = Xorshift64Star::new(12345);
        for (mu, d) in [(2i64, 2i64), (3, 2), (3, 3), (6, 3)] {
            let comps: Vec<(Relation, OmegaAcceptor<i64>)> = Relation::all()
                .into_iter()
                .map(|r| (r, build_ds_comparator(&ComparatorParams::new(mu, d, r)).unwrap()))
                .collect();
            let zero = ThresholdValue::zero();
            for _ in 0..600 {
                let l = random_lasso(&mut rng, mu, 5);
                let word = LassoWord::from(&l);
                for (rel, acc) in &comps {
                    let got = lasso_membership(acc, &word).unwrap();
                    let want = exact_relation_holds(&l, d, *rel, &zero).holds;
                    assert_eq!(got, want, "mu={mu} d={d} rel={rel:?} lasso={l:?}");
                }
            }
        }
    }

    /// The boundary case that the naive sink re-tagging for = gets wrong:
    /// DS([-1] . 1^omega, 2) = 0 must be accepted by = and rejected by !=.
    #[test]
    fn eq_boundary_when_gap_hits_minus_t() {
        let l = LassoWeights::new(vec![-1], vec![1]).unwrap();
        let word = LassoWord::from(&l);
        let eq = build_ds_comparator(&ComparatorParams::new(1, 2, Relation::Eq)).unwrap();
        let ne = build_ds_comparator(&ComparatorParams::new(1, 2, Relation::Ne)).unwrap();
        assert!(lasso_membership(&eq, &word).unwrap());
        assert!(!lasso_membership(&ne, &word).unwrap());
    }

    #[test]
    fn structural_class_matches_relation() {
        for rel in Relation::all() {
            let acc = build_ds_comparator(&ComparatorParams::new(4, 2, rel)).unwrap();
            acc.validate().unwrap();
            assert_eq!(
                matches!(acc.acceptance, Acceptance::Safety { .. }),
                rel.is_safety(),
                "{rel:?}"
            );
        }
    }

    #[test]
    fn minimality_fixpoint_small() {
        for rel in Relation::all() {
            let acc = build_ds_comparator(&ComparatorParams::new(5, 2, rel)).unwrap();
            let min = minimize_deterministic(&acc).unwrap();
            assert_eq!(min.state_count, acc.state_count, "{rel:?}");
        }
    }

    #[test]
    fn threshold_zero_equals_plain_comparator() {
        let mut rng = Xorshift64Star::new(31337);
        for (mu, d) in [(2i64, 2i64), (3, 2)] {
            for rel in Relation::all() {
                let plain = build_ds_comparator(&ComparatorParams::new(mu, d, rel)).unwrap();
                let thr = build_threshold_comparator(&ComparatorParams {
                    mu,
                    d,
                    relation: rel,
                    threshold: ThresholdValue::zero(),
                })
                .unwrap();
                for _ in 0..250 {
                    let l = random_lasso(&mut rng, mu, 4);
                    let word = LassoWord::from(&l);
                    assert_eq!(
                        lasso_membership(&plain, &word).unwrap(),
                        lasso_membership(&thr, &word).unwrap(),
                        "mu={mu} d={d} rel={rel:?} lasso={l:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn threshold_simple_example() {
        // v = 1 (head [1], loop [0]), d = 2, mu = 2: A = 1 0^omega has DS 1.
        let params = ComparatorParams {
            mu: 2,
            d: 2,
            relation: Relation::Eq,
            threshold: ThresholdValue { head: vec![1], cycle: vec![0] },
        };
        let acc = build_threshold_comparator(&params).unwrap();
        let word = LassoWord::new(vec![1], vec![0]).unwrap();
        assert!(lasso_membership(&acc, &word).unwrap());
    }

    #[test]
    fn threshold_matches_exact_oracle() {
        let mut rng = Xorshift64Star::new(777);
        let mu = 3i64;
        let d = 2i64;
        for _ in 0..60 {
            // Random threshold within range.
            let threshold = loop {
                let t = ThresholdValue {
                    head: (0..rng.next_range(3) as usize)
                        .map(|_| rng.next_range(2 * mu as u64 + 1) as i64 - mu)
                        .collect(),
                    cycle: (0..1 + rng.next_range(2) as usize)
                        .map(|_| rng.next_range(2 * mu as u64 + 1) as i64 - mu)
                        .collect(),
                };
                let dr = integer(d);
                let max_ds = rational(mu, 1) * &dr / (&dr - integer(1));
                if t.value(&dr).unwrap().abs() < max_ds {
                    break t;
                }
            };
            for rel in Relation::all() {
                let params = ComparatorParams { mu, d, relation: rel, threshold: threshold.clone() };
                let acc = build_threshold_comparator(&params).unwrap();
                acc.validate().unwrap();
                for _ in 0..60 {
                    let l = random_lasso(&mut rng, mu, 4);
                    let word = LassoWord::from(&l);
                    let got = lasso_membership(&acc, &word).unwrap();
                    let want = exact_relation_holds(&l, d, rel, &threshold).holds;
                    assert_eq!(got, want, "rel={rel:?} v={threshold:?} lasso={l:?}");
                }
            }
        }
    }

    #[test]
    fn threshold_out_of_range_rejected() {
        let params = ComparatorParams {
            mu: 2,
            d: 2,
            relation: Relation::Le,
            threshold: ThresholdValue { head: vec![], cycle: vec![2] }, // DS = 4 = mu*d/(d-1)
        };
        assert_eq!(
            build_threshold_comparator(&params).unwrap_err(),
            ComparatorError::ThresholdOutOfRange
        );
    }

    #[test]
    fn xc_accepts_strictly_smaller() {
        let xc = build_xc_comparator(2, 2).unwrap();
        let w = LassoWord::new(vec![(0, 1)], vec![(0, 0)]).unwrap();
        assert!(lasso_membership(&xc, &w).unwrap());
        // (A, A) rejected: irreflexive.
        let w = LassoWord::new(vec![], vec![(1, 1), (2, 2)]).unwrap();
        assert!(!lasso_membership(&xc, &w).unwrap());
    }

    #[test]
    fn xc_agrees_with_pair_adapter() {
        let mut rng = Xorshift64Star::new(4096);
        for (mu, d) in [(2i64, 2i64), (3, 2)] {
            let xc = build_xc_comparator(mu, d).unwrap();
            let lt = build_ds_comparator(&ComparatorParams::new(mu, d, Relation::Lt)).unwrap();
            let pair = pair_adapter(&lt, mu);
            assert_eq!(pair.alphabet.len(), ((mu + 1) * (mu + 1)) as usize);
            for _ in 0..400 {
                let hl = rng.next_range(4) as usize;
                let cl = 1 + rng.next_range(4) as usize;
                let pick = |rng: &mut Xorshift64Star| {
                    (rng.next_range(mu as u64 + 1) as i64, rng.next_range(mu as u64 + 1) as i64)
                };
                let w = LassoWord::new(
                    (0..hl).map(|_| pick(&mut rng)).collect(),
                    (0..cl).map(|_| pick(&mut rng)).collect(),
                )
                .unwrap();
                let got_xc = lasso_membership(&xc, &w).unwrap();
                let got_pair = lasso_membership(&pair, &w).unwrap();
                assert_eq!(got_xc, got_pair, "lasso {w:?} mu={mu} d={d}");
            }
        }
    }

    /// Partition: for each A exactly one of {<, =, >} accepts; duality of <=
    /// and >.
    #[test]
    fn partition_and_duality() {
        let mut rng = Xorshift64Star::new(2222);
        let mu = 4;
        let d = 2;
        let lt = build_ds_comparator(&ComparatorParams::new(mu, d, Relation::Lt)).unwrap();
        let eq = build_ds_comparator(&ComparatorParams::new(mu, d, Relation::Eq)).unwrap();
        let gt = build_ds_comparator(&ComparatorParams::new(mu, d, Relation::Gt)).unwrap();
        let le = build_ds_comparator(&ComparatorParams::new(mu, d, Relation::Le)).unwrap();
        for _ in 0..800 {
            let l = random_lasso(&mut rng, mu, 5);
            let word = LassoWord::from(&l);
            let a = lasso_membership(&lt, &word).unwrap();
            let b = lasso_membership(&eq, &word).unwrap();
            let c = lasso_membership(&gt, &word).unwrap();
            assert_eq!(usize::from(a) + usize::from(b) + usize::from(c), 1, "lasso {l:?}");
            assert_eq!(
                lasso_membership(&le, &word).unwrap(),
                !c,
                "duality violated on {l:?}"
            );
        }
    }
}
