//! Anytime DS inclusion over finite words for non-integer discount factors
//! d = 1 + 2^-k: exact dyadic rounding, lower/upper rounded gaps, their
//! finite-word comparators, the two one-sided deciders, and the halving
//! driver that combines them.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::automata::{Dfa, StateId, WeightedOmegaAutomaton};
use crate::exact::ExactNumber;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnytimeError {
    #[error("parameters k and p must be positive integers")]
    BadParameters,
    #[error("weights must lie in [0, mu]; found {0}")]
    NegativeWeight(i64),
    #[error("alphabet mismatch between the automata")]
    AlphabetMismatch,
    #[error("comparator would need {states} states, above the cap {cap}")]
    TooManyStates { states: u64, cap: u64 },
    #[error("value is not dyadic: {0}")]
    NotDyadic(String),
}

/// Exact dyadic rational mantissa / 2^exponent, normalized so the mantissa
/// is odd (or the value is zero with exponent 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: u32) -> Dyadic {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn zero() -> Dyadic {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn from_integer(v: i64) -> Dyadic {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn try_from_rational(x: &ExactNumber) -> Result<Dyadic, AnytimeError> {
        let denom = x.denom();
        let bits = denom.bits();
        let pow2 = BigInt::one() << (bits - 1);
        if *denom != pow2 {
            return Err(AnytimeError::NotDyadic(x.to_string()));
        }
        Ok(Dyadic::new(x.numer().clone(), (bits - 1) as u32))
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        while self.exponent > 0 && !self.mantissa.bit(0) {
            self.mantissa >>= 1;
            self.exponent -= 1;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn to_rational(&self) -> ExactNumber {
        BigRational::new(self.mantissa.clone(), BigInt::one() << self.exponent)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let e = self.exponent.max(other.exponent);
        let a = &self.mantissa << (e - self.exponent);
        let b = &other.mantissa << (e - other.exponent);
        Dyadic::new(a + b, e)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// Multiplication by d = 1 + 2^-k: m/2^e -> m * (2^k + 1) / 2^(e+k).
    pub fn times_discount(&self, k: u32) -> Dyadic {
        Dyadic::new(&self.mantissa * ((BigInt::one() << k) + BigInt::one()), self.exponent + k)
    }

    pub fn cmp_value(&self, other: &Dyadic) -> std::cmp::Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.mantissa << (e - self.exponent);
        let b = &other.mantissa << (e - other.exponent);
        a.cmp(&b)
    }

    pub fn sign(&self) -> i32 {
        if self.mantissa.is_zero() {
            0
        } else if self.mantissa.is_negative() {
            -1
        } else {
            1
        }
    }
}

fn check_params(k: u32, p: u32) -> Result<(), AnytimeError> {
    if k == 0 || p == 0 {
        return Err(AnytimeError::BadParameters);
    }
    Ok(())
}

/// Largest integer multiple of the resolution 2^-(p+k) that is <= x.
pub fn round_low(x: &Dyadic, p: u32, k: u32) -> Result<Dyadic, AnytimeError> {
    check_params(k, p)?;
    Ok(Dyadic::new(round_index_low(x, p, k), p + k))
}

/// Smallest integer multiple of the resolution 2^-(p+k) that is >= x.
pub fn round_up(x: &Dyadic, p: u32, k: u32) -> Result<Dyadic, AnytimeError> {
    check_params(k, p)?;
    Ok(Dyadic::new(round_index_up(x, p, k), p + k))
}

/// floor(x / 2^-(p+k)) as an integer index.
fn round_index_low(x: &Dyadic, p: u32, k: u32) -> BigInt {
    let r = p + k;
    if x.exponent <= r {
        &x.mantissa << (r - x.exponent)
    } else {
        floor_shr(&x.mantissa, x.exponent - r)
    }
}

fn round_index_up(x: &Dyadic, p: u32, k: u32) -> BigInt {
    let r = p + k;
    if x.exponent <= r {
        &x.mantissa << (r - x.exponent)
    } else {
        let s = x.exponent - r;
        -floor_shr(&(-&x.mantissa), s)
    }
}

/// Floor division by 2^s (arithmetic shift semantics for negatives).
fn floor_shr(v: &BigInt, s: u32) -> BigInt {
    let q = v >> s;
    q
}

/// Inductive lower gap: 0 on the empty word, roundLow(d*gap + u) per
/// element, with d = 1 + 2^-k.
pub fn gap_low(w: &[i64], k: u32, p: u32) -> Result<Dyadic, AnytimeError> {
    check_params(k, p)?;
    let mut g = Dyadic::zero();
    for &u in w {
        let next = g.times_discount(k).add(&Dyadic::from_integer(u));
        g = round_low(&next, p, k)?;
    }
    Ok(g)
}

/// Inductive upper gap, rounding towards +infinity instead.
pub fn gap_up(w: &[i64], k: u32, p: u32) -> Result<Dyadic, AnytimeError> {
    check_params(k, p)?;
    let mut g = Dyadic::zero();
    for &u in w {
        let next = g.times_discount(k).add(&Dyadic::from_integer(u));
        g = round_up(&next, p, k)?;
    }
    Ok(g)
}

/// Lower approximation of the discounted sum: gapLow / d^(|w|-1).
pub fn ds_low(w: &[i64], k: u32, p: u32) -> Result<ExactNumber, AnytimeError> {
    let g = gap_low(w, k, p)?;
    Ok(descale(g, w.len(), k))
}

pub fn ds_up(w: &[i64], k: u32, p: u32) -> Result<ExactNumber, AnytimeError> {
    let g = gap_up(w, k, p)?;
    Ok(descale(g, w.len(), k))
}

fn descale(g: Dyadic, len: usize, k: u32) -> ExactNumber {
    if len == 0 {
        return ExactNumber::zero();
    }
    let d = discount(k);
    g.to_rational() / crate::exact::pow_rational(&d, (len - 1) as u32)
}

pub fn discount(k: u32) -> ExactNumber {
    BigRational::new((BigInt::one() << k) + BigInt::one(), BigInt::one() << k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingSide {
    Low,
    Up,
}

/// Finite-word DFA deciding gapLow(w) R 0 (resp. gapUp): states are the
/// integer multiples of the resolution inside the absorbing window, the
/// transition mimics the inductive gap definition, and a state is accepting
/// iff its tracked value satisfies the relation against 0.
///
/// The windows differ per side: the lower gap is absorbing below -mu*2^k
/// and above mu*2^k + 2^-p, the upper gap below -(mu*2^k + 2^-p) and above
/// mu*2^k.
pub struct RoundedComparator {
    pub dfa: Dfa,
    /// Gap index (multiple of 2^-(p+k)) per DFA state.
    pub gap_index: Vec<i64>,
    pub side: RoundingSide,
    /// true for >=, false for <=.
    pub geq: bool,
}

const DEFAULT_STATE_CAP: u64 = 2_000_000;

pub fn build_comp_low(mu: i64, k: u32, p: u32, geq: bool) -> Result<RoundedComparator, AnytimeError> {
    build_rounded_comparator(mu, k, p, geq, RoundingSide::Low, DEFAULT_STATE_CAP)
}

pub fn build_comp_up(mu: i64, k: u32, p: u32, geq: bool) -> Result<RoundedComparator, AnytimeError> {
    build_rounded_comparator(mu, k, p, geq, RoundingSide::Up, DEFAULT_STATE_CAP)
}

pub fn build_rounded_comparator(
    mu: i64,
    k: u32,
    p: u32,
    geq: bool,
    side: RoundingSide,
    cap: u64,
) -> Result<RoundedComparator, AnytimeError> {
    check_params(k, p)?;
    if mu < 1 {
        return Err(AnytimeError::BadParameters);
    }
    // Indices are multiples of r = 2^-(p+k); mu * 2^k corresponds to index
    // mu * 2^(p+2k) and 2^-p to index 2^k.
    let base = (mu as i128) << (p + 2 * k);
    let eps_idx = 1i128 << k;
    let (t_low, t_up): (i128, i128) = match side {
        RoundingSide::Low => (-base, base + eps_idx),
        RoundingSide::Up => (-(base + eps_idx), base),
    };
    let states = (t_up - t_low + 1) as u64;
    if states > cap {
        return Err(AnytimeError::TooManyStates { states, cap });
    }
    let lo = t_low as i64;
    let hi = t_up as i64;
    let count = (hi - lo + 1) as usize;
    let idx_of = |g: i64| (g - lo) as usize;
    let symbols: Vec<i64> = (-mu..=mu).collect();
    let mut delta = vec![vec![0usize; symbols.len()]; count];
    for (si, &a) in symbols.iter().enumerate() {
        for g in lo..=hi {
            let t = if g == lo || g == hi {
                g
            } else {
                // round((d * g * r + a) / r) with d = 1 + 2^-k reduces to
                // a floor/ceil of (g * (2^k + 1) + a * 2^(p+2k)) / 2^k.
                let numer =
                    BigInt::from(g) * ((BigInt::one() << k) + 1) + (BigInt::from(a) << (p + 2 * k));
                let next = match side {
                    RoundingSide::Low => floor_shr(&numer, k),
                    RoundingSide::Up => -floor_shr(&(-numer), k),
                };
                let next = next.to_i64().unwrap_or(if next.is_negative() { i64::MIN / 4 } else { i64::MAX / 4 });
                next.clamp(lo, hi)
            };
            delta[idx_of(g)][si] = idx_of(t);
        }
    }
    let accepting: Vec<bool> = (lo..=hi).map(|g| if geq { g >= 0 } else { g <= 0 }).collect();
    let gap_index: Vec<i64> = (lo..=hi).collect();
    Ok(RoundedComparator {
        dfa: Dfa {
            symbols,
            state_count: count,
            initial: idx_of(0),
            delta,
            accepting,
        },
        gap_index,
        side,
        geq,
    })
}

/// Complete NFA over finite words with all states accepting and nonnegative
/// transition weights; the weight of a word is the maximum over its runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteWordDSAutomaton(pub WeightedOmegaAutomaton);

impl FiniteWordDSAutomaton {
    pub fn new(inner: WeightedOmegaAutomaton) -> Result<Self, AnytimeError> {
        for t in &inner.transitions {
            if t.weight < 0 {
                return Err(AnytimeError::NegativeWeight(t.weight));
            }
        }
        Ok(FiniteWordDSAutomaton(inner))
    }

    pub fn inner(&self) -> &WeightedOmegaAutomaton {
        &self.0
    }

    /// Exact word weight: max over runs of DS(run weights, d).
    pub fn word_weight(&self, word: &[usize], d: &ExactNumber) -> ExactNumber {
        // Backward dynamic program over positions.
        let a = &self.0;
        let mut val: HashMap<StateId, ExactNumber> =
            (0..a.state_count).map(|s| (s, ExactNumber::zero())).collect();
        for &letter in word.iter().rev() {
            let mut next: HashMap<StateId, ExactNumber> = HashMap::new();
            for s in 0..a.state_count {
                let mut best: Option<ExactNumber> = None;
                for t in a.transitions_from(s) {
                    if t.letter != letter {
                        continue;
                    }
                    let cand = BigRational::from_integer(BigInt::from(t.weight)) + &val[&t.dst] / d;
                    best = Some(match best {
                        None => cand,
                        Some(b) => b.max(cand),
                    });
                }
                next.insert(s, best.expect("complete automaton"));
            }
            val = next;
        }
        val[&a.initial].clone()
    }
}

/// One-sided verdicts of the two partial deciders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowVerdict {
    NotIncluded(Vec<usize>),
    CloseIncluded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpVerdict {
    Included,
    NotFarIncluded,
}

/// The difference product of annotated P with Q, intersected with a rounded
/// comparator on the weight component, checked against all runs of P by an
/// on-the-fly subset construction. Returns the separating word on failure.
///
/// The comparator transition is monotone in the tracked gap and its
/// acceptance (gap <= 0) is downward closed, so per Q-state only the
/// minimal comparator state matters; subsets are reduced to that antichain.
fn approx_inclusion(
    p: &FiniteWordDSAutomaton,
    q: &FiniteWordDSAutomaton,
    comp: &RoundedComparator,
) -> Result<Option<Vec<usize>>, AnytimeError> {
    const NODE_CAP: usize = 1_000_000;
    assert!(!comp.geq, "the reduction keeps minima; it needs the <= polarity");
    let pa = p.inner();
    let qa = q.inner();
    let letter_map: Vec<usize> = pa
        .alphabet
        .iter()
        .map(|l| qa.letter_index(l).ok_or(AnytimeError::AlphabetMismatch))
        .collect::<Result<_, _>>()?;
    // Search nodes: (P state reached by the labeled run, map Q state ->
    // minimal comparator state). A node is dominated iff some comparator
    // component accepts the consumed difference prefix.
    type Subset = Vec<(StateId, StateId)>; // sorted by Q state, one entry each
    let start_subset: Subset = vec![(qa.initial, comp.dfa.initial)];
    let mut ids: HashMap<(StateId, Subset), usize> = HashMap::new();
    let mut nodes: Vec<(StateId, Subset)> = Vec::new();
    let mut parent: Vec<Option<(usize, usize)>> = Vec::new(); // (node, p-transition label)
    let key0 = (pa.initial, start_subset);
    ids.insert(key0.clone(), 0);
    nodes.push(key0);
    parent.push(None);
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut bad_node: Option<usize> = None;
    'bfs: while let Some(id) = queue.pop_front() {
        let (ps, subset) = nodes[id].clone();
        // The empty word (root) is trivially dominated: gap = 0.
        let dominated = subset.iter().any(|&(_, c)| comp.dfa.accepting[c]);
        if !dominated {
            bad_node = Some(id);
            break 'bfs;
        }
        for label in pa.transition_ids_from(ps) {
            let t = pa.transitions[*label];
            let q_letter = letter_map[t.letter];
            let mut next: Subset = Vec::new();
            for &(qs, cs) in &subset {
                for tq in qa.transitions_from(qs) {
                    if tq.letter != q_letter {
                        continue;
                    }
                    let diff = t.weight - tq.weight;
                    let cn = comp.dfa.step(cs, diff).expect("difference within alphabet");
                    match next.binary_search_by_key(&tq.dst, |&(q, _)| q) {
                        Ok(pos) => next[pos].1 = next[pos].1.min(cn),
                        Err(pos) => next.insert(pos, (tq.dst, cn)),
                    }
                }
            }
            let key = (t.dst, next);
            if ids.contains_key(&key) {
                continue;
            }
            let nid = nodes.len();
            if nid >= NODE_CAP {
                return Err(AnytimeError::TooManyStates {
                    states: nid as u64,
                    cap: NODE_CAP as u64,
                });
            }
            ids.insert(key.clone(), nid);
            nodes.push(key);
            parent.push(Some((id, *label)));
            queue.push_back(nid);
        }
    }
    match bad_node {
        None => Ok(None),
        Some(mut id) => {
            let mut labels = Vec::new();
            while let Some((up, label)) = parent[id] {
                labels.push(label);
                id = up;
            }
            labels.reverse();
            Ok(Some(labels.iter().map(|&l| pa.transitions[l].letter).collect()))
        }
    }
}

/// Lower decider: either P is not DS-included in Q (witness word), or P is
/// within d*eps of Q.
pub fn low_approx_inc(
    p: &FiniteWordDSAutomaton,
    q: &FiniteWordDSAutomaton,
    k: u32,
    pr: u32,
) -> Result<LowVerdict, AnytimeError> {
    let mu = p.inner().weight_bound.max(q.inner().weight_bound).max(1);
    let comp = build_comp_low(mu, k, pr, false)?;
    match approx_inclusion(p, q, &comp)? {
        None => Ok(LowVerdict::CloseIncluded),
        Some(word) => Ok(LowVerdict::NotIncluded(word)),
    }
}

/// Upper decider: either P is DS-included in Q, or P is not d*eps-far below
/// Q.
pub fn upper_approx_inc(
    p: &FiniteWordDSAutomaton,
    q: &FiniteWordDSAutomaton,
    k: u32,
    pr: u32,
) -> Result<UpVerdict, AnytimeError> {
    let mu = p.inner().weight_bound.max(q.inner().weight_bound).max(1);
    let comp = build_comp_up(mu, k, pr, false)?;
    match approx_inclusion(p, q, &comp)? {
        None => Ok(UpVerdict::Included),
        Some(_) => Ok(UpVerdict::NotFarIncluded),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnytimeVerdict {
    NotIncluded(Vec<String>),
    Included,
    /// P subset Q + d * 2^-p for the recorded precision p.
    CloseIncluded(u32),
}

#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub precision: u32,
    pub low_close: bool,
    pub up_included: bool,
}

#[derive(Debug, Clone)]
pub struct AnytimeOutcome {
    pub verdict: AnytimeVerdict,
    pub trace: Vec<RoundRecord>,
}

#[derive(Debug, Clone, Copy)]
pub enum Budget {
    MaxRounds(u32),
    /// Run until eps = 2^-p reaches this precision.
    Precision(u32),
}

/// The halving driver: round p runs both deciders at eps = 2^-p, stops on a
/// crisp answer, and otherwise halves eps until the budget runs out, then
/// reports the last d*eps-closeness.
pub fn anytime_inclusion(
    p: &FiniteWordDSAutomaton,
    q: &FiniteWordDSAutomaton,
    k: u32,
    budget: Budget,
) -> Result<AnytimeOutcome, AnytimeError> {
    check_params(k, 1)?;
    let mut trace = Vec::new();
    let mut pr = 1u32;
    loop {
        let low = low_approx_inc(p, q, k, pr)?;
        if let LowVerdict::NotIncluded(word) = low {
            trace.push(RoundRecord { precision: pr, low_close: false, up_included: false });
            let letters = word.iter().map(|&l| p.inner().alphabet[l].clone()).collect();
            return Ok(AnytimeOutcome { verdict: AnytimeVerdict::NotIncluded(letters), trace });
        }
        let up = upper_approx_inc(p, q, k, pr)?;
        let done = matches!(up, UpVerdict::Included);
        trace.push(RoundRecord { precision: pr, low_close: true, up_included: done });
        if done {
            return Ok(AnytimeOutcome { verdict: AnytimeVerdict::Included, trace });
        }
        let exhausted = match budget {
            Budget::MaxRounds(n) => trace.len() as u32 >= n,
            Budget::Precision(target) => pr >= target,
        };
        if exhausted {
            return Ok(AnytimeOutcome { verdict: AnytimeVerdict::CloseIncluded(pr), trace });
        }
        pr += 1;
    }
}
