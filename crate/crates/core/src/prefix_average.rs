//! Prefix-average comparison on ultimately periodic sequences, decided
//! exactly from the steady regime of prefix-sum differences, plus the
//! deterministic counter abstraction of the pushdown comparator as a trace
//! generator.

use thiserror::Error;

use crate::lasso::{lcm, LassoWeights};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrefixAverageError {
    #[error("sequences must be nonnegative; found {0}")]
    NegativeEntry(i64),
    #[error("lasso loop must be nonempty")]
    EmptyLoop,
}

fn check_nonneg(l: &LassoWeights) -> Result<(), PrefixAverageError> {
    if l.cycle.is_empty() {
        return Err(PrefixAverageError::EmptyLoop);
    }
    if let Some(&v) = l.head.iter().chain(l.cycle.iter()).find(|&&v| v < 0) {
        return Err(PrefixAverageError::NegativeEntry(v));
    }
    Ok(())
}

/// Prefix-sum difference analysis of two aligned lassos: the per-period
/// drift and the recurring offsets of the steady regime.
struct SteadyRegime {
    /// Sum(loop of A) - Sum(loop of B) over one aligned period.
    drift: i64,
    /// D_i = Sum(A[0..i]) - Sum(B[0..i]) for the indices recurring when the
    /// drift is zero: one aligned period past the common head.
    offsets: Vec<i64>,
}

fn steady_regime(a: &LassoWeights, b: &LassoWeights) -> SteadyRegime {
    let head_len = a.head.len().max(b.head.len());
    let period = lcm(a.cycle.len(), b.cycle.len());
    let mut diff = 0i64;
    for i in 0..head_len {
        diff += a.at(i) - b.at(i);
    }
    let d_head = diff;
    let mut offsets = Vec::with_capacity(period);
    for i in head_len..head_len + period {
        diff += a.at(i) - b.at(i);
        offsets.push(diff);
    }
    // D_{head + m*period + j} = offsets[j-1] + m * drift.
    SteadyRegime { drift: diff - d_head, offsets }
}

/// Decides the prefix-average comparison PLA(A) >= PLA(B): only finitely
/// many prefixes may satisfy Sum(B) >= Sum(A), and infinitely many must
/// satisfy Sum(A) >= Sum(B). The second conjunct is implied by the first
/// for integer sequences; both are still evaluated as stated.
pub fn pla_geq(a: &LassoWeights, b: &LassoWeights) -> Result<bool, PrefixAverageError> {
    check_nonneg(a)?;
    check_nonneg(b)?;
    let regime = steady_regime(a, b);
    // Finitely many i with D_i <= 0 iff eventually always D_i > 0.
    let eventually_positive = match regime.drift.cmp(&0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => regime.offsets.iter().all(|&d| d > 0),
    };
    // Infinitely many i with D_i >= 0.
    let infinitely_nonneg = match regime.drift.cmp(&0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => regime.offsets.iter().any(|&d| d >= 0),
    };
    Ok(eventually_positive && infinitely_nonneg)
}

/// States of the counter abstraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterState {
    /// Prefix-sum difference <= 0.
    Negative,
    /// Difference > 0, before the final guess.
    Positive,
    /// Difference > 0, inside the accepting tail.
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterStep {
    pub state: CounterState,
    /// |Sum(A[0..i]) - Sum(B[0..i])| after reading i letters.
    pub counter: u64,
}

/// Simulates the deterministic counter abstraction of the pushdown
/// comparator for `steps` letters: the counter carries the absolute
/// prefix-sum difference, the state its sign, and the jump into the final
/// state happens at the last index where the difference is nonpositive
/// (never, if that happens infinitely often).
pub fn pda_counter_trace(
    a: &LassoWeights,
    b: &LassoWeights,
    steps: usize,
) -> Result<Vec<CounterStep>, PrefixAverageError> {
    check_nonneg(a)?;
    check_nonneg(b)?;
    let regime = steady_regime(a, b);
    let head_len = a.head.len().max(b.head.len());
    let period = lcm(a.cycle.len(), b.cycle.len());
    // The guess point: the first index from which D stays positive forever,
    // if it exists.
    let settles = regime.drift > 0 || (regime.drift == 0 && regime.offsets.iter().all(|&d| d > 0));
    let jump_at: Option<usize> = if !settles {
        None
    } else {
        // Scan far enough that the drift dominates every later offset dip.
        let worst_dip = regime.offsets.iter().min().copied().unwrap_or(0);
        let periods_needed = if regime.drift > 0 {
            (((1 - worst_dip).max(0)) / regime.drift + 2) as usize
        } else {
            1
        };
        let horizon = head_len + period * (periods_needed + 1);
        let mut diff = 0i64;
        let mut last_nonpos = 0usize;
        for i in 0..horizon {
            diff += a.at(i) - b.at(i);
            if diff <= 0 {
                last_nonpos = i + 1;
            }
        }
        Some(last_nonpos)
    };
    let mut out = Vec::with_capacity(steps);
    let mut diff = 0i64;
    for i in 0..steps {
        diff += a.at(i) - b.at(i);
        let state = if diff <= 0 {
            CounterState::Negative
        } else {
            match jump_at {
                Some(j) if i + 1 > j => CounterState::Final,
                _ => CounterState::Positive,
            }
        };
        out.push(CounterStep { state, counter: diff.unsigned_abs() });
    }
    Ok(out)
}
