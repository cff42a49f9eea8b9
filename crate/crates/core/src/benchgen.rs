//! Deterministic benchmark generators: random weighted automata with a given
//! transition density, and the two-loop game family whose value iteration
//! needs a quadratic number of rounds.

use num_traits::Zero;
use thiserror::Error;

use crate::automata::{WTransition, WeightedOmegaAutomaton};
use crate::exact::{integer, pow_rational, ExactNumber};
use crate::games::{Player, QuantGame};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible parameters: floor(N*delta) = {actual} transitions but completeness needs {needed}")]
    InfeasibleDensity { actual: usize, needed: usize },
    #[error("state count must be positive")]
    NoStates,
    #[error("weight bound must be positive")]
    NoWeightBound,
}

/// xorshift64* generator. Fixed algorithm so that outputs are identical
/// across implementations in any language:
///
/// ```text
/// x ^= x >> 12; x ^= x << 25; x ^= x >> 27; return x * 0x2545F4914F6CDD1D
/// ```
///
/// Test vectors from seed 1: first three outputs are
/// 0x5A2D707B11B4E487, 0x29A65B1BD7E7B00E, 0x35E0ED6A1B0F3B1D.
#[derive(Debug, Clone)]
pub struct Xorshift64Star {
    state: u64,
}

impl Xorshift64Star {
    /// Seed 0 is reserved and remapped to a fixed nonzero constant.
    pub fn new(seed: u64) -> Self {
        Xorshift64Star {
            state: if seed == 0 { 0x9E3779B97F4A7C15 } else { seed },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform value in `0..n` by rejection sampling (unbiased).
    pub fn next_range(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }
}

/// Generation parameters for random weighted automata.
#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub states: usize,
    /// Transition density: the automaton gets floor(states * density)
    /// transitions in total.
    pub density: f64,
    pub weight_bound: i64,
    pub seed: u64,
}

/// Random complete weighted automaton over the alphabet {a, b}, all states
/// accepting, unique initial state 0, weights uniform in [0, mu-1].
///
/// The first N*|Sigma| transitions complete the machine (random destination
/// and weight per state and letter); the remaining floor(N * density) -
/// N*|Sigma| transitions are fully random, re-rolled on exact duplicates so
/// the transition count is exact.
pub fn random_weighted_automaton(params: &GenParams) -> Result<WeightedOmegaAutomaton, GenError> {
    if params.states == 0 {
        return Err(GenError::NoStates);
    }
    if params.weight_bound <= 0 {
        return Err(GenError::NoWeightBound);
    }
    let n = params.states;
    let alphabet = vec!["a".to_string(), "b".to_string()];
    let total = (n as f64 * params.density).floor() as usize;
    let needed = n * alphabet.len();
    if total < needed {
        return Err(GenError::InfeasibleDensity { actual: total, needed });
    }
    let mut rng = Xorshift64Star::new(params.seed);
    let mu = params.weight_bound as u64;
    let mut transitions: Vec<WTransition> = Vec::with_capacity(total);
    for src in 0..n {
        for letter in 0..alphabet.len() {
            let dst = rng.next_range(n as u64) as usize;
            let weight = rng.next_range(mu) as i64;
            transitions.push(WTransition { src, letter, weight, dst });
        }
    }
    while transitions.len() < total {
        let t = WTransition {
            src: rng.next_range(n as u64) as usize,
            letter: rng.next_range(alphabet.len() as u64) as usize,
            weight: rng.next_range(mu) as i64,
            dst: rng.next_range(n as u64) as usize,
        };
        if !transitions.contains(&t) {
            transitions.push(t);
        }
    }
    Ok(WeightedOmegaAutomaton::new(alphabet, n, 0, transitions, params.weight_bound)
        .expect("generated automaton is complete and bounded"))
}

/// Two-loop game on which value iteration stabilizes only after roughly
/// c*n^2 rounds.
///
/// Structure: a start state with two branches. The long branch enters a loop
/// of 4n states with an entry bonus w; the short branch enters a loop of 2n
/// states for free. Each loop has a single cost-1 edge at offset n-2 (mod
/// loop length), every other edge costs 0, and all states belong to the
/// maximizing player. The bonus w = sum of d^-(4j+3)n over (4j+3)n <= c*n^2
/// exactly cancels the short loop's advantage terms one for one, so the max
/// branch at the start flips from long to short only once the horizon
/// passes the last exponent of w.
pub fn zp_game_family(n: usize, d: &ExactNumber, c: u64) -> QuantGame {
    assert!(n >= 1, "n must be positive");
    assert!(*d > integer(1), "discount factor must be > 1");
    assert!(c >= 1, "c must be positive");
    let w = zp_entry_weight(n, d, c);
    let long_len = 4 * n;
    let short_len = 2 * n;
    let one_edge = (n as i64 - 2).rem_euclid(short_len as i64) as usize;

    // State layout: 0 = start, 1 = long entry, 2..2+4n long loop,
    // 2+4n = short entry, 3+4n.. short loop.
    let long_head = 2;
    let short_entry = 2 + long_len;
    let short_head = 3 + long_len;
    let count = 3 + long_len + short_len;
    let mut edges: Vec<Vec<(usize, ExactNumber)>> = vec![Vec::new(); count];
    edges[0].push((1, w));
    edges[0].push((short_entry, ExactNumber::zero()));
    edges[1].push((long_head, ExactNumber::zero()));
    edges[short_entry].push((short_head, ExactNumber::zero()));
    for i in 0..long_len {
        let src = long_head + i;
        let dst = long_head + (i + 1) % long_len;
        let cost = if i == one_edge { integer(1) } else { ExactNumber::zero() };
        edges[src].push((dst, cost));
    }
    for i in 0..short_len {
        let src = short_head + i;
        let dst = short_head + (i + 1) % short_len;
        let cost = if i == one_edge { integer(1) } else { ExactNumber::zero() };
        edges[src].push((dst, cost));
    }
    QuantGame::new(vec![Player::P0; count], 0, edges).expect("family game is well-formed")
}

/// The entry bonus of the long branch: sum of d^-(4j+3)n for all j with
/// (4j+3)n <= c*n^2.
pub fn zp_entry_weight(n: usize, d: &ExactNumber, c: u64) -> ExactNumber {
    let mut w = ExactNumber::zero();
    let mut e = 3 * n as u64;
    let limit = c * (n as u64) * (n as u64);
    while e <= limit {
        w += pow_rational(d, e as u32).recip();
        e += 4 * n as u64;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn xorshift_test_vectors() {
        let mut rng = Xorshift64Star::new(1);
        assert_eq!(rng.next_u64(), 0x5A2D707B11B4E487);
        assert_eq!(rng.next_u64(), 0x29A65B1BD7E7B00E);
        assert_eq!(rng.next_u64(), 0x35E0ED6A1B0F3B1D);
    }

    #[test]
    fn density_two_gives_exact_transition_count() {
        let params = GenParams { states: 2, density: 2.0, weight_bound: 4, seed: 3 };
        let wa = random_weighted_automaton(&params).unwrap();
        assert_eq!(wa.transitions.len(), 4);
    }

    #[test]
    fn fixed_seed_reproduces_identical_output() {
        let params = GenParams { states: 5, density: 3.0, weight_bound: 4, seed: 99 };
        let a = random_weighted_automaton(&params).unwrap();
        let b = random_weighted_automaton(&params).unwrap();
        assert_eq!(a.transitions, b.transitions);
    }

    #[test]
    fn density_statistics() {
        let mut total = 0usize;
        let delta = 3.0;
        let n = 6;
        for seed in 0..1000 {
            let params = GenParams { states: n, density: delta, weight_bound: 4, seed };
            let wa = random_weighted_automaton(&params).unwrap();
            assert!(wa.validate().is_ok());
            total += wa.transitions.len();
        }
        let mean_density = total as f64 / 1000.0 / n as f64;
        assert!((mean_density - delta).abs() / delta < 0.05);
    }

    #[test]
    fn infeasible_density_rejected() {
        let params = GenParams { states: 4, density: 1.0, weight_bound: 2, seed: 1 };
        assert!(matches!(
            random_weighted_automaton(&params),
            Err(GenError::InfeasibleDensity { .. })
        ));
    }

    #[test]
    fn zp_family_counts_and_weight() {
        let d = integer(2);
        let g = zp_game_family(1, &d, 4);
        // 1 start + (4n+1) long side + (2n+1) short side.
        assert_eq!(g.state_count(), 1 + 5 + 3);
        let g = zp_game_family(3, &d, 4);
        assert_eq!(g.state_count(), 1 + 13 + 7);
        assert!(zp_entry_weight(2, &d, 4) > ExactNumber::zero());
    }
}
