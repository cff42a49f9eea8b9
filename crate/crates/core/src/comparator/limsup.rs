//! Buchi comparators for limsup and liminf, built by guess-and-verify: one
//! three-state block per candidate value k verifies that k recurs in the
//! first sequence while nothing above k recurs in either.

use std::collections::BTreeSet;

use crate::automata::{lasso_membership, Acceptance, AutomatonError, OmegaAcceptor};
use crate::comparator::ds::Relation;
use crate::lasso::{lcm, LassoWeights, LassoWord};

/// The block accepting (A, B) iff limsup(A) = k and limsup(B) <= k.
///
/// Layout: state 0 waits on any pair, state 1 (accepting) is re-entered
/// exactly when the first component reads k, state 2 idles between k's.
pub fn build_limsup_block(k: i64, mu: i64) -> OmegaAcceptor<(i64, i64)> {
    assert!(k.abs() <= mu, "k out of range");
    let alphabet = pair_alphabet(mu);
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); 3];
    for (si, &(a, b)) in alphabet.iter().enumerate() {
        edges[0].push((si, 0));
        if a == k && b <= k {
            edges[0].push((si, 1));
            edges[1].push((si, 1));
            edges[2].push((si, 1));
        }
        if a <= k - 1 && b <= k {
            edges[1].push((si, 2));
            edges[2].push((si, 2));
        }
    }
    OmegaAcceptor {
        alphabet,
        state_count: 3,
        initial: 0,
        edges,
        acceptance: Acceptance::Buchi { accepting: BTreeSet::from([1]) },
        deterministic: false,
    }
}

/// Union of the blocks for k in {-mu..mu}: accepts (A, B) iff
/// limsup(A) >= limsup(B). The waiting states of all blocks behave
/// identically, so the union shares a single one.
pub fn build_limsup_comparator(mu: i64) -> OmegaAcceptor<(i64, i64)> {
    assert!(mu >= 0);
    let alphabet = pair_alphabet(mu);
    let ks: Vec<i64> = (-mu..=mu).collect();
    // Layout: 0 = shared waiting state, then (f_k, s_k) per k.
    let f_of = |ki: usize| 1 + 2 * ki;
    let s_of = |ki: usize| 2 + 2 * ki;
    let count = 1 + 2 * ks.len();
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
    for (si, &(a, b)) in alphabet.iter().enumerate() {
        edges[0].push((si, 0));
        for (ki, &k) in ks.iter().enumerate() {
            if a == k && b <= k {
                edges[0].push((si, f_of(ki)));
                edges[f_of(ki)].push((si, f_of(ki)));
                edges[s_of(ki)].push((si, f_of(ki)));
            }
            if a <= k - 1 && b <= k {
                edges[f_of(ki)].push((si, s_of(ki)));
                edges[s_of(ki)].push((si, s_of(ki)));
            }
        }
    }
    let accepting: BTreeSet<usize> = ks.iter().enumerate().map(|(ki, _)| f_of(ki)).collect();
    OmegaAcceptor {
        alphabet,
        state_count: count,
        initial: 0,
        edges,
        acceptance: Acceptance::Buchi { accepting },
        deterministic: false,
    }
}

fn pair_alphabet(mu: i64) -> Vec<(i64, i64)> {
    let mut alphabet = Vec::new();
    for a in -mu..=mu {
        for b in -mu..=mu {
            alphabet.push((a, b));
        }
    }
    alphabet
}

/// Zips two weight lassos into one pair lasso over a common shape.
pub fn pair_lasso(a: &LassoWeights, b: &LassoWeights) -> LassoWord<(i64, i64)> {
    let head_len = a.head.len().max(b.head.len());
    let cycle_len = lcm(a.cycle.len(), b.cycle.len());
    LassoWord {
        head: (0..head_len).map(|i| (a.at(i), b.at(i))).collect(),
        cycle: (head_len..head_len + cycle_len).map(|i| (a.at(i), b.at(i))).collect(),
    }
}

/// Decides limsup(A) R limsup(B) through the >= comparator, querying with
/// swapped arguments and Boolean combinations for the other relations.
pub fn limsup_member(
    comparator_ge: &OmegaAcceptor<(i64, i64)>,
    relation: Relation,
    a: &LassoWeights,
    b: &LassoWeights,
) -> Result<bool, AutomatonError> {
    let ge = |x: &LassoWeights, y: &LassoWeights| -> Result<bool, AutomatonError> {
        lasso_membership(comparator_ge, &pair_lasso(x, y))
    };
    Ok(match relation {
        Relation::Ge => ge(a, b)?,
        Relation::Le => ge(b, a)?,
        Relation::Gt => ge(a, b)? && !ge(b, a)?,
        Relation::Lt => ge(b, a)? && !ge(a, b)?,
        Relation::Eq => ge(a, b)? && ge(b, a)?,
        Relation::Ne => !(ge(a, b)? && ge(b, a)?),
    })
}

/// liminf comparison by the min-max dual: liminf(A) = -limsup(-A).
pub fn liminf_member(
    comparator_ge: &OmegaAcceptor<(i64, i64)>,
    relation: Relation,
    a: &LassoWeights,
    b: &LassoWeights,
) -> Result<bool, AutomatonError> {
    let (na, nb) = (a.negate(), b.negate());
    let flipped = match relation {
        Relation::Ge => Relation::Le,
        Relation::Le => Relation::Ge,
        Relation::Gt => Relation::Lt,
        Relation::Lt => Relation::Gt,
        other => other,
    };
    limsup_member(comparator_ge, flipped, &na, &nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::Xorshift64Star;
    use crate::exact::{liminf_lasso, limsup_lasso};

    fn konst(k: i64) -> LassoWeights {
        LassoWeights::new(vec![], vec![k]).unwrap()
    }

    #[test]
    fn block_accepts_its_own_value() {
        let mu = 3;
        for k in -mu..=mu {
            let block = build_limsup_block(k, mu);
            let w = pair_lasso(&konst(k), &konst(k));
            assert!(lasso_membership(&block, &w).unwrap(), "k={k}");
            if k + 1 <= mu {
                let w = pair_lasso(&konst(k + 1), &konst(k));
                assert!(!lasso_membership(&block, &w).unwrap(), "k={k}");
            }
        }
    }

    #[test]
    fn comparator_reflexive() {
        let mu = 3;
        let comp = build_limsup_comparator(mu);
        let mut rng = Xorshift64Star::new(15);
        for _ in 0..100 {
            let cl = 1 + rng.next_range(4) as usize;
            let a = LassoWeights::new(
                vec![],
                (0..cl).map(|_| rng.next_range(2 * mu as u64 + 1) as i64 - mu).collect(),
            )
            .unwrap();
            assert!(limsup_member(&comp, Relation::Ge, &a, &a).unwrap());
        }
    }

    #[test]
    fn strict_example() {
        let mu = 2;
        let comp = build_limsup_comparator(mu);
        let a = LassoWeights::new(vec![], vec![1, 2]).unwrap();
        let b = LassoWeights::new(vec![], vec![1]).unwrap();
        assert!(limsup_member(&comp, Relation::Ge, &a, &b).unwrap());
        assert!(limsup_member(&comp, Relation::Gt, &a, &b).unwrap());
        assert!(!limsup_member(&comp, Relation::Gt, &b, &a).unwrap());
    }

    #[test]
    fn matches_oracle_on_random_lassos() {
        let mu = 3;
        let comp = build_limsup_comparator(mu);
        let mut rng = Xorshift64Star::new(808);
        let random = |rng: &mut Xorshift64Star| {
            let hl = rng.next_range(3) as usize;
            let cl = 1 + rng.next_range(4) as usize;
            let pick = |rng: &mut Xorshift64Star| rng.next_range(2 * mu as u64 + 1) as i64 - mu;
            LassoWeights {
                head: (0..hl).map(|_| pick(rng)).collect(),
                cycle: (0..cl).map(|_| pick(rng)).collect(),
            }
        };
        for _ in 0..500 {
            let a = random(&mut rng);
            let b = random(&mut rng);
            let (la, lb) = (limsup_lasso(&a).unwrap(), limsup_lasso(&b).unwrap());
            assert_eq!(limsup_member(&comp, Relation::Ge, &a, &b).unwrap(), la >= lb, "{a:?} {b:?}");
            let (ia, ib) = (liminf_lasso(&a).unwrap(), liminf_lasso(&b).unwrap());
            assert_eq!(liminf_member(&comp, Relation::Ge, &a, &b).unwrap(), ia >= ib, "{a:?} {b:?}");
        }
    }

    /// An accepted pair is accepted by exactly the block k = limsup(A) among
    /// the blocks with limsup(B) <= k.
    #[test]
    fn block_disjointness() {
        let mu = 2;
        let blocks: Vec<(i64, OmegaAcceptor<(i64, i64)>)> =
            (-mu..=mu).map(|k| (k, build_limsup_block(k, mu))).collect();
        let mut rng = Xorshift64Star::new(2);
        for _ in 0..200 {
            let cl = 1 + rng.next_range(4) as usize;
            let pick = |rng: &mut Xorshift64Star| rng.next_range(2 * mu as u64 + 1) as i64 - mu;
            let a = LassoWeights::new(vec![], (0..cl).map(|_| pick(&mut rng)).collect()).unwrap();
            let b = LassoWeights::new(vec![], (0..cl).map(|_| pick(&mut rng)).collect()).unwrap();
            let w = pair_lasso(&a, &b);
            let la = limsup_lasso(&a).unwrap();
            let lb = limsup_lasso(&b).unwrap();
            for (k, block) in &blocks {
                let got = lasso_membership(block, &w).unwrap();
                let expect = *k == la && lb <= *k;
                assert_eq!(got, expect, "k={k} a={a:?} b={b:?}");
            }
        }
    }
}
