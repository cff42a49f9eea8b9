//! Comparator automata for quantitative reasoning.
//!
//! Discounted-sum and limsup comparator constructions, quantitative
//! inclusion between nondeterministic weighted omega-automata, an anytime
//! inclusion procedure for non-integer discount factors over finite words,
//! discounted-sum games (exact value iteration and comparator-based
//! satisficing), prefix-average comparison, and deterministic benchmark
//! generators.
//!
//! All verdict-bearing arithmetic is exact: big rationals for discounted
//! sums and game values, dyadics for the rounded-gap machinery.

pub mod anytime;
pub mod automata;
pub mod benchgen;
pub mod comparator;
pub mod exact;
pub mod games;
pub mod inclusion;
pub mod lasso;
pub mod prefix_average;

pub use automata::{
    annotate, intersect_safety_cosafety, lasso_membership, minimize_deterministic, nonemptiness,
    parse_wa, Acceptance, AnnotatedAutomaton, OmegaAcceptor, WeightedOmegaAutomaton,
};
pub use comparator::{
    build_ds_comparator, build_gap_dfa, build_limsup_comparator, build_threshold_comparator,
    build_xc_comparator, pair_adapter, ComparatorParams, Relation, ThresholdValue,
};
pub use exact::{ds_finite, ds_lasso, gap, ExactNumber};
pub use games::{optimal_value_exact, satisfice, value_iteration, Player, QuantGame};
pub use inclusion::{check_inclusion, InclusionVerdict, Strictness};
pub use lasso::{LassoWeights, LassoWord};
