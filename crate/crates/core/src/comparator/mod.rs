//! Comparator automata: acceptors over weight sequences (or pairs of them)
//! that decide an aggregate-value relation online.

pub mod ds;
pub mod limsup;

pub use ds::{
    build_ds_comparator, build_gap_dfa, build_threshold_comparator, build_xc_comparator,
    exact_relation_holds, pair_adapter, ComparatorError, ComparatorParams, GapDfa, GapState,
    Relation, ThresholdValue,
};
pub use limsup::{
    build_limsup_block, build_limsup_comparator, liminf_member, limsup_member, pair_lasso,
};
