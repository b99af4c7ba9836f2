//! Decomposition along components, blocks and separation pairs.

pub mod blockcut;
pub mod gadget;
pub mod scheme;
pub mod spqr;

pub use blockcut::{biconnected_blocks, block_cut_tree, BlockCutTree};
pub use gadget::{plan_gadget, GadgetPlan, PairProfile};
pub use scheme::{
    decompose_instance, process_bicomponent, process_tricomponent, replace_leaf_block, replace_negative_tricomponent,
    solve_mwcs, DcConfig, DcContext, DcReport, GadgetCoverage, Step, TriOutcome,
};
pub use spqr::{spqr_decomposition, SplitComponent, SpqrDecomposition};
