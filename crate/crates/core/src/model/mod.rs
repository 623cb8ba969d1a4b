//! The disturbance-focused transition system, its runtime valuation, the
//! automaton for the safety property and the product search.

pub mod dts;
pub mod nfa;
pub mod product;
pub mod valuation;

pub use dts::{build_dts, Dts, DtsState, Edge, EdgeTask, StateId, TERMINAL_CANDIDATES};
pub use nfa::{Nfa, NfaState, Props};
pub use product::{
    accepting_paths, dump_product, edge_task, extract_plan, product_search, ChildOrder,
    ProductNode, ProductPath,
};
pub use valuation::{valuate, LongitudinalSet, Valuation};
