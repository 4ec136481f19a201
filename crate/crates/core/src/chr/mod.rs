//! Constraint Handling Rules over flat terms with integer offsets.

mod engine;
mod equiv;
mod rule;
mod state;
mod store;
pub mod term;

pub use engine::{
    apply_chr_rule, normal_forms_chr, normal_forms_chr_with, step_all, step_all_labelled,
    FreshVars, StateKeyFn,
};
pub use equiv::{equivalent_normalized, states_equivalent, structural_key};
pub use rule::{ChrError, ChrProgram, ChrRule, Cmp, Guard};
pub use state::{normalize, ChrState};
pub use store::{BuiltinEq, BuiltinStore, Resolved};
pub use term::{Const, Constraint, Term};
