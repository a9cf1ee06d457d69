//! Random brickwork circuits: uniform two-qubit Cliffords with probabilistic
//! conditional-T substitution, plus the input-encoding layer.

mod clifford;
mod template;

pub use clifford::{CliffordTable, CLIFFORD2_ORDER};
pub use template::{
    apply_template, brickwork_pairs, encoding_layer, CircuitTemplate, GateChoice, Slot, TemplateRecord,
};
