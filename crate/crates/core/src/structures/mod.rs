//! Lax families, Hamiltonian maps, bracket tables and their verification.

mod appendix;
mod catalog;
mod covector;
mod family;
mod maps;
mod report;
mod table;
mod transfer;
mod verify;

pub use appendix::verify_appendix_identity;
pub use catalog::{gd3_table, one_constraint_table, KnownTable};
pub use covector::{generic_pieces, slots_of, Covector};
pub use family::{FamilyKind, LaxFamily};
pub use maps::{
    gd2, gd2_dirac, gd3, ns_map, ns_map_literal, omega_map, res_commutator, HamiltonianMap,
};
pub use report::{Check, Status, VerificationReport};
pub use table::BracketMatrix;
pub use transfer::{substitute_table, substitution, transfer_bracket};
pub use verify::{compare_tables, residual, verify_bracket_table};
