//! `Z_n` as a variety: membership, identity certificates, the linear
//! components of the quintic locus, restrictions of the octics, invariants
//! and the order-6 counterexample.

mod certify;
mod components;
mod equations;
mod invariants;
mod membership;
mod restrict;

pub use certify::{certify_identically_zero, certify_sample, ZeroCertificate, CERTIFY_DEN, CERTIFY_RANGE, DEFAULT_TRIALS};
pub use components::{
    canonical_linear_basis, component_catalog, linear_value, parse_indexed_ideal, random_linear_component,
    same_linear_span, verify_component, ComponentDescription, ComponentReport, ComponentShape,
};
pub use equations::{octics, Equations, SHIPPED_QUINTICS};
pub use invariants::{counterexample_matrix, invariants, multiplication_rank, VarietyInvariants};
pub use membership::{
    brute_force_membership, equation_membership, hadamard_search, EquationReport, MembershipCertificate, Method,
    Verdict, DEFAULT_MEMBERSHIP_TOL, MAX_SEARCH_N,
};
pub use restrict::{entry_one_parametrization, restrict_octics, RestrictionReport};
