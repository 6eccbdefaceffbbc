//! Quantum designs and their finite-geometry counterparts.
//!
//! This crate constructs and verifies two families of symmetric quantum
//! measurements together with the combinatorial structures they mirror:
//!
//! * complete sets of [mutually unbiased bases](mub) in prime-power
//!   dimension, built from [finite-field](field) arithmetic;
//! * [affine planes, striations, and mutually orthogonal Latin
//!   squares](geometry), the phase-space side of the same story;
//! * [quantum nets](net): phase-space point operators and discrete Wigner
//!   functions;
//! * [SIC-POVMs](sic): exact constructions in dimension 2 and a numerical
//!   fiducial search by frame-potential minimization over Weyl–Heisenberg
//!   orbits;
//! * the [dual-plane operator assignment](dual) that plays the role of
//!   phase-space points for a SIC, with its trace-condition verifier;
//! * a small [epistemic toy model](toy) whose intersection-counting
//!   probabilities reproduce the SIC overlap rule.
//!
//! Verification routines return deviation reports rather than booleans, so
//! callers decide pass/fail at their own tolerance. The shared default is
//! [`DEFAULT_TOL`].

pub mod dual;
pub mod field;
pub mod geometry;
pub mod jsonio;
pub mod linalg;
pub mod mub;
pub mod net;
pub mod sic;
pub mod toy;

pub use dual::{
    b_ops_dim2, solve_b_from_sic, solve_b_from_sic_aligned, verify_b_conditions, BAssignment,
    BConditionReport, BSolveResult, DualError,
};
pub use field::{factor_prime_power, FieldDescriptor, FieldElement, FieldError, FiniteField};
pub use geometry::{
    build_affine_plane, check_affine_axioms, check_dual_counts, check_striations_unbiased,
    dualize, mols_from_plane, search_orthogonal_mate, AffinePlane, AxiomReport, CountReport,
    GeometryError, IncidenceStructure, LatinSquare, MateSearch, Striation, DEFAULT_MATE_BUDGET,
};
pub use mub::{
    build_mubs, check_basis, check_unbiased, count_bound_check, Basis, DeviationReport, MubError,
    MubSet,
};
pub use net::{
    build_quantum_net, trace_cardinality_check, verify_net, wigner_function,
    CorrespondenceReport, NetError, NetReport, QuantumNet, WignerFunction,
};
pub use sic::{
    frame_potential, search_fiducial, sic_dim2_exact, verify_sic, wh_displacements, wh_orbit,
    Fiducial, Provenance, SearchConfig, SicCandidate, SicError, SicReport,
};
pub use toy::{ToyError, ToyModel};

/// Default tolerance for unbiasedness, orthonormality, and trace checks.
///
/// Constructions are exact up to floating-point roundoff; 1e-10 leaves about
/// five orders of magnitude of headroom over accumulated f64 error at the
/// dimensions this crate targets.
pub const DEFAULT_TOL: f64 = 1e-10;
