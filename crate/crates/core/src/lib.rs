//! Weak multipeakon and multikink solutions of the two-component
//! 0-Holm-Staley system
//!
//! ```text
//! m_t = v^b m_x,   n_t = u^b n_x,   m = u - u_xx,   n = v - v_xx.
//! ```
//!
//! The crate evaluates the peakon and kink ansatz fields, integrates the
//! finite-dimensional flows their parameters obey, checks trajectories
//! against the system in the distributional sense, and provides the exact
//! solutions and symmetry actions used as oracles.
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod closed_form;
pub mod dynamics;
pub mod error;
pub mod math;
pub mod quadrature;
pub mod symmetry;
pub mod verify;

pub use ansatz::{
    validate_kink_profile, validate_peak_profile, Ansatz, Equation, Family, FieldOffset, KinkProfile,
    KinkState, PeakonProfile, PeakonState, Profile, SampleGrid, TestFunction, Train,
};
pub use closed_form::{
    coincident_peakon, kappa, relative_kink_velocity, stationary_kink, translating_kink_pair,
    CoincidentBranch, CoincidentPeakon, ConservedQuantity, ExactFlow, KinkPairParams, PairMode,
    TranslatingKinkPair,
};
pub use dynamics::{
    integrate, kink_rhs, peakon_rhs, Dynamics, EventAction, EventKind, EventPolicy, EventRecord,
    IntegratorConfig, Method, Sample, StateDerivative, StepLog, Trajectory,
};
pub use error::{Error, Result};
pub use quadrature::{PanelQuadrature, QuadratureConfig};
pub use symmetry::{
    apply_to_kink, apply_to_peakon, verify_symmetry, Checker, SymmetryKind, SymmetryReport, SymmetryTransform,
};
pub use verify::{
    compare_to_oracle, conservation_drift, ode_residual, weak_residual, Equations, ResidualEntry,
    ResidualReport, TestBattery, VerifyConfig,
};
