//! Numerical spectral toolkit for the Laplacian on a straight planar strip
//! ℝ × (0, ε) with sign-flipped Robin boundary coupling α(x):
//!
//! ```text
//!   -∂ψ/∂y(x, 0) - α(x) ψ(x, 0) = 0,      ∂ψ/∂y(x, ε) + α(x) ψ(x, ε) = 0.
//! ```
//!
//! When α(x) → α₀ at infinity the essential spectrum is [-α₀², ∞). The crate
//! computes the closed-form transversal spectrum, assembles a form-consistent
//! Q1 discretization of the truncated strip, solves the resulting symmetric
//! pencil by shift-invert Lanczos, certifies discrete eigenvalues below the
//! threshold -α₀², and evaluates the variational trial-function criterion
//! that predicts their existence from the sign of ∫(α - α₀) dx.

pub mod analysis;
pub mod band;
pub mod error;
pub mod profile;
pub mod quadrature;
pub mod strip;
pub mod transversal;

mod eigen;

pub use analysis::{
    criterion_check, find_bound_states, threshold, variational_q, variational_q_routes,
    weyl_residual, BoundState, CriterionReport, CriterionVerdict, CutoffFunction, SpectralReport,
    SweepSettings, WeylProbeSettings,
};
pub use band::{BandCholesky, BandMatrix};
pub use eigen::{dense_oracle, inertia_below, smallest_eigenpairs, EigenResult};
pub use error::{Result, SpectralError};
pub use profile::{CouplingProfile, ProfileShape};
pub use strip::{assemble, separable_reference, EndCondition, OperatorPencil, PencilSide, StripGrid};
pub use transversal::{
    basis_defect, boundary_residual, eigenfunction_derivative, eigenfunction_value,
    ground_defect, ground_norm_const, neumann_reference, robin_modes, transversal_eigenvalues,
    ModeKind, TransversalMode, TransversalParams,
};
