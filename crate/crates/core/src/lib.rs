//! Exact quantum dynamics of time-dependent harmonic oscillators, with and
//! without an inverse-square potential.
//!
//! Wavefunctions of `H₀ = p²/2 + w₀²(t)x²/2` and of the generalized
//! `H_in = p²/2M − a(xp+px) + ½Mc x² + g/(Mx²)` are obtained from the static
//! unit oscillator through chirp-and-dilation unitaries built from two
//! classical solutions `u₀, v₀`. The crate also builds the exact quadratic
//! invariants, geometric phases over periods of the Ermakov width, and a
//! Crank–Nicolson propagator that checks everything independently.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod ode;
pub mod operators;
pub mod phase;
pub mod profile;
pub mod propagate;
pub mod special;
pub mod state;
pub mod transforms;
pub mod wavefunctions;

pub use classical::{
    delta_u1, ermakov_residual, solve_linear, tau_of_t, wronskian, ClassicalTrajectory, OscillatorSpec, ScaledWidth,
};
pub use error::{Error, Result};
pub use operators::{
    apply_operator, expectation, invariance_check, matrix_element, schrodinger_residual, Expectation, GridOperator,
    HamiltonianKind, HamiltonianModel, HamiltonianSpec, InvarianceReport, InvariantFamily, QuadraticForm,
    QuadraticInvariant,
};
pub use phase::{detect_period, geometric_phase, overall_phase, PhaseReport};
pub use profile::Profile;
pub use propagate::{evolve, fidelity, EvolutionConfig};
pub use special::{build_grid, Domain, QuadratureGrid};
pub use state::GridWavefunction;
pub use transforms::{apply_u_f, apply_u_g, apply_u_s, apply_u_w0, check_composition_law, UnitSqueeze};
pub use wavefunctions::{alpha_of_g, auto_grid, phi, phi_s, psi_0, psi_s, Family, ModeSpec};

pub use num_complex::Complex64;
