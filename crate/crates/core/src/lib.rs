//! Conditional (no-photon) dynamics of two atoms in a lossy optical cavity
//! and the single-pulse CNOT gate built on a decoherence-free subspace.
//!
//! Units: ħ = 1 and every rate is given in units of the atom–cavity coupling
//! `g` (so `g = 1` unless set otherwise). Times are in units of `1/g`.
//!
//! * [`hilbert`] bases, states and operators for the Λ, Raman and shelving
//!   level schemes.
//! * [`lambda_gate`] / [`raman_gate`] / [`shelving`] conditional generators,
//!   effective models and analytic estimates.
//! * [`propagator`] precomputed-step propagation of conditioned states.
//! * [`metrics`] success probability and conditional fidelity.
//! * [`cli`] configuration, scans and CSV output behind the binary.

pub mod cli;
pub mod error;
pub mod hilbert;
pub mod lambda_gate;
pub mod linalg;
pub mod metrics;
pub mod propagator;
pub mod raman_gate;
pub mod regime;
pub mod shelving;

pub use error::{Error, Result};
pub use hilbert::{basis_state, build_basis, dfs_projector, Basis, Operator, QubitState, Scheme, StateVector};
pub use lambda_gate::{EffectiveRates, LambdaParams};
pub use metrics::{gate_run, GateResult, RunOptions, SchemeParams};
pub use propagator::{plan, ConditionalGenerator, PropagatorPlan};
pub use raman_gate::{EffectiveLambdaView, RamanParams};
pub use regime::{RegimeReport, Status};
pub use shelving::ShelvingParams;
