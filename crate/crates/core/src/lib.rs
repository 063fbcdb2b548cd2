//! Transverse curves in S³ generated by plane-wave solutions of the
//! Yajima–Oikawa long-wave/short-wave system.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! - [`herm3`]: C³ with the signature-(2,1) Hermitian form, SU(2,1) and
//!   unimodular null frames.
//! - [`yo`]: the YO system, its Lax pair, plane waves and PDE residuals.
//! - [`closure`]: the spectral cubic and the `(p, q, k, λ)` closure data.
//! - [`framegen`]: fundamental matrices, natural frames and RK4 frame
//!   integration.
//! - [`curves`]: projection to S³ and R³, geometric diagnostics and linking.
//! - [`export`]: CSV, JSON and OBJ output.
//! - [`hierarchy`]: densities, hierarchy vector fields and the Hamiltonian pair.
//! - [`validate`]: the residual suites behind the `validate` command.

pub mod closure;
pub mod curves;
pub mod error;
pub mod export;
pub mod framegen;
pub mod herm3;
pub mod hierarchy;
pub mod spectral;
pub mod validate;
pub mod yo;

pub use closure::{admissible_k_ranges, closure_from_pq, closure_residual, ClosureSolution, KCase, KRanges};
pub use curves::{CurveSample, CurveSet};
pub use error::{Error, Result};
pub use export::Format;
pub use framegen::WaveFrame;
pub use herm3::{herm_form, is_su21, is_unimodular_null_frame, C3Mat, C3Vec, FrameReport};
pub use spectral::GridFunction;
pub use validate::{Check, Report};
pub use yo::PlaneWave;
