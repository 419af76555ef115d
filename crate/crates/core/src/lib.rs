//! Schur multipliers over finite tracial algebras and their absolute dilations.
//!
//! A trace-form representation `d_1, …, d_n` of unitaries in a normalised
//! tracial algebra `(N, τ)` induces the Schur multiplier `m_ij = τ(d_i* d_j)`.
//! This crate builds such multipliers, constructs the shift-and-conjugate
//! dilation `U = Γ ∘ S` on a finite cyclic tensor window, checks
//! `T^k = E ∘ U^k ∘ J` numerically, and searches for representations of a
//! given multiplier by optimisation over products of unitary groups.

pub mod algebra;
pub mod dilation;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod representation;
pub mod schur;
pub mod search;

pub use algebra::{cond_expectation, AlgebraElement, TracialAlgebra};
pub use dilation::{DilationReport, DilationSystem};
pub use error::{Error, Result, ScreenFailure};
pub use linalg::{kron, CMatrix, C64};
pub use representation::{build_multiplier, gauge_normalize, TraceRepresentation};
pub use schur::{schur_apply, SchurMultiplier};
pub use search::{search, SearchConfig, SearchResult};
