//! Numerics for double-tower bubble configurations of the polyharmonic
//! critical equation `(-Δ)^m u = K(|y|) u^{(N+2m)/(N-2m)}`.
//!
//! The library builds the explicit bubble family and its kernel, generates
//! the two mirrored rings of `k` concentration points, evaluates the exact
//! lattice interaction sums next to their large-`k` asymptotic laws, computes
//! every expansion constant of the reduced energy with error bars, locates
//! the critical parameters `(Λ₀, h₀)`, simulates the confining gradient flow
//! on the leading-order reduced energy, and estimates weighted sup-norms of
//! the ansatz error term on stratified grids.
//!
//! All core math is generic over the scalar type through [`Real`]; concrete
//! `f64` aliases for the main data types live at the crate root. Everything
//! is deterministic: Monte-Carlo routines take explicit seeds and reports
//! embed them.
//!
//! ```
//! use doubletower::energy::{ExponentBook, ReducedEnergyModel};
//! use doubletower::{ExpansionConstants, SpaceSpec, TowerConfig};
//!
//! # fn main() -> doubletower::Result<()> {
//! let spec = SpaceSpec::<f64>::new(5, 1, 2.0, 1.0)?;
//! let constants = ExpansionConstants::compute(&spec)?;
//! let exponents = ExponentBook::for_space(&spec)?;
//! let model = ReducedEnergyModel::new(spec.clone(), constants, exponents, 64)?;
//!
//! // ring radius, height and concentration scales at k = 64
//! let cfg = TowerConfig::new(spec, 64, model.mu_k(), model.lambda_k(), model.lambda0())?;
//! assert_eq!(cfg.generate_points().len(), 128);
//! assert!(model.lambda0_residual() < 1e-10);
//! # Ok(())
//! # }
//! ```

pub mod bcheck;
pub mod bubble;
pub mod constants;
pub mod curvature;
pub mod energy;
pub mod error;
pub mod fit;
pub mod flow;
pub mod gram;
pub mod interact;
pub mod kprofile;
pub mod norms;
pub mod quad;
pub mod real;
pub mod report;
pub mod space;
pub mod special;
pub mod sums;
pub mod tower;

pub use error::{Error, Result};
pub use real::Real;

pub use bubble::{Bubble, KernelBasis, ResidualReport};
pub use constants::{Constant, ExpansionConstants, Provenance};
pub use energy::{ExponentBook, ParamBox, ReducedEnergyModel};
pub use flow::{Face, FlowOptions, FlowReport, FlowStatus};
pub use kprofile::KProfile;
pub use norms::{GridRecipe, LkScanReport, NormReport, WeightedGrid};
pub use space::SpaceSpec;
pub use sums::SumReport;
pub use tower::{SectorId, Sign, TowerConfig, TowerPoint};

/// Concrete double-precision aliases for the main domain types.
pub type SpaceSpecF64 = SpaceSpec<f64>;
pub type BubbleF64 = Bubble<f64>;
pub type TowerConfigF64 = TowerConfig<f64>;
pub type ExpansionConstantsF64 = ExpansionConstants<f64>;
pub type ReducedEnergyModelF64 = ReducedEnergyModel<f64>;
pub type KProfileF64 = KProfile<f64>;
