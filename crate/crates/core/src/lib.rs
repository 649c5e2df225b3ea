//! Simulation and analysis toolkit for stimulated Raman adiabatic passage
//! (STIRAP) with DDP-optimized pulse shapes.
//!
//! The crate models the three-state Lambda system driven by pump and Stokes
//! pulses, its exact and approximate two-state reductions, and the
//! Dykhne-Davis-Pechukas estimate of nonadiabatic transitions that motivates
//! the optimized pulse families. A figure-reproduction harness and a CLI sit
//! on top.
//!
//! All numerics are generic over the scalar type through [`real::Real`];
//! the `*64` aliases below pin the common double-precision instantiation.

pub mod cli;
pub mod ddp;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod output;
pub mod propagator;
pub mod pulses;
pub mod quad;
pub mod real;
pub mod reduction;

pub use error::{Error, Result};
pub use real::{Real, C};

/// Double-precision pulse descriptor.
pub type PulseDescriptor64 = pulses::PulseDescriptor<f64>;
/// Double-precision system parameters.
pub type SystemParams64 = hamiltonian::SystemParams<f64>;
/// Double-precision integrator configuration.
pub type IntegratorConfig64 = propagator::IntegratorConfig<f64>;
/// Double-precision propagation result.
pub type PropagationResult64 = propagator::PropagationResult<f64>;
/// Double-precision effective two-state system.
pub type EffectiveTwoState64 = reduction::EffectiveTwoState<f64>;
/// Double-precision DDP model.
pub type TwoStateModel64 = ddp::TwoStateModel<f64>;
/// Double-precision DDP estimate.
pub type DdpEstimate64 = ddp::DdpEstimate<f64>;
/// Double-precision sweep specification.
pub type SweepSpec64 = experiments::SweepSpec<f64>;
/// Double-precision sweep record.
pub type SweepRecord64 = experiments::SweepRecord<f64>;

/// Single-precision pulse descriptor, for quick scouting runs.
pub type PulseDescriptor32 = pulses::PulseDescriptor<f32>;
/// Single-precision system parameters.
pub type SystemParams32 = hamiltonian::SystemParams<f32>;
